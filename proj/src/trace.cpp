#include "proskill/trace.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

namespace proskill {

nlohmann::json TraceEvent::to_json() const {
  nlohmann::json j;
  j["tick"] = tick;
  j["kind"] = kind;
  auto opt = [&](const char* key, const std::string& v) {
    if (!v.empty()) j[key] = v;
  };
  opt("process", process);
  opt("transition", transition);
  opt("var", var);
  opt("old", old_value);
  opt("new", new_value);
  opt("message", message);
  return j;
}

TraceEvent TraceEvent::from_json(const nlohmann::json& j) {
  TraceEvent e;
  e.tick = j.at("tick").get<std::int64_t>();
  e.kind = j.at("kind").get<std::string>();
  auto opt = [&](const char* key, std::string& v) {
    if (j.contains(key)) v = j[key].get<std::string>();
  };
  opt("process", e.process);
  opt("transition", e.transition);
  opt("var", e.var);
  opt("old", e.old_value);
  opt("new", e.new_value);
  opt("message", e.message);
  return e;
}

std::string TraceEvent::to_line() const { return to_json().dump(); }

void write_trace(std::ostream& out, const Trace& trace) {
  for (const auto& e : trace) out << e.to_line() << '\n';
}

Trace read_trace(std::istream& in) {
  Trace t;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      t.push_back(TraceEvent::from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& ex) {
      throw std::runtime_error("trace line " + std::to_string(n) + ": " + ex.what());
    }
  }
  return t;
}

}  // namespace proskill
