#include "microgen.hpp"

#include <random>
#include <sstream>
#include <vector>

namespace oracle {

namespace {

struct Gen {
  std::mt19937_64 rng;
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool coin() { return pick(0, 1) == 1; }
};

struct Sv {
  std::string name;
  std::vector<std::string> values;
};

}  // namespace

MicroProgram generate(std::uint64_t seed) {
  Gen g{std::mt19937_64(seed)};
  std::ostringstream out;
  std::vector<Sv> svs;
  const int nsv = g.pick(1, 3);
  for (int i = 0; i < nsv; ++i) {
    Sv sv{"s" + std::to_string(i), {}};
    const int nv = g.pick(2, 3);
    for (int v = 0; v < nv; ++v) sv.values.push_back("V" + std::to_string(v));
    out << "(defsv " << sv.name << "\n  :states (";
    for (int v = 0; v < nv; ++v) out << (v ? " " : "") << sv.values[v];
    out << ")\n  :init " << sv.values[g.pick(0, nv - 1)] << "\n  :transitions ";
    if (g.coin()) {
      out << ":all";
    } else {
      out << "(";
      bool any = false;
      for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b)
          if (a != b && (g.coin() || (!any && a == nv - 1 && b == nv - 2))) {
            out << "(" << sv.values[a] << " " << sv.values[b] << ")";
            any = true;
          }
      out << ")";
    }
    out << ")\n\n";
    svs.push_back(sv);
  }
  auto cond = [&](bool allow_neg) {
    const Sv& sv = svs[g.pick(0, nsv - 1)];
    const std::string c = "(" + sv.name + " " + sv.values[g.pick(0, sv.values.size() - 1)] + ")";
    return allow_neg && g.pick(0, 3) == 0 ? "(~ " + c + ")" : c;
  };
  auto assign = [&] {
    const Sv& sv = svs[g.pick(0, nsv - 1)];
    return "(" + sv.name + " " + sv.values[g.pick(0, sv.values.size() - 1)] + ")";
  };

  const int nev = g.pick(1, 3);
  for (int e = 0; e < nev; ++e)
    out << "(defevent e" << e << "\n  :effects " << assign() << ")\n\n";

  const int lo = g.pick(0, 3);
  const int hi = g.pick(lo, 5);
  std::vector<std::string> succ{"done"}, fail;
  if (g.coin()) succ.push_back("alt");
  if (g.coin()) fail.push_back("broken");
  out << "(defskill act\n";
  if (g.coin()) out << "  :precondition (ready " << cond(true) << ")\n";
  if (g.coin()) out << "  :start " << assign() << "\n";
  if (g.coin()) {
    out << "  :invariant (holds (:guard " << cond(true);
    if (g.coin()) out << " :effects " << assign();
    out << "))\n";
  }
  out << "  :time_interval [" << lo << "," << hi << "]\n  :action (act)\n";
  const bool interruptible = g.coin();
  if (interruptible) out << "  :interrupt (:effects " << (g.coin() ? assign() : "()") << ")\n";
  auto outcomes = [&](const char* key, const std::vector<std::string>& tags) {
    if (tags.empty()) return;
    out << "  " << key << " (";
    for (const auto& t : tags) {
      out << t << " (:effects " << (g.coin() ? assign() : "()");
      if (g.coin()) out << " :postcondition " << cond(false);
      out << ") ";
    }
    out << ")\n";
  };
  outcomes(":success", succ);
  outcomes(":failure", fail);
  out << ")\n\n";

  if (g.pick(0, 3) != 0) {
    const int clo = g.pick(0, 2);
    const int chi = g.pick(clo, 5);
    out << "(defskill main\n";
    if (g.coin()) out << "  :time_interval [" << clo << "," << chi << "]\n";
    if (g.coin()) out << "  :start " << assign() << "\n";
    out << "  :success (ok (:effects ()))\n  :failure (ko (:effects ()))\n  :body (";
    switch (g.pick(0, 3)) {
      case 0:
        out << "(act) (if (= act.status success) (success ok)) (failure ko)";
        break;
      case 1:
        out << "(^ " << cond(false) << ") (act) (printf \"after act\")";
        break;
      case 2:
        out << "(^ " << g.pick(1, 2) << ") (act) (if (= act.status failure) (failure ko))";
        break;
      default:
        if (interruptible)
          out << "(act) (^ 1) (act.interrupt) (success ok)";
        else
          out << "(act) (^ 1) (success ok)";
        break;
    }
    out << "))\n";
  }

  MicroProgram mp;
  mp.source = out.str();
  mp.env.max_occurrences = g.pick(0, 2);
  mp.env.interrupts = g.coin();
  mp.env.legal_only = g.coin();
  mp.env.quiescent = g.coin();
  return mp;
}

}  // namespace oracle
