#include "proskill/stdio_backend.hpp"

#include <csignal>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace proskill::runtime {

bool parse_stdio_line(const std::string& line, StdioMessage& out) {
  std::istringstream in(line);
  std::string verb;
  in >> verb;
  if (verb == "EVENT") {
    out.kind = StdioMessage::Kind::Event;
    if (!(in >> out.name)) return false;
    std::string extra;
    return !(in >> extra);
  }
  if (verb != "DONE") return false;
  out.kind = StdioMessage::Kind::Done;
  if (!(in >> out.name >> out.tag)) return false;
  std::string rest;
  std::getline(in, rest);
  const auto first = rest.find_first_not_of(" \t");
  if (first == std::string::npos) {
    out.result = nullptr;
    return true;
  }
  out.result = nlohmann::json::parse(rest.substr(first), nullptr, false);
  return !out.result.is_discarded();
}

StdioBackend::StdioBackend(const std::vector<std::string>& argv) {
  if (argv.empty()) throw std::runtime_error("stdio backend: empty command");
  int to_child[2], from_child[2];
  if (pipe(to_child) != 0) throw std::runtime_error("pipe failed");
  if (pipe(from_child) != 0) {
    close(to_child[0]);
    close(to_child[1]);
    throw std::runtime_error("pipe failed");
  }
  pid_ = fork();
  if (pid_ < 0) throw std::runtime_error("fork failed");
  if (pid_ == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  out_fd_ = to_child[1];
  in_fd_ = from_child[0];
  std::signal(SIGPIPE, SIG_IGN);
}

StdioBackend::StdioBackend(int to_child, int from_child) : out_fd_(to_child), in_fd_(from_child) {
  std::signal(SIGPIPE, SIG_IGN);
}

StdioBackend::~StdioBackend() {
  stop_ = true;
  if (out_fd_ >= 0) close(out_fd_);
  if (reader_.joinable()) reader_.join();
  if (in_fd_ >= 0) close(in_fd_);
  if (pid_ > 0) {
    int status = 0;
    if (waitpid(pid_, &status, WNOHANG) == 0) {
      kill(pid_, SIGTERM);
      waitpid(pid_, &status, 0);
    }
  }
}

void StdioBackend::attach(Engine& engine) {
  reader_ = std::thread([this, &engine] { read_loop(&engine); });
}

void StdioBackend::send(const std::string& line) {
  std::string data = line + "\n";
  const char* p = data.data();
  std::size_t left = data.size();
  while (left > 0) {
    const ssize_t n = write(out_fd_, p, left);
    if (n <= 0) return;
    p += n;
    left -= static_cast<std::size_t>(n);
  }
}

void StdioBackend::start_task(Engine&, TaskId id, const std::string& skill,
                              const std::vector<ir::CallArgument>& args) {
  nlohmann::json a = nlohmann::json::object();
  for (const auto& arg : args) a[arg.name] = arg.value;
  {
    std::lock_guard lock(mu_);
    running_[skill] = id;
  }
  send("START " + skill + " " + a.dump());
}

void StdioBackend::interrupt_task(Engine&, TaskId, const std::string& skill) {
  send("INTERRUPT " + skill);
}

void StdioBackend::cancel_task(Engine&, TaskId id, const std::string& skill) {
  {
    std::lock_guard lock(mu_);
    if (auto it = running_.find(skill); it != running_.end() && it->second == id) running_.erase(it);
  }
  send("CANCEL " + skill);
}

std::vector<std::string> StdioBackend::rejected() const {
  std::lock_guard lock(mu_);
  return rejected_;
}

void StdioBackend::handle(Engine& engine, const std::string& line) {
  StdioMessage msg;
  if (!parse_stdio_line(line, msg)) {
    std::lock_guard lock(mu_);
    rejected_.push_back(line);
    return;
  }
  if (msg.kind == StdioMessage::Kind::Event) {
    engine.inject_event(msg.name);
    return;
  }
  TaskId id = 0;
  {
    std::lock_guard lock(mu_);
    auto it = running_.find(msg.name);
    if (it == running_.end()) {
      rejected_.push_back(line);
      return;
    }
    id = it->second;
    running_.erase(it);
  }
  engine.post_completion(id, msg.tag, msg.result);
}

void StdioBackend::read_loop(Engine* engine) {
  std::string buf;
  char chunk[4096];
  while (!stop_) {
    pollfd pfd{in_fd_, POLLIN, 0};
    const int r = poll(&pfd, 1, 50);
    if (r < 0) break;
    if (r == 0) continue;
    const ssize_t n = read(in_fd_, chunk, sizeof chunk);
    if (n <= 0) break;
    buf.append(chunk, static_cast<std::size_t>(n));
    std::size_t pos;
    while ((pos = buf.find('\n')) != std::string::npos) {
      std::string line = buf.substr(0, pos);
      buf.erase(0, pos + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) handle(*engine, line);
    }
  }
}

}  // namespace proskill::runtime
