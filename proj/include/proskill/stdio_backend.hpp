#pragma once

#include <atomic>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "proskill/runtime.hpp"

namespace proskill::runtime {

/// Out-of-process executor speaking a line protocol over a child's stdin/stdout.
///
///   engine -> child:  START <skill> <argjson>   INTERRUPT <skill>   CANCEL <skill>
///   child -> engine:  DONE <skill> <tag> <resultjson>   EVENT <name>
class StdioBackend : public Backend {
 public:
  /// Spawns `argv[0]` with the given arguments. Throws std::runtime_error on failure.
  explicit StdioBackend(const std::vector<std::string>& argv);
  /// Uses already-open descriptors (tests); takes ownership of both.
  StdioBackend(int to_child, int from_child);
  ~StdioBackend() override;

  /// Starts the reader thread; messages are forwarded to `engine`.
  void attach(Engine& engine);

  void start_task(Engine& engine, TaskId id, const std::string& skill,
                  const std::vector<ir::CallArgument>& args) override;
  void interrupt_task(Engine& engine, TaskId id, const std::string& skill) override;
  void cancel_task(Engine& engine, TaskId id, const std::string& skill) override;

  /// Lines the child sent that did not parse.
  std::vector<std::string> rejected() const;

 private:
  int out_fd_ = -1;
  int in_fd_ = -1;
  int pid_ = -1;
  std::thread reader_;
  std::atomic<bool> stop_{false};
  mutable std::mutex mu_;
  std::map<std::string, TaskId> running_;  // skill -> task
  std::vector<std::string> rejected_;

  void send(const std::string& line);
  void read_loop(Engine* engine);
  void handle(Engine& engine, const std::string& line);
};

/// Parses one child line. Returns false if malformed.
struct StdioMessage {
  enum class Kind { Done, Event } kind = Kind::Done;
  std::string name;  // skill or event
  std::string tag;
  nlohmann::json result;
};
bool parse_stdio_line(const std::string& line, StdioMessage& out);

}  // namespace proskill::runtime
