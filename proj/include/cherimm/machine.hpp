#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "cherimm/heap.hpp"
#include "cherimm/program.hpp"

namespace cherimm {

struct RunConfig {
  std::uint32_t cap_size = kDefaultCapSize;
  bool trace = false;
  std::uint64_t max_steps = 1'000'000;
};

enum class StatusKind : std::uint8_t { Running, Halted, Faulted, AssertFailed };

struct Status {
  StatusKind kind = StatusKind::Running;
  int halt_code = 0;
  MemErr error = MemErr::TagViolation;  // valid when kind == Faulted
  std::size_t pc = 0;                   // fault / failed-assert site

  bool operator==(const Status&) const = default;
};

/// Environment values: untyped 64-bit integers plus the capability-shaped
/// values that loads can produce.
using EnvValue = std::variant<std::int64_t, Capability, CapFragValue, Undef>;

/// Executes one program against a fresh heap.  All failure modes land in
/// the status; step() itself never throws.
class Machine {
 public:
  Machine(const Program& program, RunConfig config);

  /// Executes the instruction at pc.  Requires a Running status.
  void step();

  bool running() const { return status_.kind == StatusKind::Running; }
  const Status& status() const { return status_; }
  std::size_t pc() const { return pc_; }
  std::uint64_t steps_taken() const { return steps_; }
  const Heap& heap() const { return heap_; }
  const std::map<std::string, EnvValue>& env() const { return env_; }
  const EnvValue* lookup(const std::string& var) const;

  /// Receives `pc=<n> <instruction text>` before each executed instruction.
  void set_trace_sink(std::function<void(std::size_t, const std::string&)> sink);

 private:
  Result<EnvValue> eval(const Expr& e) const;
  Result<std::int64_t> eval_int(const Expr& e) const;
  Result<Capability> eval_cap(const Expr& e) const;
  void fault(MemErr err);

  const Program& program_;
  RunConfig config_;
  Heap heap_;
  std::map<std::string, EnvValue> env_;
  std::size_t pc_ = 0;
  std::uint64_t steps_ = 0;
  Status status_;
  std::function<void(std::size_t, const std::string&)> trace_sink_;
};

struct RunOutcome {
  Status status;
  bool out_of_steps = false;
  std::uint64_t steps = 0;
  std::vector<std::string> trace;
};

/// Builds a machine, runs it to completion or step exhaustion, and collects
/// the trace when config.trace is set.
RunOutcome run_program(const Program& program, const RunConfig& config);

std::string format_trace_line(std::size_t pc, const std::string& text);

}  // namespace cherimm
