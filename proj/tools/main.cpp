// cherimm command-line runner: executes GOTO-style programs against the
// capability memory model and reports violations.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cherimm.h"

namespace {

constexpr int kExitHalted = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParseError = 2;
constexpr int kExitCapError = 10;
constexpr int kExitLogicError = 11;
constexpr int kExitAssertFailed = 12;
constexpr int kExitOutOfSteps = 13;

void print_trace(void* /*user*/, uint64_t /*pc*/, const char* line) {
  std::cout << line << "\n";
}

int run_file(const std::string& path, const chmm_run_config& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read '" << path << "'\n";
    return kExitUsage;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  chmm_parse_error parse_err{};
  chmm_program* program = chmm_program_parse(text.c_str(), &parse_err);
  if (program == nullptr) {
    std::cerr << "parse error: " << path << ":" << parse_err.line << ":"
              << parse_err.column << ": " << parse_err.message << "\n";
    return kExitParseError;
  }

  chmm_run_result result{};
  const chmm_status rc = chmm_run(program, &config,
                                  config.trace ? print_trace : nullptr, nullptr,
                                  &result);
  chmm_program_destroy(program);
  if (rc != CHMM_OK) {
    std::cerr << "error: runner rejected the configuration ("
              << chmm_status_name(rc) << ")\n";
    return kExitUsage;
  }

  switch (result.outcome) {
    case CHMM_RUN_HALTED:
      std::cerr << "halted: code " << result.halt_code << "\n";
      return kExitHalted;
    case CHMM_RUN_FAULTED:
      if (chmm_status_is_cap_error(result.error)) {
        std::cerr << "CHERI error: " << chmm_status_name(result.error)
                  << " at pc=" << result.pc << "\n";
        return kExitCapError;
      }
      std::cerr << "logic error: " << chmm_status_name(result.error)
                << " at pc=" << result.pc << "\n";
      return kExitLogicError;
    case CHMM_RUN_ASSERT_FAILED:
      std::cerr << "assertion failed at pc=" << result.pc << "\n";
      return kExitAssertFailed;
    case CHMM_RUN_OUT_OF_STEPS:
      std::cerr << "step budget exhausted after " << result.steps << " steps\n";
      return kExitOutOfSteps;
  }
  std::cerr << "error: unknown run outcome\n";
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cherimm: capability memory model program runner"};
  app.require_subcommand(1);

  std::string path;
  chmm_run_config config{};
  config.cap_size = 16;
  config.trace = 0;
  config.max_steps = 1'000'000;

  CLI::App* run = app.add_subcommand("run", "parse and execute a program file");
  run->add_option("file", path, "program file to execute")->required();
  run->add_option("--cap-size", config.cap_size, "capability size in bytes")
      ->check(CLI::IsMember({16, 32}))
      ->capture_default_str();
  bool trace = false;
  run->add_flag("--trace", trace, "print one line per executed instruction");
  run->add_option("--max-steps", config.max_steps, "step budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  config.trace = trace ? 1 : 0;
  return run_file(path, config);
}
