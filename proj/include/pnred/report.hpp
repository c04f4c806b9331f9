#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pnred/verdict.hpp"

namespace pnred {

inline constexpr const char* kVersion = "1.0.0";

struct CheckRecord {
  std::string name;
  bool ok = true;
  std::string witness;
  double seconds = 0.0;
  bool ill_conditioned = false;
};

// Exit codes: 0 all checks pass, 1 some check failed, 2 the input could not
// be parsed, 3 some numeric rank decision was ill-conditioned. An
// ill-conditioned flag outranks a failure because it can flip the verdict.
enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitParse = 2, kExitIllConditioned = 3 };

struct Report {
  std::string command;
  std::string inputs_digest;
  double tolerance = 0.0;
  std::optional<std::uint64_t> seed;
  std::vector<CheckRecord> checks;
  nlohmann::json data = nlohmann::json::object();  // command-specific payload

  void add(std::string name, const Verdict& v, double seconds = 0.0, bool ill = false);
  bool ok() const;
  bool ill_conditioned() const;
  int exit_code() const;
};

// Runs fn() -> Verdict, recording the wall time. Exceptions become failing
// checks whose witness is the exception message.
template <class F>
void timed_check(Report& report, const std::string& name, F&& fn, bool ill = false) {
  auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = fn();
  } catch (const std::exception& err) {
    v = Verdict::fail(err.what());
  }
  std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
  report.add(name, v, dt.count(), ill);
}

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_digest(const std::string& text);

nlohmann::json to_json(const Report& report);
std::string render_text(const Report& report);

}  // namespace pnred
