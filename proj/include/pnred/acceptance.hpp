#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pnred {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool ok = true;
  bool ill_conditioned = false;
  std::vector<std::string> failures;  // one line per failed sub-check
  int subchecks = 0;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 7;
  int residual_points = 200;  // pointwise residual checks
  int riesz_points = 100;
  int lift_pairs = 30;
  int random_forms = 50;
};

// Runs the acceptance criteria in order; `only` restricts to the listed ids.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {}, const std::vector<int>& only = {});

}  // namespace pnred
