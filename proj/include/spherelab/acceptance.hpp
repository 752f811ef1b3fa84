#pragma once

#include <functional>
#include <string>
#include <vector>

namespace spherelab {

using GegenbauerEvaluator = std::function<double(int k, int n, double t)>;

struct AcceptanceOptions {
  /// Evaluator checked against the moment oracle; replaceable for mutation tests.
  GegenbauerEvaluator gegenbauer;
  int workers = 1;
};

struct AcceptanceResult {
  int id = 0;
  std::string name;
  bool condition = false;  ///< the numerical check alone
  bool within_budget = false;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  std::string detail;

  bool passed() const { return condition && within_budget; }
};

inline constexpr int kAcceptanceCriteria = 10;

AcceptanceResult run_criterion(int id, const AcceptanceOptions& options = {});
std::vector<AcceptanceResult> run_acceptance(const AcceptanceOptions& options = {});

/// One line per criterion. Timing is omitted unless requested so that the
/// summary is deterministic.
std::string format_acceptance_line(const AcceptanceResult& result, bool with_timing = false);

}  // namespace spherelab
