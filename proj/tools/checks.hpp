#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "heatflow/mixtures.hpp"
#include "heatflow/parallel.hpp"

namespace heatflow::app {

enum class CheckStatus { pass, fail, skip };

struct CheckResult {
  std::string name;
  std::string anchor;  // the identity or inequality being checked
  double max_violation = 0.0;
  double tolerance = 0.0;
  CheckStatus status = CheckStatus::skip;
  std::string note;  // reason for a skip, or where the worst violation sits
};

struct VerifyOptions {
  std::vector<double> t_grid;
  QuadratureSpec quad;
  std::uint64_t seed = 1;
  int hessian_samples = 200;
  Execution exec;
};

std::vector<CheckResult> derivative_checks(const MixtureModel& initial, const VerifyOptions& opt);
std::vector<CheckResult> identity_checks(const MixtureModel& initial, const VerifyOptions& opt);
std::vector<CheckResult> inequality_checks(const MixtureModel& initial, const VerifyOptions& opt);

std::vector<CheckResult> run_suite(const MixtureModel& initial, Suite suite,
                                   const VerifyOptions& opt);

/// "PASS|FAIL|SKIP  name  [anchor]  max_violation=..  tol=..  note", one per line.
void print_checks(std::ostream& out, const std::vector<CheckResult>& checks);

bool all_pass(const std::vector<CheckResult>& checks);

}  // namespace heatflow::app
