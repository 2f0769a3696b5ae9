#include "heatflow/kernels.hpp"

#include <algorithm>

namespace heatflow {

bool MutualScan::ok() const {
  return std::none_of(errors.begin(), errors.end(),
                      [](const std::exception_ptr& e) { return static_cast<bool>(e); });
}

std::size_t MutualScan::first_failure() const {
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i]) return i;
  }
  return values.size();
}

MutualScan scan_mutual(const MixtureModel& initial, const std::vector<double>& t_grid,
                       const QuadratureSpec& spec, const Execution& exec) {
  MutualScan scan;
  scan.values.resize(t_grid.size());
  scan.errors = try_for_each_index(t_grid.size(), exec, [&](std::size_t i) {
    scan.values[i] = mutual_functionals(initial, t_grid[i], spec);
  });
  return scan;
}

std::vector<double> log_concavity_profile(const MixtureModel& line,
                                          const std::vector<double>& grid,
                                          const Execution& exec) {
  std::vector<double> alpha(grid.size());
  for_each_index(grid.size(), exec, [&](std::size_t i) {
    alpha[i] = -local_log_density_1d(line, grid[i]).hessian;
  });
  return alpha;
}

}  // namespace heatflow
