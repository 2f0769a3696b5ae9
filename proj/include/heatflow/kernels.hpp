#pragma once

#include <exception>
#include <vector>

#include "heatflow/functionals.hpp"
#include "heatflow/parallel.hpp"

namespace heatflow {

// Data-parallel kernels. Each has one loop body shared by the serial
// reference and the OpenMP path; results are stored by index, so both paths
// return identical values.

struct MutualScan {
  std::vector<MutualTriple> values;
  std::vector<std::exception_ptr> errors;  // null where the point succeeded

  bool ok() const;
  /// Index of the first failed point, or values.size().
  std::size_t first_failure() const;
};

/// mutual_functionals at every grid time.
MutualScan scan_mutual(const MixtureModel& initial, const std::vector<double>& t_grid,
                       const QuadratureSpec& spec, const Execution& exec);

/// -(log rho)'' of a 1-D smooth model at each grid point.
std::vector<double> log_concavity_profile(const MixtureModel& line,
                                          const std::vector<double>& grid,
                                          const Execution& exec);

}  // namespace heatflow
