#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "heatflow/numerics.hpp"

namespace heatflow::app {

enum class Spacing { linear, log };
enum class Suite { identities, inequalities, derivatives, all };

struct ScanConfig {
  std::string model_file;  // resolved against the config file's directory
  double t_min = 0.01;
  double t_max = 10.0;
  int t_points = 100;
  Spacing t_spacing = Spacing::log;
  QuadratureSpec quad;
  std::set<std::string> outputs{"csv", "svg", "report"};
  std::uint64_t seed = 1;
  Suite suite = Suite::all;

  bool wants(const std::string& output) const { return outputs.count(output) != 0; }
  /// t_points times from t_min to t_max inclusive.
  std::vector<double> t_grid() const;
};

/// Grammar (one key=value per line, '#' comments):
///   model=<path>            required
///   t_min=<real> t_max=<real> t_points=<int >= 3> t_spacing=linear|log
///   quad.method=adaptive|gauss_hermite quad.order=<int>
///   quad.truncation_radius=<real> quad.rel_tol=<real> quad.abs_tol=<real>
///   outputs=<comma list of csv, svg, report>
///   seed=<int>
///   suite=identities|inequalities|derivatives|all
/// Violations raise ParseError with the line and column of the value.
ScanConfig parse_config(std::string_view text, const std::string& base_dir);
ScanConfig load_config(const std::string& path);

}  // namespace heatflow::app
