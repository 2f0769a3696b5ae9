#pragma once

#include <string>
#include <vector>

namespace heatflow::app {

struct Panel {
  std::string label;
  std::vector<double> values;  // one per x; non-finite values break the line
};

/// Static SVG with the panels stacked vertically over a shared x axis.
/// Each panel is scaled to its own finite range and carries a dashed zero
/// line when that range straddles zero.
std::string render_stacked_panels(const std::string& title, const std::vector<double>& x,
                                  const std::vector<Panel>& panels, bool log_x);

}  // namespace heatflow::app
