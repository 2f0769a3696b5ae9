#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace heatflow::app {

/// Shortest decimal text that reads back to the same double.
std::string format_real(double v);

/// Writes comma-separated rows and flushes after each one, so a failure
/// midway leaves every finished row on disk.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& cells);
  /// Trailing comment row marking a scan that stopped early.
  void mark_incomplete();

 private:
  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace heatflow::app
