#pragma once

#include <ostream>
#include <string>

#include "config.hpp"
#include "heatflow/mixtures.hpp"
#include "heatflow/parallel.hpp"

namespace heatflow::app {

enum ExitCode { kSuccess = 0, kCheckFailure = 1, kInputError = 2, kNumericError = 3 };

struct CommandContext {
  ScanConfig config;
  MixtureModel model;
  std::string out_dir = ".";
  Execution exec;
  std::ostream& out;
};

/// Each command returns kSuccess or kCheckFailure and lets library
/// exceptions escape; the caller maps them to exit codes.
int cmd_scan(const CommandContext& ctx);
int cmd_verify(const CommandContext& ctx);
int cmd_thresholds(const CommandContext& ctx);
int cmd_bounds(const CommandContext& ctx);

/// One-line description of a model for report headers.
std::string describe_model(const MixtureModel& model);

}  // namespace heatflow::app
