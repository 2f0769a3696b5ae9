#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "heatflow/errors.hpp"
#include "heatflow/model_io.hpp"

namespace {

using namespace heatflow;
using namespace heatflow::app;

int report_parse_error(const std::string& file, const ParseError& e) {
  std::cerr << "heatflow-info: " << file;
  if (e.line() > 0) std::cerr << ':' << e.line() << ':' << e.column();
  std::cerr << ": " << e.what() << '\n';
  return kInputError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information functionals of mixtures along the heat flow"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int jobs = 0;
  const struct {
    const char* name;
    const char* help;
    int (*run)(const CommandContext&);
  } commands[] = {
      {"scan", "Scan I, J_mut and K_mut over the time grid (CSV, SVG, report)", cmd_scan},
      {"verify", "Run the identity, inequality and derivative check suites", cmd_verify},
      {"thresholds", "Print convexity thresholds and confirm them on a grid", cmd_thresholds},
      {"bounds", "Check the small-time concentration bound and its tail bound", cmd_bounds},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "key=value config file")->required();
    sub->add_option("--jobs", jobs, "worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);
    sub->add_option("--out-dir", out_dir, "directory for CSV, SVG and report files");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kInputError;
  }

  ScanConfig config;
  try {
    config = load_config(config_path);
  } catch (const ParseError& e) {
    return report_parse_error(config_path, e);
  }
  std::optional<MixtureModel> loaded;
  try {
    loaded = load_model(config.model_file);
  } catch (const ParseError& e) {
    return report_parse_error(config.model_file, e);
  }
  const MixtureModel& model = *loaded;
  if (model.merged_count() > 0) {
    std::cerr << "heatflow-info: warning: merged " << model.merged_count()
              << " duplicate component(s) in " << config.model_file << '\n';
  }

  CommandContext ctx{config, model, out_dir, Execution::openmp(jobs), std::cout};
  for (const auto& c : commands) {
    if (!app.got_subcommand(c.name)) continue;
    try {
      return c.run(ctx);
    } catch (const ParseError& e) {
      return report_parse_error(config_path, e);
    } catch (const InvalidArgument& e) {
      std::cerr << "heatflow-info: input error: " << e.what() << '\n';
      return kInputError;
    } catch (const Unsupported& e) {
      std::cerr << "heatflow-info: unsupported model: " << e.what() << '\n';
      return kInputError;
    } catch (const std::exception& e) {
      std::cerr << "heatflow-info: numeric error: " << e.what() << '\n';
      return kNumericError;
    }
  }
  return kInputError;
}
