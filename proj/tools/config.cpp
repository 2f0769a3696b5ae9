#include "config.hpp"

#include <cmath>
#include <filesystem>

#include "heatflow/errors.hpp"
#include "heatflow/model_io.hpp"

namespace heatflow::app {

namespace {

int parse_int(const KeyValue& kv) {
  const double v = parse_number(kv.value, kv.line, kv.value_column);
  if (v != std::floor(v) || std::abs(v) > 2e9) {
    throw ParseError("expected an integer for '" + kv.key + "'", kv.line, kv.value_column);
  }
  return static_cast<int>(v);
}

[[noreturn]] void bad_value(const KeyValue& kv, const std::string& expected) {
  throw ParseError("invalid value '" + kv.value + "' for '" + kv.key + "', expected " + expected,
                   kv.line, kv.value_column);
}

}  // namespace

std::vector<double> ScanConfig::t_grid() const {
  std::vector<double> grid(static_cast<std::size_t>(t_points));
  for (int i = 0; i < t_points; ++i) {
    const double f = static_cast<double>(i) / (t_points - 1);
    grid[static_cast<std::size_t>(i)] =
        t_spacing == Spacing::log ? t_min * std::pow(t_max / t_min, f)
                                  : t_min + (t_max - t_min) * f;
  }
  grid.front() = t_min;
  grid.back() = t_max;
  return grid;
}

ScanConfig parse_config(std::string_view text, const std::string& base_dir) {
  ScanConfig cfg;
  const KeyValue* t_max_kv = nullptr;
  const KeyValue* last = nullptr;
  const std::vector<KeyValue> kvs = parse_key_values(text);
  for (const KeyValue& kv : kvs) {
    last = &kv;
    const auto number = [&] { return parse_number(kv.value, kv.line, kv.value_column); };
    if (kv.key == "model") {
      if (kv.value.empty()) bad_value(kv, "a path");
      std::filesystem::path p(kv.value);
      cfg.model_file = p.is_absolute() ? p.string() : (std::filesystem::path(base_dir) / p).string();
    } else if (kv.key == "t_min") {
      cfg.t_min = number();
      if (!(cfg.t_min > 0.0)) bad_value(kv, "a positive real");
    } else if (kv.key == "t_max") {
      cfg.t_max = number();
      t_max_kv = &kv;
      if (!(cfg.t_max > 0.0)) bad_value(kv, "a positive real");
    } else if (kv.key == "t_points") {
      cfg.t_points = parse_int(kv);
      if (cfg.t_points < 3) bad_value(kv, "an integer >= 3");
    } else if (kv.key == "t_spacing") {
      if (kv.value == "log") {
        cfg.t_spacing = Spacing::log;
      } else if (kv.value == "linear") {
        cfg.t_spacing = Spacing::linear;
      } else {
        bad_value(kv, "linear or log");
      }
    } else if (kv.key == "quad.method") {
      if (kv.value == "adaptive" || kv.value == "adaptive_interval") {
        cfg.quad.method = QuadratureMethod::adaptive_interval;
      } else if (kv.value == "gauss_hermite") {
        cfg.quad.method = QuadratureMethod::gauss_hermite;
      } else {
        bad_value(kv, "adaptive or gauss_hermite");
      }
    } else if (kv.key == "quad.order") {
      cfg.quad.order = parse_int(kv);
    } else if (kv.key == "quad.truncation_radius") {
      cfg.quad.truncation_radius = number();
    } else if (kv.key == "quad.rel_tol") {
      cfg.quad.rel_tol = number();
    } else if (kv.key == "quad.abs_tol") {
      cfg.quad.abs_tol = number();
    } else if (kv.key == "outputs") {
      cfg.outputs.clear();
      std::size_t start = 0;
      while (start <= kv.value.size()) {
        const std::size_t stop = std::min(kv.value.find(',', start), kv.value.size());
        std::string item = kv.value.substr(start, stop - start);
        while (!item.empty() && item.back() == ' ') item.pop_back();
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        if (item != "csv" && item != "svg" && item != "report") {
          throw ParseError("unknown output '" + item + "', expected csv, svg or report", kv.line,
                           kv.value_column + static_cast<int>(start));
        }
        cfg.outputs.insert(item);
        start = stop + 1;
      }
    } else if (kv.key == "seed") {
      const int seed = parse_int(kv);
      if (seed < 0) bad_value(kv, "a non-negative integer");
      cfg.seed = static_cast<std::uint64_t>(seed);
    } else if (kv.key == "suite") {
      if (kv.value == "identities") {
        cfg.suite = Suite::identities;
      } else if (kv.value == "inequalities") {
        cfg.suite = Suite::inequalities;
      } else if (kv.value == "derivatives") {
        cfg.suite = Suite::derivatives;
      } else if (kv.value == "all") {
        cfg.suite = Suite::all;
      } else {
        bad_value(kv, "identities, inequalities, derivatives or all");
      }
    } else {
      throw ParseError("unknown config key '" + kv.key + "'", kv.line, 1);
    }
  }
  if (cfg.model_file.empty()) {
    throw ParseError("missing key 'model'", last ? last->line : 1, 1);
  }
  if (!(cfg.t_min < cfg.t_max)) {
    throw ParseError("t_min must be < t_max", t_max_kv ? t_max_kv->line : 1,
                     t_max_kv ? t_max_kv->value_column : 1);
  }
  try {
    cfg.quad.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), last ? last->line : 1, 1);
  }
  return cfg;
}

ScanConfig load_config(const std::string& path) {
  const std::string text = read_text_file(path);
  return parse_config(text, std::filesystem::path(path).parent_path().string());
}

}  // namespace heatflow::app
