#include "heatflow/model_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "heatflow/errors.hpp"

namespace heatflow {

namespace {

// Weight lists within this distance of summing to one are rescaled; a file
// cannot spell 1/3 exactly.
constexpr double kWeightSumSlack = 1e-6;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Trims [begin, end) of `line`, returning the trimmed offsets.
std::pair<std::size_t, std::size_t> trim(std::string_view line, std::size_t begin,
                                         std::size_t end) {
  while (begin < end && is_space(line[begin])) ++begin;
  while (end > begin && is_space(line[end - 1])) --end;
  return {begin, end};
}

struct Item {
  std::string_view text;
  int column;
};

// Splits `text` (which starts at `column`) on `sep`, trimming each item.
std::vector<Item> split(std::string_view text, int column, char sep) {
  std::vector<Item> items;
  std::size_t start = 0;
  while (true) {
    const std::size_t stop = std::min(text.find(sep, start), text.size());
    const auto [b, e] = trim(text, start, stop);
    items.push_back({text.substr(b, e - b), column + static_cast<int>(b)});
    if (stop == text.size()) break;
    start = stop + 1;
  }
  return items;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::vector<KeyValue> parse_key_values(std::string_view text) {
  std::vector<KeyValue> out;
  std::map<std::string, int> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, nl - pos);
    ++line_no;
    pos = nl + 1;
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    const auto [b, e] = trim(line, 0, line.size());
    if (b == e) {
      if (nl == text.size()) break;
      continue;
    }
    const std::size_t eq = line.find('=', b);
    if (eq == std::string_view::npos || eq >= e) {
      throw ParseError("expected key=value", line_no, static_cast<int>(b) + 1);
    }
    const auto [kb, ke] = trim(line, b, eq);
    if (kb == ke) throw ParseError("empty key", line_no, static_cast<int>(b) + 1);
    const auto [vb, ve] = trim(line, eq + 1, e);
    KeyValue kv;
    kv.key = std::string(line.substr(kb, ke - kb));
    kv.value = std::string(line.substr(vb, ve - vb));
    kv.line = line_no;
    kv.value_column = static_cast<int>(vb) + 1;
    if (auto [it, fresh] = seen.emplace(kv.key, line_no); !fresh) {
      std::ostringstream os;
      os << "duplicate key '" << kv.key << "' (first on line " << it->second << ")";
      throw ParseError(os.str(), line_no, static_cast<int>(kb) + 1);
    }
    out.push_back(std::move(kv));
    if (nl == text.size()) break;
  }
  return out;
}

double parse_number(std::string_view token, int line, int column) {
  if (token.empty()) throw ParseError("expected a number", line, column);
  // from_chars rejects a leading '+'.
  std::string_view digits = token;
  if (digits.front() == '+') digits.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (res.ec != std::errc() || res.ptr != digits.data() + digits.size() || !std::isfinite(value)) {
    throw ParseError("invalid number '" + std::string(token) + "'", line, column);
  }
  return value;
}

std::vector<double> parse_number_list(const KeyValue& kv) {
  std::vector<double> out;
  for (const Item& item : split(kv.value, kv.value_column, ',')) {
    out.push_back(parse_number(item.text, kv.line, item.column));
  }
  return out;
}

MixtureModel parse_model(std::string_view text) {
  const std::vector<KeyValue> kvs = parse_key_values(text);
  const KeyValue* dim_kv = nullptr;
  const KeyValue* weights_kv = nullptr;
  const KeyValue* centers_kv = nullptr;
  const KeyValue* variances_kv = nullptr;
  for (const KeyValue& kv : kvs) {
    if (kv.key == "dim") {
      dim_kv = &kv;
    } else if (kv.key == "weights") {
      weights_kv = &kv;
    } else if (kv.key == "centers") {
      centers_kv = &kv;
    } else if (kv.key == "variances") {
      variances_kv = &kv;
    } else {
      throw ParseError("unknown model key '" + kv.key + "'", kv.line, 1);
    }
  }
  const int last_line = kvs.empty() ? 1 : kvs.back().line;
  if (!weights_kv) throw ParseError("missing key 'weights'", last_line, 1);
  if (!centers_kv) throw ParseError("missing key 'centers'", last_line, 1);

  int dim = 1;
  if (dim_kv) {
    const double d = parse_number(dim_kv->value, dim_kv->line, dim_kv->value_column);
    if (d != std::floor(d) || d < 1 || d > 64) {
      throw ParseError("dim must be an integer in [1, 64]", dim_kv->line, dim_kv->value_column);
    }
    dim = static_cast<int>(d);
  }

  std::vector<double> weights = parse_number_list(*weights_kv);
  double total = 0.0;
  for (double w : weights) total += w;
  if (std::abs(total - 1.0) <= kWeightSumSlack) {
    for (double& w : weights) w /= total;
  }

  std::vector<Point> centers;
  for (const Item& comp : split(centers_kv->value, centers_kv->value_column, ';')) {
    const std::vector<Item> coords = split(comp.text, comp.column, ',');
    if (static_cast<int>(coords.size()) != dim) {
      std::ostringstream os;
      os << "center has " << coords.size() << " coordinates, expected " << dim;
      throw ParseError(os.str(), centers_kv->line, comp.column);
    }
    Point p(dim);
    for (int i = 0; i < dim; ++i) {
      p(i) = parse_number(coords[static_cast<std::size_t>(i)].text, centers_kv->line,
                          coords[static_cast<std::size_t>(i)].column);
    }
    centers.push_back(std::move(p));
  }

  std::vector<double> variances(weights.size(), 0.0);
  if (variances_kv) variances = parse_number_list(*variances_kv);

  try {
    return MixtureModel::create(dim, std::move(weights), std::move(centers), std::move(variances));
  } catch (const InvalidArgument& e) {
    const KeyValue* at = weights_kv;
    const std::string msg = e.what();
    if (msg.find("varian") != std::string::npos && variances_kv) at = variances_kv;
    if (msg.find("center") != std::string::npos) at = centers_kv;
    throw ParseError(msg, at->line, at->value_column);
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'", 0, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MixtureModel load_model(const std::string& path) { return parse_model(read_text_file(path)); }

std::string format_model(const MixtureModel& model) {
  std::ostringstream os;
  os << "dim=" << model.dim() << '\n';
  os << "weights=";
  for (std::size_t i = 0; i < model.size(); ++i) {
    os << (i ? "," : "") << format_double(model.weights()[i]);
  }
  os << "\ncenters=";
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (i) os << ';';
    for (int d = 0; d < model.dim(); ++d) {
      os << (d ? "," : "") << format_double(model.centers()[i](d));
    }
  }
  os << "\nvariances=";
  for (std::size_t i = 0; i < model.size(); ++i) {
    os << (i ? "," : "") << format_double(model.variances()[i]);
  }
  os << '\n';
  return os.str();
}

}  // namespace heatflow
