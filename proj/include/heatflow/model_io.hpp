#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "heatflow/mixtures.hpp"

namespace heatflow {

// Flat key=value text: one pair per line, '#' starts a comment, blank lines
// are ignored, whitespace around keys and values is trimmed. Lines and
// columns are 1-based.
struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
  int value_column = 0;  // column of the first value character
};

/// Throws ParseError on a line without '=' or with an empty key, and on a
/// repeated key.
std::vector<KeyValue> parse_key_values(std::string_view text);

/// Parses a finite double spanning the whole token; ParseError otherwise.
double parse_number(std::string_view token, int line, int column);

/// Comma-separated numbers; ParseError points at the offending item.
std::vector<double> parse_number_list(const KeyValue& kv);

/// Model file:
///   dim=2
///   weights=0.5,0.5
///   centers=-1,0;1,0        (one comma list of dim numbers per component)
///   variances=0,0           (optional, default all zero)
/// Any other key is a ParseError. Structural errors from MixtureModel::create
/// are reported as ParseError at the line of the offending key.
MixtureModel parse_model(std::string_view text);

/// Reads and parses a model file; ParseError with line 0 when unreadable.
MixtureModel load_model(const std::string& path);

/// Model text that parse_model reads back to an equal model.
std::string format_model(const MixtureModel& model);

/// Reads a whole file; ParseError with line 0 when unreadable.
std::string read_text_file(const std::string& path);

}  // namespace heatflow
