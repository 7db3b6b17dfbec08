#pragma once

// Run configuration and its flat key file.
//
// Grammar, one setting per line:
//   line    := blank | comment | key '=' value [comment]
//   comment := '#' ...
//   key     := [a-z0-9_.]+          (e.g. detect.bypass_radius_m)
//   value   := bool | number | word | '"' text '"' | int (',' int)*
// Every key is optional; unknown or repeated keys are errors. Environment
// variables are never consulted.

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lbp/chains.hpp"
#include "lbp/detection.hpp"
#include "lbp/error.hpp"
#include "lbp/ingestion.hpp"

namespace lbp {

enum class OutputFormat { Csv, Json, Both };

inline std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
    case OutputFormat::Both: return "both";
  }
  return "both";
}

inline std::optional<OutputFormat> parse_output_format(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  if (s == "both") return OutputFormat::Both;
  return std::nullopt;
}

struct RunConfig {
  int smoothing_window = kDefaultSmoothingWindow;
  DetectConfig detect;
  ChainConfig chain;
  OutputFormat format = OutputFormat::Both;
  bool per90 = false;
  int jobs = 0;  // 0 = hardware concurrency

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  bool writes_csv() const { return format != OutputFormat::Json; }
  bool writes_json() const { return format != OutputFormat::Csv; }

  std::size_t worker_count() const {
    if (jobs > 0) return static_cast<std::size_t>(jobs);
    return std::max(1u, std::thread::hardware_concurrency());
  }
};

/// The documented defaults, in config-file form.
inline constexpr std::string_view kDefaultConfigText = R"(# defaults
smoothing_window = 7
shape.exclude_goalkeeper = true
shape.k_candidates = 2,3,4
shape.min_spread_m = 1.0
shape.linkage = ward
detect.bypass_radius_m = 10.0
detect.min_forward_m = 0.0
detect.open_play_guard_events = 2
chain.conclusion_lookahead_events = 1
output.format = both
output.per90 = false
jobs = 0
)";

inline void validate(const RunConfig& c) {
  if (c.smoothing_window < 1 || c.smoothing_window % 2 == 0)
    throw ConfigError("smoothing_window must be an odd positive integer");
  if (c.detect.shape.k_candidates.empty()) throw ConfigError("shape.k_candidates must not be empty");
  for (int k : c.detect.shape.k_candidates)
    if (k < 2) throw ConfigError("shape.k_candidates entries must be >= 2");
  if (c.detect.shape.min_spread_m < 0.0) throw ConfigError("shape.min_spread_m must be >= 0");
  if (c.detect.shape.linkage != "ward") throw ConfigError("shape.linkage must be 'ward'");
  if (!(c.detect.bypass_radius_m > 0.0)) throw ConfigError("detect.bypass_radius_m must be > 0");
  if (c.detect.min_forward_m < 0.0) throw ConfigError("detect.min_forward_m must be >= 0");
  if (c.detect.open_play_guard_events < 0)
    throw ConfigError("detect.open_play_guard_events must be >= 0");
  if (c.chain.conclusion_lookahead_events < 1)
    throw ConfigError("chain.conclusion_lookahead_events must be >= 1");
  if (c.jobs < 0) throw ConfigError("jobs must be >= 0");
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline bool parse_bool(const std::string& v, const std::string& where) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(where + ": expected true or false");
}

inline double parse_double(const std::string& v, const std::string& where) {
  double out = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError(where + ": expected a number");
  return out;
}

inline int parse_int(const std::string& v, const std::string& where) {
  int out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError(where + ": expected an integer");
  return out;
}

}  // namespace detail

/// Parses config text on top of the defaults and validates the result.
inline RunConfig parse_config(std::string_view text, const std::string& source = "config") {
  RunConfig c;
  std::map<std::string, int> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    std::string body = line;
    bool quoted = false;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '"') quoted = !quoted;
      if (body[i] == '#' && !quoted) {
        body.resize(i);
        break;
      }
    }
    body = detail::trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = detail::trim(std::string_view(body).substr(0, eq));
    std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (seen.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    seen[key] = line_no;

    if (key == "smoothing_window") {
      c.smoothing_window = detail::parse_int(value, where);
    } else if (key == "shape.exclude_goalkeeper") {
      c.detect.shape.exclude_goalkeeper = detail::parse_bool(value, where);
    } else if (key == "shape.k_candidates") {
      std::string list = value;
      if (!list.empty() && list.front() == '[' && list.back() == ']') list = list.substr(1, list.size() - 2);
      c.detect.shape.k_candidates.clear();
      std::stringstream ss(list);
      std::string item;
      while (std::getline(ss, item, ',')) c.detect.shape.k_candidates.push_back(detail::parse_int(detail::trim(item), where));
    } else if (key == "shape.min_spread_m") {
      c.detect.shape.min_spread_m = detail::parse_double(value, where);
    } else if (key == "shape.linkage") {
      c.detect.shape.linkage = value;
    } else if (key == "detect.bypass_radius_m") {
      c.detect.bypass_radius_m = detail::parse_double(value, where);
    } else if (key == "detect.min_forward_m") {
      c.detect.min_forward_m = detail::parse_double(value, where);
    } else if (key == "detect.open_play_guard_events") {
      c.detect.open_play_guard_events = detail::parse_int(value, where);
    } else if (key == "chain.conclusion_lookahead_events") {
      c.chain.conclusion_lookahead_events = detail::parse_int(value, where);
    } else if (key == "output.format") {
      auto f = parse_output_format(value);
      if (!f) throw ConfigError(where + ": output.format must be csv, json or both");
      c.format = *f;
    } else if (key == "output.per90") {
      c.per90 = detail::parse_bool(value, where);
    } else if (key == "jobs") {
      c.jobs = detail::parse_int(value, where);
    } else {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
  validate(c);
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.filename().string());
}

}  // namespace lbp
