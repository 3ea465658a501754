#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "laguerre/errors.hpp"
#include "laguerre/model.hpp"

namespace laguerre::lab {

enum class Estimator { quantile_1d, proxy_nd, sinkhorn_proxy };
enum class OutputFormat { csv, json };

inline std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::quantile_1d:
      return "quantile-1d";
    case Estimator::proxy_nd:
      return "proxy-nd";
    case Estimator::sinkhorn_proxy:
      return "sinkhorn-proxy";
  }
  return "unknown";
}

inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

inline Estimator estimator_from_string(std::string_view s) {
  for (Estimator e : {Estimator::quantile_1d, Estimator::proxy_nd, Estimator::sinkhorn_proxy})
    if (to_string(e) == s) return e;
  throw std::invalid_argument("unknown estimator: " + std::string(s));
}

inline OutputFormat format_from_string(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown format: " + std::string(s));
}

struct ExperimentConfig {
  ModelParams params{0.0};
  std::vector<std::size_t> n_grid{256, 512, 1024, 2048, 4096, 8192, 16384};
  std::size_t reps = 200;
  Estimator estimator = Estimator::quantile_1d;
  std::size_t ref_factor = 16;
  std::uint64_t master_seed = 0;
  double truncation_C = 3.0;
  std::string output_path;
  OutputFormat format = OutputFormat::csv;
  double sinkhorn_epsilon = 0.01;

  void validate() const {
    if (n_grid.empty()) throw std::invalid_argument("ExperimentConfig: n_grid must not be empty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      if (n_grid[i] < 3) throw std::invalid_argument("ExperimentConfig: every n must be >= 3");
      if (i && !(n_grid[i] > n_grid[i - 1])) throw std::invalid_argument("ExperimentConfig: n_grid must be strictly increasing");
    }
    if (reps < 1) throw std::invalid_argument("ExperimentConfig: reps must be >= 1");
    if (estimator == Estimator::quantile_1d && params.dim() != 1)
      throw UnsupportedError("ExperimentConfig: quantile-1d requires N = 1");
    if (estimator != Estimator::quantile_1d && ref_factor < 4)
      throw std::invalid_argument("ExperimentConfig: ref_factor must be >= 4");
    if (!(truncation_C > 0.0)) throw std::invalid_argument("ExperimentConfig: truncation_C must be > 0");
    if (!(sinkhorn_epsilon > 0.0)) throw std::invalid_argument("ExperimentConfig: sinkhorn_epsilon must be > 0");
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view s, std::string_view what) {
  s = trim(s);
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw std::invalid_argument("invalid " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

inline std::size_t parse_count(std::string_view s, std::string_view what) {
  s = trim(s);
  const auto caret = s.find('^');
  if (caret == std::string_view::npos) return parse_number<std::size_t>(s, what);
  const auto base = parse_number<std::size_t>(s.substr(0, caret), what);
  const auto expo = parse_number<unsigned>(s.substr(caret + 1), what);
  std::size_t v = 1;
  for (unsigned k = 0; k < expo; ++k) {
    if (v > (static_cast<std::size_t>(-1) / std::max<std::size_t>(base, 1)))
      throw std::invalid_argument("invalid " + std::string(what) + ": overflow");
    v *= base;
  }
  return v;
}

}  // namespace detail

/// Parses "256,512,1024" or the doubling range "2^8..2^14".
inline std::vector<std::size_t> parse_n_grid(std::string_view text) {
  text = detail::trim(text);
  std::vector<std::size_t> out;
  if (const auto dots = text.find(".."); dots != std::string_view::npos) {
    const auto lo = detail::parse_count(text.substr(0, dots), "n_grid");
    const auto hi = detail::parse_count(text.substr(dots + 2), "n_grid");
    if (lo < 1 || hi < lo) throw std::invalid_argument("invalid n_grid range: " + std::string(text));
    for (std::size_t n = lo; n <= hi; n *= 2) out.push_back(n);
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(detail::parse_count(text.substr(start, end - start), "n_grid"));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// `key = value` lines mirroring ExperimentConfig; '#' starts a comment. Unknown keys are rejected.
inline ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key == "alpha") {
      cfg.params = ModelParams::parse(value);
    } else if (key == "n_grid") {
      cfg.n_grid = parse_n_grid(value);
    } else if (key == "reps") {
      cfg.reps = detail::parse_number<std::size_t>(value, "reps");
    } else if (key == "estimator") {
      cfg.estimator = estimator_from_string(value);
    } else if (key == "ref_factor") {
      cfg.ref_factor = detail::parse_number<std::size_t>(value, "ref_factor");
    } else if (key == "master_seed") {
      cfg.master_seed = detail::parse_number<std::uint64_t>(value, "master_seed");
    } else if (key == "truncation_C") {
      cfg.truncation_C = detail::parse_number<double>(value, "truncation_C");
    } else if (key == "output_path") {
      cfg.output_path = std::string(value);
    } else if (key == "format") {
      cfg.format = format_from_string(value);
    } else if (key == "sinkhorn_epsilon") {
      cfg.sinkhorn_epsilon = detail::parse_number<double>(value, "sinkhorn_epsilon");
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace laguerre::lab
