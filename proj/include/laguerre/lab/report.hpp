#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "laguerre/lab/config.hpp"
#include "laguerre/lab/experiment.hpp"
#include "laguerre/lab/rate.hpp"
#include "laguerre/stats.hpp"

namespace laguerre::lab {

using json = nlohmann::ordered_json;

namespace detail {

inline std::string csv_number(double v) { return std::isnan(v) ? std::string("nan") : format_double(v); }

inline json json_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline double number_from_json(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open output file: " + path.string());
  f << content;
  f.close();
  if (!f) throw std::runtime_error("failed writing output file: " + path.string());
}

}  // namespace detail

/// `n,rep,w2sq,estimator,seed`, one row per repetition in (n, rep) order.
inline std::string records_csv(const RateReport& rep) {
  std::ostringstream out;
  out << "n,rep,w2sq,estimator,seed\n";
  const auto est = to_string(rep.config.estimator);
  for (const auto& r : rep.records)
    out << r.n << ',' << r.rep << ',' << detail::csv_number(r.w2sq) << ',' << est << ',' << r.seed << '\n';
  return out.str();
}

/// `n,mean_w2sq,stderr,predicted_rate,regime`.
inline std::string summary_csv(const RateReport& rep) {
  std::ostringstream out;
  out << "n,mean_w2sq,stderr,predicted_rate,regime\n";
  const auto regime = to_string(rep.regime);
  for (const auto& s : rep.summary)
    out << s.n << ',' << detail::csv_number(s.mean_w2sq) << ',' << detail::csv_number(s.stderr_) << ','
        << detail::csv_number(s.predicted_rate) << ',' << regime << '\n';
  return out.str();
}

/// Sibling summary path: "dir/run.csv" -> "dir/run_summary.csv".
inline std::filesystem::path summary_path(const std::filesystem::path& records) {
  auto p = records;
  const auto ext = p.has_extension() ? p.extension().string() : std::string(".csv");
  p.replace_filename(p.stem().string() + "_summary" + ext);
  return p;
}

inline json config_to_json(const ExperimentConfig& cfg) {
  json j;
  json alpha = json::array();
  for (double a : cfg.params.alpha()) alpha.push_back(format_double(a));
  j["alpha"] = alpha;
  j["n_grid"] = cfg.n_grid;
  j["reps"] = cfg.reps;
  j["estimator"] = to_string(cfg.estimator);
  j["ref_factor"] = cfg.ref_factor;
  j["master_seed"] = cfg.master_seed;
  j["truncation_C"] = cfg.truncation_C;
  j["sinkhorn_epsilon"] = cfg.sinkhorn_epsilon;
  j["format"] = to_string(cfg.format);
  return j;
}

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  std::string alpha;
  for (const auto& a : j.at("alpha")) {
    if (!alpha.empty()) alpha += ',';
    alpha += a.get<std::string>();
  }
  cfg.params = ModelParams::parse(alpha);
  cfg.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
  cfg.reps = j.at("reps").get<std::size_t>();
  cfg.estimator = estimator_from_string(j.at("estimator").get<std::string>());
  cfg.ref_factor = j.at("ref_factor").get<std::size_t>();
  cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  cfg.truncation_C = j.at("truncation_C").get<double>();
  cfg.sinkhorn_epsilon = j.at("sinkhorn_epsilon").get<double>();
  cfg.format = format_from_string(j.at("format").get<std::string>());
  return cfg;
}

inline json report_to_json(const RateReport& rep) {
  json j;
  j["config"] = config_to_json(rep.config);
  json records = json::array();
  for (const auto& r : rep.records)
    records.push_back({{"n", r.n}, {"rep", r.rep}, {"w2sq", detail::json_number(r.w2sq)}, {"seed", r.seed}, {"ok", r.ok}});
  j["records"] = records;
  json summary = json::array();
  for (const auto& s : rep.summary)
    summary.push_back({{"n", s.n},
                       {"mean_w2sq", detail::json_number(s.mean_w2sq)},
                       {"stderr", detail::json_number(s.stderr_)},
                       {"reps", s.reps},
                       {"failures", s.failures},
                       {"predicted_rate", detail::json_number(s.predicted_rate)}});
  j["summary"] = summary;
  j["fitted_slope"] = detail::json_number(rep.fitted_slope);
  j["slope_stderr"] = detail::json_number(rep.slope_stderr);
  j["regime"] = to_string(rep.regime);
  return j;
}

inline RateReport report_from_json(const json& j) {
  RateReport rep;
  rep.config = config_from_json(j.at("config"));
  for (const auto& r : j.at("records")) {
    RepRecord rec;
    rec.n = r.at("n").get<std::size_t>();
    rec.rep = r.at("rep").get<std::size_t>();
    rec.w2sq = detail::number_from_json(r.at("w2sq"));
    rec.seed = r.at("seed").get<std::uint64_t>();
    rec.ok = r.at("ok").get<bool>();
    rep.records.push_back(rec);
  }
  for (const auto& s : j.at("summary")) {
    RateSummary sum;
    sum.n = s.at("n").get<std::size_t>();
    sum.mean_w2sq = detail::number_from_json(s.at("mean_w2sq"));
    sum.stderr_ = detail::number_from_json(s.at("stderr"));
    sum.reps = s.at("reps").get<std::size_t>();
    sum.failures = s.at("failures").get<std::size_t>();
    sum.predicted_rate = detail::number_from_json(s.at("predicted_rate"));
    rep.summary.push_back(sum);
  }
  rep.fitted_slope = detail::number_from_json(j.at("fitted_slope"));
  rep.slope_stderr = detail::number_from_json(j.at("slope_stderr"));
  rep.regime = regime_from_string(j.at("regime").get<std::string>());
  return rep;
}

inline RateReport parse_report_json(const std::string& text) { return report_from_json(json::parse(text)); }

inline std::string report_json_text(const RateReport& rep) { return report_to_json(rep).dump(2) + "\n"; }

/// Writes the report to cfg.output_path (csv: records plus the sibling summary file; json:
/// one file) and returns the paths written. Existing files are overwritten.
inline std::vector<std::filesystem::path> emit_report(const RateReport& rep, const ExperimentConfig& cfg) {
  if (cfg.output_path.empty()) throw std::invalid_argument("emit_report: output_path is empty");
  const std::filesystem::path path(cfg.output_path);
  if (cfg.format == OutputFormat::json) {
    detail::write_file(path, report_json_text(rep));
    return {path};
  }
  const auto sum = summary_path(path);
  detail::write_file(path, records_csv(rep));
  detail::write_file(sum, summary_csv(rep));
  return {path, sum};
}

}  // namespace laguerre::lab
