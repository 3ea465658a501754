#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "laguerre/kernel.hpp"
#include "laguerre/lab.hpp"
#include "laguerre/model.hpp"
#include "laguerre/proof/suite.hpp"
#include "laguerre/sampling.hpp"
#include "laguerre/stats.hpp"
#include "laguerre/transport.hpp"

using namespace laguerre;
using json = nlohmann::ordered_json;

namespace {

struct Common {
  std::string alpha = "0";
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--alpha", c.alpha, "comma list of decimals")->capture_default_str();
  sub->add_option("--seed", c.seed, "master seed")->capture_default_str();
  sub->add_option("--out", c.out, "output path (stdout when omitted)");
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) v.push_back(std::stod(item));
  return v;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << content;
  if (!f) throw std::runtime_error("failed writing output file: " + path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int run_sample(const Common& c, std::size_t n) {
  const auto params = ModelParams::parse(c.alpha);
  const auto s = sample_mu_alpha(params, n, c.seed);
  if (c.format == "json") {
    json pts = json::array();
    for (std::size_t i = 0; i < s.size(); ++i) pts.push_back(std::vector<double>(s.point(i).begin(), s.point(i).end()));
    write_output(c.out, dump({{"alpha", params.to_string()}, {"seed", c.seed}, {"points", pts}}));
    return 0;
  }
  std::ostringstream out;
  for (std::size_t k = 0; k < s.dim(); ++k) out << (k ? "," : "") << 'x' << k + 1;
  out << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t k = 0; k < s.dim(); ++k) out << (k ? "," : "") << format_double(s.point(i)[k]);
    out << '\n';
  }
  write_output(c.out, out.str());
  return 0;
}

int run_kernel(const Common& c, double t, const std::string& xs, const std::string& ys, const std::string& method) {
  const auto params = ModelParams::parse(c.alpha);
  const KernelEvaluator ev(params);
  const Point x(parse_list(xs)), y(parse_list(ys));
  json j{{"alpha", params.to_string()}, {"t", t}};
  std::ostringstream out;
  out << "method,value\n";
  if (method == "closed" || method == "both") {
    const double v = ev.closed(t, x, y);
    j["closed"] = v;
    out << "closed," << format_double(v) << '\n';
  }
  if (method == "spectral" || method == "both") {
    const double v = ev.spectral(t, x, y);
    j["spectral"] = v;
    out << "spectral," << format_double(v) << '\n';
  }
  write_output(c.out, c.format == "json" ? dump(j) : out.str());
  return 0;
}

int run_w2(const Common& c, std::size_t n, const std::string& estimator, std::size_t ref_factor, double eps) {
  lab::ExperimentConfig cfg;
  cfg.params = ModelParams::parse(c.alpha);
  cfg.estimator = lab::estimator_from_string(estimator);
  cfg.ref_factor = ref_factor;
  cfg.sinkhorn_epsilon = eps;
  cfg.n_grid = {n};
  cfg.validate();
  const double w2sq = lab::estimate_w2sq(cfg, n, c.seed);
  if (c.format == "json")
    write_output(c.out, dump({{"alpha", cfg.params.to_string()}, {"n", n}, {"estimator", estimator}, {"seed", c.seed},
                              {"w2sq", w2sq}}));
  else
    write_output(c.out, "n,estimator,seed,w2sq\n" + std::to_string(n) + ',' + estimator + ',' + std::to_string(c.seed) +
                            ',' + format_double(w2sq) + '\n');
  return 0;
}

int run_diag(const Common& c) {
  const auto params = ModelParams::parse(c.alpha);
  if (params.dim() != 1) throw UnsupportedError("diag: one alpha value expected (the suite covers N = 1 and N = 2)");
  const auto rep = proof::standard_diagnostics(params.alpha(0), c.seed);
  if (c.out.empty()) {
    std::cout << rep.to_text();
  } else if (c.format == "json") {
    json entries = json::array();
    for (const auto& e : rep.entries)
      entries.push_back({{"name", e.name},
                         {"value", e.value},
                         {"relation", proof::to_string(e.relation)},
                         {"bound", e.bound},
                         {"tolerance", e.tolerance},
                         {"margin", e.margin},
                         {"pass", e.pass},
                         {"note", e.note}});
    write_output(c.out, dump({{"alpha", params.to_string()}, {"seed", c.seed}, {"entries", entries}, {"all_pass", rep.all_pass()}}));
  } else {
    std::ostringstream out;
    out << "name,value,relation,bound,tolerance,margin,pass\n";
    for (const auto& e : rep.entries)
      out << '"' << e.name << "\"," << format_double(e.value) << ',' << proof::to_string(e.relation) << ','
          << format_double(e.bound) << ',' << format_double(e.tolerance) << ',' << format_double(e.margin) << ','
          << (e.pass ? "PASS" : "FAIL") << '\n';
    write_output(c.out, out.str());
  }
  std::size_t failed = 0;
  for (const auto& e : rep.entries) failed += !e.pass;
  std::cerr << rep.entries.size() - failed << '/' << rep.entries.size() << " checks pass\n";
  return rep.all_pass() ? 0 : 1;
}

int run_decompose(const Common& c, std::size_t n, const std::string& ts, double trunc_C, std::size_t reps,
                  std::size_t ref_factor) {
  lab::ExperimentConfig cfg;
  cfg.params = ModelParams::parse(c.alpha);
  cfg.truncation_C = trunc_C;
  cfg.reps = reps;
  cfg.ref_factor = ref_factor;
  cfg.master_seed = c.seed;
  const std::vector<double> grid = ts.empty() ? lab::default_t_grid() : parse_list(ts);
  const auto d = lab::decomposition_scan(cfg, n, grid);
  if (c.format == "json") {
    json rows = json::array();
    for (const auto& r : d.rows)
      rows.push_back({{"t", r.t},
                      {"term2", r.term2.mean},
                      {"term2_stderr", r.term2.stderr_},
                      {"term3", r.term3.mean},
                      {"term3_stderr", r.term3.stderr_},
                      {"total", r.total},
                      {"term2_bound", r.term2_bound},
                      {"term2_ok", r.term2_ok},
                      {"tradeoff", r.tradeoff}});
    write_output(c.out, dump({{"alpha", cfg.params.to_string()},
                              {"n", n},
                              {"truncation_C", trunc_C},
                              {"R", d.R},
                              {"seed", c.seed},
                              {"term1", d.term1.mean},
                              {"term1_stderr", d.term1.stderr_},
                              {"term1_tail", d.term1_tail},
                              {"direct", d.direct.mean},
                              {"direct_stderr", d.direct.stderr_},
                              {"rows", rows},
                              {"best_t", d.rows[d.best].t},
                              {"best_ratio", d.best_ratio},
                              {"tradeoff_u_shaped", d.tradeoff_u_shaped},
                              {"pass", d.pass()}}));
  } else {
    std::ostringstream out;
    out << "t,term1,term2,term2_stderr,term3,term3_stderr,total,term2_bound,tradeoff\n";
    for (const auto& r : d.rows)
      out << format_double(r.t) << ',' << format_double(d.term1.mean) << ',' << format_double(r.term2.mean) << ','
          << format_double(r.term2.stderr_) << ',' << format_double(r.term3.mean) << ','
          << format_double(r.term3.stderr_) << ',' << format_double(r.total) << ',' << format_double(r.term2_bound)
          << ',' << format_double(r.tradeoff) << '\n';
    write_output(c.out, out.str());
  }
  std::cerr << "R=" << d.R << " direct=" << d.direct.mean << " best_t=" << d.rows[d.best].t
            << " best/direct=" << d.best_ratio << (d.pass() ? " PASS" : " FAIL") << '\n';
  return d.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empirical Wasserstein rates for the Laguerre model"};
  app.require_subcommand(1);

  Common sample_c, kernel_c, w2_c, rate_c, diag_c, dec_c;

  auto* sample = app.add_subcommand("sample", "draw i.i.d. points of mu^alpha");
  add_common(sample, sample_c);
  std::size_t sample_n = 1000;
  sample->add_option("--n", sample_n, "number of points")->capture_default_str();

  auto* kernel = app.add_subcommand("kernel", "evaluate the heat kernel p_t(x, y)");
  add_common(kernel, kernel_c);
  double kernel_t = 1.0;
  std::string kernel_x, kernel_y, kernel_method = "closed";
  kernel->add_option("--t", kernel_t, "time")->capture_default_str();
  kernel->add_option("--x", kernel_x, "comma list of coordinates")->required();
  kernel->add_option("--y", kernel_y, "comma list of coordinates")->required();
  kernel->add_option("--method", kernel_method, "closed, spectral or both")
      ->check(CLI::IsMember({"closed", "spectral", "both"}))
      ->capture_default_str();

  auto* w2 = app.add_subcommand("w2", "one W2^2 estimate of mu_n against mu^alpha");
  add_common(w2, w2_c);
  std::size_t w2_n = 1000, w2_ref = 16;
  std::string w2_est = "quantile-1d";
  double w2_eps = 0.01;
  w2->add_option("--n", w2_n, "sample size")->capture_default_str();
  w2->add_option("--estimator", w2_est, "quantile-1d, proxy-nd or sinkhorn-proxy")->capture_default_str();
  w2->add_option("--ref-factor", w2_ref, "reference sample multiple")->capture_default_str();
  w2->add_option("--epsilon", w2_eps, "Sinkhorn regularization")->capture_default_str();

  auto* rate = app.add_subcommand("rate", "estimate E W2^2 over an n grid and fit the log-log slope");
  add_common(rate, rate_c);
  std::string rate_config, rate_grid, rate_est;
  std::size_t rate_reps = 0, rate_ref = 0;
  double rate_eps = 0.0, rate_C = 0.0;
  rate->add_option("--config", rate_config, "key = value config file; flags override it");
  rate->add_option("--n-grid", rate_grid, "e.g. 256,512,1024 or 2^8..2^14");
  rate->add_option("--reps", rate_reps, "repetitions per n");
  rate->add_option("--estimator", rate_est, "quantile-1d, proxy-nd or sinkhorn-proxy");
  rate->add_option("--ref-factor", rate_ref, "reference sample multiple");
  rate->add_option("--epsilon", rate_eps, "Sinkhorn regularization");
  rate->add_option("--trunc-C", rate_C, "truncation constant C");

  auto* diag = app.add_subcommand("diag", "proof-pipeline inequality and identity checks");
  add_common(diag, diag_c);

  auto* dec = app.add_subcommand("decompose", "triangle decomposition of W2^2 over a t scan (N = 1)");
  add_common(dec, dec_c);
  std::size_t dec_n = 4096, dec_reps = 20, dec_ref = 16;
  std::string dec_t;
  double dec_C = 3.0;
  dec->add_option("--n", dec_n, "sample size")->capture_default_str();
  dec->add_option("--t", dec_t, "comma list of t values (default 1e-3..1)");
  dec->add_option("--trunc-C", dec_C, "truncation constant C")->capture_default_str();
  dec->add_option("--reps", dec_reps, "repetitions")->capture_default_str();
  dec->add_option("--ref-factor", dec_ref, "smoothed draws per base point")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample) return run_sample(sample_c, sample_n);
    if (*kernel) return run_kernel(kernel_c, kernel_t, kernel_x, kernel_y, kernel_method);
    if (*w2) return run_w2(w2_c, w2_n, w2_est, w2_ref, w2_eps);
    if (*diag) return run_diag(diag_c);
    if (*dec) return run_decompose(dec_c, dec_n, dec_t, dec_C, dec_reps, dec_ref);
    if (*rate) {
      lab::ExperimentConfig cfg = rate_config.empty() ? lab::ExperimentConfig{} : lab::load_config(rate_config);
      if (rate->count("--alpha") || rate_config.empty()) cfg.params = ModelParams::parse(rate_c.alpha);
      if (rate->count("--seed")) cfg.master_seed = rate_c.seed;
      if (rate->count("--out")) cfg.output_path = rate_c.out;
      if (rate->count("--format")) cfg.format = lab::format_from_string(rate_c.format);
      if (rate->count("--n-grid")) cfg.n_grid = lab::parse_n_grid(rate_grid);
      if (rate->count("--reps")) cfg.reps = rate_reps;
      if (rate->count("--estimator")) cfg.estimator = lab::estimator_from_string(rate_est);
      if (rate->count("--ref-factor")) cfg.ref_factor = rate_ref;
      if (rate->count("--epsilon")) cfg.sinkhorn_epsilon = rate_eps;
      if (rate->count("--trunc-C")) cfg.truncation_C = rate_C;
      if (cfg.output_path.empty()) throw std::invalid_argument("rate: --out (or output_path) is required");
      const auto rep = lab::run_rate_experiment(cfg);
      for (const auto& p : lab::emit_report(rep, cfg)) std::cerr << "wrote " << p.string() << '\n';
      std::size_t failures = 0;
      for (const auto& s : rep.summary) failures += s.failures;
      std::cerr << "regime=" << lab::to_string(rep.regime) << " slope=" << rep.fitted_slope << " +- "
                << rep.slope_stderr << " failures=" << failures << " wall=" << rep.wall_seconds << "s\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
