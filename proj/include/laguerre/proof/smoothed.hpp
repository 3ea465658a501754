#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "laguerre/kernel.hpp"
#include "laguerre/model.hpp"
#include "laguerre/proof/transition.hpp"
#include "laguerre/proof/truncation.hpp"
#include "laguerre/sampling.hpp"

namespace laguerre::proof {

/// The measure f_{n,R,t} mu^alpha with f_{n,R,t} = (1/n) sum_j p_t(X_{j,R}, .).
class SmoothedEmpirical {
 public:
  SmoothedEmpirical(SampleSet base, double t, const TruncationConfig& cfg)
      : base_(std::move(base)), t_(t), evaluator_(base_.params()) {
    if (!(t > 0.0)) throw std::domain_error("SmoothedEmpirical: t must be > 0");
    for (std::size_t j = 0; j < base_.size(); ++j)
      if (!cfg.contains(base_.point(j))) throw std::invalid_argument("SmoothedEmpirical: base point outside B_R");
  }

  [[nodiscard]] const SampleSet& base() const { return base_; }
  [[nodiscard]] double t() const { return t_; }
  [[nodiscard]] const KernelEvaluator& evaluator() const { return evaluator_; }

 private:
  SampleSet base_;
  double t_;
  KernelEvaluator evaluator_;
};

/// f_{n,R,t}(y), the density of mu_{n,R,t} relative to mu^alpha; summed in log space.
inline double smoothed_density(const SmoothedEmpirical& se, std::span<const double> y) {
  const auto& base = se.base();
  std::vector<double> logs(base.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < base.size(); ++j) {
    logs[j] = se.evaluator().log_closed(se.t(), base.point(j), y);
    mx = std::max(mx, logs[j]);
  }
  if (std::isinf(mx)) return 0.0;
  double s = 0.0;
  for (double l : logs) s += std::exp(l - mx);
  return std::exp(mx + std::log(s / static_cast<double>(base.size())));
}

/// One draw from mu_{n,R,t} into `out`: a uniformly chosen base point moved by the transition law.
inline void draw_smoothed(const SmoothedEmpirical& se, Rng& rng, std::span<double> out) {
  const auto n = se.base().size();
  const auto j = std::min<std::size_t>(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)));
  transition_draw(se.base().params(), se.t(), se.base().point(j), rng, out);
}

inline Point sample_smoothed(const SmoothedEmpirical& se, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> y(se.base().dim());
  draw_smoothed(se, rng, y);
  return Point(std::move(y));
}

/// count draws from mu_{n,R,t}; block b of kSampleBlock draws uses the stream derive_seed(seed, {b}).
inline SampleSet sample_smoothed_set(const SmoothedEmpirical& se, std::size_t count, std::uint64_t seed) {
  const std::size_t dim = se.base().dim();
  std::vector<double> pts(count * dim);
  for (std::size_t block = 0; block * kSampleBlock < count; ++block) {
    Rng rng(derive_seed(seed, {block}));
    const std::size_t end = std::min(count, (block + 1) * kSampleBlock);
    for (std::size_t i = block * kSampleBlock; i < end; ++i)
      draw_smoothed(se, rng, std::span<double>(pts).subspan(i * dim, dim));
  }
  return SampleSet(se.base().params(), std::move(pts), seed);
}

}  // namespace laguerre::proof
