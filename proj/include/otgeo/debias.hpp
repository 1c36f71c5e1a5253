#pragma once

#include <cstddef>

#include "otgeo/measure.hpp"
#include "otgeo/sinkhorn.hpp"

namespace otgeo {

/// eps(n) = eps0 * n^-a with a = 1 / (d_int + 4); the divergence bias then
/// decays like n^-gamma, gamma = 2a.
struct Schedule {
  double d_int = 0.0;
  double eps0 = 0.0;
  double a = 0.0;
  double gamma = 0.0;

  double epsilon(std::size_t n) const;
};

Schedule make_schedule(double d_int, double eps0);

/// 0.05 * (diameter of X u Y)^2 with the p2 cost's diameter estimate.
double auto_eps0(const PointCloud& x, const PointCloud& y, SeedSpec seed = {});

struct RichardsonWeights {
  double w_hi = 0.0;
  double w_lo = 0.0;
  double gamma = 0.0;
};

/// w_hi = 2^g / (2^g - 1), w_lo = -1 / (2^g - 1).
RichardsonWeights richardson_weights(double gamma);

/// w_hi * s_hi + w_lo * s_lo.
double richardson_combine(const RichardsonWeights& w, double s_hi, double s_lo);

struct DebiasOptions {
  SinkhornOptions sinkhorn;
  CostSpec spec = CostSpec::p2_squared();
};

// Reports carry the point estimate in `value` (half_width is 0) and, in
// `meta`: n (half size), eps_hi, eps_lo, s_hi, s_lo, w_hi, w_lo, d_int,
// gamma, bags, iterations. Flag "not_converged" marks any failed solve.

/// S_{eps(2n)} on the full clouds.
EstimateReport base_estimate(const PointCloud& x, const PointCloud& y, const Schedule& sched,
                             const DebiasOptions& opts = {});

/// w_hi S_{eps(2n), 2n} + w_lo S_{eps(n), n}, the low term on one seeded
/// half of each cloud (indices drawn without replacement, independently per
/// cloud).
EstimateReport diagonal_richardson(const PointCloud& x, const PointCloud& y, const Schedule& sched,
                                   SeedSpec seed, const DebiasOptions& opts = {});

/// Low term averaged over K independent halves; bag k draws from
/// seed.derive(k), so K = 1 equals diagonal_richardson with the same seed.
EstimateReport bagged_diagonal_richardson(const PointCloud& x, const PointCloud& y,
                                          const Schedule& sched, std::size_t bags, SeedSpec seed,
                                          const DebiasOptions& opts = {});

/// The divergences behind the bagged estimator: S_{eps(2n)} on the full
/// clouds and S_{eps(n)} on each of K halves (bag k from seed.derive(k)).
/// Averaging a prefix of `s_lo` gives the bagged estimate for fewer bags.
struct BagSolves {
  double s_hi = 0.0;
  std::vector<double> s_lo;
  std::size_t iterations = 0;
  bool converged = true;
};

BagSolves bag_divergences(const PointCloud& x, const PointCloud& y, const Schedule& sched,
                          std::size_t bags, SeedSpec seed, const DebiasOptions& opts = {});

/// 2 S_eps - S_sqrt(eps) on the full clouds. Flag "epsilon_ge_1" when
/// eps >= 1 (the two levels then coincide or swap).
EstimateReport eps_only_richardson(const PointCloud& x, const PointCloud& y, double epsilon,
                                   const DebiasOptions& opts = {});

/// n distinct indices from [0, 2n) drawn without replacement, ascending.
std::vector<std::size_t> half_subsample(std::size_t full, std::size_t half, Rng& rng);

}  // namespace otgeo
