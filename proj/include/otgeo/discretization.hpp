#pragma once

#include <optional>
#include <vector>

#include "otgeo/measure.hpp"
#include "otgeo/nearest.hpp"
#include "otgeo/sampler.hpp"

namespace otgeo {

/// Monte Carlo points are generated in fixed blocks; block b of a sampler
/// source is drawn from seed.derive(b). Results therefore do not depend on
/// how blocks are scheduled across threads.
inline constexpr std::size_t kMcBlock = 4096;
inline constexpr std::size_t kMinimaReservoir = 1'000'000;

/// Where the Monte Carlo points come from: fresh draws from a sampler, or
/// the rows of a held-out cloud taken in order.
class McSource {
 public:
  static McSource from_sampler(const PointSampler& sampler, SeedSpec seed);
  static McSource from_cloud(const PointCloud& cloud);

  std::size_t dim() const;
  /// Points [block * kMcBlock, block * kMcBlock + count) of the stream.
  void fill_block(std::size_t block, std::size_t count, std::vector<double>& out) const;
  /// Number of available points (unbounded for samplers).
  std::optional<std::size_t> capacity() const;
  std::optional<SeedSpec> seed() const { return seed_; }

 private:
  const PointSampler* sampler_ = nullptr;
  const PointCloud* cloud_ = nullptr;
  std::optional<SeedSpec> seed_;
};

struct DiscretizationOptions {
  double delta = 0.05;
  /// Overrides the sample diameter used as the range constant in the band.
  std::optional<double> c_rho;
  /// Keep per-sample minima (first kMinimaReservoir of them).
  bool keep_minima = false;
};

/// Monte Carlo estimate of OT_c(rho, rho_n*) = E min_j c(X, x_j), the
/// transport cost to the best reweighting of a fixed support.
struct DiscretizationEstimate {
  double value = 0.0;
  /// Biased (1/N) sample variance of the per-sample minima.
  double sample_variance = 0.0;
  std::size_t mc_count = 0;
  std::size_t support_size = 0;
  double c_rho = 0.0;
  EstimateReport band;
  /// Sum of minima and hit count per support point (Voronoi cell).
  std::vector<double> cell_sums;
  std::vector<std::size_t> cell_counts;
  std::vector<double> minima;
};

struct OptimalWeights {
  std::vector<double> weights;  // counts / N
  std::vector<std::size_t> counts;
  std::vector<double> half_widths;
  double delta = 0.05;  // per-weight level actually used
  std::size_t mc_count = 0;
};

/// Empirical Bernstein half-width:
///   sqrt(2 var log(2/delta) / N) + 7 range log(2/delta) / (3 (N - 1)).
double bernstein_half_width(double variance, double range, std::size_t N, double delta);

DiscretizationEstimate estimate_discretization_error(const SupportIndex& index, const McSource& mc,
                                                     std::size_t N,
                                                     const DiscretizationOptions& opts = {});

/// Same as above with the support drawn from `sampler` on `support_seed` and
/// the Monte Carlo stream on `mc_seed`; the two seeds must differ.
DiscretizationEstimate estimate_discretization_error(const PointSampler& sampler, std::size_t n,
                                                     std::size_t N, SeedSpec support_seed,
                                                     SeedSpec mc_seed,
                                                     const DiscretizationOptions& opts = {},
                                                     CostSpec spec = CostSpec::p1());

/// One estimate per level of a nested support, all from one shared MC pass.
std::vector<DiscretizationEstimate> estimate_nested(const NestedSupport& support, const McSource& mc,
                                                    std::size_t N,
                                                    const DiscretizationOptions& opts = {});

/// Voronoi-cell weights w_i = rho(cell i) estimated by hit frequencies.
/// With `joint` the level is split as delta / n (Bonferroni) so all n bands
/// hold simultaneously.
OptimalWeights estimate_optimal_weights(const SupportIndex& index, const McSource& mc, std::size_t N,
                                        double delta, bool joint = false);

}  // namespace otgeo
