#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "otgeo/discretization.hpp"
#include "otgeo/sampler.hpp"

namespace otgeo {

/// The larger support did not lower the discretization error (or an error
/// estimate is not positive), so the log-ratio is undefined.
class DegenerateRatioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultEta = 1.5;

/// Two-scale dimension estimate log(eta) / (log OT(n) - log OT(eta n)).
struct DimensionEstimate {
  double d_hat = 0.0;
  double eta = kDefaultEta;
  std::size_t n = 0;
  std::size_t eta_n = 0;
  std::size_t N = 0;
  DiscretizationEstimate ot_n;
  DiscretizationEstimate ot_eta_n;
  /// Worst-case interval from the two Bernstein bands; hi may be +inf.
  double band_lo = 0.0;
  double band_hi = 0.0;
  /// Set when d_hat <= 2, where the estimator's guarantees do not apply.
  bool low_dimension = false;
};

/// ceil(eta * n) computed robustly (eta * n within 1e-9 of an integer rounds
/// to it).
std::size_t scaled_size(std::size_t n, double eta);

/// Throws DegenerateRatioError unless 0 < ot_eta_n < ot_n.
double dimension_from_values(double ot_n, double ot_eta_n, double eta);

/// Interval-arithmetic image of [ot_n +- h_n] x [ot_eta_n +- h_eta_n],
/// clipped to [0, inf].
std::pair<double, double> propagate_dimension_band(double ot_n, double h_n, double ot_eta_n,
                                                   double h_eta_n, double eta);

/// Draws ceil(eta n) support points (the first n form the small support),
/// runs both estimates on one Monte Carlo stream with cost ||x - y||.
DimensionEstimate estimate_dimension(const PointSampler& sampler, std::size_t n, double eta,
                                     std::size_t N, double delta, SeedSpec support_seed,
                                     SeedSpec mc_seed);

/// Data-only variant: a seeded shuffle of `cloud` gives the support (first
/// ceil(eta n) rows) and the Monte Carlo points (the next N rows).
DimensionEstimate estimate_dimension_from_cloud(const PointCloud& cloud, std::size_t n, double eta,
                                                std::size_t N, double delta, SeedSpec shuffle_seed);

/// Picks n and N for a cloud of `rows` points: half the rows for Monte
/// Carlo, the rest for the larger support.
std::pair<std::size_t, std::size_t> default_split(std::size_t rows, double eta);

struct DimensionProfile {
  std::vector<std::size_t> grid;
  std::vector<DiscretizationEstimate> curve;
  /// d_hat between grid[i] and grid[i+1]; empty when that pair is degenerate.
  std::vector<std::optional<double>> pairwise;
};

/// Discretization error over a strictly increasing grid of nested supports
/// and the consecutive-pair dimension estimates.
DimensionProfile dimension_profile(const PointSampler& sampler, const std::vector<std::size_t>& grid,
                                   std::size_t N, double delta, SeedSpec support_seed,
                                   SeedSpec mc_seed);
DimensionProfile dimension_profile_from_cloud(const PointCloud& cloud,
                                              const std::vector<std::size_t>& grid, std::size_t N,
                                              double delta, SeedSpec shuffle_seed);

/// Two-sample baseline log(eta) / (log W1(a_n, b_n) - log W1(a_m, b_m)),
/// m = ceil(eta n), with four independent uniform empirical measures and
/// exact assignment solves. Requires m <= 512.
double discrete_w1_dimension_baseline(const PointSampler& sampler, std::size_t n, double eta,
                                      SeedSpec seed);

}  // namespace otgeo
