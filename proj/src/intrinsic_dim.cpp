#include "otgeo/intrinsic_dim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "otgeo/sinkhorn.hpp"

namespace otgeo {

std::size_t scaled_size(std::size_t n, double eta) {
  const double x = eta * static_cast<double>(n);
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, x)) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(x));
}

double dimension_from_values(double ot_n, double ot_eta_n, double eta) {
  if (!(eta > 1.0)) throw std::invalid_argument("eta must be > 1");
  if (!(ot_n > 0.0) || !(ot_eta_n > 0.0))
    throw DegenerateRatioError("discretization error estimate is not positive; increase N or n");
  if (ot_eta_n >= ot_n)
    throw DegenerateRatioError("error did not decrease from n to eta*n; increase N or n");
  return std::log(eta) / (std::log(ot_n) - std::log(ot_eta_n));
}

std::pair<double, double> propagate_dimension_band(double ot_n, double h_n, double ot_eta_n,
                                                   double h_eta_n, double eta) {
  const double inf = std::numeric_limits<double>::infinity();
  const double log_eta = std::log(eta);
  // smallest ratio: largest small-support error, smallest large-support error
  double lo = 0.0;
  if (ot_eta_n - h_eta_n > 0.0) {
    const double den = std::log(ot_n + h_n) - std::log(ot_eta_n - h_eta_n);
    lo = den > 0.0 ? log_eta / den : inf;
  }
  double hi = inf;
  if (ot_n - h_n > 0.0) {
    const double den = std::log(ot_n - h_n) - std::log(ot_eta_n + h_eta_n);
    if (den > 0.0) hi = log_eta / den;
  }
  return {std::max(0.0, lo), hi};
}

namespace {

void check_scales(std::size_t n, double eta) {
  if (!(eta > 1.0)) throw std::invalid_argument("eta must be > 1");
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  if (scaled_size(n, eta) < n + 1) throw std::invalid_argument("ceil(eta * n) must be >= n + 1");
}

DimensionEstimate finish(std::vector<DiscretizationEstimate> est, std::size_t n, std::size_t m,
                         double eta, std::size_t N) {
  DimensionEstimate out;
  out.eta = eta;
  out.n = n;
  out.eta_n = m;
  out.N = N;
  out.ot_n = std::move(est[0]);
  out.ot_eta_n = std::move(est[1]);
  out.d_hat = dimension_from_values(out.ot_n.value, out.ot_eta_n.value, eta);
  std::tie(out.band_lo, out.band_hi) =
      propagate_dimension_band(out.ot_n.value, out.ot_n.band.half_width, out.ot_eta_n.value,
                               out.ot_eta_n.band.half_width, eta);
  out.low_dimension = out.d_hat <= 2.0;
  return out;
}

std::vector<std::size_t> shuffled(std::size_t rows, SeedSpec seed) {
  std::vector<std::size_t> idx(rows);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng = make_rng(seed);
  for (std::size_t i = rows; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(idx[i - 1], idx[pick(rng)]);
  }
  return idx;
}

DimensionProfile profile_from(const NestedSupport& support, const McSource& mc, std::size_t N,
                              double delta) {
  DimensionProfile p;
  p.grid = support.sizes();
  DiscretizationOptions opts;
  opts.delta = delta;
  p.curve = estimate_nested(support, mc, N, opts);
  for (std::size_t i = 0; i + 1 < p.grid.size(); ++i) {
    const double eta = static_cast<double>(p.grid[i + 1]) / static_cast<double>(p.grid[i]);
    try {
      p.pairwise.emplace_back(dimension_from_values(p.curve[i].value, p.curve[i + 1].value, eta));
    } catch (const DegenerateRatioError&) {
      p.pairwise.emplace_back(std::nullopt);
    }
  }
  return p;
}

void check_grid(const std::vector<std::size_t>& grid) {
  if (grid.size() < 2) throw std::invalid_argument("profile grid needs at least 2 entries");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (grid[i + 1] <= grid[i]) throw std::invalid_argument("profile grid must be strictly increasing");
  if (grid.front() == 0) throw std::invalid_argument("profile grid entries must be >= 1");
}

}  // namespace

DimensionEstimate estimate_dimension(const PointSampler& sampler, std::size_t n, double eta,
                                     std::size_t N, double delta, SeedSpec support_seed,
                                     SeedSpec mc_seed) {
  check_scales(n, eta);
  if (support_seed == mc_seed)
    throw std::invalid_argument("support and Monte Carlo streams must use distinct seeds");
  const std::size_t m = scaled_size(n, eta);
  NestedSupport support(sampler.sample(m, support_seed), {n, m}, CostSpec::p1());
  DiscretizationOptions opts;
  opts.delta = delta;
  return finish(estimate_nested(support, McSource::from_sampler(sampler, mc_seed), N, opts), n, m,
                eta, N);
}

DimensionEstimate estimate_dimension_from_cloud(const PointCloud& cloud, std::size_t n, double eta,
                                                std::size_t N, double delta, SeedSpec shuffle_seed) {
  check_scales(n, eta);
  const std::size_t m = scaled_size(n, eta);
  if (m + N > cloud.size())
    throw std::invalid_argument("cloud has " + std::to_string(cloud.size()) + " rows, need ceil(eta n) + N = " +
                                std::to_string(m + N));
  const auto idx = shuffled(cloud.size(), shuffle_seed);
  const PointCloud perm = cloud.subset(std::span<const std::size_t>(idx.data(), m + N));
  NestedSupport support(perm.head(m), {n, m}, CostSpec::p1());
  const PointCloud mc_points = perm.slice(m, N);
  DiscretizationOptions opts;
  opts.delta = delta;
  return finish(estimate_nested(support, McSource::from_cloud(mc_points), N, opts), n, m, eta, N);
}

std::pair<std::size_t, std::size_t> default_split(std::size_t rows, double eta) {
  const std::size_t N = rows / 2;
  const std::size_t m = rows - N;
  auto n = static_cast<std::size_t>(std::floor(static_cast<double>(m) / eta));
  while (n > 0 && scaled_size(n, eta) > m) --n;
  if (n == 0 || N < 2 || scaled_size(n, eta) < n + 1)
    throw std::invalid_argument("cloud too small for a dimension estimate");
  return {n, N};
}

DimensionProfile dimension_profile(const PointSampler& sampler, const std::vector<std::size_t>& grid,
                                   std::size_t N, double delta, SeedSpec support_seed,
                                   SeedSpec mc_seed) {
  check_grid(grid);
  if (support_seed == mc_seed)
    throw std::invalid_argument("support and Monte Carlo streams must use distinct seeds");
  NestedSupport support(sampler.sample(grid.back(), support_seed), grid, CostSpec::p1());
  return profile_from(support, McSource::from_sampler(sampler, mc_seed), N, delta);
}

DimensionProfile dimension_profile_from_cloud(const PointCloud& cloud,
                                              const std::vector<std::size_t>& grid, std::size_t N,
                                              double delta, SeedSpec shuffle_seed) {
  check_grid(grid);
  const std::size_t m = grid.back();
  if (m + N > cloud.size())
    throw std::invalid_argument("cloud has " + std::to_string(cloud.size()) +
                                " rows, need max(grid) + N = " + std::to_string(m + N));
  const auto idx = shuffled(cloud.size(), shuffle_seed);
  const PointCloud perm = cloud.subset(std::span<const std::size_t>(idx.data(), m + N));
  NestedSupport support(perm.head(m), grid, CostSpec::p1());
  const PointCloud mc_points = perm.slice(m, N);
  return profile_from(support, McSource::from_cloud(mc_points), N, delta);
}

double discrete_w1_dimension_baseline(const PointSampler& sampler, std::size_t n, double eta,
                                      SeedSpec seed) {
  check_scales(n, eta);
  const std::size_t m = scaled_size(n, eta);
  if (m > kMaxAssignmentSize)
    throw std::invalid_argument("discrete W1 baseline needs ceil(eta n) <= 512");
  const CostSpec p1 = CostSpec::p1();
  const double w_small =
      exact_ot_assignment(sampler.sample(n, seed.derive(0)), sampler.sample(n, seed.derive(1)), p1);
  const double w_large =
      exact_ot_assignment(sampler.sample(m, seed.derive(2)), sampler.sample(m, seed.derive(3)), p1);
  return dimension_from_values(w_small, w_large, eta);
}

}  // namespace otgeo
