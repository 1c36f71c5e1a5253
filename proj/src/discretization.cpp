#include "otgeo/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "otgeo/parallel.hpp"

namespace otgeo {

McSource McSource::from_sampler(const PointSampler& sampler, SeedSpec seed) {
  McSource s;
  s.sampler_ = &sampler;
  s.seed_ = seed;
  return s;
}

McSource McSource::from_cloud(const PointCloud& cloud) {
  McSource s;
  s.cloud_ = &cloud;
  return s;
}

std::size_t McSource::dim() const { return sampler_ ? sampler_->dim() : cloud_->dim(); }

std::optional<std::size_t> McSource::capacity() const {
  if (cloud_) return cloud_->size();
  return std::nullopt;
}

void McSource::fill_block(std::size_t block, std::size_t count, std::vector<double>& out) const {
  out.clear();
  if (sampler_) {
    Rng rng = make_rng(seed_->derive(block));
    sampler_->sample_into(rng, count, out);
  } else {
    const std::size_t d = cloud_->dim();
    auto data = cloud_->data();
    const std::size_t first = block * kMcBlock;
    out.assign(data.begin() + static_cast<std::ptrdiff_t>(first * d),
               data.begin() + static_cast<std::ptrdiff_t>((first + count) * d));
  }
}

double bernstein_half_width(double variance, double range, std::size_t N, double delta) {
  if (N < 2) throw std::invalid_argument("bernstein_half_width: N must be >= 2");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("bernstein_half_width: delta must be in (0,1)");
  const double L = std::log(2.0 / delta);
  const auto n = static_cast<double>(N);
  return std::sqrt(2.0 * std::max(variance, 0.0) * L / n) + 7.0 * range * L / (3.0 * (n - 1.0));
}

namespace {

struct LevelStats {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double v) {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }
  // Chan et al. pairwise merge
  void merge(const LevelStats& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(count), nb = static_cast<double>(o.count);
    const double delta = o.mean - mean;
    const double total = na + nb;
    mean += delta * nb / total;
    m2 += o.m2 + delta * delta * na * nb / total;
    count += o.count;
  }
};

struct BlockResult {
  std::vector<LevelStats> levels;
  std::vector<double> minima;  // level-major, only when kept
  std::vector<double> cell_sums;
  std::vector<std::size_t> cell_counts;
  std::vector<double> lo, hi;  // bounding box of the block's MC points
};

struct PassResult {
  std::vector<LevelStats> levels;
  std::vector<std::vector<double>> minima;
  std::vector<double> cell_sums;
  std::vector<std::size_t> cell_counts;
  std::vector<double> lo, hi;
  std::vector<double> mc_points;  // retained only when small enough for an exact diameter
};

// One Monte Carlo sweep; `query(x, out)` fills one NearestResult per level.
template <class Query>
PassResult mc_pass(const McSource& mc, std::size_t N, std::size_t levels, std::size_t finest_n,
                   bool keep_minima, bool keep_points, const Query& query) {
  const std::size_t d = mc.dim();
  const std::size_t blocks = (N + kMcBlock - 1) / kMcBlock;
  std::vector<BlockResult> results(blocks);
  std::vector<std::vector<double>> block_points(keep_points ? blocks : 0);

  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t count = std::min(kMcBlock, N - b * kMcBlock);
    std::vector<double> pts;
    mc.fill_block(b, count, pts);
    BlockResult& r = results[b];
    r.levels.assign(levels, {});
    r.cell_sums.assign(finest_n, 0.0);
    r.cell_counts.assign(finest_n, 0);
    r.lo.assign(d, std::numeric_limits<double>::infinity());
    r.hi.assign(d, -std::numeric_limits<double>::infinity());
    if (keep_minima) r.minima.resize(levels * count);
    for (std::size_t i = 0; i < count; ++i) {
      const double* x = pts.data() + i * d;
      for (std::size_t k = 0; k < d; ++k) {
        if (!std::isfinite(x[k])) throw std::runtime_error("Monte Carlo sample is not finite");
        r.lo[k] = std::min(r.lo[k], x[k]);
        r.hi[k] = std::max(r.hi[k], x[k]);
      }
    }
    std::vector<NearestResult> all(count * levels);
    query(pts.data(), count, all.data());
    for (std::size_t i = 0; i < count; ++i) {
      const NearestResult* out = all.data() + i * levels;
      for (std::size_t l = 0; l < levels; ++l) {
        r.levels[l].push(out[l].value);
        if (keep_minima) r.minima[l * count + i] = out[l].value;
      }
      r.cell_sums[out[levels - 1].index] += out[levels - 1].value;
      ++r.cell_counts[out[levels - 1].index];
    }
    if (keep_points) block_points[b] = std::move(pts);
  });

  PassResult pass;
  pass.levels.assign(levels, {});
  pass.minima.assign(levels, {});
  pass.cell_sums.assign(finest_n, 0.0);
  pass.cell_counts.assign(finest_n, 0);
  pass.lo.assign(d, std::numeric_limits<double>::infinity());
  pass.hi.assign(d, -std::numeric_limits<double>::infinity());
  for (std::size_t b = 0; b < blocks; ++b) {
    const BlockResult& r = results[b];
    const std::size_t count = std::min(kMcBlock, N - b * kMcBlock);
    for (std::size_t l = 0; l < levels; ++l) {
      pass.levels[l].merge(r.levels[l]);
      if (keep_minima) {
        auto& dst = pass.minima[l];
        const std::size_t room = kMinimaReservoir - std::min(kMinimaReservoir, dst.size());
        const std::size_t take = std::min(room, count);
        dst.insert(dst.end(), r.minima.begin() + static_cast<std::ptrdiff_t>(l * count),
                   r.minima.begin() + static_cast<std::ptrdiff_t>(l * count + take));
      }
    }
    for (std::size_t j = 0; j < finest_n; ++j) {
      pass.cell_sums[j] += r.cell_sums[j];
      pass.cell_counts[j] += r.cell_counts[j];
    }
    for (std::size_t k = 0; k < d; ++k) {
      pass.lo[k] = std::min(pass.lo[k], r.lo[k]);
      pass.hi[k] = std::max(pass.hi[k], r.hi[k]);
    }
    if (keep_points)
      pass.mc_points.insert(pass.mc_points.end(), block_points[b].begin(), block_points[b].end());
  }
  return pass;
}

void single_level_batch(const SupportIndex& index, const double* pts, std::size_t count,
                        NearestResult* out) {
  std::vector<double> sq(count);
  std::vector<std::size_t> idx(count);
  index.query_batch_squared(pts, count, sq.data(), idx.data());
  for (std::size_t i = 0; i < count; ++i) out[i] = {cost_from_squared(index.cost_spec(), sq[i]), idx[i]};
}

void check_request(const McSource& mc, std::size_t dim, std::size_t N, double delta) {
  if (N < 2) throw std::invalid_argument("Monte Carlo count N must be >= 2");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
  if (mc.dim() != dim) throw std::invalid_argument("Monte Carlo source dimension does not match support");
  if (auto cap = mc.capacity(); cap && *cap < N)
    throw std::invalid_argument("Monte Carlo cloud has " + std::to_string(*cap) + " points, need " +
                                std::to_string(N));
}

// Range constant over support U MC sample, with the path taken.
std::pair<double, std::string> range_constant(const PointCloud& support, const PassResult& pass,
                                              std::size_t N, CostSpec spec,
                                              const DiscretizationOptions& opts) {
  if (opts.c_rho) return {*opts.c_rho, "c_rho_user"};
  const std::size_t d = support.dim();
  if (support.size() + N <= kDiameterExactLimit) {
    PointCloud all = concat(support, PointCloud(N, d, pass.mc_points));
    return {diameter_estimate(all, spec).value, "c_rho_sample_max"};
  }
  std::vector<double> lo = pass.lo, hi = pass.hi;
  for (std::size_t i = 0; i < support.size(); ++i) {
    auto p = support.point(i);
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  return {cost_from_squared(spec, squared_distance(lo.data(), hi.data(), d)), "c_rho_bbox_proxy"};
}

DiscretizationEstimate make_estimate(const LevelStats& stats, std::size_t n, std::size_t N,
                                     double c_rho, const std::string& c_flag,
                                     const DiscretizationOptions& opts) {
  DiscretizationEstimate e;
  e.value = stats.mean;
  e.sample_variance = std::max(0.0, stats.m2 / static_cast<double>(stats.count));
  e.mc_count = N;
  e.support_size = n;
  e.c_rho = c_rho;
  e.band.value = e.value;
  e.band.delta = opts.delta;
  e.band.half_width = bernstein_half_width(e.sample_variance, c_rho, N, opts.delta);
  e.band.meta = {{"n", static_cast<double>(n)},
                 {"N", static_cast<double>(N)},
                 {"c_rho", c_rho},
                 {"sigma2", e.sample_variance}};
  e.band.flags.push_back(c_flag);
  return e;
}

}  // namespace

DiscretizationEstimate estimate_discretization_error(const SupportIndex& index, const McSource& mc,
                                                     std::size_t N, const DiscretizationOptions& opts) {
  const PointCloud& support = index.support();
  check_request(mc, support.dim(), N, opts.delta);
  const bool keep_points = !opts.c_rho && support.size() + N <= kDiameterExactLimit;
  PassResult pass = mc_pass(mc, N, 1, support.size(), opts.keep_minima, keep_points,
                            [&](const double* pts, std::size_t count, NearestResult* out) {
                              single_level_batch(index, pts, count, out);
                            });
  auto [c_rho, flag] = range_constant(support, pass, N, index.cost_spec(), opts);
  DiscretizationEstimate e = make_estimate(pass.levels[0], support.size(), N, c_rho, flag, opts);
  e.cell_sums = std::move(pass.cell_sums);
  e.cell_counts = std::move(pass.cell_counts);
  if (opts.keep_minima) e.minima = std::move(pass.minima[0]);
  return e;
}

DiscretizationEstimate estimate_discretization_error(const PointSampler& sampler, std::size_t n,
                                                     std::size_t N, SeedSpec support_seed,
                                                     SeedSpec mc_seed,
                                                     const DiscretizationOptions& opts, CostSpec spec) {
  if (support_seed == mc_seed)
    throw std::invalid_argument("support and Monte Carlo streams must use distinct seeds");
  if (n == 0) throw std::invalid_argument("support size n must be >= 1");
  SupportIndex index(sampler.sample(n, support_seed), spec);
  return estimate_discretization_error(index, McSource::from_sampler(sampler, mc_seed), N, opts);
}

std::vector<DiscretizationEstimate> estimate_nested(const NestedSupport& support, const McSource& mc,
                                                    std::size_t N, const DiscretizationOptions& opts) {
  check_request(mc, support.dim(), N, opts.delta);
  const std::size_t finest = support.sizes().back();
  const PointCloud used = support.support().head(finest);
  const bool keep_points = !opts.c_rho && finest + N <= kDiameterExactLimit;
  PassResult pass = mc_pass(mc, N, support.levels(), finest, opts.keep_minima, keep_points,
                            [&](const double* pts, std::size_t count, NearestResult* out) {
                              support.query_batch(pts, count, out);
                            });
  auto [c_rho, flag] = range_constant(used, pass, N, support.cost_spec(), opts);
  std::vector<DiscretizationEstimate> out;
  for (std::size_t l = 0; l < support.levels(); ++l) {
    out.push_back(make_estimate(pass.levels[l], support.sizes()[l], N, c_rho, flag, opts));
    if (opts.keep_minima) out.back().minima = std::move(pass.minima[l]);
  }
  out.back().cell_sums = std::move(pass.cell_sums);
  out.back().cell_counts = std::move(pass.cell_counts);
  return out;
}

OptimalWeights estimate_optimal_weights(const SupportIndex& index, const McSource& mc, std::size_t N,
                                        double delta, bool joint) {
  const std::size_t n = index.support().size();
  check_request(mc, index.support().dim(), N, delta);
  PassResult pass = mc_pass(mc, N, 1, n, false, false,
                            [&](const double* pts, std::size_t count, NearestResult* out) {
                              single_level_batch(index, pts, count, out);
                            });
  OptimalWeights w;
  w.mc_count = N;
  w.delta = joint ? delta / static_cast<double>(n) : delta;
  w.counts = std::move(pass.cell_counts);
  w.weights.resize(n);
  w.half_widths.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = static_cast<double>(w.counts[i]) / static_cast<double>(N);
    w.weights[i] = wi;
    w.half_widths[i] = bernstein_half_width(wi * (1.0 - wi), 1.0, N, w.delta);
  }
  return w;
}

}  // namespace otgeo
