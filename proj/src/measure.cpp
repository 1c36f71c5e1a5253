#include "otgeo/measure.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace otgeo {

PointCloud::PointCloud(std::size_t n, std::size_t d, std::vector<double> coords)
    : n_(n), d_(d), coords_(std::move(coords)) {
  if (n_ == 0 || d_ == 0) throw std::invalid_argument("PointCloud: need n >= 1 and d >= 1");
  if (coords_.size() != n_ * d_)
    throw std::invalid_argument("PointCloud: coordinate count does not match n*d");
  for (double v : coords_)
    if (!std::isfinite(v)) throw std::invalid_argument("PointCloud: non-finite coordinate");
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("PointCloud: no rows");
  const std::size_t d = rows.front().size();
  std::vector<double> coords;
  coords.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw std::invalid_argument("PointCloud: ragged rows");
    coords.insert(coords.end(), r.begin(), r.end());
  }
  return PointCloud(rows.size(), d, std::move(coords));
}

PointCloud PointCloud::head(std::size_t count) const { return slice(0, count); }

PointCloud PointCloud::slice(std::size_t first, std::size_t count) const {
  if (first + count > n_) throw std::out_of_range("PointCloud::slice out of range");
  std::vector<double> c(coords_.begin() + static_cast<std::ptrdiff_t>(first * d_),
                        coords_.begin() + static_cast<std::ptrdiff_t>((first + count) * d_));
  return PointCloud(count, d_, std::move(c));
}

PointCloud PointCloud::subset(std::span<const std::size_t> indices) const {
  std::vector<double> c;
  c.reserve(indices.size() * d_);
  for (std::size_t i : indices) {
    if (i >= n_) throw std::out_of_range("PointCloud::subset index out of range");
    auto p = point(i);
    c.insert(c.end(), p.begin(), p.end());
  }
  return PointCloud(indices.size(), d_, std::move(c));
}

PointCloud concat(const PointCloud& a, const PointCloud& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("concat: dimension mismatch");
  std::vector<double> c(a.data().begin(), a.data().end());
  c.insert(c.end(), b.data().begin(), b.data().end());
  return PointCloud(a.size() + b.size(), a.dim(), std::move(c));
}

const char* to_string(CostKind kind) {
  return kind == CostKind::euclidean_p1 ? "p1" : "p2_squared";
}

CostKind parse_cost_kind(const std::string& text) {
  if (text == "p1" || text == "euclidean_p1") return CostKind::euclidean_p1;
  if (text == "p2_squared" || text == "p2" || text == "euclidean_p2_squared")
    return CostKind::euclidean_p2_squared;
  throw std::invalid_argument("unknown cost kind: " + text);
}

double cost(CostSpec spec, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("cost: dimension mismatch");
  return cost_from_squared(spec, squared_distance(x.data(), y.data(), x.size()));
}

DiscreteMeasure::DiscreteMeasure(PointCloud support, std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (weights_.size() != support_.size())
    throw std::invalid_argument("DiscreteMeasure: weight count does not match support");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("DiscreteMeasure: weights must be finite and >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("DiscreteMeasure: weights must sum to 1 within 1e-12");
  for (double& w : weights_) w /= total;
}

DiscreteMeasure DiscreteMeasure::without_zero_atoms() const {
  std::vector<std::size_t> keep;
  std::vector<double> w;
  for (std::size_t i = 0; i < weights_.size(); ++i)
    if (weights_[i] > 0.0) {
      keep.push_back(i);
      w.push_back(weights_[i]);
    }
  if (keep.size() == weights_.size()) return *this;
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return DiscreteMeasure(support_.subset(keep), std::move(w));
}

DiscreteMeasure empirical_measure(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  // 1/n does not always sum back to exactly 1; the constructor renormalizes.
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return DiscreteMeasure(cloud, std::move(w));
}

namespace {

double max_pairwise(const PointCloud& cloud, std::span<const std::size_t> idx, CostSpec spec) {
  const std::size_t d = cloud.dim();
  double best = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      best = std::max(best, squared_distance(cloud.point(idx[a]).data(),
                                             cloud.point(idx[b]).data(), d));
  return cost_from_squared(spec, best);
}

}  // namespace

DiameterEstimate diameter_estimate(const PointCloud& cloud, CostSpec spec, SeedSpec seed) {
  const std::size_t n = cloud.size();
  DiameterEstimate out;
  if (n <= kDiameterExactLimit) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    out.value = out.sample_max = max_pairwise(cloud, all, spec);
    out.path = DiameterPath::exact_pairwise;
    return out;
  }
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  Rng rng = make_rng(seed);
  // partial Fisher-Yates: first kDiameterExactLimit entries are the subsample
  for (std::size_t i = 0; i < kDiameterExactLimit; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  std::span<const std::size_t> sub(all.data(), kDiameterExactLimit);
  out.sample_max = max_pairwise(cloud, sub, spec);

  const std::size_t d = cloud.dim();
  std::vector<double> lo(cloud.point(0).begin(), cloud.point(0).end()), hi = lo;
  for (std::size_t i = 1; i < n; ++i) {
    auto p = cloud.point(i);
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  const double box = cost_from_squared(spec, squared_distance(lo.data(), hi.data(), d));
  out.value = std::max(out.sample_max, box);
  out.path = DiameterPath::subsample_with_bbox_proxy;
  return out;
}

bool EstimateReport::has_flag(const std::string& flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

}  // namespace otgeo
