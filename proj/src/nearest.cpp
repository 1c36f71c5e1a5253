#include "otgeo/nearest.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace otgeo {

SupportIndex::SupportIndex(PointCloud support, CostSpec spec, Acceleration accel)
    : support_(std::move(support)), spec_(spec), requested_(accel), effective_(accel) {
  const std::size_t n = support_.size(), d = support_.dim();
  if (effective_ == Acceleration::automatic)
    effective_ = d <= kAutoKdDim ? Acceleration::kd_tree : Acceleration::blocked;
  if (effective_ == Acceleration::kd_tree && d > kMaxKdDim) effective_ = Acceleration::blocked;
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  if (effective_ == Acceleration::kd_tree) {
    nodes_.reserve(2 * (n / kLeafSize + 1));
    build(0, static_cast<std::uint32_t>(n));
  }
  packed_.resize(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    auto p = support_.point(order_[i]);
    std::copy(p.begin(), p.end(), packed_.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  if (effective_ == Acceleration::blocked) {
    sq_norms_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double* p = packed_.data() + i * d;
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += p[k] * p[k];
      sq_norms_[i] = acc;
      max_sq_norm_ = std::max(max_sq_norm_, sq_norms_[i]);
    }
  }
}

std::int32_t SupportIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  const std::size_t d = support_.dim();
  std::uint32_t best_dim = 0;
  double best_spread = -1.0;
  for (std::size_t k = 0; k < d; ++k) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::uint32_t i = begin; i < end; ++i) {
      const double v = support_.point(order_[i])[k];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      best_dim = static_cast<std::uint32_t>(k);
    }
  }
  if (best_spread <= 0.0) return id;  // all points identical: keep as leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  auto key = [&](std::uint32_t idx) { return support_.point(idx)[best_dim]; };
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) { return key(a) < key(b); });
  const double split = key(order_[mid]);
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  nodes_[static_cast<std::size_t>(id)].split_dim = best_dim;
  nodes_[static_cast<std::size_t>(id)].split_value = split;
  return id;
}

void SupportIndex::scan(std::uint32_t begin, std::uint32_t end, const double* x, double& best_sq,
                        std::size_t& best_index) const {
  const std::size_t d = support_.dim();
  for (std::uint32_t i = begin; i < end; ++i) {
    const double sq = squared_distance(x, packed_.data() + static_cast<std::size_t>(i) * d, d);
    const std::size_t idx = order_[i];
    if (sq < best_sq || (sq == best_sq && idx < best_index)) {
      best_sq = sq;
      best_index = idx;
    }
  }
}

void SupportIndex::search(std::int32_t node_id, const double* x, double& best_sq,
                          std::size_t& best_index) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (node.left < 0) {
    scan(node.begin, node.end, x, best_sq, best_index);
    return;
  }
  // left holds keys <= split, right holds keys >= split
  const double diff = x[node.split_dim] - node.split_value;
  const std::int32_t near = diff < 0.0 ? node.left : node.right;
  const std::int32_t far = diff < 0.0 ? node.right : node.left;
  search(near, x, best_sq, best_index);
  // `<=` keeps equal-distance candidates reachable for the lowest-index rule
  if (diff * diff <= best_sq) search(far, x, best_sq, best_index);
}

void SupportIndex::query_squared(const double* x, double& best_sq, std::size_t& best_index) const {
  best_sq = std::numeric_limits<double>::infinity();
  best_index = std::numeric_limits<std::size_t>::max();
  if (effective_ == Acceleration::kd_tree)
    search(0, x, best_sq, best_index);
  else if (effective_ == Acceleration::blocked)
    blocked_batch(x, 1, &best_sq, &best_index);
  else
    scan(0, static_cast<std::uint32_t>(order_.size()), x, best_sq, best_index);
}

namespace {
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
constexpr std::size_t kBatchRows = 256;
}  // namespace

// ||x - y||^2 = ||x||^2 + ||y||^2 - 2 x.y screens all support points with
// one matrix product; every point whose screened value lies within twice the
// rounding bound of the smallest one is then rescanned exactly.
void SupportIndex::blocked_batch(const double* pts, std::size_t count, double* best_sq,
                                 std::size_t* best_index) const {
  const std::size_t n = support_.size(), d = support_.dim();
  const Eigen::Map<const RowMatrix> S(packed_.data(), static_cast<Eigen::Index>(n),
                                      static_cast<Eigen::Index>(d));
  constexpr double kUnit = std::numeric_limits<double>::epsilon();
  RowMatrix G;
  for (std::size_t start = 0; start < count; start += kBatchRows) {
    const std::size_t rows = std::min(kBatchRows, count - start);
    const Eigen::Map<const RowMatrix> Q(pts + start * d, static_cast<Eigen::Index>(rows),
                                        static_cast<Eigen::Index>(d));
    G.noalias() = Q * S.transpose();
    for (std::size_t r = 0; r < rows; ++r) {
      const double* x = pts + (start + r) * d;
      double xn = 0.0;
      for (std::size_t k = 0; k < d; ++k) xn += x[k] * x[k];
      const double* g = G.data() + r * n;
      double lowest = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) lowest = std::min(lowest, sq_norms_[j] - 2.0 * g[j]);
      const double slack = 16.0 * static_cast<double>(d + 4) * kUnit * (xn + max_sq_norm_);
      const double cut = lowest + slack;
      double bsq = std::numeric_limits<double>::infinity();
      std::size_t bidx = std::numeric_limits<std::size_t>::max();
      for (std::size_t j = 0; j < n; ++j) {
        if (sq_norms_[j] - 2.0 * g[j] > cut) continue;
        const double sq = squared_distance(x, packed_.data() + j * d, d);
        const std::size_t idx = order_[j];
        if (sq < bsq || (sq == bsq && idx < bidx)) {
          bsq = sq;
          bidx = idx;
        }
      }
      best_sq[start + r] = bsq;
      best_index[start + r] = bidx;
    }
  }
}

void SupportIndex::query_batch_squared(const double* pts, std::size_t count, double* best_sq,
                                       std::size_t* best_index) const {
  if (effective_ == Acceleration::blocked) {
    blocked_batch(pts, count, best_sq, best_index);
    return;
  }
  const std::size_t d = support_.dim();
  for (std::size_t i = 0; i < count; ++i) query_squared(pts + i * d, best_sq[i], best_index[i]);
}

NearestResult SupportIndex::query(std::span<const double> x) const {
  if (x.size() != support_.dim())
    throw std::invalid_argument("SupportIndex::query: dimension mismatch");
  double sq;
  std::size_t idx;
  query_squared(x.data(), sq, idx);
  return {cost_from_squared(spec_, sq), idx};
}

SupportIndex build_index(const PointCloud& support, CostSpec spec, Acceleration accel) {
  return SupportIndex(support, spec, accel);
}

NearestResult zero_ctransform(const SupportIndex& index, std::span<const double> x) {
  return index.query(x);
}

NestedSupport::NestedSupport(const PointCloud& support, std::vector<std::size_t> sizes, CostSpec spec,
                             Acceleration accel)
    : support_(support), sizes_(std::move(sizes)), spec_(spec), dim_(support.dim()) {
  if (sizes_.empty()) throw std::invalid_argument("NestedSupport: no levels");
  std::size_t prev = 0;
  for (std::size_t s : sizes_) {
    if (s <= prev) throw std::invalid_argument("NestedSupport: sizes must be strictly increasing");
    if (s > support.size()) throw std::invalid_argument("NestedSupport: size exceeds support");
    parts_.emplace_back(support.slice(prev, s - prev), spec, accel);
    prev = s;
  }
}

void NestedSupport::query(const double* x, std::span<NearestResult> out) const {
  double run_sq = std::numeric_limits<double>::infinity();
  std::size_t run_idx = 0, offset = 0;
  for (std::size_t l = 0; l < parts_.size(); ++l) {
    double sq;
    std::size_t idx;
    parts_[l].query_squared(x, sq, idx);
    // earlier levels hold lower indices, so a tie keeps the running answer
    if (sq < run_sq) {
      run_sq = sq;
      run_idx = idx + offset;
    }
    out[l] = {cost_from_squared(spec_, run_sq), run_idx};
    offset = sizes_[l];
  }
}

void NestedSupport::query_batch(const double* pts, std::size_t count, NearestResult* out) const {
  const std::size_t levels = parts_.size();
  std::vector<double> run_sq(count, std::numeric_limits<double>::infinity()), sq(count);
  std::vector<std::size_t> run_idx(count, 0), idx(count);
  std::size_t offset = 0;
  for (std::size_t l = 0; l < levels; ++l) {
    parts_[l].query_batch_squared(pts, count, sq.data(), idx.data());
    for (std::size_t i = 0; i < count; ++i) {
      if (sq[i] < run_sq[i]) {
        run_sq[i] = sq[i];
        run_idx[i] = idx[i] + offset;
      }
      out[i * levels + l] = {cost_from_squared(spec_, run_sq[i]), run_idx[i]};
    }
    offset = sizes_[l];
  }
}

}  // namespace otgeo
