#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "otgeo/measure.hpp"

namespace otgeo {

/// brute_force: exact scan. kd_tree: exact tree search. blocked: batched
/// Gram-matrix screening followed by an exact rescan of every candidate
/// within the rounding bound, so it returns the brute-force answer.
/// automatic: kd_tree up to kAutoKdDim dimensions, blocked above.
enum class Acceleration { brute_force, kd_tree, blocked, automatic };

struct NearestResult {
  double value;       // min_j c(x, x_j)
  std::size_t index;  // lowest j attaining the minimum
};

/// Exact nearest-support queries: the c-transform of the zero potential,
/// x -> min_j c(x, x_j), together with its argmin.
///
/// Both cost kinds share the Euclidean nearest neighbour, so one index
/// serves both. Queries are exact for either acceleration; ties go to the
/// lowest support index. Immutable after build and safe to query from many
/// threads.
class SupportIndex {
 public:
  static constexpr std::size_t kLeafSize = 16;
  static constexpr std::size_t kMaxKdDim = 30;
  static constexpr std::size_t kAutoKdDim = 8;

  SupportIndex(PointCloud support, CostSpec spec, Acceleration accel = Acceleration::automatic);

  const PointCloud& support() const { return support_; }
  CostSpec cost_spec() const { return spec_; }
  Acceleration requested() const { return requested_; }
  /// automatic resolved; kd_tree becomes blocked above kMaxKdDim dimensions.
  Acceleration effective() const { return effective_; }

  /// Throws std::invalid_argument when x has the wrong dimension.
  NearestResult query(std::span<const double> x) const;

  /// Squared Euclidean distance and index; no dimension check.
  void query_squared(const double* x, double& best_sq, std::size_t& best_index) const;

  /// query_squared for `count` row-major points.
  void query_batch_squared(const double* pts, std::size_t count, double* best_sq,
                           std::size_t* best_index) const;

 private:
  struct Node {
    std::uint32_t begin, end;   // range into order_
    std::int32_t left = -1, right = -1;
    std::uint32_t split_dim = 0;
    double split_value = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const double* x, double& best_sq, std::size_t& best_index) const;
  void scan(std::uint32_t begin, std::uint32_t end, const double* x, double& best_sq,
            std::size_t& best_index) const;
  void blocked_batch(const double* pts, std::size_t count, double* best_sq,
                     std::size_t* best_index) const;

  PointCloud support_;
  CostSpec spec_;
  Acceleration requested_;
  Acceleration effective_;
  std::vector<std::uint32_t> order_;   // permutation of support indices
  std::vector<double> packed_;         // coordinates in order_ sequence
  std::vector<Node> nodes_;
  std::vector<double> sq_norms_;       // blocked only, in order_ sequence
  double max_sq_norm_ = 0.0;
};

SupportIndex build_index(const PointCloud& support, CostSpec spec, Acceleration accel);

/// min_j c(x, x_j) and its lowest-index argmin.
NearestResult zero_ctransform(const SupportIndex& index, std::span<const double> x);

/// Nearest queries against the nested prefixes of one support. Level l
/// covers the first `sizes[l]` points; each level only indexes the points it
/// adds, and the answer for level l is the running minimum over levels 0..l,
/// identical to a query against that whole prefix.
class NestedSupport {
 public:
  NestedSupport(const PointCloud& support, std::vector<std::size_t> sizes, CostSpec spec,
                Acceleration accel = Acceleration::automatic);

  std::size_t levels() const { return sizes_.size(); }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  CostSpec cost_spec() const { return spec_; }
  std::size_t dim() const { return dim_; }
  const PointCloud& support() const { return support_; }

  /// Writes one result per level into `out` (size levels()).
  void query(const double* x, std::span<NearestResult> out) const;
  /// Batched form; out[i * levels() + l] is level l for point i.
  void query_batch(const double* pts, std::size_t count, NearestResult* out) const;

 private:
  PointCloud support_;
  std::vector<std::size_t> sizes_;
  std::vector<SupportIndex> parts_;
  CostSpec spec_;
  std::size_t dim_;
};

}  // namespace otgeo
