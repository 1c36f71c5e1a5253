#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "otgeo/random.hpp"

namespace otgeo {

/// n points in R^d, row-major, finite coordinates. Immutable once built.
class PointCloud {
 public:
  PointCloud(std::size_t n, std::size_t d, std::vector<double> coords);

  static PointCloud from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }

  std::span<const double> point(std::size_t i) const { return {coords_.data() + i * d_, d_}; }
  std::span<const double> data() const { return coords_; }

  PointCloud head(std::size_t count) const;
  PointCloud subset(std::span<const std::size_t> indices) const;
  /// Rows [first, first + count).
  PointCloud slice(std::size_t first, std::size_t count) const;

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<double> coords_;
};

/// Stack two clouds of equal dimension.
PointCloud concat(const PointCloud& a, const PointCloud& b);

enum class CostKind { euclidean_p1, euclidean_p2_squared };

struct CostSpec {
  CostKind kind = CostKind::euclidean_p2_squared;

  static constexpr CostSpec p1() { return {CostKind::euclidean_p1}; }
  static constexpr CostSpec p2_squared() { return {CostKind::euclidean_p2_squared}; }
  friend bool operator==(const CostSpec&, const CostSpec&) = default;
};

const char* to_string(CostKind kind);
CostKind parse_cost_kind(const std::string& text);

// Unchecked kernels shared by every cost-evaluating path so that all of
// them round identically.
inline double squared_distance(const double* x, const double* y, std::size_t d) {
  double acc = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double diff = x[k] - y[k];
    acc += diff * diff;
  }
  return acc;
}

inline double cost_from_squared(CostSpec spec, double sq) {
  return spec.kind == CostKind::euclidean_p1 ? std::sqrt(sq) : sq;
}

/// c(x, y). Throws std::invalid_argument on dimension mismatch.
double cost(CostSpec spec, std::span<const double> x, std::span<const double> y);

/// PointCloud plus weights on the simplex (renormalized on construction).
class DiscreteMeasure {
 public:
  DiscreteMeasure(PointCloud support, std::vector<double> weights);

  const PointCloud& support() const { return support_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return support_.size(); }

  /// Same measure with zero-weight atoms removed.
  DiscreteMeasure without_zero_atoms() const;

 private:
  PointCloud support_;
  std::vector<double> weights_;
};

DiscreteMeasure empirical_measure(const PointCloud& cloud);

inline constexpr std::size_t kDiameterExactLimit = 4096;

enum class DiameterPath { exact_pairwise, subsample_with_bbox_proxy };

struct DiameterEstimate {
  double value = 0.0;
  DiameterPath path = DiameterPath::exact_pairwise;
  /// Max pairwise cost over the subsample (equals value on the exact path).
  double sample_max = 0.0;
};

/// Max pairwise cost over the sample. Above kDiameterExactLimit points the
/// result is max(subsample max, cost between bounding-box corners), an upper
/// proxy for the sample diameter.
DiameterEstimate diameter_estimate(const PointCloud& cloud, CostSpec spec,
                                   SeedSpec seed = SeedSpec{0, 0x64696d});

/// Output of any estimator: a point value, a confidence half-width and the
/// parameters that produced it.
struct EstimateReport {
  double value = 0.0;
  double half_width = 0.0;
  double delta = 0.05;
  std::map<std::string, double> meta;
  std::vector<std::string> flags;

  bool has_flag(const std::string& flag) const;
};

}  // namespace otgeo
