#pragma once

#include <span>

#include "otgeo/measure.hpp"
#include "otgeo/random.hpp"

namespace otgeo {

/// Source of i.i.d. points from some measure on R^d.
class PointSampler {
 public:
  virtual ~PointSampler() = default;
  virtual std::size_t dim() const = 0;
  /// Writes one draw into `out` (size dim()).
  virtual void draw(Rng& rng, std::span<double> out) const = 0;

  /// n sequential draws from the stream `seed`.
  PointCloud sample(std::size_t n, SeedSpec seed) const;
  /// Appends n sequential draws from an existing generator.
  void sample_into(Rng& rng, std::size_t n, std::vector<double>& coords) const;
};

/// Uniform resampling (with replacement) of a fixed cloud.
class EmpiricalSampler final : public PointSampler {
 public:
  explicit EmpiricalSampler(PointCloud cloud) : cloud_(std::move(cloud)) {}
  std::size_t dim() const override { return cloud_.dim(); }
  void draw(Rng& rng, std::span<double> out) const override;

 private:
  PointCloud cloud_;
};

/// Wraps another sampler and applies x -> scale * R x + shift. Used by the
/// equivariance tests and by user-facing rescaling.
class AffineSampler final : public PointSampler {
 public:
  AffineSampler(const PointSampler& base, double scale, std::vector<double> rotation_row_major,
                std::vector<double> shift);
  std::size_t dim() const override { return base_.dim(); }
  void draw(Rng& rng, std::span<double> out) const override;

 private:
  const PointSampler& base_;
  double scale_;
  std::vector<double> rotation_;
  std::vector<double> shift_;
};

}  // namespace otgeo
