#include "otgeo/sampler.hpp"

#include <stdexcept>

namespace otgeo {

PointCloud PointSampler::sample(std::size_t n, SeedSpec seed) const {
  Rng rng = make_rng(seed);
  std::vector<double> coords;
  sample_into(rng, n, coords);
  return PointCloud(n, dim(), std::move(coords));
}

void PointSampler::sample_into(Rng& rng, std::size_t n, std::vector<double>& coords) const {
  const std::size_t d = dim();
  const std::size_t start = coords.size();
  coords.resize(start + n * d);
  for (std::size_t i = 0; i < n; ++i) draw(rng, {coords.data() + start + i * d, d});
}

void EmpiricalSampler::draw(Rng& rng, std::span<double> out) const {
  std::uniform_int_distribution<std::size_t> pick(0, cloud_.size() - 1);
  auto p = cloud_.point(pick(rng));
  std::copy(p.begin(), p.end(), out.begin());
}

AffineSampler::AffineSampler(const PointSampler& base, double scale,
                             std::vector<double> rotation_row_major, std::vector<double> shift)
    : base_(base), scale_(scale), rotation_(std::move(rotation_row_major)), shift_(std::move(shift)) {
  const std::size_t d = base_.dim();
  if (!rotation_.empty() && rotation_.size() != d * d)
    throw std::invalid_argument("AffineSampler: rotation must be d x d");
  if (!shift_.empty() && shift_.size() != d)
    throw std::invalid_argument("AffineSampler: shift must have length d");
}

void AffineSampler::draw(Rng& rng, std::span<double> out) const {
  const std::size_t d = dim();
  std::vector<double> tmp(d);
  base_.draw(rng, tmp);
  for (std::size_t r = 0; r < d; ++r) {
    double v = 0.0;
    if (rotation_.empty()) {
      v = tmp[r];
    } else {
      for (std::size_t c = 0; c < d; ++c) v += rotation_[r * d + c] * tmp[c];
    }
    out[r] = scale_ * v + (shift_.empty() ? 0.0 : shift_[r]);
  }
}

}  // namespace otgeo
