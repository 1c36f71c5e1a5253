#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "otgeo/measure.hpp"
#include "otgeo/sampler.hpp"

namespace otgeo::synth {

enum class ManifoldKind {
  hypercube_mixture,
  lowrank_gaussian_mixture,
  lowrank_gaussian,
  intro_mixture,
  uniform_cube,
};

const char* to_string(ManifoldKind kind);
ManifoldKind parse_manifold_kind(const std::string& text);

/// One mixture component: a k-dimensional flat piece of R^d.
///  - hypercube: U[0,1]^k x {0}^(d-k), times `scale`, plus `offset`
///  - lowrank gaussian: N(0, scale^2 P P^T) plus `offset`, P a frozen d x k frame
struct Component {
  std::size_t intrinsic_dim = 1;
  double proportion = 1.0;
  std::vector<double> offset;  // empty means zero
  double scale = 1.0;
};

struct ManifoldConfig {
  ManifoldKind kind = ManifoldKind::uniform_cube;
  std::size_t ambient_d = 2;
  std::vector<Component> components;
  /// Seeds the orthonormal frames of Gaussian components.
  std::uint64_t frame_seed = 0x6672616d65ULL;

  void validate() const;

  static ManifoldConfig uniform_cube(std::size_t d);
  static ManifoldConfig hypercube_mixture(std::size_t ambient_d, std::vector<Component> parts);
  static ManifoldConfig lowrank_gaussian(std::size_t ambient_d, std::size_t rank);
  static ManifoldConfig lowrank_gaussian_mixture(std::size_t ambient_d, std::vector<Component> parts);
  /// 1/2 U([0,1]^2 x {0}^8) + 1/2 U([1,2]^8 x {0}^2) in R^10.
  static ManifoldConfig intro_mixture();
};

/// The three R^20 dimension benchmark configurations, effective dimension 10:
/// hypercubes 80% 2D / 20% 10D, low-rank Gaussians 80% rank 2 / 20% rank 10,
/// and a single rank-10 Gaussian.
std::vector<std::pair<std::string, ManifoldConfig>> dimension_benchmark_configs();

/// Source for the schedule sensitivity and bagging experiments: 90% rank-5
/// Gaussian and 10% rank-1 Gaussian in R^10.
ManifoldConfig sensitivity_source();

/// Sampler for a configuration. Frames are fixed at construction.
class ManifoldSampler final : public PointSampler {
 public:
  explicit ManifoldSampler(ManifoldConfig cfg);

  std::size_t dim() const override { return cfg_.ambient_d; }
  void draw(Rng& rng, std::span<double> out) const override;

  const ManifoldConfig& config() const { return cfg_; }
  /// Population mean and second-moment matrix E[x x^T].
  Eigen::VectorXd mean() const;
  Eigen::MatrixXd second_moment() const;

 private:
  ManifoldConfig cfg_;
  std::vector<Eigen::MatrixXd> frames_;
  std::vector<double> cumulative_;
};

PointCloud sample_manifold(const ManifoldConfig& cfg, std::size_t n, SeedSpec seed);

/// Source measure pushed through the Brenier map x -> A x + b with A
/// symmetric PSD (gradient of the convex potential x^T A x / 2 + b^T x).
struct BrenierPair {
  ManifoldConfig source;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  void validate() const;
  /// E||x - (A x + b)||^2 under the source, from its first two moments.
  double true_w2sq() const;
};

struct BrenierSample {
  PointCloud source;
  PointCloud target;
  double true_w2sq;
};

/// Source sample X and target sample T(X') with X' an independent source draw.
BrenierSample sample_brenier_pair(const BrenierPair& pair, std::size_t n, SeedSpec seed);

struct MonteCarloValue {
  double mean;
  double standard_error;
};

/// Plain Monte Carlo E||x - T(x)||^2, used to cross-check true_w2sq().
MonteCarloValue monte_carlo_w2sq(const BrenierPair& pair, std::size_t n, SeedSpec seed);

/// W2^2 between N(m1, S1) and N(m2, S2):
/// ||m1 - m2||^2 + tr(S1 + S2 - 2 (S1^1/2 S2 S1^1/2)^1/2).
double bures_w2sq(const Eigen::VectorXd& m1, const Eigen::MatrixXd& S1, const Eigen::VectorXd& m2,
                  const Eigen::MatrixXd& S2);

/// Symmetric PSD square root; eigenvalues in [-tol, 0) are clamped to 0.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& S);

/// Orthonormal d x k frame from a seeded QR of Gaussian columns.
Eigen::MatrixXd random_frame(std::size_t d, std::size_t k, SeedSpec seed);

}  // namespace otgeo::synth
