#include "otgeo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace otgeo::synth {

const char* to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::hypercube_mixture: return "hypercube_mixture";
    case ManifoldKind::lowrank_gaussian_mixture: return "lowrank_gaussian_mixture";
    case ManifoldKind::lowrank_gaussian: return "lowrank_gaussian";
    case ManifoldKind::intro_mixture: return "intro_mixture";
    case ManifoldKind::uniform_cube: return "uniform_cube";
  }
  return "?";
}

ManifoldKind parse_manifold_kind(const std::string& text) {
  for (auto k : {ManifoldKind::hypercube_mixture, ManifoldKind::lowrank_gaussian_mixture,
                 ManifoldKind::lowrank_gaussian, ManifoldKind::intro_mixture,
                 ManifoldKind::uniform_cube})
    if (text == to_string(k)) return k;
  throw std::invalid_argument("unknown manifold kind: " + text);
}

namespace {

bool is_gaussian(ManifoldKind kind) {
  return kind == ManifoldKind::lowrank_gaussian || kind == ManifoldKind::lowrank_gaussian_mixture;
}

}  // namespace

void ManifoldConfig::validate() const {
  if (ambient_d == 0) throw std::invalid_argument("manifold config: ambient_d must be >= 1");
  if (components.empty()) throw std::invalid_argument("manifold config: no components");
  double total = 0.0;
  for (const auto& c : components) {
    if (c.intrinsic_dim == 0 || c.intrinsic_dim > ambient_d)
      throw std::invalid_argument("manifold config: component intrinsic dim " +
                                  std::to_string(c.intrinsic_dim) + " not in [1, ambient_d=" +
                                  std::to_string(ambient_d) + "]");
    if (!(c.proportion >= 0.0)) throw std::invalid_argument("manifold config: negative proportion");
    if (!c.offset.empty() && c.offset.size() != ambient_d)
      throw std::invalid_argument("manifold config: offset length must equal ambient_d");
    if (!(c.scale > 0.0)) throw std::invalid_argument("manifold config: scale must be > 0");
    total += c.proportion;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("manifold config: proportions must sum to 1");
}

ManifoldConfig ManifoldConfig::uniform_cube(std::size_t d) {
  return {ManifoldKind::uniform_cube, d, {Component{d, 1.0, {}, 1.0}}};
}

ManifoldConfig ManifoldConfig::hypercube_mixture(std::size_t ambient_d, std::vector<Component> parts) {
  return {ManifoldKind::hypercube_mixture, ambient_d, std::move(parts)};
}

ManifoldConfig ManifoldConfig::lowrank_gaussian(std::size_t ambient_d, std::size_t rank) {
  return {ManifoldKind::lowrank_gaussian, ambient_d, {Component{rank, 1.0, {}, 1.0}}};
}

ManifoldConfig ManifoldConfig::lowrank_gaussian_mixture(std::size_t ambient_d,
                                                        std::vector<Component> parts) {
  return {ManifoldKind::lowrank_gaussian_mixture, ambient_d, std::move(parts)};
}

ManifoldConfig ManifoldConfig::intro_mixture() {
  std::vector<double> shift(10, 0.0);
  std::fill(shift.begin(), shift.begin() + 8, 1.0);
  return {ManifoldKind::intro_mixture, 10, {Component{2, 0.5, {}, 1.0}, Component{8, 0.5, shift, 1.0}}};
}

std::vector<std::pair<std::string, ManifoldConfig>> dimension_benchmark_configs() {
  return {
      {"hypercube_mixture",
       ManifoldConfig::hypercube_mixture(20, {Component{2, 0.8, {}, 1.0}, Component{10, 0.2, {}, 1.0}})},
      {"lowrank_gaussian_mixture",
       ManifoldConfig::lowrank_gaussian_mixture(20, {Component{2, 0.8, {}, 1.0},
                                                     Component{10, 0.2, {}, 1.0}})},
      {"lowrank_gaussian", ManifoldConfig::lowrank_gaussian(20, 10)},
  };
}

ManifoldConfig sensitivity_source() {
  return ManifoldConfig::lowrank_gaussian_mixture(10, {Component{5, 0.9, {}, 1.0},
                                                       Component{1, 0.1, {}, 1.0}});
}

Eigen::MatrixXd random_frame(std::size_t d, std::size_t k, SeedSpec seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd G(d, k);
  for (Eigen::Index c = 0; c < G.cols(); ++c)
    for (Eigen::Index r = 0; r < G.rows(); ++r) G(r, c) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
  // fix column signs so the frame is a function of G alone
  Eigen::MatrixXd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < Q.cols(); ++c)
    if (R(c, c) < 0) Q.col(c) *= -1.0;
  return Q;
}

ManifoldSampler::ManifoldSampler(ManifoldConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  double acc = 0.0;
  for (std::size_t c = 0; c < cfg_.components.size(); ++c) {
    acc += cfg_.components[c].proportion;
    cumulative_.push_back(acc);
    if (is_gaussian(cfg_.kind))
      frames_.push_back(random_frame(cfg_.ambient_d, cfg_.components[c].intrinsic_dim,
                                     SeedSpec{cfg_.frame_seed, c}));
  }
  cumulative_.back() = 1.0;
}

void ManifoldSampler::draw(Rng& rng, std::span<double> out) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t c = 0;
  if (cfg_.components.size() > 1) {
    const double u = unit(rng);
    c = static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
                                 cumulative_.begin());
    c = std::min(c, cfg_.components.size() - 1);
  }
  const Component& comp = cfg_.components[c];
  std::fill(out.begin(), out.end(), 0.0);
  if (is_gaussian(cfg_.kind)) {
    std::normal_distribution<double> normal;
    const Eigen::MatrixXd& P = frames_[c];
    for (std::size_t j = 0; j < comp.intrinsic_dim; ++j) {
      const double z = normal(rng) * comp.scale;
      for (std::size_t r = 0; r < cfg_.ambient_d; ++r)
        out[r] += P(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) * z;
    }
  } else {
    for (std::size_t j = 0; j < comp.intrinsic_dim; ++j) out[j] = comp.scale * unit(rng);
  }
  if (!comp.offset.empty())
    for (std::size_t r = 0; r < cfg_.ambient_d; ++r) out[r] += comp.offset[r];
}

Eigen::VectorXd ManifoldSampler::mean() const {
  const auto d = static_cast<Eigen::Index>(cfg_.ambient_d);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(d);
  for (const auto& comp : cfg_.components) {
    Eigen::VectorXd mc = Eigen::VectorXd::Zero(d);
    if (!is_gaussian(cfg_.kind))
      for (std::size_t j = 0; j < comp.intrinsic_dim; ++j) mc(static_cast<Eigen::Index>(j)) = 0.5 * comp.scale;
    if (!comp.offset.empty()) mc += Eigen::Map<const Eigen::VectorXd>(comp.offset.data(), d);
    m += comp.proportion * mc;
  }
  return m;
}

Eigen::MatrixXd ManifoldSampler::second_moment() const {
  const auto d = static_cast<Eigen::Index>(cfg_.ambient_d);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t c = 0; c < cfg_.components.size(); ++c) {
    const auto& comp = cfg_.components[c];
    Eigen::VectorXd mc = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    if (is_gaussian(cfg_.kind)) {
      cov = comp.scale * comp.scale * frames_[c] * frames_[c].transpose();
    } else {
      for (std::size_t j = 0; j < comp.intrinsic_dim; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        mc(jj) = 0.5 * comp.scale;
        cov(jj, jj) = comp.scale * comp.scale / 12.0;
      }
    }
    if (!comp.offset.empty()) mc += Eigen::Map<const Eigen::VectorXd>(comp.offset.data(), d);
    M += comp.proportion * (cov + mc * mc.transpose());
  }
  return M;
}

PointCloud sample_manifold(const ManifoldConfig& cfg, std::size_t n, SeedSpec seed) {
  if (n == 0) throw std::invalid_argument("sample_manifold: n must be >= 1");
  return ManifoldSampler(cfg).sample(n, seed);
}

namespace {

void require_psd(const Eigen::MatrixXd& S, const char* what) {
  if (S.rows() != S.cols()) throw std::invalid_argument(std::string(what) + ": not square");
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument(std::string(what) + ": not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw std::invalid_argument(std::string(what) + ": not positive semidefinite");
}

}  // namespace

void BrenierPair::validate() const {
  source.validate();
  const auto d = static_cast<Eigen::Index>(source.ambient_d);
  if (A.rows() != d || A.cols() != d || b.size() != d)
    throw std::invalid_argument("BrenierPair: map dimension does not match source dimension");
  require_psd(A, "BrenierPair map A");
}

double BrenierPair::true_w2sq() const {
  validate();
  ManifoldSampler src(source);
  const Eigen::MatrixXd B = A - Eigen::MatrixXd::Identity(A.rows(), A.cols());
  // E||B x + b||^2 = tr(B^T B E[xx^T]) + 2 b^T B E[x] + ||b||^2
  return (B.transpose() * B * src.second_moment()).trace() + 2.0 * b.dot(B * src.mean()) +
         b.squaredNorm();
}

BrenierSample sample_brenier_pair(const BrenierPair& pair, std::size_t n, SeedSpec seed) {
  pair.validate();
  ManifoldSampler src(pair.source);
  PointCloud x = src.sample(n, seed.derive(0));
  PointCloud x2 = src.sample(n, seed.derive(1));
  const std::size_t d = src.dim();
  std::vector<double> t(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Map<const Eigen::VectorXd> p(x2.point(i).data(), static_cast<Eigen::Index>(d));
    Eigen::Map<Eigen::VectorXd>(t.data() + i * d, static_cast<Eigen::Index>(d)) = pair.A * p + pair.b;
  }
  return {std::move(x), PointCloud(n, d, std::move(t)), pair.true_w2sq()};
}

MonteCarloValue monte_carlo_w2sq(const BrenierPair& pair, std::size_t n, SeedSpec seed) {
  pair.validate();
  ManifoldSampler src(pair.source);
  Rng rng = make_rng(seed);
  const auto d = static_cast<Eigen::Index>(src.dim());
  Eigen::VectorXd x(d);
  const Eigen::MatrixXd B = pair.A - Eigen::MatrixXd::Identity(d, d);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    src.draw(rng, {x.data(), static_cast<std::size_t>(d)});
    const double v = (B * x + pair.b).squaredNorm();
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double bures_w2sq(const Eigen::VectorXd& m1, const Eigen::MatrixXd& S1, const Eigen::VectorXd& m2,
                  const Eigen::MatrixXd& S2) {
  if (S1.rows() != S2.rows() || m1.size() != m2.size() || m1.size() != S1.rows())
    throw std::invalid_argument("bures_w2sq: dimension mismatch");
  require_psd(S1, "bures_w2sq S1");
  require_psd(S2, "bures_w2sq S2");
  const Eigen::MatrixXd r1 = psd_sqrt(S1);
  Eigen::MatrixXd inner = r1 * S2 * r1;
  inner = 0.5 * (inner + inner.transpose());
  const double cross = psd_sqrt(inner).trace();
  const double value = (m1 - m2).squaredNorm() + S1.trace() + S2.trace() - 2.0 * cross;
  return std::max(0.0, value);
}

}  // namespace otgeo::synth
