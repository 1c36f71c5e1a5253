#include "otgeo/sinkhorn.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "otgeo/parallel.hpp"

namespace otgeo {

namespace {

// Cost matrices up to this many entries are cached (with their transpose);
// larger problems recompute costs row by row in linear memory.
constexpr std::size_t kCostCacheLimit = 16'000'000;
constexpr std::size_t kRowChunk = 64;

class CostOperator {
 public:
  CostOperator(const PointCloud& x, const PointCloud& y, CostSpec spec)
      : x_(x), y_(y), spec_(spec), n_(x.size()), m_(y.size()) {
    if (x.dim() != y.dim()) throw std::invalid_argument("sinkhorn: dimension mismatch");
    if (n_ * m_ <= kCostCacheLimit) {
      c_.resize(n_ * m_);
      for (std::size_t i = 0; i < n_; ++i) fill(x_, i, y_, c_.data() + i * m_);
      if (&x_ == &y_) {
        transposed_is_same_ = true;
      } else {
        ct_.resize(n_ * m_);
        for (std::size_t j = 0; j < m_; ++j)
          for (std::size_t i = 0; i < n_; ++i) ct_[j * n_ + i] = c_[i * m_ + j];
      }
      for (double v : c_)
        if (std::isnan(v)) throw std::invalid_argument("sinkhorn: NaN in cost matrix");
    }
  }

  std::size_t rows() const { return n_; }
  std::size_t cols() const { return m_; }

  // Costs c(x_i, y_j) for all j. Returns a pointer to the row (either cached
  // or written into `buf`).
  const double* row(std::size_t i, double* buf) const {
    if (!c_.empty()) return c_.data() + i * m_;
    fill(x_, i, y_, buf);
    return buf;
  }
  // Costs c(x_i, y_j) for all i.
  const double* col(std::size_t j, double* buf) const {
    if (!c_.empty()) return transposed_is_same_ ? c_.data() + j * m_ : ct_.data() + j * n_;
    fill(y_, j, x_, buf);
    return buf;
  }

 private:
  void fill(const PointCloud& a, std::size_t i, const PointCloud& b, double* out) const {
    const std::size_t d = a.dim();
    const double* p = a.point(i).data();
    const double* q = b.data().data();
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[j] = cost_from_squared(spec_, squared_distance(p, q + j * d, d));
      if (std::isnan(out[j])) throw std::invalid_argument("sinkhorn: NaN in cost matrix");
    }
  }

  const PointCloud& x_;
  const PointCloud& y_;
  CostSpec spec_;
  std::size_t n_, m_;
  std::vector<double> c_, ct_;
  bool transposed_is_same_ = false;
};

// exp(x) for x <= 0, branch-free so the map loop vectorizes. Range
// reduction x = k ln2 + r, |r| <= ln2/2, then a degree-12 Taylor polynomial
// (relative error below 4e-16). The 2^k factor is built from the low
// mantissa bits of the rounding shift.
inline double exp_nonpositive(double x) {
  x = x < -708.0 ? -708.0 : x;
  constexpr double kLog2e = 1.4426950408889634;
  constexpr double kLn2Hi = 6.93147180369123816490e-01;
  constexpr double kLn2Lo = 1.90821492927058770002e-10;
  constexpr double kShift = 6755399441055744.0;  // 1.5 * 2^52
  const double shifted = x * kLog2e + kShift;
  const double kd = shifted - kShift;
  const double r = (x - kd * kLn2Hi) - kd * kLn2Lo;
  double p = 1.0 / 479001600.0;
  p = p * r + 1.0 / 39916800.0;
  p = p * r + 1.0 / 3628800.0;
  p = p * r + 1.0 / 362880.0;
  p = p * r + 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;
  const std::uint64_t bits = (std::bit_cast<std::uint64_t>(shifted) + 1023) << 52;
  return p * std::bit_cast<double>(bits);
}

constexpr std::size_t kLanes = 4;

// log sum_j exp((h_j - c_j) / eps). Reductions use kLanes fixed partial
// accumulators so the result does not depend on vector width.
double log_sum_exp(const double* __restrict c, const double* __restrict h, std::size_t m,
                   double inv_eps, double* __restrict tmp) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double mx[kLanes] = {kNegInf, kNegInf, kNegInf, kNegInf};
  const std::size_t body = m - m % kLanes;
  for (std::size_t j = 0; j < body; j += kLanes)
    for (std::size_t k = 0; k < kLanes; ++k) {
      const double t = (h[j + k] - c[j + k]) * inv_eps;
      tmp[j + k] = t;
      mx[k] = mx[k] < t ? t : mx[k];
    }
  double top = std::max(std::max(mx[0], mx[1]), std::max(mx[2], mx[3]));
  for (std::size_t j = body; j < m; ++j) {
    tmp[j] = (h[j] - c[j]) * inv_eps;
    top = std::max(top, tmp[j]);
  }
  for (std::size_t j = 0; j < m; ++j) tmp[j] = exp_nonpositive(tmp[j] - top);
  double acc[kLanes] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < body; j += kLanes)
    for (std::size_t k = 0; k < kLanes; ++k) acc[k] += tmp[j + k];
  double s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (std::size_t j = body; j < m; ++j) s += tmp[j];
  return top + std::log(s);
}

// out_i = -eps * log sum_j exp((h_j - C_ij) / eps), h_j = pot_j + eps log w_j.
// `transpose` reduces over rows of C instead.
void soft_c_transform(const CostOperator& C, bool transpose, const std::vector<double>& pot,
                      const std::vector<double>& log_w, double eps, std::vector<double>& out) {
  const std::size_t outer = transpose ? C.cols() : C.rows();
  const std::size_t inner = transpose ? C.rows() : C.cols();
  std::vector<double> h(inner);
  for (std::size_t j = 0; j < inner; ++j) h[j] = pot[j] + eps * log_w[j];
  const double inv_eps = 1.0 / eps;
  out.resize(outer);
  const std::size_t chunks = (outer + kRowChunk - 1) / kRowChunk;
  parallel_for(chunks, [&](std::size_t chunk) {
    std::vector<double> buf(inner), tmp(inner);
    const std::size_t end = std::min(outer, (chunk + 1) * kRowChunk);
    for (std::size_t i = chunk * kRowChunk; i < end; ++i) {
      const double* c = transpose ? C.col(i, buf.data()) : C.row(i, buf.data());
      out[i] = -eps * log_sum_exp(c, h.data(), inner, inv_eps, tmp.data());
    }
  });
}

std::vector<double> log_weights(std::span<const double> w) {
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = std::log(w[i]);
  return out;
}

void check_params(double epsilon, const SinkhornOptions& opts) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("sinkhorn: epsilon must be > 0");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("sinkhorn: tol must be > 0");
  if (opts.max_iter == 0) throw std::invalid_argument("sinkhorn: max_iter must be >= 1");
  if (!(opts.eps_scaling >= 0.0 && opts.eps_scaling < 1.0))
    throw std::invalid_argument("sinkhorn: eps_scaling must be in [0, 1)");
}

// Annealing levels strictly above `epsilon`, largest first.
std::vector<double> annealing_levels(const PointCloud& x, const PointCloud& y, CostSpec spec,
                                     double epsilon, double q) {
  std::vector<double> levels;
  if (q <= 0.0) return levels;
  const std::size_t d = x.dim();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity()), hi(d, -lo[0]);
  for (const PointCloud* c : {&x, &y})
    for (std::size_t i = 0; i < c->size(); ++i)
      for (std::size_t k = 0; k < d; ++k) {
        lo[k] = std::min(lo[k], c->point(i)[k]);
        hi[k] = std::max(hi[k], c->point(i)[k]);
      }
  for (double e = cost_from_squared(spec, squared_distance(lo.data(), hi.data(), d)); e > epsilon; e *= q)
    levels.push_back(e);
  return levels;
}

// Row sums of the plan a_i b_j exp((f_i + g_j - C_ij)/eps) given the soft
// transform t = T(g): r_i = a_i exp((f_i - t_i)/eps).
std::vector<double> row_sums(std::span<const double> a, const std::vector<double>& f,
                             const std::vector<double>& t, double eps) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * std::exp((f[i] - t[i]) / eps);
  return r;
}

double l1(std::span<const double> r, std::span<const double> a) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += std::abs(r[i] - a[i]);
  return s;
}

// Newton ascent on the concave semi-dual J(f) = <a, f> + <b, T(f)>, g kept
// as the exact soft transform T(f) so the plan's column sums equal b.
// Gradient a - r, Hessian -(diag(r) - P diag(1/b) P^T) / eps. The system is
// nearly singular when the plan is close to sparse, so steps are damped by
// a ridge that grows after a failed step and shrinks after a good one.
std::size_t newton_polish(const CostOperator& C, std::span<const double> a,
                          std::span<const double> b, const std::vector<double>& log_a,
                          const std::vector<double>& log_b, double eps, double tol,
                          std::size_t max_steps, std::vector<double>& f, std::vector<double>& g) {
  const auto n = static_cast<Eigen::Index>(C.rows()), m = static_cast<Eigen::Index>(C.cols());
  Eigen::MatrixXd P(n, m);
  Eigen::VectorXd r(n);
  std::vector<double> buf(static_cast<std::size_t>(m));
  Eigen::Map<const Eigen::VectorXd> av(a.data(), n), bv(b.data(), m);
  auto evaluate = [&](const std::vector<double>& ff, std::vector<double>& gg) {
    soft_c_transform(C, true, ff, log_a, eps, gg);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double* c = C.row(static_cast<std::size_t>(i), buf.data());
      for (Eigen::Index j = 0; j < m; ++j)
        P(i, j) = std::exp((ff[i] + gg[j] - c[j]) / eps + log_a[i] + log_b[j]);
    }
    r = P.rowwise().sum();
    double J = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) J += a[i] * ff[i];
    for (Eigen::Index j = 0; j < m; ++j) J += b[j] * gg[j];
    return J;
  };
  double J = evaluate(f, g);
  double viol = (r - av).lpNorm<1>();
  const double ridge_min = 1e-13 * av.maxCoeff();
  double ridge = ridge_min;
  std::size_t steps = 0;
  std::vector<double> f_try(f.size()), g_try;
  while (steps < std::min(max_steps, kNewtonMaxSteps) && viol > tol) {
    const Eigen::VectorXd grad = av - r;
    Eigen::MatrixXd M = -(P * bv.cwiseInverse().asDiagonal() * P.transpose());
    M.diagonal() += r;
    bool accepted = false;
    for (int attempt = 0; attempt < 16 && !accepted; ++attempt, ridge *= 100.0) {
      Eigen::MatrixXd D = M;
      D.diagonal().array() += ridge;
      const Eigen::VectorXd delta = D.ldlt().solve(eps * grad);
      if (!delta.allFinite() || grad.dot(delta) <= 0.0) continue;
      for (double t = 1.0; t >= 1.0 / 64.0 && !accepted; t *= 0.5) {
        for (Eigen::Index i = 0; i < n; ++i) f_try[i] = f[i] + t * delta[i];
        const double J_try = evaluate(f_try, g_try);
        const double viol_try = (r - av).lpNorm<1>();
        const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(J);
        if (std::isfinite(J_try) && (J_try > J || (J_try >= J - slack && viol_try < viol))) {
          f.swap(f_try);
          g.swap(g_try);
          J = J_try;
          viol = viol_try;
          accepted = true;
        }
      }
    }
    ++steps;
    if (!accepted) {
      evaluate(f, g);
      break;
    }
    ridge = std::max(ridge_min, ridge / 1e3);
  }
  return steps;
}

bool same_measure(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return a.support() == b.support() &&
         std::equal(a.weights().begin(), a.weights().end(), b.weights().begin(), b.weights().end());
}

}  // namespace

SinkhornResult sinkhorn(const DiscreteMeasure& mu_in, const DiscreteMeasure& nu_in, CostSpec spec,
                        double epsilon, const SinkhornOptions& opts) {
  check_params(epsilon, opts);
  const DiscreteMeasure mu = mu_in.without_zero_atoms();
  const DiscreteMeasure nu = nu_in.without_zero_atoms();
  CostOperator C(mu.support(), nu.support(), spec);
  const auto a = mu.weights(), b = nu.weights();
  const auto log_a = log_weights(a), log_b = log_weights(b);

  SinkhornResult res;
  SinkhornState& st = res.state;
  st.epsilon = epsilon;
  st.f.assign(mu.size(), 0.0);
  st.g.assign(nu.size(), 0.0);
  std::vector<double> t;
  std::vector<double> r;

  for (double e : annealing_levels(mu.support(), nu.support(), spec, epsilon, opts.eps_scaling)) {
    if (st.iterations + 1 >= opts.max_iter) break;
    soft_c_transform(C, false, st.g, log_b, e, st.f);
    soft_c_transform(C, true, st.f, log_a, e, st.g);
    ++st.iterations;
  }
  const std::size_t warm = st.iterations;
  const bool newton = opts.newton && mu.size() <= kNewtonMaxSize && nu.size() <= kNewtonMaxSize;

  // g is always the exact soft transform of the previous f, so the plan's
  // column sums equal nu and only the rows need checking.
  for (std::size_t it = 1; warm + it <= opts.max_iter; ++it) {
    soft_c_transform(C, false, st.g, log_b, epsilon, t);
    if (it > 1) {
      r = row_sums(a, st.f, t, epsilon);
      st.marginal_violation = l1(r, a);
      if (st.marginal_violation <= opts.tol) {
        res.converged = true;
        break;
      }
      if (newton && it > kNewtonAfter) break;
    }
    st.f = t;
    soft_c_transform(C, true, st.f, log_a, epsilon, st.g);
    st.iterations = warm + it;
  }
  if (!res.converged && newton)
    st.iterations += newton_polish(C, a, b, log_a, log_b, epsilon, opts.tol,
                                   opts.max_iter - st.iterations, st.f, st.g);
  if (!res.converged) {
    soft_c_transform(C, false, st.g, log_b, epsilon, t);
    r = row_sums(a, st.f, t, epsilon);
    st.marginal_violation = l1(r, a);
    res.converged = st.marginal_violation <= opts.tol;
  }
  double value = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    value += r[i] * st.f[i];
    mass += r[i];
  }
  for (std::size_t j = 0; j < b.size(); ++j) value += b[j] * st.g[j];
  res.ot_eps = value - epsilon * (mass - 1.0);
  if (!std::isfinite(res.ot_eps)) throw std::runtime_error("sinkhorn: non-finite objective");
  return res;
}

SinkhornResult sinkhorn_symmetric(const DiscreteMeasure& mu_in, CostSpec spec, double epsilon,
                                  const SinkhornOptions& opts) {
  check_params(epsilon, opts);
  const DiscreteMeasure mu = mu_in.without_zero_atoms();
  CostOperator C(mu.support(), mu.support(), spec);
  const auto a = mu.weights();
  const auto log_a = log_weights(a);

  SinkhornResult res;
  SinkhornState& st = res.state;
  st.epsilon = epsilon;
  st.f.assign(mu.size(), 0.0);
  std::vector<double> t, r;
  for (double e : annealing_levels(mu.support(), mu.support(), spec, epsilon, opts.eps_scaling)) {
    if (st.iterations + 1 >= opts.max_iter) break;
    soft_c_transform(C, false, st.f, log_a, e, t);
    for (std::size_t i = 0; i < st.f.size(); ++i) st.f[i] = 0.5 * (st.f[i] + t[i]);
    ++st.iterations;
  }
  const std::size_t warm = st.iterations;
  const bool newton = opts.newton && mu.size() <= kNewtonMaxSize;
  for (std::size_t it = 1;; ++it) {
    soft_c_transform(C, false, st.f, log_a, epsilon, t);
    r = row_sums(a, st.f, t, epsilon);
    st.marginal_violation = 2.0 * l1(r, a);
    if (st.marginal_violation <= opts.tol) {
      res.converged = true;
      break;
    }
    if (warm + it > opts.max_iter || (newton && it > kNewtonAfter)) break;
    for (std::size_t i = 0; i < st.f.size(); ++i) st.f[i] = 0.5 * (st.f[i] + t[i]);
    st.iterations = warm + it;
  }
  if (!res.converged && newton) {
    // the symmetric optimum is (f*, f*) up to a constant shift (c, -c)
    std::vector<double> g = st.f;
    st.iterations += newton_polish(C, a, a, log_a, log_a, epsilon, 0.5 * opts.tol,
                                   opts.max_iter - st.iterations, st.f, g);
    for (std::size_t i = 0; i < st.f.size(); ++i) st.f[i] = 0.5 * (st.f[i] + g[i]);
    soft_c_transform(C, false, st.f, log_a, epsilon, t);
    r = row_sums(a, st.f, t, epsilon);
    st.marginal_violation = 2.0 * l1(r, a);
    res.converged = st.marginal_violation <= opts.tol;
  }
  st.g = st.f;
  double value = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    value += 2.0 * r[i] * st.f[i];
    mass += r[i];
  }
  res.ot_eps = value - epsilon * (mass - 1.0);
  if (!std::isfinite(res.ot_eps)) throw std::runtime_error("sinkhorn: non-finite objective");
  return res;
}

double primal_from_potentials(const DiscreteMeasure& mu, const DiscreteMeasure& nu, CostSpec spec,
                              double epsilon, const std::vector<double>& f,
                              const std::vector<double>& g) {
  if (f.size() != mu.size() || g.size() != nu.size())
    throw std::invalid_argument("primal_from_potentials: potential sizes do not match measures");
  const PointCloud& x = mu.support();
  const PointCloud& y = nu.support();
  const std::size_t d = x.dim();
  const auto a = mu.weights(), b = nu.weights();
  double transport = 0.0, kl = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double row_transport = 0.0, row_kl = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double c = cost_from_squared(spec, squared_distance(x.point(i).data(), y.point(j).data(), d));
      const double z = (f[i] + g[j] - c) / epsilon;  // log(pi_ij / (a_i b_j))
      const double p = a[i] * b[j] * std::exp(z);
      row_transport += p * c;
      row_kl += p * z - p + a[i] * b[j];
    }
    transport += row_transport;
    kl += row_kl;
  }
  return transport + epsilon * kl;
}

DivergenceResult sinkhorn_divergence(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     CostSpec spec, double epsilon, const SinkhornOptions& opts) {
  DivergenceResult out;
  out.self_mu = sinkhorn_symmetric(mu, spec, epsilon, opts);
  if (same_measure(mu, nu)) {
    out.self_nu = out.self_mu;
    out.cross = out.self_mu;
  } else {
    out.self_nu = sinkhorn_symmetric(nu, spec, epsilon, opts);
    out.cross = sinkhorn(mu, nu, spec, epsilon, opts);
  }
  out.value = out.cross.ot_eps - 0.5 * out.self_mu.ot_eps - 0.5 * out.self_nu.ot_eps;
  out.converged = out.cross.converged && out.self_mu.converged && out.self_nu.converged;
  return out;
}

}  // namespace otgeo
