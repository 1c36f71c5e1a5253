#include "otgeo/debias.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "otgeo/parallel.hpp"

namespace otgeo {

double Schedule::epsilon(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("schedule: n must be >= 1");
  return eps0 * std::pow(static_cast<double>(n), -a);
}

Schedule make_schedule(double d_int, double eps0) {
  if (!(d_int > 0.0) || !std::isfinite(d_int)) throw std::invalid_argument("d_int must be > 0");
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) throw std::invalid_argument("eps0 must be > 0");
  Schedule s;
  s.d_int = d_int;
  s.eps0 = eps0;
  s.a = 1.0 / (d_int + 4.0);
  s.gamma = 2.0 * s.a;
  return s;
}

double auto_eps0(const PointCloud& x, const PointCloud& y, SeedSpec seed) {
  const auto diam = diameter_estimate(concat(x, y), CostSpec::p2_squared(), seed);
  return 0.05 * diam.value;
}

RichardsonWeights richardson_weights(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be > 0");
  const double t = std::exp2(gamma);
  const double den = t - 1.0;
  RichardsonWeights w;
  w.gamma = gamma;
  w.w_lo = -1.0 / den;
  w.w_hi = 1.0 - w.w_lo;  // = t / den, and keeps w_hi + w_lo = 1 exact
  return w;
}

double richardson_combine(const RichardsonWeights& w, double s_hi, double s_lo) {
  return w.w_hi * s_hi + w.w_lo * s_lo;
}

std::vector<std::size_t> half_subsample(std::size_t full, std::size_t half, Rng& rng) {
  if (half > full) throw std::invalid_argument("subsample larger than population");
  std::vector<std::size_t> idx(full);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < half; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, full - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(half);
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

void check_pair(const PointCloud& x, const PointCloud& y, const DebiasOptions& opts) {
  if (opts.spec.kind != CostKind::euclidean_p2_squared)
    throw std::invalid_argument("Richardson estimators target W2^2 and need the p2_squared cost");
  if (x.dim() != y.dim()) throw std::invalid_argument("clouds differ in dimension");
}

void check_halvable(const PointCloud& x, const PointCloud& y) {
  if (x.size() != y.size()) throw std::invalid_argument("clouds must have equal size 2n");
  if (x.size() % 2 != 0 || x.size() < 4)
    throw std::invalid_argument("cloud size must be even and 2n >= 4");
}

DivergenceResult divergence(const PointCloud& x, const PointCloud& y, double eps,
                            const DebiasOptions& opts) {
  return sinkhorn_divergence(empirical_measure(x), empirical_measure(y), opts.spec, eps,
                             opts.sinkhorn);
}

void note_solve(EstimateReport& r, const DivergenceResult& d) {
  r.meta["iterations"] += static_cast<double>(d.iterations());
  if (!d.converged && !r.has_flag("not_converged")) r.flags.emplace_back("not_converged");
}

}  // namespace

EstimateReport base_estimate(const PointCloud& x, const PointCloud& y, const Schedule& sched,
                             const DebiasOptions& opts) {
  check_pair(x, y, opts);
  EstimateReport r;
  const double eps = sched.epsilon(x.size());
  const auto d = divergence(x, y, eps, opts);
  r.value = d.value;
  r.meta["n"] = static_cast<double>(x.size());
  r.meta["eps_hi"] = eps;
  r.meta["s_hi"] = d.value;
  r.meta["d_int"] = sched.d_int;
  r.meta["gamma"] = sched.gamma;
  note_solve(r, d);
  return r;
}

BagSolves bag_divergences(const PointCloud& x, const PointCloud& y, const Schedule& sched,
                          std::size_t bags, SeedSpec seed, const DebiasOptions& opts) {
  check_pair(x, y, opts);
  check_halvable(x, y);
  if (bags == 0) throw std::invalid_argument("bags must be >= 1");
  const std::size_t full = x.size();
  const std::size_t half = full / 2;
  const double eps_hi = sched.epsilon(full);
  const double eps_lo = sched.epsilon(half);

  // Slot 0 is the full-data solve, slots 1..K the bags.
  std::vector<DivergenceResult> solves(bags + 1);
  parallel_for(bags + 1, [&](std::size_t k) {
    if (k == 0) {
      solves[0] = divergence(x, y, eps_hi, opts);
      return;
    }
    Rng rng = make_rng(seed.derive(k - 1));
    const auto ix = half_subsample(full, half, rng);
    const auto iy = half_subsample(full, half, rng);
    solves[k] = divergence(x.subset(ix), y.subset(iy), eps_lo, opts);
  });

  BagSolves out;
  out.s_hi = solves[0].value;
  for (std::size_t k = 1; k <= bags; ++k) out.s_lo.push_back(solves[k].value);
  for (const auto& s : solves) {
    out.iterations += s.iterations();
    out.converged = out.converged && s.converged;
  }
  return out;
}

EstimateReport bagged_diagonal_richardson(const PointCloud& x, const PointCloud& y,
                                          const Schedule& sched, std::size_t bags, SeedSpec seed,
                                          const DebiasOptions& opts) {
  const RichardsonWeights w = richardson_weights(sched.gamma);
  const BagSolves solves = bag_divergences(x, y, sched, bags, seed, opts);
  double s_lo = 0.0;
  for (double v : solves.s_lo) s_lo += v;
  s_lo /= static_cast<double>(bags);

  EstimateReport r;
  r.value = richardson_combine(w, solves.s_hi, s_lo);
  r.meta["n"] = static_cast<double>(x.size() / 2);
  r.meta["eps_hi"] = sched.epsilon(x.size());
  r.meta["eps_lo"] = sched.epsilon(x.size() / 2);
  r.meta["s_hi"] = solves.s_hi;
  r.meta["s_lo"] = s_lo;
  r.meta["w_hi"] = w.w_hi;
  r.meta["w_lo"] = w.w_lo;
  r.meta["d_int"] = sched.d_int;
  r.meta["gamma"] = sched.gamma;
  r.meta["bags"] = static_cast<double>(bags);
  r.meta["iterations"] = static_cast<double>(solves.iterations);
  if (!solves.converged) r.flags.emplace_back("not_converged");
  return r;
}

EstimateReport diagonal_richardson(const PointCloud& x, const PointCloud& y, const Schedule& sched,
                                   SeedSpec seed, const DebiasOptions& opts) {
  return bagged_diagonal_richardson(x, y, sched, 1, seed, opts);
}

EstimateReport eps_only_richardson(const PointCloud& x, const PointCloud& y, double epsilon,
                                   const DebiasOptions& opts) {
  check_pair(x, y, opts);
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  EstimateReport r;
  if (epsilon >= 1.0) r.flags.emplace_back("epsilon_ge_1");
  const double eps_lo = std::sqrt(epsilon);
  const auto hi = divergence(x, y, epsilon, opts);
  const auto lo = eps_lo == epsilon ? hi : divergence(x, y, eps_lo, opts);
  r.value = 2.0 * hi.value - lo.value;
  r.meta["n"] = static_cast<double>(x.size());
  r.meta["eps_hi"] = epsilon;
  r.meta["eps_lo"] = eps_lo;
  r.meta["s_hi"] = hi.value;
  r.meta["s_lo"] = lo.value;
  r.meta["w_hi"] = 2.0;
  r.meta["w_lo"] = -1.0;
  note_solve(r, hi);
  if (eps_lo != epsilon) note_solve(r, lo);
  return r;
}

}  // namespace otgeo
