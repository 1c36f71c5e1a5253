#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "otgeo/random.hpp"
#include "otgeo/sinkhorn.hpp"

using namespace otgeo;

namespace {

PointCloud gaussian_cloud(std::size_t n, std::size_t d, SeedSpec seed, double shift = 0.0) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> c(n * d);
  for (double& v : c) v = g(rng) + shift;
  return PointCloud(n, d, std::move(c));
}

// Entropic objective of the 2x2 plan with pi_11 = t.
double objective_2x2(const double a[2], const double b[2], const double C[2][2], double eps, double t) {
  const double pi[2][2] = {{t, a[0] - t}, {b[0] - t, a[1] - b[0] + t}};
  double v = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (pi[i][j] > 0) v += pi[i][j] * C[i][j] + eps * pi[i][j] * std::log(pi[i][j] / (a[i] * b[j]));
  return v;
}

double golden_min(auto f, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200; ++it) {
    if (f1 < f2) {
      hi = x2, x2 = x1, f2 = f1, x1 = hi - r * (hi - lo), f1 = f(x1);
    } else {
      lo = x1, x1 = x2, f1 = f2, x2 = lo + r * (hi - lo), f2 = f(x2);
    }
  }
  return f(0.5 * (lo + hi));
}

}  // namespace

TEST_SUITE("sinkhorn") {
  TEST_CASE("two-point problems match a one-parameter search") {
    const PointCloud xs = PointCloud::from_rows({{0.0}, {1.0}});
    const PointCloud ys = PointCloud::from_rows({{0.3}, {2.0}});
    const double a[2] = {0.3, 0.7}, b[2] = {0.6, 0.4};
    const DiscreteMeasure mu(xs, {a[0], a[1]}), nu(ys, {b[0], b[1]});
    for (auto spec : {CostSpec::p1(), CostSpec::p2_squared()}) {
      double C[2][2];
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) C[i][j] = cost(spec, xs.point(i), ys.point(j));
      for (double eps : {0.05, 0.3, 2.0}) {
        CAPTURE(eps);
        const double lo = std::max(0.0, b[0] - a[1]), hi = std::min(a[0], b[0]);
        const double want = golden_min([&](double t) { return objective_2x2(a, b, C, eps, t); }, lo, hi);
        const auto r = sinkhorn(mu, nu, spec, eps, {1e-12, 100000});
        CHECK(r.converged);
        CHECK(r.ot_eps == doctest::Approx(want).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("assignment against all permutations") {
    const PointCloud x = gaussian_cloud(6, 3, {1, 0});
    const PointCloud y = gaussian_cloud(6, 3, {2, 0}, 0.5);
    for (auto spec : {CostSpec::p1(), CostSpec::p2_squared()}) {
      std::vector<std::size_t> perm(6);
      std::iota(perm.begin(), perm.end(), 0);
      double best = 1e300;
      do {
        double s = 0;
        for (std::size_t i = 0; i < 6; ++i) s += cost(spec, x.point(i), y.point(perm[i]));
        best = std::min(best, s / 6);
      } while (std::next_permutation(perm.begin(), perm.end()));
      CHECK(exact_ot_assignment(x, y, spec) == doctest::Approx(best).epsilon(1e-13));
    }
    const std::vector<double> C{4, 1, 3, 2, 0, 5, 3, 2, 2};
    const auto col = solve_assignment(C, 3);
    CHECK(C[0 * 3 + col[0]] + C[1 * 3 + col[1]] + C[2 * 3 + col[2]] == 5.0);
    CHECK_THROWS(exact_ot_assignment(gaussian_cloud(513, 1, {0, 0}), gaussian_cloud(513, 1, {0, 1}),
                                     CostSpec::p1()));
  }

  TEST_CASE("small epsilon approaches the unregularized cost") {
    const PointCloud x = gaussian_cloud(30, 2, {3, 0});
    const PointCloud y = gaussian_cloud(30, 2, {4, 0}, 1.0);
    const double exact = exact_ot_assignment(x, y, CostSpec::p2_squared());
    const auto r = sinkhorn(empirical_measure(x), empirical_measure(y), CostSpec::p2_squared(), 1e-3,
                            {1e-9, 200000});
    CHECK(r.converged);
    // OT_eps lies in [OT, OT + eps log n] for uniform marginals
    CHECK(r.ot_eps >= exact - 1e-9);
    CHECK(r.ot_eps <= exact + 1e-3 * std::log(30.0) + 1e-9);
  }

  TEST_CASE("potentials and the streamed primal agree") {
    const auto mu = empirical_measure(gaussian_cloud(40, 3, {5, 0}));
    const auto nu = empirical_measure(gaussian_cloud(50, 3, {6, 0}, 0.3));
    const auto r = sinkhorn(mu, nu, CostSpec::p2_squared(), 0.5, {1e-11, 100000});
    REQUIRE(r.converged);
    CHECK(r.state.marginal_violation <= 1e-11);
    double dual = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) dual += mu.weights()[i] * r.state.f[i];
    for (std::size_t j = 0; j < nu.size(); ++j) dual += nu.weights()[j] * r.state.g[j];
    CHECK(r.ot_eps == doctest::Approx(dual).epsilon(1e-9));
    CHECK(primal_from_potentials(mu, nu, CostSpec::p2_squared(), 0.5, r.state.f, r.state.g) ==
          doctest::Approx(r.ot_eps).epsilon(1e-14));
  }

  TEST_CASE("newton polish and annealing reach the plain fixed point") {
    const auto mu = empirical_measure(gaussian_cloud(40, 2, {11, 0}));
    const auto nu = empirical_measure(gaussian_cloud(45, 2, {12, 0}, 0.5));
    SinkhornOptions plain{1e-10, 1'000'000, 0.0, false};
    const auto ref = sinkhorn(mu, nu, CostSpec::p2_squared(), 0.05, plain);
    REQUIRE(ref.converged);
    REQUIRE(ref.state.iterations > kNewtonAfter);
    const auto fast = sinkhorn(mu, nu, CostSpec::p2_squared(), 0.05, {1e-10, 1'000'000});
    CHECK(fast.converged);
    CHECK(fast.state.iterations < ref.state.iterations);
    CHECK(fast.ot_eps == doctest::Approx(ref.ot_eps).epsilon(1e-8));
    const auto sym_ref = sinkhorn_symmetric(mu, CostSpec::p2_squared(), 0.01, plain);
    const auto sym = sinkhorn_symmetric(mu, CostSpec::p2_squared(), 0.01, {1e-10, 1'000'000});
    CHECK(sym.converged);
    CHECK(sym.ot_eps == doctest::Approx(sym_ref.ot_eps).epsilon(1e-8));
    CHECK_THROWS(sinkhorn(mu, nu, CostSpec::p1(), 0.1, {1e-6, 10, 1.0}));
  }

  TEST_CASE("symmetric solve matches the general solve") {
    const auto mu = empirical_measure(gaussian_cloud(60, 2, {7, 0}));
    const auto sym = sinkhorn_symmetric(mu, CostSpec::p2_squared(), 0.2, {1e-11, 100000});
    const auto gen = sinkhorn(mu, mu, CostSpec::p2_squared(), 0.2, {1e-11, 100000});
    CHECK(sym.converged);
    CHECK(sym.ot_eps == doctest::Approx(gen.ot_eps).epsilon(1e-9));
  }

  TEST_CASE("divergence properties") {
    const PointCloud x = gaussian_cloud(80, 3, {8, 0});
    const auto mu = empirical_measure(x);
    CHECK(std::abs(sinkhorn_divergence(mu, mu, CostSpec::p2_squared(), 0.3).value) < 1e-7);

    // translating a measure by b adds exactly |b|^2 under the squared cost
    std::vector<double> moved(x.data().begin(), x.data().end());
    const double b[3] = {0.5, -1.0, 2.0};
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t k = 0; k < 3; ++k) moved[i * 3 + k] += b[k];
    const auto nu = empirical_measure(PointCloud(x.size(), 3, moved));
    for (double eps : {0.05, 1.0, 10.0}) {
      const auto s = sinkhorn_divergence(mu, nu, CostSpec::p2_squared(), eps, {1e-10, 100000});
      CHECK(s.converged);
      CHECK(s.value == doctest::Approx(5.25).epsilon(1e-7));
    }

    const auto other = empirical_measure(gaussian_cloud(70, 3, {9, 0}, 0.2));
    const auto s = sinkhorn_divergence(mu, other, CostSpec::p2_squared(), 0.5);
    CHECK(s.value > 0.0);
    CHECK(s.iterations() > 0);
  }

  TEST_CASE("zero-weight atoms, iteration caps and bad arguments") {
    const PointCloud xs = PointCloud::from_rows({{0.0}, {100.0}, {1.0}});
    const DiscreteMeasure with_zero(xs, {0.5, 0.0, 0.5});
    const DiscreteMeasure without(PointCloud::from_rows({{0.0}, {1.0}}), {0.5, 0.5});
    const auto nu = empirical_measure(PointCloud::from_rows({{0.2}, {0.7}, {1.5}}));
    const auto a = sinkhorn(with_zero, nu, CostSpec::p2_squared(), 0.1);
    const auto b = sinkhorn(without, nu, CostSpec::p2_squared(), 0.1);
    CHECK(a.ot_eps == doctest::Approx(b.ot_eps).epsilon(1e-12));
    CHECK(a.state.f.size() == 2);

    const auto capped = sinkhorn(empirical_measure(gaussian_cloud(50, 2, {1, 1})),
                                 empirical_measure(gaussian_cloud(50, 2, {1, 2}, 3.0)),
                                 CostSpec::p2_squared(), 1e-3, {1e-14, 3});
    CHECK_FALSE(capped.converged);
    CHECK(capped.state.iterations == 3);
    CHECK(std::isfinite(capped.ot_eps));

    CHECK_THROWS(sinkhorn(without, nu, CostSpec::p1(), 0.0));
    CHECK_THROWS(sinkhorn(without, nu, CostSpec::p1(), 1.0, {0.0, 10}));
  }

  TEST_CASE("tiny epsilon stays finite in the log domain") {
    // costs near 5000 at eps 1e-4: potentials / eps reach 5e7, so rounding
    // alone leaves violations of order 1e-9
    const PointCloud x = gaussian_cloud(20, 2, {2, 0}), y = gaussian_cloud(20, 2, {2, 1}, 50.0);
    const auto r = sinkhorn(empirical_measure(x), empirical_measure(y), CostSpec::p2_squared(), 1e-4,
                            {1e-6, 100000});
    CHECK(r.converged);
    const double exact = exact_ot_assignment(x, y, CostSpec::p2_squared());
    CHECK(r.ot_eps >= exact - 1e-6);
    CHECK(r.ot_eps <= exact + 1e-4 * std::log(20.0) + 1e-6);
  }
}
