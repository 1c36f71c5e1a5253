#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "otgeo/debias.hpp"
#include "otgeo/random.hpp"

using namespace otgeo;

namespace {

PointCloud gaussian_cloud(std::size_t n, std::size_t d, SeedSpec seed, double shift = 0.0) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> c(n * d);
  for (double& v : c) v = g(rng) + shift;
  return PointCloud(n, d, std::move(c));
}

PointCloud shifted(const PointCloud& p, double s) {
  std::vector<double> c(p.data().begin(), p.data().end());
  for (double& v : c) v += s;
  return PointCloud(p.size(), p.dim(), std::move(c));
}

}  // namespace

TEST_SUITE("debias") {
  TEST_CASE("schedule") {
    const Schedule s = make_schedule(5.0, 2.0);
    CHECK(s.a == doctest::Approx(1.0 / 9.0));
    CHECK(s.gamma == doctest::Approx(2.0 / 9.0));
    CHECK(s.epsilon(1) == 2.0);
    CHECK(s.epsilon(512) == doctest::Approx(2.0 * std::pow(512.0, -1.0 / 9.0)));
    CHECK(s.epsilon(400) / s.epsilon(200) == doctest::Approx(std::pow(2.0, -1.0 / 9.0)));
    CHECK_THROWS(make_schedule(0.0, 1.0));
    CHECK_THROWS(make_schedule(2.0, -1.0));
    CHECK_THROWS(s.epsilon(0));
  }

  TEST_CASE("weights") {
    const auto w = richardson_weights(2.0 / 9.0);
    const double g = std::pow(2.0, 2.0 / 9.0);
    CHECK(w.w_hi == doctest::Approx(g / (g - 1)));
    CHECK(w.w_lo == doctest::Approx(-1 / (g - 1)));
    CHECK(w.w_hi + w.w_lo == 1.0);
    const auto one = richardson_weights(1.0);
    CHECK(one.w_hi == 2.0);
    CHECK(one.w_lo == -1.0);
    CHECK_THROWS(richardson_weights(0.0));
  }

  TEST_CASE("combination cancels a pure power-law bias") {
    for (double gamma : {0.1, 2.0 / 9.0, 0.5, 1.0}) {
      const auto w = richardson_weights(gamma);
      const double limit = 3.7, c = 11.0;
      const auto s = [&](double n) { return limit + c * std::pow(n, -gamma); };
      CHECK(richardson_combine(w, s(1000), s(500)) == doctest::Approx(limit).epsilon(1e-12));
    }
  }

  TEST_CASE("half subsamples") {
    Rng rng = make_rng({1, 0});
    const auto idx = half_subsample(100, 50, rng);
    CHECK(idx.size() == 50);
    CHECK(std::is_sorted(idx.begin(), idx.end()));
    CHECK(std::adjacent_find(idx.begin(), idx.end()) == idx.end());
    CHECK(idx.back() < 100);
    CHECK_THROWS(half_subsample(10, 11, rng));
  }

  TEST_CASE("single bag equals the diagonal estimator and bags nest") {
    const PointCloud x = gaussian_cloud(40, 2, {1, 0});
    const PointCloud y = gaussian_cloud(40, 2, {2, 0}, 1.0);
    const Schedule s = make_schedule(2.0, 1.0);
    const auto diag = diagonal_richardson(x, y, s, {9, 0});
    const auto bag1 = bagged_diagonal_richardson(x, y, s, 1, {9, 0});
    CHECK(diag.value == bag1.value);
    const auto three = bag_divergences(x, y, s, 3, {9, 0});
    const auto one = bag_divergences(x, y, s, 1, {9, 0});
    REQUIRE(three.s_lo.size() == 3);
    CHECK(three.s_lo[0] == one.s_lo[0]);
    CHECK(three.s_hi == one.s_hi);
    const auto bagged = bagged_diagonal_richardson(x, y, s, 3, {9, 0});
    const double mean_lo = (three.s_lo[0] + three.s_lo[1] + three.s_lo[2]) / 3.0;
    CHECK(bagged.meta.at("s_lo") == doctest::Approx(mean_lo).epsilon(1e-15));
    const auto w = richardson_weights(s.gamma);
    CHECK(bagged.value == doctest::Approx(w.w_hi * three.s_hi + w.w_lo * mean_lo).epsilon(1e-14));
    CHECK(bagged.meta.at("eps_lo") == doctest::Approx(s.epsilon(20)));
  }

  TEST_CASE("estimators are invariant to a common translation") {
    const PointCloud x = gaussian_cloud(30, 3, {3, 0});
    const PointCloud y = gaussian_cloud(30, 3, {4, 0}, 0.5);
    const Schedule s = make_schedule(3.0, 0.5);
    const SinkhornOptions tight{1e-11, 100000};
    const DebiasOptions opts{tight};
    CHECK(base_estimate(shifted(x, 4.0), shifted(y, 4.0), s, opts).value ==
          doctest::Approx(base_estimate(x, y, s, opts).value).epsilon(1e-7));
    CHECK(diagonal_richardson(shifted(x, 4.0), shifted(y, 4.0), s, {1, 0}, opts).value ==
          doctest::Approx(diagonal_richardson(x, y, s, {1, 0}, opts).value).epsilon(1e-7));
    CHECK(eps_only_richardson(shifted(x, -2.0), shifted(y, -2.0), 0.3, opts).value ==
          doctest::Approx(eps_only_richardson(x, y, 0.3, opts).value).epsilon(1e-7));
  }

  TEST_CASE("epsilon-only combination") {
    const PointCloud x = gaussian_cloud(30, 2, {5, 0});
    const PointCloud y = gaussian_cloud(30, 2, {6, 0}, 0.7);
    const auto mu = empirical_measure(x), nu = empirical_measure(y);
    const auto r = eps_only_richardson(x, y, 0.25);
    const double hi = sinkhorn_divergence(mu, nu, CostSpec::p2_squared(), 0.25).value;
    const double lo = sinkhorn_divergence(mu, nu, CostSpec::p2_squared(), 0.5).value;
    CHECK(r.value == doctest::Approx(2 * hi - lo).epsilon(1e-12));
    CHECK_FALSE(r.has_flag("epsilon_ge_1"));
    CHECK(eps_only_richardson(x, y, 4.0).has_flag("epsilon_ge_1"));
    const auto at_one = eps_only_richardson(x, y, 1.0);
    CHECK(at_one.value == doctest::Approx(at_one.meta.at("s_hi")).epsilon(1e-15));
  }

  TEST_CASE("base estimate uses the schedule at the full size") {
    const PointCloud x = gaussian_cloud(24, 2, {7, 0});
    const PointCloud y = gaussian_cloud(24, 2, {8, 0});
    const Schedule s = make_schedule(2.0, 1.5);
    const auto r = base_estimate(x, y, s);
    CHECK(r.meta.at("eps_hi") == doctest::Approx(s.epsilon(24)));
    const double direct =
        sinkhorn_divergence(empirical_measure(x), empirical_measure(y), CostSpec::p2_squared(), s.epsilon(24)).value;
    CHECK(r.value == doctest::Approx(direct).epsilon(1e-14));
  }

  TEST_CASE("auto eps0 scales with the squared diameter") {
    const PointCloud x = PointCloud::from_rows({{0, 0}, {1, 0}});
    const PointCloud y = PointCloud::from_rows({{0, 2}, {1, 2}});
    CHECK(auto_eps0(x, y) == doctest::Approx(0.05 * 5.0));
  }

  TEST_CASE("argument checks") {
    const PointCloud x = gaussian_cloud(10, 2, {1, 0});
    const Schedule s = make_schedule(2.0, 1.0);
    CHECK_THROWS(diagonal_richardson(x, gaussian_cloud(12, 2, {2, 0}), s, {0, 0}));
    CHECK_THROWS(diagonal_richardson(gaussian_cloud(9, 2, {0, 0}), gaussian_cloud(9, 2, {2, 0}), s, {0, 0}));
    CHECK_THROWS(diagonal_richardson(gaussian_cloud(2, 2, {0, 0}), gaussian_cloud(2, 2, {2, 0}), s, {0, 0}));
    CHECK_THROWS(diagonal_richardson(x, gaussian_cloud(10, 3, {2, 0}), s, {0, 0}));
    DebiasOptions p1;
    p1.spec = CostSpec::p1();
    CHECK_THROWS(base_estimate(x, x, s, p1));
    CHECK_THROWS(bagged_diagonal_richardson(x, x, s, 0, {0, 0}));
    CHECK_THROWS(eps_only_richardson(x, x, 0.0));
  }
}
