#include "doctest.h"
#include "otgeo/synth.hpp"

using namespace otgeo;
using namespace otgeo::synth;

TEST_SUITE("synth") {
  TEST_CASE("hypercube mixture has 20% ten-dimensional points") {
    const auto cfgs = dimension_benchmark_configs();
    const PointCloud c = sample_manifold(cfgs[0].second, 10000, {1, 0});
    CHECK(c.dim() == 20);
    std::size_t many = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      int nz = 0;
      for (double v : c.point(i)) nz += v != 0.0;
      many += nz > 2;
      for (std::size_t k = 10; k < 20; ++k) REQUIRE(c.point(i)[k] == 0.0);
    }
    CHECK(static_cast<double>(many) / 1e4 == doctest::Approx(0.2).epsilon(0.1));
  }

  TEST_CASE("config validation") {
    CHECK_THROWS(ManifoldConfig::hypercube_mixture(5, {Component{6, 1.0, {}, 1.0}}).validate());
    CHECK_THROWS(ManifoldConfig::hypercube_mixture(5, {Component{2, 0.5, {}, 1.0}}).validate());
    CHECK_THROWS(ManifoldConfig::hypercube_mixture(5, {Component{2, 1.0, {1, 2}, 1.0}}).validate());
    CHECK_THROWS(ManifoldConfig::hypercube_mixture(5, {}).validate());
    CHECK_THROWS(ManifoldSampler(ManifoldConfig::lowrank_gaussian(3, 0)));
    CHECK(parse_manifold_kind("intro_mixture") == ManifoldKind::intro_mixture);
    CHECK_THROWS(parse_manifold_kind("torus"));
  }

  TEST_CASE("low-rank gaussian lives in a rank-k subspace") {
    const PointCloud c = sample_manifold(ManifoldConfig::lowrank_gaussian(8, 3), 500, {2, 0});
    Eigen::MatrixXd X(500, 8);
    for (Eigen::Index i = 0; i < 500; ++i)
      for (Eigen::Index k = 0; k < 8; ++k) X(i, k) = c.point(static_cast<std::size_t>(i))[static_cast<std::size_t>(k)];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
    const auto s = svd.singularValues();
    CHECK(s[2] > 1.0);
    CHECK(s[3] < 1e-10 * s[0]);
  }

  TEST_CASE("analytic moments agree with samples") {
    const ManifoldSampler sampler(sensitivity_source());
    const PointCloud c = sampler.sample(40000, {5, 0});
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(10, 10);
    for (std::size_t i = 0; i < c.size(); ++i) {
      Eigen::Map<const Eigen::VectorXd> x(c.point(i).data(), 10);
      M += x * x.transpose();
    }
    M /= static_cast<double>(c.size());
    CHECK((M - sampler.second_moment()).cwiseAbs().maxCoeff() < 0.05);
    CHECK(sampler.mean().norm() < 1e-12);
  }

  TEST_CASE("intro mixture halves") {
    const PointCloud c = sample_manifold(ManifoldConfig::intro_mixture(), 2000, {9, 0});
    std::size_t shifted = 0;
    for (std::size_t i = 0; i < c.size(); ++i) shifted += c.point(i)[7] >= 1.0;
    CHECK(static_cast<double>(shifted) / 2000.0 == doctest::Approx(0.5).epsilon(0.1));
  }

  TEST_CASE("bures formula") {
    const Eigen::VectorXd m = Eigen::VectorXd::Zero(5);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(5, 5);
    CHECK(bures_w2sq(m, I, m, I) == doctest::Approx(0.0));
    CHECK(bures_w2sq(m, I, Eigen::VectorXd::Ones(5), I) == doctest::Approx(5.0));
    // 1D: (m1 - m2)^2 + (s1 - s2)^2
    Eigen::VectorXd a(1), b(1);
    a << 1.0;
    b << -1.0;
    Eigen::MatrixXd s1(1, 1), s2(1, 1);
    s1 << 4.0;
    s2 << 9.0;
    CHECK(bures_w2sq(a, s1, b, s2) == doctest::Approx(4.0 + 1.0));
    CHECK((psd_sqrt(s2) - Eigen::MatrixXd::Constant(1, 1, 3.0)).norm() < 1e-14);
  }

  TEST_CASE("brenier pair truth matches Monte Carlo") {
    BrenierPair pair;
    pair.source = sensitivity_source();
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(10, 10) * 1.5;
    A(0, 1) = A(1, 0) = 0.3;
    pair.A = A;
    pair.b = Eigen::VectorXd::Constant(10, 0.25);
    pair.validate();
    const auto mc = monte_carlo_w2sq(pair, 200000, {4, 0});
    CHECK(std::abs(mc.mean - pair.true_w2sq()) < 4.0 * mc.standard_error);

    // nonzero source mean exercises the cross term
    pair.source = ManifoldConfig::uniform_cube(10);
    const auto mc2 = monte_carlo_w2sq(pair, 200000, {4, 1});
    CHECK(std::abs(mc2.mean - pair.true_w2sq()) < 4.0 * mc2.standard_error);

    BrenierPair bad = pair;
    bad.A(0, 0) = -1.0;
    CHECK_THROWS(bad.validate());
    bad = pair;
    bad.A(0, 2) = 0.7;
    CHECK_THROWS(bad.validate());
  }

  TEST_CASE("brenier sample pushes an independent draw") {
    BrenierPair pair{ManifoldConfig::uniform_cube(3), Eigen::MatrixXd::Identity(3, 3) * 2.0,
                     Eigen::VectorXd::Zero(3)};
    const auto s = sample_brenier_pair(pair, 100, {1, 0});
    CHECK(s.source.size() == 100);
    CHECK(s.target.size() == 100);
    CHECK_FALSE(s.target.point(0)[0] == doctest::Approx(2.0 * s.source.point(0)[0]));
  }

  TEST_CASE("random frames are orthonormal") {
    const Eigen::MatrixXd P = random_frame(12, 5, {8, 0});
    CHECK((P.transpose() * P - Eigen::MatrixXd::Identity(5, 5)).norm() < 1e-12);
    CHECK((random_frame(12, 5, {8, 0}) - P).norm() == 0.0);
  }
}
