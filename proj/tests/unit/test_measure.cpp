#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

#include "doctest.h"
#include "otgeo/io.hpp"
#include "otgeo/measure.hpp"
#include "otgeo/parallel.hpp"
#include "otgeo/random.hpp"

using namespace otgeo;

TEST_SUITE("measure") {
  TEST_CASE("point cloud construction and views") {
    PointCloud c = PointCloud::from_rows({{0, 0}, {1, 2}, {3, 4}});
    CHECK(c.size() == 3);
    CHECK(c.dim() == 2);
    CHECK(c.point(1)[1] == 2.0);
    CHECK(c.head(2).size() == 2);
    CHECK(c.slice(1, 2).point(0)[0] == 1.0);
    const std::vector<std::size_t> idx{2, 0};
    CHECK(c.subset(idx).point(0)[0] == 3.0);
    CHECK(concat(c, c).size() == 6);

    CHECK_THROWS_AS(PointCloud(0, 2, {}), std::invalid_argument);
    CHECK_THROWS_AS(PointCloud(1, 2, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PointCloud(1, 1, {std::nan("")}), std::invalid_argument);
    CHECK_THROWS_AS(PointCloud::from_rows({{1, 2}, {3}}), std::invalid_argument);
    CHECK_THROWS_AS(c.slice(2, 2), std::out_of_range);
    CHECK_THROWS_AS(concat(c, PointCloud(1, 3, {0, 0, 0})), std::invalid_argument);
  }

  TEST_CASE("costs") {
    const std::vector<double> x{0, 0}, y{3, 4}, z{1};
    CHECK(cost(CostSpec::p1(), x, y) == doctest::Approx(5.0));
    CHECK(cost(CostSpec::p2_squared(), x, y) == doctest::Approx(25.0));
    CHECK_THROWS_AS(cost(CostSpec::p1(), x, z), std::invalid_argument);
    CHECK(parse_cost_kind("p1") == CostKind::euclidean_p1);
    CHECK(parse_cost_kind(to_string(CostKind::euclidean_p2_squared)) == CostKind::euclidean_p2_squared);
    CHECK_THROWS(parse_cost_kind("p3"));
  }

  TEST_CASE("discrete measures") {
    const PointCloud c = PointCloud::from_rows({{0}, {1}, {2}});
    DiscreteMeasure m(c, {0.5, 0.0, 0.5});
    CHECK(m.without_zero_atoms().size() == 2);
    CHECK_THROWS_AS(DiscreteMeasure(c, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteMeasure(c, {0.5, -0.1, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteMeasure(c, {0.3, 0.3, 0.3}), std::invalid_argument);
    const auto e = empirical_measure(c);
    double s = 0;
    for (double w : e.weights()) s += w;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("diameter estimate") {
    const PointCloud c = PointCloud::from_rows({{0, 0}, {1, 0}, {0, 2}});
    const auto d = diameter_estimate(c, CostSpec::p1());
    CHECK(d.path == DiameterPath::exact_pairwise);
    CHECK(d.value == doctest::Approx(std::sqrt(5.0)));
    CHECK(diameter_estimate(c, CostSpec::p2_squared()).value == doctest::Approx(5.0));

    // large clouds: the proxy never undercuts the true diameter
    std::vector<double> coords;
    Rng rng = make_rng({3, 0});
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 5000 * 2; ++i) coords.push_back(u(rng));
    coords[0] = 0, coords[1] = 0, coords[2] = 1, coords[3] = 1;  // diagonal pair
    const auto big = diameter_estimate(PointCloud(5000, 2, coords), CostSpec::p1());
    CHECK(big.path == DiameterPath::subsample_with_bbox_proxy);
    CHECK(big.value >= std::sqrt(2.0) - 1e-12);
  }

  TEST_CASE("csv and binary round trips") {
    const PointCloud c = PointCloud::from_rows({{0.1, -2.5e-7}, {1e300, 3.0}});
    std::stringstream csv;
    io::write_csv(csv, c);
    CHECK(io::read_csv(csv) == c);
    std::stringstream bin;
    io::write_binary(bin, c);
    CHECK(io::read_binary(bin) == c);
  }

  TEST_CASE("csv errors name the line") {
    std::stringstream bad("1,2\n3,x\n");
    CHECK_THROWS_WITH_AS(io::read_csv(bad), doctest::Contains("line 2"), std::runtime_error);
    std::stringstream ragged("1,2\n3\n");
    CHECK_THROWS_WITH_AS(io::read_csv(ragged), doctest::Contains("line 2"), std::runtime_error);
    std::stringstream truncated(std::string("\x02\x00\x00\x00\x01\x00\x00\x00", 8));
    CHECK_THROWS(io::read_binary(truncated));
  }

  TEST_CASE("seeded streams") {
    const SeedSpec s{42, 7};
    CHECK(make_rng(s)() == make_rng(s)());
    CHECK(s.derive(1) == s.derive(1));
    CHECK_FALSE(s.derive(1) == s.derive(2));
    CHECK_FALSE(SeedSpec{1, 0}.derive(0) == SeedSpec{0, 1}.derive(0));
  }

  TEST_CASE("parallel_for covers every index and rethrows") {
    setenv("OTGEO_THREADS", "3", 1);
    CHECK(thread_count() == 3);
    std::vector<int> hit(1000, 0);
    parallel_for(hit.size(), [&](std::size_t i) { hit[i] += 1; });
    CHECK(std::count(hit.begin(), hit.end(), 1) == 1000);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                      if (i == 5) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
    unsetenv("OTGEO_THREADS");
  }
}
