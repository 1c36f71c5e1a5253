#include <limits>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "otgeo/nearest.hpp"
#include "otgeo/random.hpp"

using namespace otgeo;

namespace {

PointCloud uniform_cloud(std::size_t n, std::size_t d, SeedSpec seed) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(n * d);
  for (double& v : c) v = u(rng);
  return PointCloud(n, d, std::move(c));
}

NearestResult brute(const PointCloud& s, std::span<const double> x, CostSpec spec) {
  NearestResult best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double c = cost(spec, x, s.point(j));
    if (c < best.value) best = {c, j};
  }
  return best;
}

}  // namespace

TEST_SUITE("nearest") {
  TEST_CASE("every acceleration agrees with a direct scan") {
    for (std::size_t d : {1u, 3u, 8u, 20u, 40u}) {
      CAPTURE(d);
      const PointCloud support = uniform_cloud(1000, d, {1, d});
      const PointCloud queries = uniform_cloud(100, d, {2, d});
      for (auto accel : {Acceleration::brute_force, Acceleration::kd_tree, Acceleration::blocked,
                         Acceleration::automatic}) {
        const SupportIndex idx(support, CostSpec::p1(), accel);
        std::vector<double> sq(queries.size());
        std::vector<std::size_t> ix(queries.size());
        idx.query_batch_squared(queries.data().data(), queries.size(), sq.data(), ix.data());
        for (std::size_t i = 0; i < queries.size(); ++i) {
          const auto want = brute(support, queries.point(i), CostSpec::p1());
          const auto got = idx.query(queries.point(i));
          REQUIRE(got.index == want.index);
          REQUIRE(got.value == want.value);
          REQUIRE(ix[i] == want.index);
          REQUIRE(std::sqrt(sq[i]) == want.value);
        }
      }
    }
  }

  TEST_CASE("automatic resolution") {
    CHECK(SupportIndex(uniform_cloud(10, 3, {0, 0}), CostSpec::p1()).effective() == Acceleration::kd_tree);
    CHECK(SupportIndex(uniform_cloud(10, 12, {0, 0}), CostSpec::p1()).effective() == Acceleration::blocked);
    CHECK(SupportIndex(uniform_cloud(10, 31, {0, 0}), CostSpec::p1(), Acceleration::kd_tree).effective() ==
          Acceleration::blocked);
  }

  TEST_CASE("ties go to the lowest index") {
    // duplicates and points equidistant from the query
    const PointCloud s = PointCloud::from_rows({{1, 0}, {0, 1}, {-1, 0}, {1, 0}, {0, -1}});
    for (auto accel : {Acceleration::brute_force, Acceleration::kd_tree, Acceleration::blocked}) {
      const SupportIndex idx(s, CostSpec::p2_squared(), accel);
      const std::vector<double> origin{0, 0}, right{2, 0};
      CHECK(idx.query(origin).index == 0);
      CHECK(idx.query(origin).value == 1.0);
      CHECK(idx.query(right).index == 0);
    }
    // a grid: many exact ties in a kd leaf and across splits
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) rows.push_back({double(i), double(j)});
    const PointCloud grid = PointCloud::from_rows(rows);
    const SupportIndex kd(grid, CostSpec::p1(), Acceleration::kd_tree);
    const SupportIndex bl(grid, CostSpec::p1(), Acceleration::blocked);
    for (int i = 0; i < 19; ++i) {
      const std::vector<double> q{i + 0.5, 7.5};
      const auto want = brute(grid, q, CostSpec::p1());
      CHECK(kd.query(q).index == want.index);
      CHECK(bl.query(q).index == want.index);
    }
  }

  TEST_CASE("dimension mismatch is rejected") {
    const SupportIndex idx(uniform_cloud(5, 3, {0, 0}), CostSpec::p1());
    const std::vector<double> x{0, 0};
    CHECK_THROWS_AS(idx.query(x), std::invalid_argument);
  }

  TEST_CASE("nested prefixes match independent indexes") {
    const PointCloud s = uniform_cloud(600, 5, {4, 0});
    const std::vector<std::size_t> sizes{50, 200, 600};
    const NestedSupport nested(s, sizes, CostSpec::p1());
    const PointCloud q = uniform_cloud(200, 5, {5, 0});
    std::vector<NearestResult> out(q.size() * sizes.size());
    nested.query_batch(q.data().data(), q.size(), out.data());
    for (std::size_t l = 0; l < sizes.size(); ++l) {
      const PointCloud prefix = s.head(sizes[l]);
      for (std::size_t i = 0; i < q.size(); ++i) {
        const auto want = brute(prefix, q.point(i), CostSpec::p1());
        REQUIRE(out[i * sizes.size() + l].index == want.index);
        REQUIRE(out[i * sizes.size() + l].value == want.value);
      }
    }
    std::vector<NearestResult> one(sizes.size());
    nested.query(q.point(3).data(), one);
    CHECK(one[1].index == out[3 * sizes.size() + 1].index);
    CHECK_THROWS(NestedSupport(s, {200, 100}, CostSpec::p1()));
    CHECK_THROWS(NestedSupport(s, {700}, CostSpec::p1()));
  }
}
