#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "eikograph/manifold.hpp"
#include "eikograph/rng.hpp"

using namespace eikograph;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("sphere geodesic distances") {
  const auto s = ManifoldSpec::sphere(2, 1.0);
  CHECK(geodesic_distance(s, std::vector{1.0, 0.0, 0.0}, std::vector{-1.0, 0.0, 0.0}) ==
        doctest::Approx(kPi).epsilon(1e-15));
  CHECK(geodesic_distance(s, std::vector{1.0, 0.0, 0.0}, std::vector{0.0, 1.0, 0.0}) ==
        doctest::Approx(kPi / 2).epsilon(1e-15));
}

TEST_CASE("torus wrap-around distance") {
  const auto t = ManifoldSpec::flat_torus({1.0, 1.0});
  CHECK(geodesic_distance(t, std::vector{0.05, 0.0}, std::vector{0.95, 0.0}) ==
        doctest::Approx(0.10).epsilon(1e-12));
}

TEST_CASE("sphere chord vs arc") {
  const auto s = ManifoldSpec::sphere(2, 1.0);
  const std::vector<double> x{1.0, 0.0, 0.0};
  const std::vector<double> y{std::cos(0.1), std::sin(0.1), 0.0};
  // Oracle: chord of arc theta is 2 sin(theta/2).
  CHECK(extrinsic_distance(s, x, y) ==
        doctest::Approx(2.0 * std::sin(0.05)).epsilon(1e-12));
  CHECK(extrinsic_distance(s, std::vector{0.0, 0.0, 1.0}, std::vector{0.0, 0.0, -1.0}) ==
        doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("torus and box extrinsic metric is exact") {
  const auto t = ManifoldSpec::flat_torus({2.0, 3.0});
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> x{rng.uniform(0.0, 2.0), rng.uniform(0.0, 3.0)};
    const std::vector<double> y{rng.uniform(0.0, 2.0), rng.uniform(0.0, 3.0)};
    CHECK(extrinsic_distance(t, x, y) == geodesic_distance(t, x, y));
  }
}

TEST_CASE("local dtilde error bound") {
  const auto s = ManifoldSpec::sphere(2, 1.0);
  // Oracle: (1.1 * r_eta)^3 / 24 * eps^3.
  const double c = 1.1 * 1.1 * 1.1 / 24.0;
  auto b = local_dtilde_error(s, 0.1, 1.0);
  CHECK(b.bound_at_epsilon == doctest::Approx(c * 1e-3).epsilon(1e-12));
  CHECK(b.bound_at_epsilon == doctest::Approx(5.5458333e-5).epsilon(1e-6));
  auto b1 = local_dtilde_error(s, 1.0, 1.0);
  CHECK(b1.bound_at_epsilon == doctest::Approx(1.331 / 24.0).epsilon(1e-12));
  const auto t = ManifoldSpec::flat_torus({1.0, 1.0});
  CHECK(local_dtilde_error(t, 0.3, 1.0).c_m == 0.0);
  CHECK_THROWS_AS(local_dtilde_error(s, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("restricted dtilde approximation holds on sampled support pairs") {
  const auto s = ManifoldSpec::sphere(2, 1.0);
  const double eps = 0.4, r_eta = 1.0;
  const auto bound = local_dtilde_error(s, eps, r_eta);
  const auto cloud = sample_points(s, 400, "uniform", 21);
  std::size_t checked = 0;
  for (std::size_t i = 0; i < cloud.n; ++i) {
    for (std::size_t j = i + 1; j < cloud.n; ++j) {
      const double dm = geodesic_distance(s, cloud.point(i), cloud.point(j));
      if (dm > eps * r_eta) continue;
      ++checked;
      const double dt = extrinsic_distance(s, cloud.point(i), cloud.point(j));
      CHECK(std::fabs(dt - dm) <= bound.bound_at_epsilon);
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("distance to boundary sets") {
  const auto s = ManifoldSpec::sphere(2, 1.0);
  const std::vector<double> north{0.0, 0.0, 1.0};
  const std::vector<double> south{0.0, 0.0, -1.0};
  const auto pole = BoundarySpec::point_set({north});
  CHECK(distance_to_boundary(s, pole, south) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(distance_to_boundary(s, pole, north) == 0.0);
  const auto equator = BoundarySpec::cap(north, kPi / 2);
  CHECK(distance_to_boundary(s, equator, north) ==
        doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK_THROWS_AS(BoundarySpec::point_set({}), std::invalid_argument);
}

TEST_CASE("sampling stays on the manifold and respects the seed") {
  SUBCASE("sphere uniform, empirical mean near zero") {
    const auto s = ManifoldSpec::sphere(2, 1.0);
    const auto cloud = sample_points(s, 1000, "uniform", 1234);
    double mean[3] = {0, 0, 0};
    for (std::size_t i = 0; i < cloud.n; ++i) {
      CHECK(s.on_manifold(cloud.point(i), 1e-12));
      for (int k = 0; k < 3; ++k) mean[k] += cloud.point(i)[k];
    }
    double norm = 0;
    for (double m : mean) norm += (m / 1000) * (m / 1000);
    CHECK(std::sqrt(norm) < 0.1);
  }
  SUBCASE("box containment") {
    const auto b = ManifoldSpec::box({0.0, 0.0}, {1.0, 1.0});
    const auto cloud = sample_points(b, 4, "uniform", 77);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(cloud.point(i)[0] >= 0.0);
      CHECK(cloud.point(i)[0] <= 1.0);
      CHECK(cloud.point(i)[1] >= 0.0);
      CHECK(cloud.point(i)[1] <= 1.0);
    }
  }
  SUBCASE("torus fundamental domain") {
    const auto t = ManifoldSpec::flat_torus({1.0, 1.0});
    const auto cloud = sample_points(t, 1, "uniform", 8);
    CHECK(cloud.point(0)[0] >= 0.0);
    CHECK(cloud.point(0)[0] < 1.0);
    CHECK(cloud.point(0)[1] >= 0.0);
    CHECK(cloud.point(0)[1] < 1.0);
  }
  SUBCASE("determinism given seed") {
    const auto s = ManifoldSpec::sphere(2, 1.0);
    const auto a = sample_points(s, 50, "uniform", 99);
    const auto b = sample_points(s, 50, "uniform", 99);
    CHECK(a.coords == b.coords);
    const auto c = sample_points(s, 50, "uniform", 100);
    CHECK(a.coords != c.coords);
  }
}

TEST_CASE("radial bump density") {
  const auto s = ManifoldSpec::sphere(2, 1.0);
  CHECK_THROWS_AS(sample_points(s, 10, "radial-bump", 1, {-1.0, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_points(s, 10, "banana", 1), std::invalid_argument);
  const auto cloud = sample_points(s, 2000, "radial-bump", 1, {4.0, 0.5});
  CHECK(cloud.acceptance_rate < 1.0);
  // mass concentrates near the anchor pole (0,0,1)
  std::size_t top = 0;
  for (std::size_t i = 0; i < cloud.n; ++i) top += cloud.point(i)[2] > 0.0;
  CHECK(static_cast<double>(top) / static_cast<double>(cloud.n) > 0.6);
}

TEST_CASE("metric axioms on random triples") {
  const auto specs = {ManifoldSpec::sphere(2, 1.0), ManifoldSpec::flat_torus({1.0, 2.0}),
                      ManifoldSpec::box({-1.0, 0.0}, {1.0, 0.5})};
  for (const auto& spec : specs) {
    const auto cloud = sample_points(spec, 120, "uniform", 31);
    Rng rng(41);
    for (int trial = 0; trial < 10000; ++trial) {
      const auto i = rng.index_below(cloud.n);
      const auto j = rng.index_below(cloud.n);
      const auto k = rng.index_below(cloud.n);
      const double dij = geodesic_distance(spec, cloud.point(i), cloud.point(j));
      const double dji = geodesic_distance(spec, cloud.point(j), cloud.point(i));
      const double djk = geodesic_distance(spec, cloud.point(j), cloud.point(k));
      const double dik = geodesic_distance(spec, cloud.point(i), cloud.point(k));
      REQUIRE(dij == dji);
      REQUIRE(dik <= dij + djk + 1e-12);
      const double tij = extrinsic_distance(spec, cloud.point(i), cloud.point(j));
      const double tjk = extrinsic_distance(spec, cloud.point(j), cloud.point(k));
      const double tik = extrinsic_distance(spec, cloud.point(i), cloud.point(k));
      REQUIRE(tik <= tij + tjk + 1e-12);
      REQUIRE(tij <= dij + 1e-15);  // chord below arc, equality off-sphere
    }
    for (std::size_t i = 0; i < cloud.n; ++i)
      REQUIRE(geodesic_distance(spec, cloud.point(i), cloud.point(i)) == 0.0);
  }
}

TEST_CASE("off-manifold inputs are rejected") {
  const auto s = ManifoldSpec::sphere(2, 1.0);
  CHECK_THROWS_AS(
      geodesic_distance(s, std::vector{1.1, 0.0, 0.0}, std::vector{1.0, 0.0, 0.0}),
      std::domain_error);
  const auto b = ManifoldSpec::box({0.0, 0.0}, {1.0, 1.0});
  CHECK_THROWS_AS(
      geodesic_distance(b, std::vector{2.0, 0.0}, std::vector{0.5, 0.5}),
      std::domain_error);
}

TEST_CASE("cap boundary sample lies on the cap circle") {
  const auto s = ManifoldSpec::sphere(2, 1.0);
  const auto cap = BoundarySpec::cap({0.0, 0.0, 1.0}, 0.3);
  for (const auto& p : boundary_sample(s, cap, 64)) {
    CHECK(s.on_manifold(p, 1e-12));
    CHECK(distance_to_boundary(s, cap, p) < 1e-12);
  }
  const auto t = ManifoldSpec::flat_torus({2.0, 2.0});
  const auto tcap = BoundarySpec::cap({1.0, 1.0}, 0.25);
  for (const auto& p : boundary_sample(t, tcap, 64))
    CHECK(distance_to_boundary(t, tcap, p) < 1e-12);
}

TEST_CASE("sublevel boundary materialization") {
  const auto s = ManifoldSpec::sphere(2, 1.0);
  const auto raw = BoundarySpec::sublevel("coordinate", 2, 0.5);
  CHECK_THROWS_AS(distance_to_boundary(s, raw, std::vector{0.0, 0.0, 1.0}),
                  std::invalid_argument);
  const auto gamma = materialize_boundary(s, raw, 256);
  CHECK(gamma.kind == BoundarySpec::Kind::PointSet);
  CHECK(gamma.points.size() == 256);
  CHECK(gamma.level_sample_spacing > 0.0);
  for (const auto& p : gamma.points) {
    CHECK(s.on_manifold(p, 1e-12));
    CHECK(p[2] == doctest::Approx(0.5).epsilon(1e-12));
  }
  // The level circle z = 0.5 sits at polar angle acos(0.5) from the pole.
  const double d = distance_to_boundary(s, gamma, std::vector{0.0, 0.0, 1.0});
  CHECK(d == doctest::Approx(std::acos(0.5)).epsilon(1e-4));

  SUBCASE("torus level line") {
    const auto t = ManifoldSpec::flat_torus({2.0, 3.0});
    const auto line = materialize_boundary(t, BoundarySpec::sublevel("coordinate", 0, 0.5), 128);
    for (const auto& p : line.points) CHECK(p[0] == 0.5);
    // nearest-sample quantization is O(spacing^2 / d): ~7e-5 at 128 samples
    CHECK(distance_to_boundary(t, line, std::vector{1.5, 1.0}) ==
          doctest::Approx(1.0).epsilon(1e-3));  // wraps: |1.5-0.5| vs 2-1
  }
  SUBCASE("box level segment") {
    const auto b = ManifoldSpec::box({0.0, 0.0}, {1.0, 2.0});
    const auto seg = materialize_boundary(b, BoundarySpec::sublevel("coordinate", 1, 1.0), 128);
    for (const auto& p : seg.points) CHECK(p[1] == 1.0);
    CHECK(distance_to_boundary(b, seg, std::vector{0.5, 0.2}) ==
          doctest::Approx(0.8).epsilon(1e-3));
  }
}

TEST_CASE("probe points cover their manifold reasonably") {
  const auto s = ManifoldSpec::sphere(2, 1.0);
  const auto probes = probe_points(s, 1000);
  CHECK(probes.size() == 1000);
  for (const auto& p : probes) CHECK(s.on_manifold(p, 1e-9));
  const auto t = ManifoldSpec::flat_torus({1.0, 3.0});
  for (const auto& p : probe_points(t, 1000)) {
    CHECK(p[0] >= 0.0);
    CHECK(p[0] < 1.0);
    CHECK(p[1] >= 0.0);
    CHECK(p[1] < 3.0);
  }
}
