#include <chrono>
#include <cmath>
#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "eikograph/config.hpp"
#include "eikograph/harness.hpp"

using namespace eikograph;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SweepConfig small_sphere_sweep() {
  SweepConfig sw;
  sw.manifold = ManifoldSpec::sphere(2, 1.0);
  sw.boundary = BoundarySpec::cap({0.0, 0.0, 1.0}, 0.3);
  sw.kernel = make_kernel("triangular");
  sw.n_list = {120, 240};
  sw.trials_per_n = 2;
  sw.T = 2.0;
  sw.seed_base = 424242;
  sw.k1 = 5.0;  // fixed so the test skips calibration
  sw.calibration_trials = 10;
  return sw;
}

}  // namespace

TEST_CASE("theoretical exponent bookkeeping") {
  CHECK(theoretical_exponent(0.5, 0.5, 0.5, 2) == 0.5 / (1.5 * 2.0));
  CHECK(theoretical_exponent(0.5, 0.5, 0.5, 2) == doctest::Approx(1.0 / 6.0));
  CHECK(theoretical_exponent(1.0, 0.25, 0.7, 3) == doctest::Approx(0.25 / (2.0 * 3.0)));
}

TEST_CASE("rate fit on synthetic data") {
  auto make_table = [](const std::vector<std::size_t>& ns,
                       const std::vector<double>& errors) {
    ConvergenceTable t;
    for (std::size_t g = 0; g < ns.size(); ++g) {
      GroupStats gs;
      gs.n = ns[g];
      t.groups.push_back(gs);
      for (int trial = 0; trial < 3; ++trial) {
        ErrorRecord r;
        r.n = ns[g];
        r.sup_error = errors[g];
        t.records.push_back(r);
      }
    }
    return t;
  };

  SUBCASE("exact power law recovers its exponent") {
    std::vector<std::size_t> ns{500, 2000, 8000, 32000};
    std::vector<double> errors;
    for (auto n : ns)
      errors.push_back(3.7 * std::pow(std::log(static_cast<double>(n)) /
                                          static_cast<double>(n),
                                      1.0 / 6.0));
    const auto fit = fit_rate(make_table(ns, errors), 50, 7);
    CHECK(fit.slope == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(fit.ci.first == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
  }
  SUBCASE("constant errors give zero slope") {
    const auto fit = fit_rate(make_table({100, 1000}, {0.5, 0.5}), 50, 7);
    CHECK(fit.slope == doctest::Approx(0.0));
  }
  SUBCASE("two-point slope matches the closed form") {
    const double e = 0.8;
    const auto table = make_table({100, 1600}, {e, e / 2.0});
    const double x1 = std::log(std::log(100.0) / 100.0);
    const double x2 = std::log(std::log(1600.0) / 1600.0);
    const double expected = std::log(2.0) / (x1 - x2);
    CHECK(fit_rate(table, 50, 7).slope == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("degenerate inputs are rejected") {
    CHECK_THROWS_AS(fit_rate(make_table({100}, {0.5}), 50, 7), std::invalid_argument);
    CHECK_THROWS_AS(fit_rate(make_table({100, 200}, {0.0, 0.5}), 50, 7),
                    std::invalid_argument);
  }
}

TEST_CASE("convergence sweep bookkeeping") {
  SweepConfig sw = small_sphere_sweep();
  const auto table = run_convergence(sw);
  REQUIRE(table.groups.size() == 2);
  CHECK(table.groups[0].n == 120);
  CHECK(table.groups[1].n == 240);
  CHECK(table.groups[0].epsilon > table.groups[1].epsilon);
  CHECK(table.records.size() == 4);
  for (const auto& r : table.records) CHECK(r.failure.empty());
  CHECK(table.fitted_slope.has_value());
  CHECK(table.predicted_exponent == doctest::Approx(1.0 / 6.0));

  SUBCASE("single group leaves the slope undefined and flagged") {
    sw.n_list = {120};
    const auto single = run_convergence(sw);
    CHECK_FALSE(single.fitted_slope.has_value());
    bool flagged = false;
    for (const auto& note : single.notes)
      flagged = flagged || note.find("single group") != std::string::npos;
    CHECK(flagged);
  }
  SUBCASE("strictly increasing n_list enforced") {
    sw.n_list = {240, 120};
    CHECK_THROWS_AS(run_convergence(sw), std::invalid_argument);
  }
}

TEST_CASE("sweeps are pure functions of config and seed") {
  const SweepConfig sw = small_sphere_sweep();
  const auto a = run_convergence(sw);
  const auto b = run_convergence(sw);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].sup_error == b.records[i].sup_error);
    CHECK(a.records[i].boundary_hausdorff == b.records[i].boundary_hausdorff);
    CHECK(a.records[i].seed == b.records[i].seed);
  }
  SweepConfig threaded = sw;
  threaded.threads = 4;
  const auto c = run_convergence(threaded);
  for (std::size_t i = 0; i < a.records.size(); ++i)
    CHECK(a.records[i].sup_error == c.records[i].sup_error);
}

TEST_CASE("failed trials are quarantined with a reason") {
  SweepConfig sw = small_sphere_sweep();
  // boundary on the far side with a tiny band: no vertex qualifies
  sw.boundary = BoundarySpec::point_set({{0.0, 0.0, -1.0}});
  sw.k1 = 1e-3;
  const auto table = run_convergence(sw);
  std::size_t failures = 0;
  for (const auto& r : table.records)
    if (!r.failure.empty()) {
      ++failures;
      CHECK(r.failure == "empty_boundary");
    }
  CHECK(failures == table.records.size());
  CHECK_FALSE(table.fitted_slope.has_value());
}

TEST_CASE("emit_report output is deterministic and complete") {
  const SweepConfig sw = small_sphere_sweep();
  const auto table = run_convergence(sw);
  const std::string dir = "harness_report_test";
  std::filesystem::remove_all(dir);

  emit_report(table, sw, dir, "csv", "cafebabe01234567");
  emit_report(table, sw, dir, "json", "cafebabe01234567");
  const std::string csv1 = slurp(dir + "/convergence.csv");
  const std::string json1 = slurp(dir + "/convergence.json");
  const std::string sum1 = slurp(dir + "/summary.txt");
  CHECK(csv1.rfind("# eikograph", 0) == 0);
  // groups x trials rows plus two comment lines and the header
  CHECK(std::count(csv1.begin(), csv1.end(), '\n') == 3 + 4);
  CHECK(json1.find("fitted_slope") != std::string::npos);
  CHECK(sum1.find("predicted exponent") != std::string::npos);

  emit_report(table, sw, dir, "csv", "cafebabe01234567");
  emit_report(table, sw, dir, "json", "cafebabe01234567");
  CHECK(slurp(dir + "/convergence.csv") == csv1);
  CHECK(slurp(dir + "/convergence.json") == json1);
  CHECK(slurp(dir + "/summary.txt") == sum1);

  SUBCASE("empty table emits a header-only csv and a zero-row note") {
    ConvergenceTable empty;
    emit_report(empty, sw, dir + "/empty", "csv", "cafebabe01234567");
    const std::string csv = slurp(dir + "/empty/convergence.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    const std::string sum = slurp(dir + "/empty/summary.txt");
    CHECK(sum.find("zero rows") != std::string::npos);
  }
  SUBCASE("unknown format is rejected") {
    CHECK_THROWS_AS(emit_report(table, sw, dir, "xml", "h"), std::invalid_argument);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("errors.csv column order and append behavior") {
  const std::string path = "harness_errors_test.csv";
  std::filesystem::remove(path);
  ErrorRecord r;
  r.n = 500;
  r.epsilon = 0.25;
  r.dt = 0.01;
  r.sup_error = 0.125;
  r.boundary_hausdorff = 0.5;
  r.seed = 42;
  append_error_records({r}, path, "deadbeefdeadbeef");
  append_error_records({r}, path, "deadbeefdeadbeef");
  const std::string text = slurp(path);
  CHECK(text.find("n,epsilon,dt,sup_error,boundary_hausdorff,runtime_seconds,seed") !=
        std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);  // header block once
  std::filesystem::remove(path);
}

TEST_CASE("mc cover probability preconditions and extremes") {
  const auto spec = ManifoldSpec::sphere(2, 1.0);
  const auto gamma = BoundarySpec::cap({0.0, 0.0, 1.0}, 0.3);
  CHECK_THROWS_AS(
      mc_cover_probability(spec, gamma, 100, 10, 0.5, 0.5, 1.0, 1.0, 1),
      std::invalid_argument);
  // epsilon forced near the diameter: trivially covered
  const auto easy = mc_cover_probability(spec, gamma, 60, 50, 0.5, 0.5, 1.0, 400.0, 1);
  CHECK(easy.cover_frequency == 1.0);
  // tiny epsilon at tiny n: certainly not covered
  const auto hard = mc_cover_probability(spec, gamma, 5, 50, 0.5, 0.5, 1.0, 0.05, 1);
  CHECK(hard.cover_frequency == doctest::Approx(0.0));
}

TEST_CASE("nonuniform potentials compare steady states against the dense oracle") {
  SweepConfig sw;
  sw.manifold = ManifoldSpec::box({0.0, 0.0}, {1.0, 1.0});
  sw.boundary = BoundarySpec::point_set({{0.5, 0.5}});
  sw.kernel = make_kernel("triangular");
  sw.T = 4.0;  // long horizon so the field settles
  sw.seed_base = 31337;

  SUBCASE("zero-slope ramp agrees with the closed form up to oracle error") {
    // potential is identically 1 but routed through the sampled-oracle path
    sw.potential_id = "linear-coord";
    sw.potential_params = {0.0, 1.0, 0.0};
    const auto rec = run_single_trial(sw, 500, 0.35, 0.0, 5);
    REQUIRE(rec.failure.empty());
    CHECK(rec.oracle_resolution > 0.0);
    // solver error + oracle stretch at 10x density; generous but bounded
    CHECK(rec.sup_error < 0.25);
  }
  SUBCASE("genuinely varying potential produces a finite record") {
    sw.potential_id = "linear-coord";
    sw.potential_params = {0.0, 1.0, 0.8};
    const auto rec = run_single_trial(sw, 500, 0.35, 0.0, 5);
    REQUIRE(rec.failure.empty());
    CHECK(rec.sup_error > 0.0);
    CHECK(rec.sup_error < 1.0);
    CHECK(rec.oracle_resolution > 0.0);
  }
  SUBCASE("nonzero initial data has no shipped oracle") {
    sw.initial_id = "constant";
    sw.initial_params = {0.5};
    const auto rec = run_single_trial(sw, 200, 0.35, 0.0, 5);
    CHECK(rec.failure == "no_oracle_for_nonzero_initial_data");
  }
}

TEST_CASE("steady state reference matches the plain distance for unit potential") {
  const auto spec = ManifoldSpec::sphere(2, 1.0);
  const auto gamma = BoundarySpec::cap({0.0, 0.0, 1.0}, 0.3);
  const auto queries = sample_points(spec, 300, "uniform", 61);
  const auto ref = steady_state_reference(spec, gamma, queries, "constant", {1.0},
                                          0.02, 77);
  REQUIRE(ref.values.size() == queries.n);
  double sup = 0.0;
  for (std::size_t i = 0; i < queries.n; ++i)
    sup = std::max(sup, std::fabs(ref.values[i] -
                                  distance_to_boundary(spec, gamma, queries.point(i))));
  // dense cloud is 10x the query size; kNN stretch dominates
  CHECK(sup < 0.3);
  CHECK(ref.provenance.find("dijkstra") != std::string::npos);
}

TEST_CASE("event frequencies under the calibrated schedule at n in {500, 2000}") {
  const auto spec = ManifoldSpec::sphere(2, 1.0);
  const auto gamma = BoundarySpec::cap({0.0, 0.0, 1.0}, 0.3);
  const double a = 0.5, nu = 0.5, tau = 1.0;
  const double k1 = calibrate_k1(spec, a, nu, tau, 500, 50, 0.95, 1337);
  for (std::size_t n : {500ul, 2000ul}) {
    const auto report =
        mc_cover_probability(spec, gamma, n, 200, a, nu, tau, k1, 4242, 1000, 512, 2);
    CHECK(report.cover_frequency >= 0.95);
    CHECK(report.hausdorff_frequency >= 0.95);
  }
}

TEST_CASE("parallel_for covers every index exactly once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("config parsing, defaults, and hashing") {
  const std::string text = R"({
    "manifold": {"kind": "sphere", "intrinsic_dim": 2, "radius": 1.0},
    "boundary": {"kind": "cap", "center": [0.0, 0.0, 1.0], "radius": 0.3},
    "kernel": {"profile": "triangular", "a": 0.5},
    "sweep": {"n_list": [500, 2000], "seed_base": 7}
  })";
  const auto cfg = parse_config(text);
  CHECK(cfg.sweep.manifold.kind == ManifoldKind::Sphere);
  CHECK(cfg.sweep.boundary.kind == BoundarySpec::Kind::Cap);
  CHECK(cfg.sweep.nu == 0.5);
  CHECK(cfg.sweep.trials_per_n == 5);
  CHECK(cfg.sweep.n_list == std::vector<std::size_t>{500, 2000});
  CHECK(cfg.hash.size() == 16);
  CHECK(parse_config(text).hash == cfg.hash);  // stable canonical hash

  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"manifold": {"kind": "mobius"},
    "boundary": {"kind": "cap", "center": [0,0,1], "radius": 0.3}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({
    "manifold": {"kind": "sphere"},
    "boundary": {"kind": "cap", "center": [0.0,0.0,1.0], "radius": 0.3},
    "solver": {"cfl_mode": "yolo"}})"),
                  ConfigError);
}

TEST_CASE("runtime grows near-linearly with the processed edge count") {
  SweepConfig sw = small_sphere_sweep();
  sw.record_runtime = true;
  sw.trials_per_n = 1;
  sw.T = 1.0;

  auto run_one = [&](std::size_t n) {
    sw.n_list = {n};
    const auto table = run_convergence(sw);
    REQUIRE(table.records.size() == 1);
    REQUIRE(table.records[0].failure.empty());
    // rebuild the graph for the edge count at the swept epsilon
    const auto cloud = sample_points(sw.manifold, n, "uniform", table.records[0].seed);
    const auto kc = kernel_constants(sw.kernel);
    const auto g = build_graph(cloud, sw.kernel, kc, table.records[0].epsilon);
    const double steps = sw.T / table.records[0].dt;
    return std::pair<double, double>(
        table.records[0].runtime_seconds,
        static_cast<double>(g.undirected_edge_count()) * steps);
  };
  const auto [t_small, work_small] = run_one(400);
  const auto [t_big, work_big] = run_one(3200);
  REQUIRE(work_big > work_small);
  // factor-3 budget over proportional scaling, with a floor so timer noise
  // on tiny runs cannot trip the check
  const double allowed = 3.0 * (work_big / work_small) * std::max(t_small, 1e-3);
  CHECK(t_big <= allowed);
}
