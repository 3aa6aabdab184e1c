#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"

#include "eikograph/config.hpp"
#include "eikograph/io.hpp"
#include "eikograph/rng.hpp"
#include "eikograph/version.hpp"

namespace eg = eikograph;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitValidate = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int snapshot_every = 0;
  bool stop_at_steady = false;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "run-config JSON file")->required();
  cmd->add_option("--out-dir", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override seed_base")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--snapshot-every", args.snapshot_every,
                  "record every k-th time step");
  cmd->add_flag("--stop-at-steady", args.stop_at_steady,
                "truncate once the field is stationary");
  cmd->add_option("--threads", args.threads, "worker threads for trials");
}

eg::RunConfig load(const CommonArgs& args) {
  eg::RunConfig cfg = eg::load_config(args.config_path);
  if (args.seed_set) cfg.sweep.seed_base = args.seed;
  if (args.snapshot_every > 0) cfg.sweep.snapshot_every = args.snapshot_every;
  cfg.sweep.stop_at_steady = args.stop_at_steady;
  cfg.sweep.threads = args.threads;
  cfg.solver.stop_at_steady = args.stop_at_steady;
  if (args.snapshot_every > 0) cfg.solver.snapshot_every = args.snapshot_every;
  return cfg;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

int run_gen(const CommonArgs& args) {
  const eg::RunConfig cfg = load(args);
  const auto& sw = cfg.sweep;
  const auto cloud = eg::sample_points(sw.manifold, cfg.sample_n, sw.density_id,
                                       sw.seed_base, sw.density_params);
  const auto constants = eg::kernel_constants(sw.kernel);
  eg::Graph graph = eg::build_graph(cloud, sw.kernel, constants, cfg.solver.epsilon);
  graph.boundary_mask =
      eg::mark_boundary(cloud, sw.boundary, sw.kernel.a, cfg.solver.epsilon, sw.nu);
  if (std::none_of(graph.boundary_mask.begin(), graph.boundary_mask.end(),
                   [](char c) { return c != 0; }))
    std::cerr << "warning: Gamma_n is empty at this epsilon; downstream runs "
                 "degrade to a pure initial-value problem\n";
  std::filesystem::create_directories(args.out_dir);
  eg::save_cloud(cloud, args.out_dir + "/cloud.csv", args.out_dir + "/cloud.json",
                 cfg.hash);
  eg::save_graph(graph, args.out_dir + "/edges.csv", args.out_dir + "/vertices.csv",
                 cfg.hash);
  write_text(args.out_dir + "/config_echo.json", cfg.canonical);
  std::cout << "gen: n=" << cloud.n << " edges=" << graph.undirected_edge_count()
            << " boundary="
            << std::count(graph.boundary_mask.begin(), graph.boundary_mask.end(), 1)
            << "\n";
  return kExitOk;
}

int run_solve(const CommonArgs& args) {
  const eg::RunConfig cfg = load(args);
  const auto& sw = cfg.sweep;
  const auto cloud = eg::sample_points(sw.manifold, cfg.sample_n, sw.density_id,
                                       sw.seed_base, sw.density_params);
  const auto constants = eg::kernel_constants(sw.kernel);
  eg::Graph graph = eg::build_graph(cloud, sw.kernel, constants, cfg.solver.epsilon);
  graph.boundary_mask =
      eg::mark_boundary(cloud, sw.boundary, sw.kernel.a, cfg.solver.epsilon, sw.nu);

  const eg::Trajectory traj = eg::solve(graph, cfg.solver);
  std::filesystem::create_directories(args.out_dir);
  eg::save_solution(traj, args.out_dir + "/solution.csv", cfg.hash);

  const auto potential =
      eg::evaluate_potential(cloud, cfg.solver.potential_id, cfg.solver.potential_params);
  const auto initial =
      eg::evaluate_initial(cloud, cfg.solver.initial_id, cfg.solver.initial_params);
  const double f0_lip =
      eg::initial_lipschitz(cfg.solver.initial_id, cfg.solver.initial_params);
  auto reg = eg::audit_regularity(traj, graph, f0_lip, potential);

  // Barrier sandwich applies in the f0 = 0, P >= 0 regime with a nonempty
  // boundary set; otherwise the audit is reported as skipped.
  const bool zero_initial =
      std::all_of(initial.begin(), initial.end(), [](double v) { return v == 0.0; });
  const bool has_boundary =
      std::any_of(graph.boundary_mask.begin(), graph.boundary_mask.end(),
                  [](char c) { return c != 0; });
  if (zero_initial && has_boundary) {
    const auto barriers =
        eg::audit_barriers(traj, graph, sw.boundary, potential, initial, f0_lip);
    reg.barriers_checked = true;
    reg.barrier_lower_ok = barriers.lower_ok;
    reg.barrier_upper_ok = barriers.upper_ok;
  }

  nlohmann::json meta = nlohmann::json::parse(cfg.canonical);
  meta["run"] = {
      {"kernel_constants",
       {{"C_eta", constants.C_eta},
        {"c_eta", constants.c_eta},
        {"sup_eta", constants.sup_eta},
        {"argmax_t", constants.argmax_t}}},
      {"cfl_bound", eg::cfl_bound(constants, cfg.solver.epsilon)},
      {"dt_used", traj.dt},
      {"cfl_clamped", traj.cfl_clamped},
      {"steps", traj.steps_taken},
      {"time_lip_max", reg.time_lip_max},
      {"time_lip_bound", reg.time_lip_bound},
      {"space_max_violation", reg.space_max_violation},
      {"barriers_checked", reg.barriers_checked},
      {"barrier_lower_ok", reg.barrier_lower_ok},
      {"barrier_upper_ok", reg.barrier_upper_ok}};
  if (traj.steady_state_step)
    meta["run"]["steady_state_step"] = *traj.steady_state_step;
  write_text(args.out_dir + "/run_metadata.json", meta.dump(2) + "\n");
  std::cout << "solve: steps=" << traj.steps_taken << " snapshots="
            << traj.snapshots.size() << " dt=" << traj.dt << "\n";
  return kExitOk;
}

int run_converge(const CommonArgs& args) {
  eg::RunConfig cfg = load(args);
  const eg::ConvergenceTable table = eg::run_convergence(cfg.sweep);
  std::filesystem::create_directories(args.out_dir);
  eg::append_error_records(table.records, args.out_dir + "/errors.csv", cfg.hash);
  eg::emit_report(table, cfg.sweep, args.out_dir, "csv", cfg.hash);
  eg::emit_report(table, cfg.sweep, args.out_dir, "json", cfg.hash);
  for (const auto& g : table.groups)
    std::cout << "n=" << g.n << " median=" << g.median << " failures=" << g.failures
              << "\n";
  if (table.fitted_slope) std::cout << "slope=" << *table.fitted_slope << "\n";
  return kExitOk;
}

int run_mc_cover(const CommonArgs& args) {
  eg::RunConfig cfg = load(args);
  const auto& sw = cfg.sweep;
  double k1;
  if (sw.k1) {
    k1 = *sw.k1;
  } else {
    k1 = eg::calibrate_k1(sw.manifold, sw.kernel.a, sw.nu, sw.tau, cfg.mc_n,
                          sw.calibration_trials, 0.95,
                          eg::Rng(sw.seed_base).stream(0xCA1).next_u64(),
                          sw.probe_count, sw.density_id, sw.density_params);
    std::cout << "calibrated k1=" << k1 << "\n";
  }
  const eg::MCReport report = eg::mc_cover_probability(
      sw.manifold, sw.boundary, cfg.mc_n, cfg.mc_trials, sw.kernel.a, sw.nu, sw.tau,
      k1, eg::Rng(sw.seed_base).stream(0x31C).next_u64(), sw.probe_count,
      sw.boundary_sample_count, sw.threads);
  eg::emit_report(report, args.out_dir, "csv", cfg.hash);
  eg::emit_report(report, args.out_dir, "json", cfg.hash);
  std::cout << "cover_frequency=" << report.cover_frequency
            << " hausdorff_frequency=" << report.hausdorff_frequency << "\n";
  return kExitOk;
}

bool report_check(const std::string& name, bool ok) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
  return ok;
}

int run_validate(const CommonArgs& args) {
  const eg::RunConfig cfg = load(args);
  const auto& sw = cfg.sweep;
  bool all_ok = true;

  const auto constants = eg::kernel_constants(sw.kernel);
  {
    bool ok = constants.C_eta > 0 && constants.c_eta > 0 &&
              constants.sup_eta >= constants.c_eta;
    const int steps = 2000;
    for (int i = 0; i <= steps && ok; ++i) {
      const double t = sw.kernel.r_eta * static_cast<double>(i) / steps;
      ok = t * sw.kernel(t) <= constants.C_eta + 1e-12 &&
           sw.kernel(t) <= constants.sup_eta + 1e-12;
    }
    all_ok &= report_check("kernel constants dominate grid", ok);
  }
  {
    eg::Rng rng(sw.seed_base + 17);
    const auto cloud = eg::sample_points(sw.manifold, 64, "uniform", rng.next_u64());
    bool sym_ok = true, tri_ok = true, diag_ok = true, chord_ok = true;
    for (int trial = 0; trial < 2000; ++trial) {
      const auto i = rng.index_below(cloud.n);
      const auto j = rng.index_below(cloud.n);
      const auto k = rng.index_below(cloud.n);
      const double dij = eg::geodesic_distance(sw.manifold, cloud.point(i), cloud.point(j));
      const double dji = eg::geodesic_distance(sw.manifold, cloud.point(j), cloud.point(i));
      const double djk = eg::geodesic_distance(sw.manifold, cloud.point(j), cloud.point(k));
      const double dik = eg::geodesic_distance(sw.manifold, cloud.point(i), cloud.point(k));
      sym_ok &= dij == dji;
      tri_ok &= dik <= dij + djk + 1e-12;
      diag_ok &= eg::geodesic_distance(sw.manifold, cloud.point(i), cloud.point(i)) == 0.0;
      chord_ok &= eg::extrinsic_distance(sw.manifold, cloud.point(i), cloud.point(j)) <=
                  dij + 1e-15;
    }
    all_ok &= report_check("metric symmetry exact", sym_ok);
    all_ok &= report_check("triangle inequality within 1e-12", tri_ok);
    all_ok &= report_check("geodesic_distance(x,x) == 0", diag_ok);
    all_ok &= report_check("dtilde <= d_M", chord_ok);
  }
  {
    eg::Rng rng(sw.seed_base + 23);
    const auto cloud = eg::sample_points(sw.manifold, 150, "uniform", rng.next_u64());
    const eg::Graph g = eg::build_graph(cloud, sw.kernel, constants, cfg.solver.epsilon);
    bool equal = true;
    const double radius = cfg.solver.epsilon * sw.kernel.r_eta;
    for (std::size_t i = 0; i < cloud.n && equal; ++i) {
      std::size_t count = 0;
      for (std::size_t j = 0; j < cloud.n; ++j) {
        if (j == i) continue;
        if (eg::extrinsic_distance(sw.manifold, cloud.point(i), cloud.point(j)) <= radius)
          ++count;
      }
      equal = count == g.neighbors[i].size();
    }
    bool sym = true;
    for (std::size_t i = 0; i < cloud.n && sym; ++i)
      for (const auto& e : g.neighbors[i]) {
        const auto& back = g.neighbors[e.target];
        sym &= std::any_of(back.begin(), back.end(), [&](const eg::GraphEdge& b) {
          return b.target == i && b.dtilde == e.dtilde && b.weight == e.weight;
        });
      }
    all_ok &= report_check("cell-grid neighbors equal brute force", equal);
    all_ok &= report_check("neighbor symmetry with identical weights", sym);
  }
  {
    eg::Rng rng(sw.seed_base + 29);
    const auto cloud = eg::sample_points(sw.manifold, 200, "uniform", rng.next_u64());
    eg::Graph g = eg::build_graph(cloud, sw.kernel, constants, cfg.solver.epsilon);
    g.boundary_mask.assign(cloud.n, 0);
    const std::vector<double> potential(cloud.n, 1.0);
    const std::vector<double> initial(cloud.n, 0.0);
    const double dt = 0.9 * eg::cfl_bound(constants, cfg.solver.epsilon);
    bool mono_ok = true, nonneg_ok = true;
    for (int trial = 0; trial < 50 && mono_ok; ++trial) {
      eg::Field f, gfield;
      f.values.resize(cloud.n);
      gfield.values.resize(cloud.n);
      for (std::size_t i = 0; i < cloud.n; ++i) {
        f.values[i] = rng.uniform(-1.0, 1.0);
        gfield.values[i] = f.values[i] + rng.uniform(0.0, 0.5);
        nonneg_ok &= eg::nonlocal_gradient(g, f.values, i) >= 0.0;
      }
      const eg::Field fn = eg::euler_step(g, f, potential, dt, initial);
      const eg::Field gn = eg::euler_step(g, gfield, potential, dt, initial);
      for (std::size_t i = 0; i < cloud.n; ++i) mono_ok &= fn.values[i] <= gn.values[i];
    }
    all_ok &= report_check("one-step monotonicity under CFL", mono_ok);
    all_ok &= report_check("nonlocal gradient is non-negative", nonneg_ok);
  }
  if (sw.initial_id == "zero" && sw.potential_id == "constant") {
    const auto cloud = eg::sample_points(sw.manifold, 400, sw.density_id,
                                         sw.seed_base + 31, sw.density_params);
    eg::Graph g = eg::build_graph(cloud, sw.kernel, constants, cfg.solver.epsilon);
    g.boundary_mask =
        eg::mark_boundary(cloud, sw.boundary, sw.kernel.a, cfg.solver.epsilon, sw.nu);
    const bool has_boundary = std::any_of(g.boundary_mask.begin(), g.boundary_mask.end(),
                                          [](char c) { return c != 0; });
    if (has_boundary) {
      eg::SolverConfig quick = cfg.solver;
      quick.dt = 0.0;
      quick.T = std::min(cfg.solver.T, 1.0);
      const auto traj = eg::solve(g, quick);
      const auto potential =
          eg::evaluate_potential(cloud, sw.potential_id, sw.potential_params);
      const auto initial = eg::evaluate_initial(cloud, sw.initial_id, sw.initial_params);
      const auto audit =
          eg::audit_barriers(traj, g, sw.boundary, potential, initial, 0.0);
      all_ok &= report_check("barrier sandwich", audit.lower_ok && audit.upper_ok);
    } else {
      std::cout << "[SKIP] barrier sandwich (empty Gamma_n at this epsilon)\n";
    }
  }
  return all_ok ? kExitOk : kExitValidate;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"non-local Eikonal solver and benchmark harness on geometric graphs"};
  app.set_version_flag("--version", eg::kVersion);
  app.require_subcommand(1);

  CommonArgs gen_args, solve_args, conv_args, mc_args, val_args;
  CLI::App* gen = app.add_subcommand("gen", "sample a cloud and build its graph");
  add_common(gen, gen_args);
  CLI::App* solve = app.add_subcommand("solve", "run the forward-Euler scheme");
  add_common(solve, solve_args);
  CLI::App* conv = app.add_subcommand("converge", "run a convergence sweep");
  add_common(conv, conv_args);
  CLI::App* mc = app.add_subcommand("mc-cover", "Monte-Carlo covering frequencies");
  add_common(mc, mc_args);
  CLI::App* val = app.add_subcommand("validate", "run the invariant suite");
  add_common(val, val_args);

  CLI11_PARSE(app, argc, argv);
  try {
    if (gen->parsed()) return run_gen(gen_args);
    if (solve->parsed()) return run_solve(solve_args);
    if (conv->parsed()) return run_converge(conv_args);
    if (mc->parsed()) return run_mc_cover(mc_args);
    if (val->parsed()) return run_validate(val_args);
  } catch (const eg::ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return kExitOk;
}
