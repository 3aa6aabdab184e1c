#include "eikograph/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "eikograph/rng.hpp"
#include "eikograph/version.hpp"

namespace eikograph {

namespace {

double quantile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return quantile(v, 0.5);
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate: degenerate predictor");
  return sxy / sxx;
}

}  // namespace

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min<int>(threads, static_cast<int>(count));
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a_hash(const std::string& data) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double theoretical_exponent(double nu, double xi, double zeta, int m_star) {
  const double m = std::min(std::min(nu, xi), std::min(0.5, zeta));
  return m / ((1.0 + nu) * static_cast<double>(m_star));
}

ErrorRecord run_single_trial(const SweepConfig& sweep, std::size_t n, double epsilon,
                             double dt, std::uint64_t seed) {
  ErrorRecord rec;
  rec.n = n;
  rec.epsilon = epsilon;
  rec.dt = dt;
  rec.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const auto cloud =
        sample_points(sweep.manifold, n, sweep.density_id, seed, sweep.density_params);
    const auto constants = kernel_constants(sweep.kernel);
    Graph graph = build_graph(cloud, sweep.kernel, constants, epsilon);
    graph.boundary_mask =
        mark_boundary(cloud, sweep.boundary, sweep.kernel.a, epsilon, sweep.nu);
    const bool has_boundary =
        std::any_of(graph.boundary_mask.begin(), graph.boundary_mask.end(),
                    [](char c) { return c != 0; });
    if (!has_boundary) {
      rec.failure = "empty_boundary";
      return rec;
    }

    SolverConfig cfg;
    cfg.epsilon = epsilon;
    cfg.dt = dt;
    cfg.T = sweep.T;
    cfg.potential_id = sweep.potential_id;
    cfg.potential_params = sweep.potential_params;
    cfg.initial_id = sweep.initial_id;
    cfg.initial_params = sweep.initial_params;
    cfg.snapshot_every = sweep.snapshot_every;
    cfg.steady_tol = sweep.steady_tol;
    cfg.stop_at_steady = sweep.stop_at_steady;
    const Trajectory traj = solve(graph, cfg);

    if (sweep.initial_id != "zero") {
      rec.failure = "no_oracle_for_nonzero_initial_data";
      return rec;
    }
    const bool uniform_regime =
        sweep.potential_id == "constant" && sweep.potential_params.size() == 1;
    if (uniform_regime) {
      const double c = sweep.potential_params[0];
      std::vector<double> dist(graph.n());
      for (std::size_t i = 0; i < graph.n(); ++i)
        dist[i] =
            distance_to_boundary(sweep.manifold, sweep.boundary, graph.cloud.point(i));
      auto oracle = [&](std::size_t i, double t) { return c * std::min(t, dist[i]); };
      rec.sup_error = sup_error(traj, oracle).sup_error;
    } else {
      // Nonuniform potential: steady states only, against the weighted
      // Dijkstra reference on a 10x denser cloud.
      const double band = sweep.kernel.a * std::pow(epsilon, 1.0 + sweep.nu) / 2.0;
      const auto reference = steady_state_reference(
          sweep.manifold, sweep.boundary, graph.cloud, sweep.potential_id,
          sweep.potential_params, band, Rng(seed).stream(0xD1).next_u64());
      const auto& final_values = traj.snapshots.back().values;
      double sup = 0.0;
      for (std::size_t i = 0; i < graph.n(); ++i)
        sup = std::max(sup, std::fabs(final_values[i] - reference.values[i]));
      rec.sup_error = sup;
      rec.oracle_resolution = reference.resolution_error;
    }

    const auto gamma_sample =
        boundary_sample(sweep.manifold, sweep.boundary, sweep.boundary_sample_count);
    rec.boundary_hausdorff = hausdorff_boundary(gamma_sample, graph);
  } catch (const std::exception& ex) {
    rec.failure = ex.what();
  }
  if (sweep.record_runtime) {
    const auto t1 = std::chrono::steady_clock::now();
    rec.runtime_seconds = std::chrono::duration<double>(t1 - t0).count();
  }
  return rec;
}

ConvergenceTable run_convergence(const SweepConfig& sweep) {
  if (sweep.n_list.empty())
    throw std::invalid_argument("run_convergence: empty n_list");
  if (!std::is_sorted(sweep.n_list.begin(), sweep.n_list.end()) ||
      std::adjacent_find(sweep.n_list.begin(), sweep.n_list.end()) != sweep.n_list.end())
    throw std::invalid_argument("run_convergence: n_list must be strictly increasing");
  if (sweep.trials_per_n < 1)
    throw std::invalid_argument("run_convergence: trials_per_n must be >= 1");
  if (!(sweep.zeta > 0.0))
    throw std::invalid_argument("run_convergence: zeta must be > 0");

  ConvergenceTable table;
  table.predicted_exponent = theoretical_exponent(sweep.nu, sweep.xi, sweep.zeta,
                                                  sweep.manifold.intrinsic_dim);

  double k1 = sweep.k1.value_or(0.0);
  if (!sweep.k1) {
    k1 = calibrate_k1(sweep.manifold, sweep.kernel.a, sweep.nu, sweep.tau,
                      sweep.n_list.front(), sweep.calibration_trials, 0.95,
                      Rng(sweep.seed_base).stream(0xCA1).next_u64(), sweep.probe_count,
                      sweep.density_id, sweep.density_params);
    table.notes.push_back("k1 calibrated at pilot n=" +
                          std::to_string(sweep.n_list.front()) + ": " +
                          format_double(k1));
  }
  table.k1_used = k1;

  const auto constants = kernel_constants(sweep.kernel);
  struct Job {
    std::size_t n;
    double epsilon;
    double dt;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t gi = 0; gi < sweep.n_list.size(); ++gi) {
    const std::size_t n = sweep.n_list[gi];
    const double eps =
        epsilon_schedule(n, sweep.manifold.intrinsic_dim, sweep.nu, sweep.tau, k1)
            .epsilon_n;
    const double bound = cfl_bound(constants, eps);
    const double dt_rate = std::pow(eps, 1.0 + sweep.zeta);
    const double dt = std::min(dt_rate, bound);
    if (dt_rate > bound)
      table.notes.push_back("cfl_clamp at n=" + std::to_string(n) + ": dt " +
                            format_double(dt_rate) + " -> " + format_double(bound));
    Rng group_rng = Rng(sweep.seed_base).stream(1000 + gi);
    for (std::size_t t = 0; t < sweep.trials_per_n; ++t)
      jobs.push_back({n, eps, dt, group_rng.stream(t).next_u64()});
  }

  std::vector<ErrorRecord> records(jobs.size());
  parallel_for(jobs.size(), sweep.threads, [&](std::size_t j) {
    records[j] = run_single_trial(sweep, jobs[j].n, jobs[j].epsilon, jobs[j].dt,
                                  jobs[j].seed);
  });
  table.records = std::move(records);

  for (std::size_t gi = 0; gi < sweep.n_list.size(); ++gi) {
    GroupStats g;
    g.n = sweep.n_list[gi];
    std::vector<double> errors;
    for (const auto& rec : table.records) {
      if (rec.n != g.n) continue;
      g.epsilon = rec.epsilon;
      g.dt = rec.dt;
      ++g.trials;
      if (!rec.failure.empty()) {
        ++g.failures;
        continue;
      }
      errors.push_back(rec.sup_error);
      g.oracle_resolution = std::max(g.oracle_resolution, rec.oracle_resolution);
    }
    if (g.failures > 0)
      table.notes.push_back("quarantined " + std::to_string(g.failures) +
                            " trial(s) at n=" + std::to_string(g.n));
    if (!errors.empty()) {
      std::sort(errors.begin(), errors.end());
      g.median = quantile(errors, 0.5);
      g.iqr = quantile(errors, 0.75) - quantile(errors, 0.25);
    }
    table.groups.push_back(g);
  }

  if (sweep.n_list.size() >= 2) {
    try {
      const RateFit fit = fit_rate(table, 200, sweep.seed_base ^ 0xF17);
      table.fitted_slope = fit.slope;
      table.slope_ci = fit.ci;
    } catch (const std::exception& ex) {
      table.notes.push_back(std::string("rate fit skipped: ") + ex.what());
    }
  } else {
    table.notes.push_back("rate fit skipped: single group");
  }
  return table;
}

RateFit fit_rate(const ConvergenceTable& table, std::size_t bootstrap,
                 std::uint64_t seed) {
  std::vector<double> x, y;
  std::vector<std::vector<double>> group_errors;
  for (const auto& g : table.groups) {
    std::vector<double> errors;
    for (const auto& rec : table.records)
      if (rec.n == g.n && rec.failure.empty()) errors.push_back(rec.sup_error);
    if (errors.empty()) continue;
    const double med = median_of(errors);
    if (!(med > 0.0))
      throw std::invalid_argument("fit_rate: nonpositive median error in a group");
    x.push_back(std::log(std::log(static_cast<double>(g.n)) /
                         static_cast<double>(g.n)));
    y.push_back(std::log(med));
    group_errors.push_back(std::move(errors));
  }
  if (x.size() < 2)
    throw std::invalid_argument("fit_rate: need at least two groups with errors");

  RateFit fit;
  fit.slope = ols_slope(x, y);

  Rng rng(seed);
  std::vector<double> slopes;
  slopes.reserve(bootstrap);
  for (std::size_t b = 0; b < bootstrap; ++b) {
    std::vector<double> yb(y.size());
    bool ok = true;
    for (std::size_t gi = 0; gi < group_errors.size(); ++gi) {
      const auto& errors = group_errors[gi];
      std::vector<double> resampled(errors.size());
      for (std::size_t t = 0; t < errors.size(); ++t)
        resampled[t] = errors[rng.index_below(errors.size())];
      const double med = median_of(resampled);
      if (!(med > 0.0)) {
        ok = false;
        break;
      }
      yb[gi] = std::log(med);
    }
    if (ok) slopes.push_back(ols_slope(x, yb));
  }
  std::sort(slopes.begin(), slopes.end());
  if (!slopes.empty())
    fit.ci = {quantile(slopes, 0.025), quantile(slopes, 0.975)};
  return fit;
}

MCReport mc_cover_probability(const ManifoldSpec& spec, const BoundarySpec& gamma,
                              std::size_t n, std::size_t trials, double a, double nu,
                              double tau, double k1, std::uint64_t seed,
                              std::size_t probe_count,
                              std::size_t boundary_sample_count, int threads) {
  if (trials < 50)
    throw std::invalid_argument("mc_cover_probability: trials must be >= 50");
  MCReport report;
  report.n = n;
  report.trials = trials;
  report.k1_used = k1;
  const double eps = epsilon_schedule(n, spec.intrinsic_dim, nu, tau, k1).epsilon_n;
  report.epsilon_n = eps;
  const double hausdorff_threshold = a * std::pow(eps, 1.0 + nu) / 2.0;
  const auto gamma_sample = boundary_sample(spec, gamma, boundary_sample_count);

  std::vector<char> cover_hits(trials, 0), hausdorff_hits(trials, 0);
  Rng base(seed);
  std::vector<std::uint64_t> seeds(trials);
  for (std::size_t t = 0; t < trials; ++t) seeds[t] = base.stream(t).next_u64();

  parallel_for(trials, threads, [&](std::size_t t) {
    const auto cloud = sample_points(spec, n, "uniform", seeds[t]);
    cover_hits[t] = covering_check(cloud, a, eps, nu, probe_count).holds;
    Graph g;
    g.cloud = cloud;
    g.boundary_mask = mark_boundary(cloud, gamma, a, eps, nu);
    const bool nonempty = std::any_of(g.boundary_mask.begin(), g.boundary_mask.end(),
                                      [](char c) { return c != 0; });
    if (nonempty)
      hausdorff_hits[t] = hausdorff_boundary(gamma_sample, g) <= hausdorff_threshold;
  });
  std::size_t cover = 0, hausdorff = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    cover += cover_hits[t] != 0;
    hausdorff += hausdorff_hits[t] != 0;
  }
  report.cover_frequency = static_cast<double>(cover) / static_cast<double>(trials);
  report.hausdorff_frequency =
      static_cast<double>(hausdorff) / static_cast<double>(trials);
  return report;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string header_comment(const std::string& config_hash) {
  return std::string("# eikograph ") + kVersion + " " + config_hash + "\n";
}

}  // namespace

void append_error_records(const std::vector<ErrorRecord>& records,
                          const std::string& path, const std::string& config_hash) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (fresh) {
    out << header_comment(config_hash);
    out << "n,epsilon,dt,sup_error,boundary_hausdorff,runtime_seconds,seed\n";
  }
  for (const auto& r : records) {
    out << r.n << ',' << format_double(r.epsilon) << ',' << format_double(r.dt) << ','
        << format_double(r.sup_error) << ',' << format_double(r.boundary_hausdorff)
        << ',' << format_double(r.runtime_seconds) << ',' << r.seed << '\n';
  }
}

void emit_report(const ConvergenceTable& table, const SweepConfig& sweep,
                 const std::string& out_dir, const std::string& format,
                 const std::string& config_hash) {
  if (format != "csv" && format != "json")
    throw std::invalid_argument("emit_report: format must be csv or json");
  std::filesystem::create_directories(out_dir);

  const KernelConstants kc = kernel_constants(sweep.kernel);

  if (format == "csv") {
    std::string csv = header_comment(config_hash);
    csv += "# kernel " + to_string(sweep.kernel.profile) +
           " C_eta=" + format_double(kc.C_eta) + " c_eta=" + format_double(kc.c_eta) +
           " sup_eta=" + format_double(kc.sup_eta) + " a=" +
           format_double(sweep.kernel.a) + "\n";
    csv += "n,epsilon,dt,sup_error,boundary_hausdorff,runtime_seconds,seed,failure\n";
    for (const auto& r : table.records) {
      csv += std::to_string(r.n) + ',' + format_double(r.epsilon) + ',' +
             format_double(r.dt) + ',' + format_double(r.sup_error) + ',' +
             format_double(r.boundary_hausdorff) + ',' +
             format_double(r.runtime_seconds) + ',' + std::to_string(r.seed) + ',' +
             r.failure + '\n';
    }
    write_file(out_dir + "/convergence.csv", csv);
  } else {
    std::string json = "{\n  \"eikograph\": \"" + std::string(kVersion) +
                       "\",\n  \"config_hash\": \"" + config_hash + "\",\n";
    json += "  \"kernel_constants\": {\"C_eta\": " + format_double(kc.C_eta) +
            ", \"c_eta\": " + format_double(kc.c_eta) +
            ", \"sup_eta\": " + format_double(kc.sup_eta) +
            ", \"argmax_t\": " + format_double(kc.argmax_t) + "},\n";
    json += "  \"k1\": " + format_double(table.k1_used) + ",\n";
    json += "  \"predicted_exponent\": " + format_double(table.predicted_exponent) +
            ",\n";
    if (table.fitted_slope) {
      json += "  \"fitted_slope\": " + format_double(*table.fitted_slope) + ",\n";
      json += "  \"slope_ci\": [" + format_double(table.slope_ci->first) + ", " +
              format_double(table.slope_ci->second) + "],\n";
    }
    json += "  \"groups\": [\n";
    for (std::size_t i = 0; i < table.groups.size(); ++i) {
      const auto& g = table.groups[i];
      json += "    {\"n\": " + std::to_string(g.n) +
              ", \"epsilon\": " + format_double(g.epsilon) +
              ", \"dt\": " + format_double(g.dt) +
              ", \"median\": " + format_double(g.median) +
              ", \"iqr\": " + format_double(g.iqr) +
              ", \"trials\": " + std::to_string(g.trials) +
              ", \"failures\": " + std::to_string(g.failures) +
              ", \"oracle_resolution\": " + format_double(g.oracle_resolution) + "}";
      json += i + 1 < table.groups.size() ? ",\n" : "\n";
    }
    json += "  ]\n}\n";
    write_file(out_dir + "/convergence.json", json);
  }

  std::string summary = "eikograph " + std::string(kVersion) + " convergence sweep (" +
                        config_hash + ")\n";
  summary += "kernel " + to_string(sweep.kernel.profile) + ": C_eta=" +
             format_double(kc.C_eta) + " c_eta=" + format_double(kc.c_eta) +
             " sup_eta=" + format_double(kc.sup_eta) + " a=" +
             format_double(sweep.kernel.a) + "\n";
  summary += "groups: " + std::to_string(table.groups.size()) +
             (table.groups.empty() ? " (zero rows)" : "") + "\n";
  for (const auto& g : table.groups) {
    summary += "  n=" + std::to_string(g.n) + " eps=" + format_double(g.epsilon) +
               " dt=" + format_double(g.dt) + " median=" + format_double(g.median) +
               " iqr=" + format_double(g.iqr) + " failures=" +
               std::to_string(g.failures);
    if (g.oracle_resolution > 0.0)
      summary += " oracle_resolution=" + format_double(g.oracle_resolution);
    summary += "\n";
  }
  summary += "predicted exponent min(nu,xi,1/2,zeta)/((1+nu)m*): " +
             format_double(table.predicted_exponent) + "\n";
  if (table.fitted_slope) {
    summary += "fitted slope: " + format_double(*table.fitted_slope) + " ci=[" +
               format_double(table.slope_ci->first) + ", " +
               format_double(table.slope_ci->second) + "]\n";
    bool decreasing = true;
    for (std::size_t i = 1; i < table.groups.size(); ++i)
      decreasing = decreasing && table.groups[i].median < table.groups[i - 1].median;
    const bool ci_excludes_zero =
        table.slope_ci->first > 0.0 || table.slope_ci->second < 0.0;
    summary += std::string("check decreasing medians: ") +
               (decreasing ? "pass" : "fail") + "\n";
    summary += std::string("check slope ci excludes 0: ") +
               (ci_excludes_zero ? "pass" : "fail") + "\n";
  } else {
    summary += "fitted slope: n/a (flagged)\n";
  }
  for (const auto& note : table.notes) summary += "note: " + note + "\n";
  write_file(out_dir + "/summary.txt", summary);
}

void emit_report(const MCReport& report, const std::string& out_dir,
                 const std::string& format, const std::string& config_hash) {
  if (format != "csv" && format != "json")
    throw std::invalid_argument("emit_report: format must be csv or json");
  std::filesystem::create_directories(out_dir);
  if (format == "csv") {
    std::string csv = header_comment(config_hash);
    csv += "n,trials,cover_frequency,hausdorff_frequency,epsilon_n,k1\n";
    csv += std::to_string(report.n) + ',' + std::to_string(report.trials) + ',' +
           format_double(report.cover_frequency) + ',' +
           format_double(report.hausdorff_frequency) + ',' +
           format_double(report.epsilon_n) + ',' + format_double(report.k1_used) + '\n';
    write_file(out_dir + "/mc_cover.csv", csv);
  } else {
    std::string json = "{\n  \"eikograph\": \"" + std::string(kVersion) +
                       "\",\n  \"config_hash\": \"" + config_hash + "\",\n";
    json += "  \"n\": " + std::to_string(report.n) + ",\n";
    json += "  \"trials\": " + std::to_string(report.trials) + ",\n";
    json += "  \"cover_frequency\": " + format_double(report.cover_frequency) + ",\n";
    json += "  \"hausdorff_frequency\": " + format_double(report.hausdorff_frequency) +
            ",\n";
    json += "  \"epsilon_n\": " + format_double(report.epsilon_n) + ",\n";
    json += "  \"k1\": " + format_double(report.k1_used) + "\n}\n";
    write_file(out_dir + "/mc_cover.json", json);
  }
  std::string summary = "eikograph " + std::string(kVersion) + " mc-cover (" +
                        config_hash + ")\n";
  summary += "n=" + std::to_string(report.n) + " trials=" +
             std::to_string(report.trials) + " epsilon_n=" +
             format_double(report.epsilon_n) + "\n";
  summary += "cover_frequency=" + format_double(report.cover_frequency) +
             " hausdorff_frequency=" + format_double(report.hausdorff_frequency) + "\n";
  write_file(out_dir + "/mc_summary.txt", summary);
}

}  // namespace eikograph
