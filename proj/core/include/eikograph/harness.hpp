#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eikograph/graph.hpp"
#include "eikograph/reference.hpp"
#include "eikograph/solver.hpp"

namespace eikograph {

struct SweepConfig {
  ManifoldSpec manifold;
  BoundarySpec boundary;
  Kernel kernel;
  std::string potential_id = "constant";
  std::vector<double> potential_params{1.0};
  std::string initial_id = "zero";
  std::vector<double> initial_params;
  std::string density_id = "uniform";
  std::vector<double> density_params;

  std::vector<std::size_t> n_list;
  double nu = 0.5, xi = 0.5, zeta = 0.5, tau = 1.0;
  std::size_t trials_per_n = 5;
  double T = 2.0;
  std::uint64_t seed_base = 0;
  std::optional<double> k1;  // calibrated when absent

  int threads = 1;
  int snapshot_every = 1;
  double steady_tol = 1e-10;
  bool stop_at_steady = false;
  std::size_t boundary_sample_count = 512;
  std::size_t calibration_trials = 50;
  std::size_t probe_count = 1000;
  bool record_runtime = false;  // wall clock into ErrorRecord, off for
                                // reproducible outputs
};

struct GroupStats {
  std::size_t n = 0;
  double epsilon = 0.0;
  double dt = 0.0;
  double median = 0.0;
  double iqr = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double oracle_resolution = 0.0;  // nonzero when a sampled oracle was used
};

struct ConvergenceTable {
  std::vector<ErrorRecord> records;  // per trial, ordered by (n, trial)
  std::vector<GroupStats> groups;
  std::optional<double> fitted_slope;
  std::optional<std::pair<double, double>> slope_ci;
  double k1_used = 0.0;
  double predicted_exponent = 0.0;
  std::vector<std::string> notes;  // CFL clamp events, quarantined trials
};

// One sample-build-solve-compare run at explicit (n, epsilon, dt). The
// closed-form oracle requires the uniform regime; other potentials get the
// steady-state Dijkstra comparison (not used by the sweeps shipped here).
ErrorRecord run_single_trial(const SweepConfig& sweep, std::size_t n, double epsilon,
                             double dt, std::uint64_t seed);

// Full sweep over n_list with epsilon from the (possibly calibrated)
// schedule and dt = min(epsilon^(1+zeta), CFL). Failed trials are recorded
// with a reason and excluded from group statistics and fits.
ConvergenceTable run_convergence(const SweepConfig& sweep);

struct RateFit {
  double slope = 0.0;
  std::pair<double, double> ci{0.0, 0.0};
};

// OLS of log(median error) against log(log n / n); CI from `bootstrap`
// trial resamples per group.
RateFit fit_rate(const ConvergenceTable& table, std::size_t bootstrap = 200,
                 std::uint64_t seed = 1);

struct MCReport {
  std::size_t n = 0;
  std::size_t trials = 0;
  double cover_frequency = 0.0;
  double hausdorff_frequency = 0.0;
  double epsilon_n = 0.0;
  double k1_used = 0.0;
};

MCReport mc_cover_probability(const ManifoldSpec& spec, const BoundarySpec& gamma,
                              std::size_t n, std::size_t trials, double a, double nu,
                              double tau, double k1, std::uint64_t seed,
                              std::size_t probe_count = 1000,
                              std::size_t boundary_sample_count = 512,
                              int threads = 1);

// min(nu, xi, 1/2, zeta) / ((1 + nu) m*).
double theoretical_exponent(double nu, double xi, double zeta, int m_star);

// Writes convergence.<format> plus summary.txt into out_dir. Output bytes
// are a pure function of the inputs.
void emit_report(const ConvergenceTable& table, const SweepConfig& sweep,
                 const std::string& out_dir, const std::string& format,
                 const std::string& config_hash);
void emit_report(const MCReport& report, const std::string& out_dir,
                 const std::string& format, const std::string& config_hash);

// errors.csv emission with the stable column order
// (n, epsilon, dt, sup_error, boundary_hausdorff, runtime_seconds, seed).
void append_error_records(const std::vector<ErrorRecord>& records,
                          const std::string& path, const std::string& config_hash);

// Deterministic run helpers shared by the CLI and the reports.
std::string format_double(double v);
std::uint64_t fnv1a_hash(const std::string& data);
std::string hash_hex(std::uint64_t h);

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace eikograph
