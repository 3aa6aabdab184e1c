#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eikograph/graph.hpp"

namespace eikograph {

struct Field {
  std::vector<double> values;
  double time = 0.0;
};

enum class CflMode { StrictReject, AutoClamp };

struct SolverConfig {
  double epsilon = 0.1;
  double dt = 0.0;      // 0 selects the CFL bound
  double T = 1.0;
  CflMode cfl_mode = CflMode::StrictReject;
  double steady_tol = 1e-10;  // relative to max(1, ||P||_inf)
  std::string potential_id = "constant";
  std::vector<double> potential_params{1.0};
  std::string initial_id = "zero";
  std::vector<double> initial_params;
  int snapshot_every = 1;
  bool stop_at_steady = false;
};

// Potentials: "constant" {c}, "linear-coord" {axis, base, slope}. The result
// must be non-negative on the vertex set.
std::vector<double> evaluate_potential(const PointCloud& cloud, const std::string& id,
                                       const std::vector<double>& params);

// Initial data: "zero", "constant" {c}, "linear-coord" {axis, slope}.
std::vector<double> evaluate_initial(const PointCloud& cloud, const std::string& id,
                                     const std::vector<double>& params);

// Lipschitz constant of the shipped initial data in the intrinsic metric.
double initial_lipschitz(const std::string& id, const std::vector<double>& params);

// Lower estimate of a Lipschitz constant from graph edges:
// max |f(x)-f(y)| / d_M(x,y).
double lipschitz_estimate(const Graph& graph, std::span<const double> values);

// max(0, max_y J_eps(x,y) (f(x) - f(y))) over stored neighbors; the zero
// floor realizes the y = x term of the max over the whole vertex set.
double nonlocal_gradient(const Graph& graph, std::span<const double> field,
                         std::size_t vertex);

// One forward-Euler update. Interior: f + dt (P - |grad^- f|). Boundary
// vertices are pinned to the initial data. Callers are responsible for the
// CFL bound; solve() enforces it according to cfl_mode.
Field euler_step(const Graph& graph, const Field& prev,
                 std::span<const double> potential, double dt,
                 std::span<const double> initial);

struct Trajectory {
  std::vector<Field> snapshots;
  double dt = 0.0;
  double dt_requested = 0.0;
  bool cfl_clamped = false;
  std::size_t steps_taken = 0;
  std::optional<std::size_t> steady_state_step;
};

Trajectory solve(const Graph& graph, const SolverConfig& config);

struct RegularityReport {
  double time_lip_max = 0.0;       // observed max |df|/dt over snapshots
  double time_lip_bound = 0.0;     // Lip(f0) + ||P||_inf
  double space_max_violation = 0.0;  // worst excess over K (d_M + eps)
  double space_bound_K = 0.0;
  bool time_ok = true;
  bool space_ok = true;
  bool barrier_lower_ok = true;
  bool barrier_upper_ok = true;
  bool barriers_checked = false;
};

// Checks the scheme's proven time/space regularity on the computed
// trajectory: |f(x,t)-f(x,t-dt)| <= L dt and |f(x,t)-f(y,t)| <= K(d_M+eps)
// over all edges plus `pair_samples` random vertex pairs.
RegularityReport audit_regularity(const Trajectory& traj, const Graph& graph,
                                  double f0_lipschitz,
                                  std::span<const double> potential,
                                  std::size_t pair_samples = 20000,
                                  std::uint64_t seed = 7);

struct BarrierAudit {
  bool lower_ok = true;
  bool upper_ok = true;
  double lower_margin = 0.0;  // min over vertices/times of f - 0
  double upper_margin = 0.0;  // min over vertices/times of barrier + slack - f
  double k1 = 0.0;
  double k2 = 0.0;
  double slack = 0.0;
};

// Sandwich audit for the f0 = 0, P >= 0 regime: 0 <= f <= min(K1 t,
// K2 dtilde(x, Gamma)) + K_reg * eps, with K1 = ||P||_inf and K2 from the
// barrier construction (d0 = 1, a0 = diam(M) defaults).
BarrierAudit audit_barriers(const Trajectory& traj, const Graph& graph,
                            const BoundarySpec& gamma,
                            std::span<const double> potential,
                            std::span<const double> initial, double f0_lipschitz);

}  // namespace eikograph
