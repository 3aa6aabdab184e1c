#include "eikograph/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eikograph/rng.hpp"

namespace eikograph {

std::vector<double> evaluate_potential(const PointCloud& cloud, const std::string& id,
                                       const std::vector<double>& params) {
  std::vector<double> p(cloud.n, 0.0);
  if (id == "constant") {
    if (params.size() != 1)
      throw std::invalid_argument("constant potential needs {value}");
    std::fill(p.begin(), p.end(), params[0]);
  } else if (id == "linear-coord") {
    if (params.size() != 3)
      throw std::invalid_argument("linear-coord potential needs {axis, base, slope}");
    const int axis = static_cast<int>(params[0]);
    if (axis < 0 || axis >= cloud.dim)
      throw std::invalid_argument("potential axis out of range");
    for (std::size_t i = 0; i < cloud.n; ++i)
      p[i] = params[1] + params[2] * cloud.point(i)[axis];
  } else {
    throw std::invalid_argument("unknown potential: " + id);
  }
  for (double v : p)
    if (v < 0.0)
      throw std::invalid_argument("potential must be non-negative on the vertex set");
  return p;
}

std::vector<double> evaluate_initial(const PointCloud& cloud, const std::string& id,
                                     const std::vector<double>& params) {
  std::vector<double> f(cloud.n, 0.0);
  if (id == "zero") {
    if (!params.empty()) throw std::invalid_argument("zero initial takes no parameters");
  } else if (id == "constant") {
    if (params.size() != 1)
      throw std::invalid_argument("constant initial needs {value}");
    std::fill(f.begin(), f.end(), params[0]);
  } else if (id == "linear-coord") {
    if (params.size() != 2)
      throw std::invalid_argument("linear-coord initial needs {axis, slope}");
    const int axis = static_cast<int>(params[0]);
    if (axis < 0 || axis >= cloud.dim)
      throw std::invalid_argument("initial axis out of range");
    for (std::size_t i = 0; i < cloud.n; ++i)
      f[i] = params[1] * cloud.point(i)[axis];
  } else {
    throw std::invalid_argument("unknown initial data: " + id);
  }
  return f;
}

double initial_lipschitz(const std::string& id, const std::vector<double>& params) {
  if (id == "zero" || id == "constant") return 0.0;
  if (id == "linear-coord") return std::fabs(params.at(1));
  throw std::invalid_argument("unknown initial data: " + id);
}

double lipschitz_estimate(const Graph& graph, std::span<const double> values) {
  double lip = 0.0;
  for (std::size_t i = 0; i < graph.n(); ++i) {
    for (const auto& e : graph.neighbors[i]) {
      if (e.target <= i) continue;
      const double d = geodesic_distance(graph.cloud.spec, graph.cloud.point(i),
                                         graph.cloud.point(e.target));
      if (d > 0.0)
        lip = std::max(lip, std::fabs(values[i] - values[e.target]) / d);
    }
  }
  return lip;
}

double nonlocal_gradient(const Graph& graph, std::span<const double> field,
                         std::size_t vertex) {
  double best = 0.0;
  const double fx = field[vertex];
  for (const auto& e : graph.neighbors[vertex]) {
    const double term = e.weight * (fx - field[e.target]);
    if (term > best) best = term;
  }
  return best;
}

Field euler_step(const Graph& graph, const Field& prev,
                 std::span<const double> potential, double dt,
                 std::span<const double> initial) {
  if (!(dt > 0.0)) throw std::invalid_argument("euler_step: dt must be > 0");
  Field next;
  next.values.resize(prev.values.size());
  next.time = prev.time + dt;
  for (std::size_t i = 0; i < prev.values.size(); ++i) {
    if (graph.boundary_mask[i]) {
      next.values[i] = initial[i];
    } else {
      next.values[i] =
          prev.values[i] + dt * (potential[i] - nonlocal_gradient(graph, prev.values, i));
    }
  }
  return next;
}

Trajectory solve(const Graph& graph, const SolverConfig& config) {
  if (!(config.T >= 0.0)) throw std::invalid_argument("solve: T must be >= 0");
  if (config.snapshot_every < 1)
    throw std::invalid_argument("solve: snapshot_every must be >= 1");

  const auto potential =
      evaluate_potential(graph.cloud, config.potential_id, config.potential_params);
  const auto initial =
      evaluate_initial(graph.cloud, config.initial_id, config.initial_params);

  const double bound = cfl_bound(graph.constants, graph.epsilon);
  double dt = config.dt > 0.0 ? config.dt : bound;
  Trajectory traj;
  traj.dt_requested = dt;
  if (dt > bound * (1.0 + 1e-12)) {
    if (config.cfl_mode == CflMode::StrictReject)
      throw std::invalid_argument("solve: dt violates the CFL bound");
    // Snap to the largest stable step that divides T evenly.
    dt = config.T > 0.0 ? config.T / std::ceil(config.T / bound) : bound;
    traj.cfl_clamped = true;
  }
  traj.dt = dt;

  double p_max = 0.0;
  for (double v : potential) p_max = std::max(p_max, v);
  const double steady_threshold = config.steady_tol * dt * std::max(1.0, p_max);

  Field current;
  current.values = initial;
  current.time = 0.0;
  traj.snapshots.push_back(current);

  const auto total_steps =
      static_cast<std::size_t>(std::floor(config.T / dt + 1e-9));
  for (std::size_t step = 1; step <= total_steps; ++step) {
    Field next = euler_step(graph, current, potential, dt, initial);
    double max_update = 0.0;
    for (std::size_t i = 0; i < next.values.size(); ++i)
      max_update = std::max(max_update, std::fabs(next.values[i] - current.values[i]));
    if (!std::isfinite(max_update))
      throw std::runtime_error("solve: field became non-finite at step " +
                               std::to_string(step));
    current = std::move(next);
    if (!traj.steady_state_step && max_update < steady_threshold)
      traj.steady_state_step = step;
    traj.steps_taken = step;
    if (step % static_cast<std::size_t>(config.snapshot_every) == 0 ||
        step == total_steps)
      traj.snapshots.push_back(current);
    if (config.stop_at_steady && traj.steady_state_step) break;
  }
  return traj;
}

RegularityReport audit_regularity(const Trajectory& traj, const Graph& graph,
                                  double f0_lipschitz,
                                  std::span<const double> potential,
                                  std::size_t pair_samples, std::uint64_t seed) {
  RegularityReport rep;
  double p_max = 0.0;
  for (double v : potential) p_max = std::max(p_max, v);
  rep.time_lip_bound = f0_lipschitz + p_max;

  for (std::size_t s = 1; s < traj.snapshots.size(); ++s) {
    const auto& a = traj.snapshots[s - 1];
    const auto& b = traj.snapshots[s];
    const double dt = b.time - a.time;
    if (!(dt > 0.0)) continue;
    for (std::size_t i = 0; i < a.values.size(); ++i)
      rep.time_lip_max =
          std::max(rep.time_lip_max, std::fabs(b.values[i] - a.values[i]) / dt);
  }
  rep.time_ok = rep.time_lip_max <= rep.time_lip_bound + 1e-10;

  // Space constant K of the scheme regularity estimate, with the support-
  // local dtilde error bound standing in for the global one.
  const auto& spec = graph.cloud.spec;
  const double c_m = local_dtilde_error(spec, std::min(graph.epsilon, 1.0),
                                        graph.kernel.r_eta).c_m;
  const double a = graph.kernel.a;
  const double L = rep.time_lip_bound;
  const double k_space =
      4.0 / a *
      std::max((a + c_m) * p_max,
               graph.constants.C_eta / graph.constants.c_eta * (L + p_max));
  rep.space_bound_K = k_space;

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < graph.n(); ++i)
    for (const auto& e : graph.neighbors[i])
      if (e.target > i) pairs.emplace_back(i, e.target);
  Rng rng(seed);
  for (std::size_t s = 0; s < pair_samples; ++s) {
    const auto i = static_cast<std::size_t>(rng.index_below(graph.n()));
    const auto j = static_cast<std::size_t>(rng.index_below(graph.n()));
    if (i != j) pairs.emplace_back(std::min(i, j), std::max(i, j));
  }
  std::vector<double> pair_dist(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p)
    pair_dist[p] = geodesic_distance(spec, graph.cloud.point(pairs[p].first),
                                     graph.cloud.point(pairs[p].second));
  for (const auto& snap : traj.snapshots) {
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const double df =
          std::fabs(snap.values[pairs[p].first] - snap.values[pairs[p].second]);
      const double excess = df - k_space * (pair_dist[p] + graph.epsilon);
      rep.space_max_violation = std::max(rep.space_max_violation, excess);
    }
  }
  rep.space_max_violation = std::max(rep.space_max_violation, 0.0);
  rep.space_ok = rep.space_max_violation <= 1e-10;
  return rep;
}

BarrierAudit audit_barriers(const Trajectory& traj, const Graph& graph,
                            const BoundarySpec& gamma,
                            std::span<const double> potential,
                            std::span<const double> initial, double f0_lipschitz) {
  for (double v : initial)
    if (v != 0.0)
      throw std::invalid_argument("audit_barriers: shipped regime needs f0 = 0");
  double p_max = 0.0;
  for (double v : potential) {
    if (v < 0.0)
      throw std::invalid_argument("audit_barriers: shipped regime needs P >= 0");
    p_max = std::max(p_max, v);
  }

  BarrierAudit audit;
  const auto& spec = graph.cloud.spec;
  const double T = traj.snapshots.empty() ? 0.0 : traj.snapshots.back().time;
  const double d0 = 1.0;
  const double a0 = spec.diameter();
  audit.k1 = p_max;
  audit.k2 = std::max((f0_lipschitz + p_max) / d0, a0 > 0.0 ? audit.k1 * T / a0 : 0.0);

  const double c_m =
      local_dtilde_error(spec, std::min(graph.epsilon, 1.0), graph.kernel.r_eta).c_m;
  const double a = graph.kernel.a;
  const double L = f0_lipschitz + p_max;
  const double k_reg =
      4.0 / a *
      std::max((a + c_m) * p_max,
               graph.constants.C_eta / graph.constants.c_eta * (L + p_max));
  audit.slack = k_reg * graph.epsilon;

  std::vector<double> dist_gamma(graph.n());
  for (std::size_t i = 0; i < graph.n(); ++i)
    dist_gamma[i] = extrinsic_distance_to_boundary(spec, gamma, graph.cloud.point(i));

  double lower_margin = std::numeric_limits<double>::infinity();
  double upper_margin = std::numeric_limits<double>::infinity();
  for (const auto& snap : traj.snapshots) {
    for (std::size_t i = 0; i < graph.n(); ++i) {
      const double f = snap.values[i];
      const double barrier = std::min(audit.k1 * snap.time, audit.k2 * dist_gamma[i]);
      lower_margin = std::min(lower_margin, f);
      upper_margin = std::min(upper_margin, barrier + audit.slack - f);
    }
  }
  audit.lower_margin = lower_margin;
  audit.upper_margin = upper_margin;
  audit.lower_ok = lower_margin >= 0.0;
  audit.upper_ok = upper_margin >= 0.0;
  return audit;
}

}  // namespace eikograph
