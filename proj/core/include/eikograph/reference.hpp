#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "eikograph/manifold.hpp"
#include "eikograph/solver.hpp"

namespace eikograph {

struct OracleField {
  std::vector<double> values;
  std::string provenance;          // "closed-form" or "dijkstra(k=..)"
  double resolution_error = 0.0;   // spacing-scale estimate for dijkstra
};

// Viscosity solution of the local problem in the uniform regime P = 1,
// f0 = 0: min(t, d_M(x, Gamma)).
double local_solution_uniform(const ManifoldSpec& spec, const BoundarySpec& gamma,
                              std::span<const double> x, double t);

// Multi-source weighted shortest path on a symmetrized kNN graph of the
// dense cloud. Edge cost d_M(u,v) * (P(u)+P(v))/2; seeds start at the given
// offsets (zero by default). Throws if the graph is disconnected.
OracleField dijkstra_weighted_distance(const PointCloud& dense_cloud,
                                       std::span<const double> potential,
                                       const std::vector<std::size_t>& gamma_indices,
                                       int k = 12,
                                       const std::vector<double>& seed_offsets = {});

// Index of the nearest dense-cloud node for each query point, used to read
// an OracleField off the dense cloud.
std::vector<std::size_t> nearest_nodes(const PointCloud& dense_cloud,
                                       const PointCloud& queries);

// Steady-state reference for a nonuniform potential: weighted Dijkstra
// distance on a cloud `density_factor` times denser than the query cloud,
// seeded from the nodes inside the boundary band with first-order offsets.
OracleField steady_state_reference(const ManifoldSpec& spec,
                                   const BoundarySpec& gamma,
                                   const PointCloud& queries,
                                   const std::string& potential_id,
                                   const std::vector<double>& potential_params,
                                   double band_threshold, std::uint64_t seed,
                                   std::size_t density_factor = 10, int k = 12);

struct ErrorRecord {
  std::size_t n = 0;
  double epsilon = 0.0;
  double dt = 0.0;
  double sup_error = 0.0;
  double boundary_hausdorff = 0.0;
  double runtime_seconds = 0.0;
  std::uint64_t seed = 0;
  double oracle_resolution = 0.0;  // nonzero when a sampled oracle was used
  std::string failure;             // empty on success
};

// L_inf error over the vertex set and the trajectory's snapshot times; the
// oracle is evaluated as (vertex index, time) -> value.
ErrorRecord sup_error(const Trajectory& traj,
                      const std::function<double(std::size_t, double)>& oracle);

}  // namespace eikograph
