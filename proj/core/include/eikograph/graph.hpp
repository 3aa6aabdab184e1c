#pragma once

#include <cstdint>
#include <vector>

#include "eikograph/kernel.hpp"
#include "eikograph/manifold.hpp"

namespace eikograph {

struct GraphEdge {
  std::uint32_t target = 0;
  double dtilde = 0.0;
  double weight = 0.0;
};

// Kernel-weighted geometric graph: adjacency holds exactly the pairs with
// dtilde <= epsilon * r_eta (self-pairs excluded). Immutable after build.
struct Graph {
  PointCloud cloud;
  Kernel kernel;
  KernelConstants constants;
  double epsilon = 0.0;
  std::vector<std::vector<GraphEdge>> neighbors;
  std::vector<char> boundary_mask;

  std::size_t n() const { return cloud.n; }
  std::size_t undirected_edge_count() const {
    std::size_t s = 0;
    for (const auto& adj : neighbors) s += adj.size();
    return s / 2;
  }
};

// Neighbor search via uniform cell-grid binning with cell side
// epsilon * r_eta (wrapped cells on the torus). Exact: equals the
// brute-force double loop.
Graph build_graph(const PointCloud& cloud, const Kernel& kernel,
                  const KernelConstants& constants, double epsilon);

// Gamma_n membership: distance_to_boundary(u_i) <= a * epsilon^(1+nu) / 2,
// measured in the intrinsic metric.
std::vector<char> mark_boundary(const PointCloud& cloud,
                                const BoundarySpec& gamma, double a,
                                double epsilon, double nu);

struct EpsilonSchedule {
  std::size_t n = 0;
  int m_star = 2;
  double nu = 0.5;
  double tau = 1.0;
  double k1 = 1.0;
  double epsilon_n = 0.0;
};

// epsilon_n^(1+nu) = K1 * (1+tau)^(1/m*) * (log n / n)^(1/m*). Requires
// n >= 3 so that log n > 1.
EpsilonSchedule epsilon_schedule(std::size_t n, int m_star, double nu, double tau,
                                 double k1);

struct CoveringResult {
  bool holds = false;
  double worst_gap = 0.0;
  double threshold = 0.0;  // a * epsilon^(1+nu) / 8
};

// Worst gap max_x d_M(x, V_n) estimated over low-discrepancy probes,
// compared against the covering threshold.
CoveringResult covering_check(const PointCloud& cloud, double a, double epsilon,
                              double nu, std::size_t probe_count);

// Symmetric max-min geodesic distance between a boundary sample and the
// marked boundary vertices. Throws if either set is empty.
double hausdorff_boundary(const std::vector<std::vector<double>>& gamma_sample,
                          const Graph& graph);

// Empirically calibrates K1 of the epsilon_n schedule: smallest K1 (up to a
// 10% safety factor) whose covering frequency over `trials` pilot draws
// reaches `target_freq`.
double calibrate_k1(const ManifoldSpec& spec, double a, double nu, double tau,
                    std::size_t pilot_n, std::size_t trials, double target_freq,
                    std::uint64_t seed, std::size_t probe_count = 1000,
                    const std::string& density_id = "uniform",
                    const std::vector<double>& density_params = {});

}  // namespace eikograph
