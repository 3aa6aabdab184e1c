#pragma once

#include <string>

#include "eikograph/graph.hpp"
#include "eikograph/solver.hpp"

namespace eikograph {

// PointCloud persistence: CSV with header x0..x{m-1} plus a JSON sidecar
// carrying spec, seed and density.
void save_cloud(const PointCloud& cloud, const std::string& csv_path,
                const std::string& sidecar_path, const std::string& config_hash);

// Graph persistence: edges.csv (i, j, dtilde, weight; each unordered pair
// once, sorted by (i, j)) and vertices.csv (index, boundary_flag, coords...).
void save_graph(const Graph& graph, const std::string& edges_path,
                const std::string& vertices_path, const std::string& config_hash);

// Trajectory persistence: solution.csv with columns (t, vertex_index, value).
void save_solution(const Trajectory& traj, const std::string& path,
                   const std::string& config_hash);

}  // namespace eikograph
