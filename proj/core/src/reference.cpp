#include "eikograph/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace eikograph {

double local_solution_uniform(const ManifoldSpec& spec, const BoundarySpec& gamma,
                              std::span<const double> x, double t) {
  if (t < 0.0) throw std::invalid_argument("local_solution_uniform: t must be >= 0");
  return std::min(t, distance_to_boundary(spec, gamma, x));
}

namespace {

// Fixed-cell spatial index for k-nearest-neighbor queries; cells are sized
// to the expected kNN radius and queries expand shells until the kth best
// distance is certified.
struct KnnIndex {
  const PointCloud* cloud = nullptr;
  double cell = 0.0;
  std::vector<int> cells_per_axis;  // torus wrapping
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> bins;

  static std::int64_t pack(const std::vector<int>& c) {
    std::int64_t key = 0;
    for (int v : c) key = key * (1 << 21) + (v + (1 << 20));
    return key;
  }

  std::vector<int> cell_of(std::span<const double> x) const {
    std::vector<int> c(x.size());
    const auto& spec = cloud->spec;
    if (spec.kind == ManifoldKind::FlatTorus) {
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double width = spec.periods[k] / cells_per_axis[k];
        int idx = static_cast<int>(std::floor(x[k] / width));
        idx = ((idx % cells_per_axis[k]) + cells_per_axis[k]) % cells_per_axis[k];
        c[k] = idx;
      }
    } else {
      for (std::size_t k = 0; k < x.size(); ++k)
        c[k] = static_cast<int>(std::floor(x[k] / cell));
    }
    return c;
  }
};

KnnIndex build_index(const PointCloud& cloud, int k) {
  KnnIndex idx;
  idx.cloud = &cloud;
  // Expected kNN radius from the uniform-density volume heuristic.
  const auto& spec = cloud.spec;
  double volume = 1.0;
  if (spec.kind == ManifoldKind::Sphere) {
    volume = 4.0 * 3.141592653589793 * spec.radius * spec.radius;
  } else if (spec.kind == ManifoldKind::FlatTorus) {
    for (double p : spec.periods) volume *= p;
  } else {
    for (std::size_t a = 0; a < spec.lower.size(); ++a)
      volume *= spec.upper[a] - spec.lower[a];
  }
  const double per_point = volume / static_cast<double>(cloud.n);
  idx.cell = 2.0 * std::pow(per_point * (k + 1),
                            1.0 / static_cast<double>(spec.intrinsic_dim));
  if (spec.kind == ManifoldKind::FlatTorus) {
    idx.cells_per_axis.resize(cloud.dim);
    for (int a = 0; a < cloud.dim; ++a)
      idx.cells_per_axis[a] =
          std::max(1, static_cast<int>(std::floor(spec.periods[a] / idx.cell)));
  }
  for (std::uint32_t i = 0; i < cloud.n; ++i)
    idx.bins[KnnIndex::pack(idx.cell_of(cloud.point(i)))].push_back(i);
  return idx;
}

// k nearest neighbors of vertex i by intrinsic distance (ties broken by
// index). Shell expansion is exact: it stops once the closest possible
// point in an unvisited shell cannot beat the current kth distance.
std::vector<std::pair<double, std::uint32_t>> knn_of(const KnnIndex& idx,
                                                     std::uint32_t i, int k) {
  const PointCloud& cloud = *idx.cloud;
  const auto& spec = cloud.spec;
  const auto xi = cloud.point(i);
  const std::vector<int> center = idx.cell_of(xi);
  const int dim = static_cast<int>(center.size());

  std::vector<std::pair<double, std::uint32_t>> best;  // max at back
  auto consider = [&](std::uint32_t j) {
    if (j == i) return;
    const double d = geodesic_distance(spec, xi, cloud.point(j));
    if (best.size() < static_cast<std::size_t>(k) || d < best.back().first) {
      best.emplace_back(d, j);
      std::sort(best.begin(), best.end());
      if (best.size() > static_cast<std::size_t>(k)) best.pop_back();
    }
  };

  int max_shell;
  if (spec.kind == ManifoldKind::FlatTorus) {
    max_shell = 1;
    for (int m : idx.cells_per_axis) max_shell = std::max(max_shell, m);
  } else {
    max_shell = static_cast<int>(std::ceil(spec.diameter() / idx.cell)) + 2;
  }

  for (int shell = 0; shell <= max_shell; ++shell) {
    // Certification: any point in an unvisited shell is at least
    // (shell - 1) * cell away in the embedding, which lower-bounds d_M on
    // our manifolds (chord <= arc on the sphere, equality elsewhere).
    if (best.size() == static_cast<std::size_t>(k) && shell > 1 &&
        static_cast<double>(shell - 1) * idx.cell > best.back().first)
      break;
    std::vector<int> off(dim, -shell), c(dim);
    std::vector<std::int64_t> seen;
    while (true) {
      int maxabs = 0;
      for (int d2 = 0; d2 < dim; ++d2) maxabs = std::max(maxabs, std::abs(off[d2]));
      if (maxabs == shell) {
        for (int d2 = 0; d2 < dim; ++d2) {
          c[d2] = center[d2] + off[d2];
          if (spec.kind == ManifoldKind::FlatTorus) {
            const int m = idx.cells_per_axis[d2];
            c[d2] = ((c[d2] % m) + m) % m;
          }
        }
        const std::int64_t key = KnnIndex::pack(c);
        if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
          seen.push_back(key);
          auto it = idx.bins.find(key);
          if (it != idx.bins.end())
            for (std::uint32_t j : it->second) consider(j);
        }
      }
      int d2 = 0;
      for (; d2 < dim; ++d2) {
        if (++off[d2] <= shell) break;
        off[d2] = -shell;
      }
      if (d2 == dim) break;
    }
  }
  return best;
}

}  // namespace

OracleField dijkstra_weighted_distance(const PointCloud& dense_cloud,
                                       std::span<const double> potential,
                                       const std::vector<std::size_t>& gamma_indices,
                                       int k, const std::vector<double>& seed_offsets) {
  if (gamma_indices.empty())
    throw std::invalid_argument("dijkstra: need at least one seed");
  if (k < 1) throw std::invalid_argument("dijkstra: k must be >= 1");
  for (double p : potential)
    if (!(p > 0.0))
      throw std::invalid_argument("dijkstra: potential must be positive on the interior");
  if (!seed_offsets.empty() && seed_offsets.size() != gamma_indices.size())
    throw std::invalid_argument("dijkstra: seed offset count mismatch");

  const std::size_t n = dense_cloud.n;
  const KnnIndex index = build_index(dense_cloud, k);

  // Symmetrized kNN adjacency.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(n);
  double median_edge = 0.0;
  {
    std::vector<double> kth;
    kth.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      const auto nn = knn_of(index, i, k);
      if (!nn.empty()) kth.push_back(nn.back().first);
      for (const auto& [d, j] : nn) {
        const double cost = d * 0.5 * (potential[i] + potential[j]);
        adj[i].emplace_back(j, cost);
        adj[j].emplace_back(i, cost);
      }
    }
    std::sort(kth.begin(), kth.end());
    if (!kth.empty()) median_edge = kth[kth.size() / 2];
  }

  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (std::size_t s = 0; s < gamma_indices.size(); ++s) {
    const auto v = static_cast<std::uint32_t>(gamma_indices[s]);
    const double d0 = seed_offsets.empty() ? 0.0 : seed_offsets[s];
    if (d0 < dist[v]) {
      dist[v] = d0;
      heap.emplace(d0, v);
    }
  }
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, cost] : adj[u]) {
      const double nd = d + cost;
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  for (double d : dist)
    if (!std::isfinite(d))
      throw std::runtime_error("dijkstra: cloud is disconnected at this k");

  OracleField field;
  field.values = std::move(dist);
  field.provenance = "dijkstra(k=" + std::to_string(k) + ")";
  field.resolution_error = median_edge;
  return field;
}

std::vector<std::size_t> nearest_nodes(const PointCloud& dense_cloud,
                                       const PointCloud& queries) {
  const KnnIndex index = build_index(dense_cloud, 1);
  std::vector<std::size_t> out(queries.n);
  // Reuse the shell search by inserting each query as a phantom point: the
  // index carries the dense cloud only, so the 1-NN of the query position is
  // found by scanning the shells around its cell.
  for (std::size_t q = 0; q < queries.n; ++q) {
    const auto xq = queries.point(q);
    const std::vector<int> center = index.cell_of(xq);
    const int dim = static_cast<int>(center.size());
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_idx = 0;
    int max_shell;
    if (dense_cloud.spec.kind == ManifoldKind::FlatTorus) {
      max_shell = 1;
      for (int m : index.cells_per_axis) max_shell = std::max(max_shell, m);
    } else {
      max_shell =
          static_cast<int>(std::ceil(dense_cloud.spec.diameter() / index.cell)) + 2;
    }
    for (int shell = 0; shell <= max_shell; ++shell) {
      if (std::isfinite(best) && shell > 1 &&
          static_cast<double>(shell - 1) * index.cell > best)
        break;
      std::vector<int> off(dim, -shell), c(dim);
      std::vector<std::int64_t> seen;
      while (true) {
        int maxabs = 0;
        for (int d2 = 0; d2 < dim; ++d2) maxabs = std::max(maxabs, std::abs(off[d2]));
        if (maxabs == shell) {
          for (int d2 = 0; d2 < dim; ++d2) {
            c[d2] = center[d2] + off[d2];
            if (dense_cloud.spec.kind == ManifoldKind::FlatTorus) {
              const int m = index.cells_per_axis[d2];
              c[d2] = ((c[d2] % m) + m) % m;
            }
          }
          const std::int64_t key = KnnIndex::pack(c);
          if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
            seen.push_back(key);
            auto it = index.bins.find(key);
            if (it != index.bins.end()) {
              for (std::uint32_t j : it->second) {
                const double d =
                    geodesic_distance(dense_cloud.spec, xq, dense_cloud.point(j));
                if (d < best) {
                  best = d;
                  best_idx = j;
                }
              }
            }
          }
        }
        int d2 = 0;
        for (; d2 < dim; ++d2) {
          if (++off[d2] <= shell) break;
          off[d2] = -shell;
        }
        if (d2 == dim) break;
      }
    }
    out[q] = best_idx;
  }
  return out;
}

OracleField steady_state_reference(const ManifoldSpec& spec,
                                   const BoundarySpec& gamma,
                                   const PointCloud& queries,
                                   const std::string& potential_id,
                                   const std::vector<double>& potential_params,
                                   double band_threshold, std::uint64_t seed,
                                   std::size_t density_factor, int k) {
  const auto dense =
      sample_points(spec, queries.n * density_factor, "uniform", seed);
  const auto potential = evaluate_potential(dense, potential_id, potential_params);

  std::vector<std::size_t> seeds;
  std::vector<double> offsets;
  for (std::size_t i = 0; i < dense.n; ++i) {
    const double d = distance_to_boundary(spec, gamma, dense.point(i));
    if (d <= band_threshold) {
      seeds.push_back(i);
      offsets.push_back(d * potential[i]);  // first-order cost to the set
    }
  }
  if (seeds.empty())
    throw std::runtime_error("steady_state_reference: no dense node near Gamma");

  const OracleField dense_field =
      dijkstra_weighted_distance(dense, potential, seeds, k, offsets);
  const auto mapping = nearest_nodes(dense, queries);
  OracleField out;
  out.values.resize(queries.n);
  for (std::size_t q = 0; q < queries.n; ++q)
    out.values[q] = dense_field.values[mapping[q]];
  out.provenance = dense_field.provenance + " x" + std::to_string(density_factor);
  out.resolution_error = dense_field.resolution_error;
  return out;
}

ErrorRecord sup_error(const Trajectory& traj,
                      const std::function<double(std::size_t, double)>& oracle) {
  ErrorRecord rec;
  double sup = 0.0;
  for (const auto& snap : traj.snapshots)
    for (std::size_t i = 0; i < snap.values.size(); ++i)
      sup = std::max(sup, std::fabs(snap.values[i] - oracle(i, snap.time)));
  rec.sup_error = sup;
  return rec;
}

}  // namespace eikograph
