#include "eikograph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "eikograph/rng.hpp"

namespace eikograph {

namespace {

// Integer cell coordinates packed into a hashable key. Grids here are far
// below 2^20 cells per axis.
std::int64_t pack_cell(const std::vector<int>& c) {
  std::int64_t key = 0;
  for (int v : c) key = key * (1 << 21) + (v + (1 << 20));
  return key;
}

struct CellGrid {
  const ManifoldSpec* spec = nullptr;
  double cell = 0.0;
  std::vector<int> cells_per_axis;  // torus only (wrapped indexing)
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> bins;

  std::vector<int> cell_of(std::span<const double> x) const {
    std::vector<int> c(x.size());
    if (spec->kind == ManifoldKind::FlatTorus) {
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double width = spec->periods[k] / cells_per_axis[k];
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

CellGrid build_grid(const PointCloud& cloud, double radius) {
  CellGrid grid;
  grid.spec = &cloud.spec;
  grid.cell = radius;
  if (cloud.spec.kind == ManifoldKind::FlatTorus) {
    grid.cells_per_axis.resize(cloud.dim);
    for (int k = 0; k < cloud.dim; ++k)
      grid.cells_per_axis[k] =
          std::max(1, static_cast<int>(std::floor(cloud.spec.periods[k] / radius)));
  }
  for (std::uint32_t i = 0; i < cloud.n; ++i)
    grid.bins[pack_cell(grid.cell_of(cloud.point(i)))].push_back(i);
  return grid;
}

// Visits every bin whose cell is within one step of x's cell (with wrapping
// on the torus), deduplicated when the grid is narrower than three cells.
template <typename Fn>
void for_neighbor_bins(const CellGrid& grid, std::span<const double> x, Fn&& fn) {
  const std::vector<int> center = grid.cell_of(x);
  const int dim = static_cast<int>(center.size());
  std::vector<int> offset(dim, -1), c(dim);
  std::vector<std::int64_t> seen;
  while (true) {
    for (int k = 0; k < dim; ++k) {
      c[k] = center[k] + offset[k];
      if (grid.spec->kind == ManifoldKind::FlatTorus) {
        const int m = grid.cells_per_axis[k];
        c[k] = ((c[k] % m) + m) % m;
      }
    }
    const std::int64_t key = pack_cell(c);
    if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
      seen.push_back(key);
      auto it = grid.bins.find(key);
      if (it != grid.bins.end()) fn(it->second);
    }
    int k = 0;
    for (; k < dim; ++k) {
      if (++offset[k] <= 1) break;
      offset[k] = -1;
    }
    if (k == dim) break;
  }
}

}  // namespace

Graph build_graph(const PointCloud& cloud, const Kernel& kernel,
                  const KernelConstants& constants, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("build_graph: epsilon must be > 0");
  if (cloud.n == 0) throw std::invalid_argument("build_graph: empty cloud");
  Graph g;
  g.cloud = cloud;
  g.kernel = kernel;
  g.constants = constants;
  g.epsilon = epsilon;
  g.neighbors.assign(cloud.n, {});
  g.boundary_mask.assign(cloud.n, 0);

  const double radius = epsilon * kernel.r_eta;
  const CellGrid grid = build_grid(cloud, radius);

  for (std::uint32_t i = 0; i < cloud.n; ++i) {
    const auto xi = cloud.point(i);
    for_neighbor_bins(grid, xi, [&](const std::vector<std::uint32_t>& bin) {
      for (std::uint32_t j : bin) {
        if (j <= i) continue;
        const double d = extrinsic_distance(cloud.spec, xi, cloud.point(j));
        if (d > radius) continue;
        const double w = weight(constants, kernel, epsilon, d);
        g.neighbors[i].push_back({j, d, w});
        g.neighbors[j].push_back({i, d, w});
      }
    });
  }
  for (auto& adj : g.neighbors)
    std::sort(adj.begin(), adj.end(),
              [](const GraphEdge& a, const GraphEdge& b) { return a.target < b.target; });
  return g;
}

std::vector<char> mark_boundary(const PointCloud& cloud, const BoundarySpec& gamma,
                                double a, double epsilon, double nu) {
  if (!(epsilon > 0.0) || !(nu > 0.0))
    throw std::invalid_argument("mark_boundary: epsilon and nu must be > 0");
  const double threshold = a * std::pow(epsilon, 1.0 + nu) / 2.0;
  std::vector<char> mask(cloud.n, 0);
  for (std::size_t i = 0; i < cloud.n; ++i)
    mask[i] = distance_to_boundary(cloud.spec, gamma, cloud.point(i)) <= threshold;
  return mask;
}

EpsilonSchedule epsilon_schedule(std::size_t n, int m_star, double nu, double tau,
                                 double k1) {
  if (n < 3) throw std::invalid_argument("epsilon_schedule: n must be >= 3");
  if (m_star < 1 || !(nu > 0.0) || !(tau > 0.0) || !(k1 > 0.0))
    throw std::invalid_argument("epsilon_schedule: scalars must be positive");
  EpsilonSchedule s;
  s.n = n;
  s.m_star = m_star;
  s.nu = nu;
  s.tau = tau;
  s.k1 = k1;
  const double inner = k1 * std::pow(1.0 + tau, 1.0 / m_star) *
                       std::pow(std::log(static_cast<double>(n)) / static_cast<double>(n),
                                1.0 / m_star);
  s.epsilon_n = std::pow(inner, 1.0 / (1.0 + nu));
  return s;
}

CoveringResult covering_check(const PointCloud& cloud, double a, double epsilon,
                              double nu, std::size_t probe_count) {
  if (probe_count < 1000)
    throw std::invalid_argument("covering_check: probe_count must be >= 1000");
  CoveringResult res;
  res.threshold = a * std::pow(epsilon, 1.0 + nu) / 8.0;
  const auto probes = probe_points(cloud.spec, probe_count);
  double worst = 0.0;
  if (cloud.spec.kind == ManifoldKind::Sphere) {
    // Minimizing the arc maximizes the inner product; one acos per probe.
    const double r2 = cloud.spec.radius * cloud.spec.radius;
    for (const auto& p : probes) {
      double best = -r2;
      for (std::size_t i = 0; i < cloud.n; ++i) {
        const auto x = cloud.point(i);
        double d = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) d += x[k] * p[k];
        best = std::max(best, d);
      }
      const double gap = cloud.spec.radius * std::acos(std::clamp(best / r2, -1.0, 1.0));
      worst = std::max(worst, gap);
    }
  } else {
    for (const auto& p : probes) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < cloud.n; ++i)
        best = std::min(best, geodesic_distance(cloud.spec, cloud.point(i), p));
      worst = std::max(worst, best);
    }
  }
  res.worst_gap = worst;
  res.holds = worst <= res.threshold;
  return res;
}

double hausdorff_boundary(const std::vector<std::vector<double>>& gamma_sample,
                          const Graph& graph) {
  if (gamma_sample.empty())
    throw std::invalid_argument("hausdorff_boundary: empty boundary sample");
  std::vector<std::size_t> marked;
  for (std::size_t i = 0; i < graph.n(); ++i)
    if (graph.boundary_mask[i]) marked.push_back(i);
  if (marked.empty())
    throw std::invalid_argument("hausdorff_boundary: no marked boundary vertices");
  const auto& spec = graph.cloud.spec;
  double h = 0.0;
  for (const auto& gp : gamma_sample) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : marked)
      best = std::min(best, geodesic_distance(spec, gp, graph.cloud.point(i)));
    h = std::max(h, best);
  }
  for (std::size_t i : marked) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& gp : gamma_sample)
      best = std::min(best, geodesic_distance(spec, gp, graph.cloud.point(i)));
    h = std::max(h, best);
  }
  return h;
}

namespace {

double covering_frequency(const ManifoldSpec& spec, double a, double nu, double tau,
                          double k1, std::size_t pilot_n, std::size_t trials,
                          std::size_t probe_count, std::uint64_t seed,
                          const std::string& density_id,
                          const std::vector<double>& density_params) {
  const double eps = epsilon_schedule(pilot_n, spec.intrinsic_dim, nu, tau, k1).epsilon_n;
  std::size_t hits = 0;
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto cloud = sample_points(spec, pilot_n, density_id,
                                     rng.stream(t).next_u64(), density_params);
    if (covering_check(cloud, a, eps, nu, probe_count).holds) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace

double calibrate_k1(const ManifoldSpec& spec, double a, double nu, double tau,
                    std::size_t pilot_n, std::size_t trials, double target_freq,
                    std::uint64_t seed, std::size_t probe_count,
                    const std::string& density_id,
                    const std::vector<double>& density_params) {
  auto freq = [&](double k1) {
    return covering_frequency(spec, a, nu, tau, k1, pilot_n, trials, probe_count,
                              seed, density_id, density_params);
  };
  double lo = 0.05, hi = 0.4;
  while (freq(hi) < target_freq) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e4)
      throw std::runtime_error("calibrate_k1: covering target unreachable");
  }
  for (int it = 0; it < 12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (freq(mid) >= target_freq)
      hi = mid;
    else
      lo = mid;
    if (hi - lo < 0.01 * hi) break;
  }
  // 10% headroom so the frozen value keeps the frequency above target at
  // nearby n under fresh draws.
  return hi * 1.1;
}

}  // namespace eikograph
