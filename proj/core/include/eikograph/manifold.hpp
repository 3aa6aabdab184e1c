#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace eikograph {

enum class ManifoldKind { Sphere, FlatTorus, Box };

// Closed-form manifold descriptor. Sphere is embedded in R^(m*+1); the flat
// torus and the box coincide with their fundamental domains in R^(m*).
struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::Sphere;
  int intrinsic_dim = 2;  // m*
  int embedding_dim = 3;  // m
  double radius = 1.0;            // sphere only
  std::vector<double> periods;    // torus only
  std::vector<double> lower, upper;  // box only

  static ManifoldSpec sphere(int m_star = 2, double radius = 1.0);
  static ManifoldSpec flat_torus(std::vector<double> periods);
  static ManifoldSpec box(std::vector<double> lower, std::vector<double> upper);

  double diameter() const;
  bool on_manifold(std::span<const double> x, double tol = 1e-9) const;
  std::string kind_name() const;
};

struct BoundarySpec {
  enum class Kind { PointSet, Cap, Sublevel };
  Kind kind = Kind::PointSet;

  // point-set
  std::vector<std::vector<double>> points;
  // cap: geodesic circle of given radius around a center point
  std::vector<double> cap_center;
  double cap_radius = 0.0;
  // sublevel: level set {x : f(x) = threshold} of a named coordinate function
  std::string level_function = "coordinate";
  int level_axis = 0;
  double level_threshold = 0.0;
  std::size_t level_sample_count = 0;  // filled when materialized
  double level_sample_spacing = 0.0;

  static BoundarySpec point_set(std::vector<std::vector<double>> pts);
  static BoundarySpec cap(std::vector<double> center, double radius);
  static BoundarySpec sublevel(std::string function, int axis, double threshold);
};

struct PointCloud {
  ManifoldSpec spec;
  std::uint64_t seed = 0;
  std::string density_id = "uniform";
  std::vector<double> density_params;
  double acceptance_rate = 1.0;  // of rejection sampling, 1 for direct draws
  std::size_t n = 0;
  int dim = 0;
  std::vector<double> coords;  // n x dim, row major

  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
};

// Densities: "uniform", and "radial-bump" with params {amplitude, sigma}
// (density 1 + amplitude * exp(-d_M(x, anchor)^2 / (2 sigma^2)), amplitude
// > -1 so that inf rho > 0; drawn by rejection against uniform).
PointCloud sample_points(const ManifoldSpec& spec, std::size_t n,
                         const std::string& density_id, std::uint64_t seed,
                         const std::vector<double>& density_params = {});

double geodesic_distance(const ManifoldSpec& spec, std::span<const double> x,
                         std::span<const double> y);

// The computable metric dtilde: chord length on the sphere, identical to the
// geodesic distance on the torus and the box.
double extrinsic_distance(const ManifoldSpec& spec, std::span<const double> x,
                          std::span<const double> y);

struct DtildeErrorBound {
  double c_m = 0.0;   // |dtilde - d_M| <= c_m * eps^(1+xi) on support-scale pairs
  double xi = 2.0;
  double bound_at_epsilon = 0.0;  // c_m * eps^(1+xi)
};

// Support-local approximation error of dtilde vs d_M, for pairs with
// d_M <= 1.1 * eps * r_eta. Zero on torus/box where the metric is exact.
DtildeErrorBound local_dtilde_error(const ManifoldSpec& spec, double epsilon,
                                    double r_eta);

// Geodesic distance from x to the boundary set. Sublevel boundaries must be
// materialized into point sets first (see materialize_boundary).
double distance_to_boundary(const ManifoldSpec& spec, const BoundarySpec& gamma,
                            std::span<const double> x);

// dtilde-distance to the boundary set (chord transform on the sphere).
double extrinsic_distance_to_boundary(const ManifoldSpec& spec,
                                      const BoundarySpec& gamma,
                                      std::span<const double> x);

// Converts a sublevel boundary into a point-set boundary by sampling the
// level set at `count` points; records the sample spacing. Point-set and cap
// boundaries pass through unchanged.
BoundarySpec materialize_boundary(const ManifoldSpec& spec,
                                  const BoundarySpec& gamma, std::size_t count);

// Dense sample of the boundary set itself, used for Hausdorff estimates.
std::vector<std::vector<double>> boundary_sample(const ManifoldSpec& spec,
                                                 const BoundarySpec& gamma,
                                                 std::size_t count);

// Low-discrepancy probe points: Fibonacci lattice on the 2-sphere, Kronecker
// lattice on torus/box.
std::vector<std::vector<double>> probe_points(const ManifoldSpec& spec,
                                              std::size_t count);

}  // namespace eikograph
