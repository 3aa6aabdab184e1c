#include "eikograph/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eikograph/rng.hpp"

namespace eikograph {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

double euclidean(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    s += d * d;
  }
  return std::sqrt(s);
}

double torus_wrap_delta(double dx, double period) {
  double d = std::fabs(dx);
  d = std::fmod(d, period);
  return std::min(d, period - d);
}

void require_on_manifold(const ManifoldSpec& spec, std::span<const double> x) {
  if (!spec.on_manifold(x))
    throw std::domain_error("point is not on the manifold (" + spec.kind_name() + ")");
}

}  // namespace

ManifoldSpec ManifoldSpec::sphere(int m_star, double radius) {
  if (m_star < 1 || !(radius > 0.0))
    throw std::invalid_argument("sphere: need m* >= 1 and radius > 0");
  ManifoldSpec s;
  s.kind = ManifoldKind::Sphere;
  s.intrinsic_dim = m_star;
  s.embedding_dim = m_star + 1;
  s.radius = radius;
  return s;
}

ManifoldSpec ManifoldSpec::flat_torus(std::vector<double> periods) {
  if (periods.empty())
    throw std::invalid_argument("torus: need at least one period");
  for (double p : periods)
    if (!(p > 0.0)) throw std::invalid_argument("torus: periods must be positive");
  ManifoldSpec s;
  s.kind = ManifoldKind::FlatTorus;
  s.intrinsic_dim = static_cast<int>(periods.size());
  s.embedding_dim = s.intrinsic_dim;
  s.periods = std::move(periods);
  return s;
}

ManifoldSpec ManifoldSpec::box(std::vector<double> lower, std::vector<double> upper) {
  if (lower.empty() || lower.size() != upper.size())
    throw std::invalid_argument("box: corner dimensions must match and be nonempty");
  for (std::size_t k = 0; k < lower.size(); ++k)
    if (!(upper[k] > lower[k]))
      throw std::invalid_argument("box: extents must be strictly positive");
  ManifoldSpec s;
  s.kind = ManifoldKind::Box;
  s.intrinsic_dim = static_cast<int>(lower.size());
  s.embedding_dim = s.intrinsic_dim;
  s.lower = std::move(lower);
  s.upper = std::move(upper);
  return s;
}

double ManifoldSpec::diameter() const {
  switch (kind) {
    case ManifoldKind::Sphere:
      return kPi * radius;
    case ManifoldKind::FlatTorus: {
      double s = 0.0;
      for (double p : periods) s += 0.25 * p * p;
      return std::sqrt(s);
    }
    case ManifoldKind::Box: {
      double s = 0.0;
      for (std::size_t k = 0; k < lower.size(); ++k) {
        const double e = upper[k] - lower[k];
        s += e * e;
      }
      return std::sqrt(s);
    }
  }
  return 0.0;
}

bool ManifoldSpec::on_manifold(std::span<const double> x, double tol) const {
  if (static_cast<int>(x.size()) != embedding_dim) return false;
  switch (kind) {
    case ManifoldKind::Sphere:
      return std::fabs(std::sqrt(dot(x, x)) - radius) < tol * std::max(1.0, radius);
    case ManifoldKind::FlatTorus:
      for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k] < -tol || x[k] >= periods[k] + tol) return false;
      return true;
    case ManifoldKind::Box:
      for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k] < lower[k] - tol || x[k] > upper[k] + tol) return false;
      return true;
  }
  return false;
}

std::string ManifoldSpec::kind_name() const {
  switch (kind) {
    case ManifoldKind::Sphere: return "sphere";
    case ManifoldKind::FlatTorus: return "flat-torus";
    case ManifoldKind::Box: return "euclidean-box";
  }
  return "?";
}

BoundarySpec BoundarySpec::point_set(std::vector<std::vector<double>> pts) {
  if (pts.empty()) throw std::invalid_argument("boundary: empty point set");
  BoundarySpec g;
  g.kind = Kind::PointSet;
  g.points = std::move(pts);
  return g;
}

BoundarySpec BoundarySpec::cap(std::vector<double> center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("boundary cap: radius must be > 0");
  BoundarySpec g;
  g.kind = Kind::Cap;
  g.cap_center = std::move(center);
  g.cap_radius = radius;
  return g;
}

BoundarySpec BoundarySpec::sublevel(std::string function, int axis, double threshold) {
  BoundarySpec g;
  g.kind = Kind::Sublevel;
  g.level_function = std::move(function);
  g.level_axis = axis;
  g.level_threshold = threshold;
  return g;
}

PointCloud sample_points(const ManifoldSpec& spec, std::size_t n,
                         const std::string& density_id, std::uint64_t seed,
                         const std::vector<double>& density_params) {
  if (n < 1) throw std::invalid_argument("sample_points: n must be >= 1");
  const bool uniform = density_id == "uniform";
  double amp = 0.0, sigma = 1.0;
  if (!uniform) {
    if (density_id != "radial-bump")
      throw std::invalid_argument("unknown density: " + density_id);
    if (density_params.size() != 2)
      throw std::invalid_argument("radial-bump density needs {amplitude, sigma}");
    amp = density_params[0];
    sigma = density_params[1];
    if (!(amp > -1.0))
      throw std::invalid_argument("radial-bump: amplitude <= -1 makes inf rho = 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("radial-bump: sigma must be > 0");
  }

  PointCloud cloud;
  cloud.spec = spec;
  cloud.seed = seed;
  cloud.density_id = density_id;
  cloud.density_params = density_params;
  cloud.n = n;
  cloud.dim = spec.embedding_dim;
  cloud.coords.resize(n * static_cast<std::size_t>(spec.embedding_dim));

  // Bump anchor: the last-axis pole for the sphere, the domain center otherwise.
  std::vector<double> anchor(spec.embedding_dim, 0.0);
  if (spec.kind == ManifoldKind::Sphere) {
    anchor.back() = spec.radius;
  } else if (spec.kind == ManifoldKind::FlatTorus) {
    for (int k = 0; k < spec.embedding_dim; ++k) anchor[k] = 0.5 * spec.periods[k];
  } else {
    for (int k = 0; k < spec.embedding_dim; ++k)
      anchor[k] = 0.5 * (spec.lower[k] + spec.upper[k]);
  }
  const double rho_max = 1.0 + std::max(amp, 0.0);

  Rng rng = Rng(seed).stream(0x5A3);
  std::vector<double> candidate(spec.embedding_dim);
  std::size_t accepted = 0, proposed = 0;
  while (accepted < n) {
    ++proposed;
    switch (spec.kind) {
      case ManifoldKind::Sphere: {
        double norm2 = 0.0;
        do {
          norm2 = 0.0;
          for (int k = 0; k < spec.embedding_dim; ++k) {
            candidate[k] = rng.gaussian();
            norm2 += candidate[k] * candidate[k];
          }
        } while (norm2 == 0.0);
        const double scale = spec.radius / std::sqrt(norm2);
        for (int k = 0; k < spec.embedding_dim; ++k) candidate[k] *= scale;
        break;
      }
      case ManifoldKind::FlatTorus:
        for (int k = 0; k < spec.embedding_dim; ++k)
          candidate[k] = rng.uniform(0.0, spec.periods[k]);
        break;
      case ManifoldKind::Box:
        for (int k = 0; k < spec.embedding_dim; ++k)
          candidate[k] = rng.uniform(spec.lower[k], spec.upper[k]);
        break;
    }
    if (!uniform) {
      const double d = geodesic_distance(spec, candidate, anchor);
      const double rho = 1.0 + amp * std::exp(-d * d / (2.0 * sigma * sigma));
      if (rng.uniform() * rho_max > rho) continue;
    }
    std::copy(candidate.begin(), candidate.end(),
              cloud.coords.begin() + accepted * static_cast<std::size_t>(cloud.dim));
    ++accepted;
  }
  cloud.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(proposed);
  return cloud;
}

double geodesic_distance(const ManifoldSpec& spec, std::span<const double> x,
                         std::span<const double> y) {
  require_on_manifold(spec, x);
  require_on_manifold(spec, y);
  switch (spec.kind) {
    case ManifoldKind::Sphere: {
      // acos is ill-conditioned at coincident points; make d(x,x) exact.
      if (std::equal(x.begin(), x.end(), y.begin())) return 0.0;
      const double c = std::clamp(dot(x, y) / (spec.radius * spec.radius), -1.0, 1.0);
      return spec.radius * std::acos(c);
    }
    case ManifoldKind::FlatTorus: {
      double s = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = torus_wrap_delta(x[k] - y[k], spec.periods[k]);
        s += d * d;
      }
      return std::sqrt(s);
    }
    case ManifoldKind::Box:
      return euclidean(x, y);
  }
  return 0.0;
}

double extrinsic_distance(const ManifoldSpec& spec, std::span<const double> x,
                          std::span<const double> y) {
  if (spec.kind == ManifoldKind::Sphere) {
    require_on_manifold(spec, x);
    require_on_manifold(spec, y);
    return euclidean(x, y);
  }
  return geodesic_distance(spec, x, y);
}

DtildeErrorBound local_dtilde_error(const ManifoldSpec& spec, double epsilon,
                                    double r_eta) {
  if (!(epsilon > 0.0) || epsilon > 1.0)
    throw std::invalid_argument("local_dtilde_error: epsilon must be in (0, 1]");
  DtildeErrorBound b;
  b.xi = 2.0;
  if (spec.kind == ManifoldKind::Sphere) {
    // arc - chord = d - 2R sin(d/2R) <= d^3 / (24 R^2), applied at the
    // support scale d <= 1.1 * eps * r_eta.
    const double c = 1.1 * r_eta;
    b.c_m = c * c * c / (24.0 * spec.radius * spec.radius);
    b.bound_at_epsilon = b.c_m * epsilon * epsilon * epsilon;
  }
  return b;
}

double distance_to_boundary(const ManifoldSpec& spec, const BoundarySpec& gamma,
                            std::span<const double> x) {
  require_on_manifold(spec, x);
  switch (gamma.kind) {
    case BoundarySpec::Kind::PointSet: {
      if (gamma.points.empty()) throw std::invalid_argument("empty boundary");
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : gamma.points)
        best = std::min(best, geodesic_distance(spec, x, p));
      return best;
    }
    case BoundarySpec::Kind::Cap: {
      // Distance to the geodesic circle around the center: |d(x, c) - r|.
      // Exact on the sphere and the flat torus for radii below the
      // injectivity scale.
      const double d = geodesic_distance(spec, x, gamma.cap_center);
      return std::fabs(d - gamma.cap_radius);
    }
    case BoundarySpec::Kind::Sublevel:
      throw std::invalid_argument(
          "sublevel boundary must be materialized before distance queries");
  }
  return 0.0;
}

double extrinsic_distance_to_boundary(const ManifoldSpec& spec,
                                      const BoundarySpec& gamma,
                                      std::span<const double> x) {
  const double d = distance_to_boundary(spec, gamma, x);
  if (spec.kind == ManifoldKind::Sphere) {
    // Chord is increasing in arc length, so the geodesic minimizer is also
    // the chord minimizer.
    return 2.0 * spec.radius * std::sin(d / (2.0 * spec.radius));
  }
  return d;
}

namespace {

// Closed-form parametrizations of the coordinate level sets we ship.
std::vector<std::vector<double>> sample_level_set(const ManifoldSpec& spec,
                                                  const BoundarySpec& gamma,
                                                  std::size_t count,
                                                  double* spacing_out) {
  if (gamma.level_function != "coordinate")
    throw std::invalid_argument("unknown sublevel function: " + gamma.level_function);
  const int axis = gamma.level_axis;
  const double c = gamma.level_threshold;
  if (axis < 0 || axis >= spec.embedding_dim)
    throw std::invalid_argument("sublevel: axis out of range");
  std::vector<std::vector<double>> pts;
  pts.reserve(count);
  switch (spec.kind) {
    case ManifoldKind::Sphere: {
      if (spec.intrinsic_dim != 2)
        throw std::invalid_argument("sublevel boundary shipped for S^2 only");
      const double R = spec.radius;
      if (std::fabs(c) >= R)
        throw std::invalid_argument("sublevel: empty level set on the sphere");
      const double rho = std::sqrt(R * R - c * c);  // circle radius in the plane
      const int i0 = (axis + 1) % 3, i1 = (axis + 2) % 3;
      for (std::size_t i = 0; i < count; ++i) {
        const double phi = 2.0 * kPi * static_cast<double>(i) / count;
        std::vector<double> p(3, 0.0);
        p[axis] = c;
        p[i0] = rho * std::cos(phi);
        p[i1] = rho * std::sin(phi);
        pts.push_back(std::move(p));
      }
      if (spacing_out) *spacing_out = 2.0 * kPi * rho / count;
      break;
    }
    case ManifoldKind::FlatTorus: {
      if (spec.intrinsic_dim != 2)
        throw std::invalid_argument("sublevel boundary shipped for 2d torus only");
      const int other = 1 - axis;
      const double len = spec.periods[other];
      for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> p(2, 0.0);
        p[axis] = c;
        p[other] = len * static_cast<double>(i) / count;
        pts.push_back(std::move(p));
      }
      if (spacing_out) *spacing_out = len / count;
      break;
    }
    case ManifoldKind::Box: {
      if (spec.intrinsic_dim != 2)
        throw std::invalid_argument("sublevel boundary shipped for 2d boxes only");
      const int other = 1 - axis;
      const double len = spec.upper[other] - spec.lower[other];
      for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> p(2, 0.0);
        p[axis] = c;
        p[other] = spec.lower[other] +
                   len * static_cast<double>(i) / (count > 1 ? count - 1 : 1);
        pts.push_back(std::move(p));
      }
      if (spacing_out) *spacing_out = len / (count > 1 ? count - 1 : 1);
      break;
    }
  }
  return pts;
}

}  // namespace

BoundarySpec materialize_boundary(const ManifoldSpec& spec,
                                  const BoundarySpec& gamma, std::size_t count) {
  if (gamma.kind != BoundarySpec::Kind::Sublevel) return gamma;
  if (count < 2) throw std::invalid_argument("materialize_boundary: count too small");
  double spacing = 0.0;
  BoundarySpec out = BoundarySpec::point_set(
      sample_level_set(spec, gamma, count, &spacing));
  out.level_function = gamma.level_function;
  out.level_axis = gamma.level_axis;
  out.level_threshold = gamma.level_threshold;
  out.level_sample_count = count;
  out.level_sample_spacing = spacing;
  return out;
}

std::vector<std::vector<double>> boundary_sample(const ManifoldSpec& spec,
                                                 const BoundarySpec& gamma,
                                                 std::size_t count) {
  switch (gamma.kind) {
    case BoundarySpec::Kind::PointSet:
      return gamma.points;
    case BoundarySpec::Kind::Cap: {
      std::vector<std::vector<double>> pts;
      pts.reserve(count);
      if (spec.kind == ManifoldKind::Sphere) {
        if (spec.intrinsic_dim != 2)
          throw std::invalid_argument("cap boundary sampling shipped for S^2 only");
        const double R = spec.radius;
        std::span<const double> c(gamma.cap_center);
        require_on_manifold(spec, c);
        // Orthonormal frame {u, v} perpendicular to the center direction.
        std::vector<double> ch(3), u(3), v(3);
        for (int k = 0; k < 3; ++k) ch[k] = c[k] / R;
        const int pivot =
            std::fabs(ch[0]) < 0.9 ? 0 : (std::fabs(ch[1]) < 0.9 ? 1 : 2);
        std::vector<double> e(3, 0.0);
        e[pivot] = 1.0;
        const double proj = e[0] * ch[0] + e[1] * ch[1] + e[2] * ch[2];
        double nu = 0.0;
        for (int k = 0; k < 3; ++k) {
          u[k] = e[k] - proj * ch[k];
          nu += u[k] * u[k];
        }
        nu = std::sqrt(nu);
        for (int k = 0; k < 3; ++k) u[k] /= nu;
        v[0] = ch[1] * u[2] - ch[2] * u[1];
        v[1] = ch[2] * u[0] - ch[0] * u[2];
        v[2] = ch[0] * u[1] - ch[1] * u[0];
        const double theta = gamma.cap_radius / R;
        for (std::size_t i = 0; i < count; ++i) {
          const double phi = 2.0 * kPi * static_cast<double>(i) / count;
          std::vector<double> p(3);
          for (int k = 0; k < 3; ++k)
            p[k] = R * (std::cos(theta) * ch[k] +
                        std::sin(theta) * (std::cos(phi) * u[k] + std::sin(phi) * v[k]));
          pts.push_back(std::move(p));
        }
      } else if (spec.kind == ManifoldKind::FlatTorus) {
        if (spec.intrinsic_dim != 2)
          throw std::invalid_argument("cap boundary sampling shipped for T^2 only");
        for (std::size_t i = 0; i < count; ++i) {
          const double phi = 2.0 * kPi * static_cast<double>(i) / count;
          std::vector<double> p(2);
          for (int k = 0; k < 2; ++k) {
            const double raw = gamma.cap_center[k] +
                               gamma.cap_radius * (k == 0 ? std::cos(phi) : std::sin(phi));
            p[k] = raw - spec.periods[k] * std::floor(raw / spec.periods[k]);
          }
          pts.push_back(std::move(p));
        }
      } else {
        throw std::invalid_argument("cap boundary needs a sphere or a torus");
      }
      return pts;
    }
    case BoundarySpec::Kind::Sublevel:
      return sample_level_set(spec, gamma, count, nullptr);
  }
  return {};
}

std::vector<std::vector<double>> probe_points(const ManifoldSpec& spec,
                                              std::size_t count) {
  std::vector<std::vector<double>> pts;
  pts.reserve(count);
  switch (spec.kind) {
    case ManifoldKind::Sphere: {
      if (spec.intrinsic_dim != 2)
        throw std::invalid_argument("probe lattice shipped for S^2 only");
      const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
      for (std::size_t i = 0; i < count; ++i) {
        const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden_angle * static_cast<double>(i);
        pts.push_back({spec.radius * r * std::cos(phi),
                       spec.radius * r * std::sin(phi), spec.radius * z});
      }
      break;
    }
    case ManifoldKind::FlatTorus:
    case ManifoldKind::Box: {
      // Kronecker lattice with generalized golden-ratio increments.
      const int d = spec.intrinsic_dim;
      double phi = 2.0;
      for (int it = 0; it < 32; ++it) phi = std::pow(1.0 + phi, 1.0 / (d + 1));
      std::vector<double> alpha(d);
      for (int k = 0; k < d; ++k) alpha[k] = std::pow(1.0 / phi, k + 1);
      for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> p(d);
        for (int k = 0; k < d; ++k) {
          const double frac =
              std::fmod(0.5 + alpha[k] * static_cast<double>(i + 1), 1.0);
          if (spec.kind == ManifoldKind::FlatTorus)
            p[k] = frac * spec.periods[k];
          else
            p[k] = spec.lower[k] + frac * (spec.upper[k] - spec.lower[k]);
        }
        pts.push_back(std::move(p));
      }
      break;
    }
  }
  return pts;
}

}  // namespace eikograph
