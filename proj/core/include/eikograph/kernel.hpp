#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace eikograph {

enum class KernelProfile { Triangular, Tent, TruncatedExponential };

// Radial kernel profile with compact support [0, r_eta]. Evaluation is
// exact-zero outside the support so that neighbor pruning and the operator
// agree bit-for-bit.
struct Kernel {
  KernelProfile profile = KernelProfile::Triangular;
  std::vector<double> params;
  double r_eta = 1.0;        // support radius, eta(t) = 0 for t > r_eta
  double a = 0.5;            // decrease radius in (0, r_eta), eta(a) > 0
  double lipschitz_L = 1.0;  // Lipschitz constant of eta on [0, r_eta]

  double operator()(double t) const;
};

std::string to_string(KernelProfile p);

// Profiles: "triangular" (no params), "tent" (width), and
// "truncated-exponential" (rate, cutoff). `a` defaults to r_eta/2.
Kernel make_kernel(const std::string& profile_id,
                   const std::vector<double>& params = {},
                   std::optional<double> a_override = std::nullopt);

struct KernelConstants {
  double C_eta = 0.0;    // sup_t t*eta(t)
  double c_eta = 0.0;    // eta(a)
  double sup_eta = 0.0;  // sup_t eta(t)
  double argmax_t = 0.0; // maximizer of t*eta(t)
};

// Dense grid maximization over [0, r_eta] at `grid_step`, followed by one
// golden-section refinement pass around the best cell. c_eta is exact.
KernelConstants kernel_constants(const Kernel& kernel, double grid_step = 1e-5);

// Grid + golden-section maximizer used by kernel_constants, exposed so tests
// can run it against profiles that are not shipped as Kernel instances.
// Returns (argmax, max).
std::pair<double, double> maximize_on_grid(const std::function<double(double)>& fn,
                                           double lo, double hi, double grid_step);

// J_eps(x, y) = (eps * C_eta)^-1 * eta(dtilde / eps). Exactly zero whenever
// dtilde > eps * r_eta.
double weight(const KernelConstants& constants, const Kernel& kernel,
              double epsilon, double dtilde);

// Largest stable explicit time step: eps * C_eta / sup_eta.
double cfl_bound(const KernelConstants& constants, double epsilon);

}  // namespace eikograph
