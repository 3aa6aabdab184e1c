#include "eikograph/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eikograph {

double Kernel::operator()(double t) const {
  if (t < 0.0) throw std::invalid_argument("kernel argument must be >= 0");
  if (t > r_eta) return 0.0;
  switch (profile) {
    case KernelProfile::Triangular:
      return t >= 1.0 ? 0.0 : 1.0 - t;
    case KernelProfile::Tent: {
      const double w = params[0];
      return t >= w ? 0.0 : 1.0 - t / w;
    }
    case KernelProfile::TruncatedExponential: {
      const double rate = params[0];
      return std::exp(-rate * t);
    }
  }
  return 0.0;
}

std::string to_string(KernelProfile p) {
  switch (p) {
    case KernelProfile::Triangular: return "triangular";
    case KernelProfile::Tent: return "tent";
    case KernelProfile::TruncatedExponential: return "truncated-exponential";
  }
  return "?";
}

namespace {

void validate(const Kernel& k) {
  if (!(k.a > 0.0) || !(k.a < k.r_eta))
    throw std::invalid_argument("kernel: a must lie in (0, r_eta)");
  if (!(k(k.a) > 0.0))
    throw std::invalid_argument("kernel: eta(a) must be positive");
  // Non-negativity and monotone decrease on [0, a], checked on a grid.
  const int steps = 256;
  double prev = k(0.0);
  for (int i = 0; i <= steps; ++i) {
    const double t = k.a * static_cast<double>(i) / steps;
    const double v = k(t);
    if (v < 0.0) throw std::invalid_argument("kernel: eta must be non-negative");
    if (v > prev + 1e-15 * std::max(1.0, prev))
      throw std::invalid_argument("kernel: eta must be non-increasing on [0, a]");
    prev = v;
  }
  for (int i = 0; i <= steps; ++i) {
    const double t = k.a + (k.r_eta - k.a) * static_cast<double>(i) / steps;
    if (k(t) < 0.0) throw std::invalid_argument("kernel: eta must be non-negative");
  }
}

}  // namespace

Kernel make_kernel(const std::string& profile_id, const std::vector<double>& params,
                   std::optional<double> a_override) {
  Kernel k;
  if (profile_id == "triangular") {
    if (!params.empty())
      throw std::invalid_argument("triangular kernel takes no parameters");
    k.profile = KernelProfile::Triangular;
    k.r_eta = 1.0;
    k.lipschitz_L = 1.0;
  } else if (profile_id == "tent") {
    if (params.size() != 1 || !(params[0] > 0.0))
      throw std::invalid_argument("tent kernel needs one positive width parameter");
    k.profile = KernelProfile::Tent;
    k.params = params;
    k.r_eta = params[0];
    k.lipschitz_L = 1.0 / params[0];
  } else if (profile_id == "truncated-exponential") {
    if (params.size() != 2 || !(params[0] > 0.0) || !(params[1] > 0.0))
      throw std::invalid_argument(
          "truncated-exponential kernel needs positive rate and cutoff");
    k.profile = KernelProfile::TruncatedExponential;
    k.params = params;
    k.r_eta = params[1];
    k.lipschitz_L = params[0];
  } else {
    throw std::invalid_argument("unknown kernel profile: " + profile_id);
  }
  k.a = a_override.value_or(k.r_eta / 2.0);
  validate(k);
  return k;
}

std::pair<double, double> maximize_on_grid(const std::function<double(double)>& fn,
                                           double lo, double hi, double grid_step) {
  if (!(grid_step > 0.0) || !(hi > lo))
    throw std::invalid_argument("maximize_on_grid: bad interval or step");
  const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / grid_step));
  double best_t = lo, best_v = fn(lo);
  for (std::size_t i = 1; i <= count; ++i) {
    const double t = std::min(lo + static_cast<double>(i) * grid_step, hi);
    const double v = fn(t);
    if (v > best_v) {
      best_v = v;
      best_t = t;
    }
  }
  // One golden-section pass inside the bracketing cells.
  double x_lo = std::max(lo, best_t - grid_step);
  double x_hi = std::min(hi, best_t + grid_step);
  const double inv_phi = 0.6180339887498949;
  double c = x_hi - inv_phi * (x_hi - x_lo);
  double d = x_lo + inv_phi * (x_hi - x_lo);
  double fc = fn(c), fd = fn(d);
  for (int it = 0; it < 80 && x_hi - x_lo > 1e-15; ++it) {
    if (fc > fd) {
      x_hi = d;
      d = c;
      fd = fc;
      c = x_hi - inv_phi * (x_hi - x_lo);
      fc = fn(c);
    } else {
      x_lo = c;
      c = d;
      fc = fd;
      d = x_lo + inv_phi * (x_hi - x_lo);
      fd = fn(d);
    }
  }
  const double mid = 0.5 * (x_lo + x_hi);
  const double fm = fn(mid);
  if (fm > best_v) {
    best_v = fm;
    best_t = mid;
  }
  return {best_t, best_v};
}

KernelConstants kernel_constants(const Kernel& kernel, double grid_step) {
  if (!(grid_step > 0.0))
    throw std::invalid_argument("kernel_constants: grid_step must be positive");
  KernelConstants kc;
  auto teta = [&kernel](double t) { return t * kernel(t); };
  auto eta = [&kernel](double t) { return kernel(t); };
  auto [argmax, cmax] = maximize_on_grid(teta, 0.0, kernel.r_eta, grid_step);
  auto [_, smax] = maximize_on_grid(eta, 0.0, kernel.r_eta, grid_step);
  kc.C_eta = cmax;
  kc.argmax_t = argmax;
  kc.sup_eta = smax;
  kc.c_eta = kernel(kernel.a);
  if (!(kc.C_eta > 0.0))
    throw std::invalid_argument("kernel_constants: C_eta must be positive");
  return kc;
}

double weight(const KernelConstants& constants, const Kernel& kernel,
              double epsilon, double dtilde) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("weight: epsilon must be > 0");
  if (dtilde < 0.0) throw std::invalid_argument("weight: dtilde must be >= 0");
  if (dtilde > epsilon * kernel.r_eta) return 0.0;
  return kernel(dtilde / epsilon) / (epsilon * constants.C_eta);
}

double cfl_bound(const KernelConstants& constants, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("cfl_bound: epsilon must be > 0");
  return epsilon * constants.C_eta / constants.sup_eta;
}

}  // namespace eikograph
