#include "traffic/stability.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "traffic/mkdv.hpp"
#include "traffic/model.hpp"

namespace traffic::stability {

namespace {

// V'(rho0): slope of the optimal-velocity law with respect to its
// scaled-density argument, evaluated at the uniform state.
double vprime(double rho0, double rhoc) { return model::ov_derivative(rho0, rhoc, 1.0, 1); }

ModelParams at_rho0(const ModelParams& base, double rho0) {
  ModelParams p = base;
  p.rho0 = rho0;
  return p;
}

}  // namespace

LinearCoeffs linear_coeffs(const ModelParams& params) {
  params.validate();
  const double f = params.rho0 * params.rho0 * params.B * params.C * vprime(params.rho0, params.rhoc);
  LinearCoeffs c;
  c.w1 = -f;
  c.w2 = -1.5 * params.tau() * c.w1 * c.w1 - 0.5 * (1.0 - 2.0 * params.gamma) * f;
  return c;
}

std::optional<double> neutral_a(double rho0, const ModelParams& params) {
  if (params.gamma >= 0.5) return std::nullopt;
  const double f = rho0 * rho0 * params.B * params.C * vprime(rho0, params.rhoc);
  return -3.0 * f / (1.0 - 2.0 * params.gamma);
}

double dispersion_max_root(double rho0, const ModelParams& params, double k) {
  const double g =
      params.tau() * rho0 * rho0 * params.B * params.C * vprime(rho0, params.rhoc);
  const std::complex<double> e(std::cos(k) - 1.0, std::sin(k));
  const std::complex<double> q = g * e * (1.0 - params.gamma * e);
  const std::complex<double> s = std::sqrt(std::complex<double>(1.0, 0.0) - 4.0 * q);
  const double z1 = std::abs((1.0 + s) / 2.0);
  const double z2 = std::abs((1.0 - s) / 2.0);
  return std::max(z1, z2);
}

StabilityVerdict lattice_verdict(double rho0, const ModelParams& params, int L) {
  if (L < 4) throw ValidationError("lattice_verdict: L must be at least 4");
  StabilityVerdict v;
  v.margin = linear_coeffs(at_rho0(params, rho0)).w2;
  v.neutral = neutral_a(rho0, params);
  v.max_growth_factor = 1.0;  // k = 0 translation mode
  v.argmax_k = 0.0;
  for (int n = 1; n <= L / 2; ++n) {
    const double k = 2.0 * M_PI * n / L;
    const double z = dispersion_max_root(rho0, params, k);
    if (z > v.max_growth_factor) {
      v.max_growth_factor = z;
      v.argmax_k = k;
    }
  }
  v.stable = v.max_growth_factor <= 1.0 + 1e-12;
  return v;
}

CriticalDensities critical_densities(double a, const ModelParams& params, int scan_points) {
  if (!(a > 0.0)) throw ValidationError("critical_densities: a must be positive");
  if (scan_points < 16) throw ValidationError("critical_densities: scan too coarse");
  CriticalDensities out;

  auto margin = [&](double rho) {
    const auto na = neutral_a(rho, params);
    return na ? *na - a : std::numeric_limits<double>::infinity();
  };

  // Dense scan over a generous density range, then bisection on each
  // bracketing interval. The neutral curve is unimodal in 1/rho, so at most
  // one band exists.
  const double lo = 1e-3, hi = 2.0;
  double prev_rho = lo, prev_m = margin(lo);
  std::vector<double> roots;
  for (int i = 1; i <= scan_points; ++i) {
    const double rho = lo + (hi - lo) * i / scan_points;
    const double m = margin(rho);
    if ((prev_m < 0.0) != (m < 0.0)) {
      double rl = prev_rho, rh = rho, ml = prev_m;
      while (rh - rl > 1e-10) {
        const double mid = 0.5 * (rl + rh);
        const double mm = margin(mid);
        if ((ml < 0.0) == (mm < 0.0)) {
          rl = mid;
          ml = mm;
        } else {
          rh = mid;
        }
      }
      roots.push_back(0.5 * (rl + rh));
    }
    prev_rho = rho;
    prev_m = m;
  }
  if (roots.size() >= 2) {
    out.unstable_band = true;
    out.rho_c1 = roots.front();
    out.rho_c2 = roots.back();
  }
  return out;
}

double separatrix_ac(const ModelParams& params) {
  params.validate();
  return -3.5 * params.B * params.rho0 * params.rho0 * params.C *
         vprime(params.rho0, params.rhoc);
}

std::vector<std::pair<double, double>> neutral_curve(const ModelParams& params, double rho_lo,
                                                     double rho_hi, int n) {
  if (n < 2) throw ValidationError("neutral_curve: need at least 2 samples");
  std::vector<std::pair<double, double>> curve;
  curve.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double rho = rho_lo + (rho_hi - rho_lo) * i / (n - 1);
    const auto a = neutral_a(rho, params);
    curve.emplace_back(rho, a ? *a : std::numeric_limits<double>::quiet_NaN());
  }
  return curve;
}

std::vector<SweepPoint> sweep(const SweepAxis& x, const SweepAxis& y, const ModelParams& fixed) {
  if (x.n < 1 || y.n < 1) throw ValidationError("sweep: grid sizes must be at least 1");
  auto apply = [](ModelParams p, const std::string& name, double value) {
    if (name == "rho0") p.rho0 = value;
    else if (name == "a") p.a = value;
    else if (name == "B") p.B = value;
    else if (name == "gamma") p.gamma = value;
    else throw ValidationError("sweep: unknown axis '" + name + "'");
    return p;
  };

  std::vector<SweepPoint> out;
  out.reserve(static_cast<std::size_t>(x.n) * y.n);
  for (int iy = 0; iy < y.n; ++iy) {
    const double vy = y.n == 1 ? y.lo : y.lo + (y.hi - y.lo) * iy / (y.n - 1);
    for (int ix = 0; ix < x.n; ++ix) {
      const double vx = x.n == 1 ? x.lo : x.lo + (x.hi - x.lo) * ix / (x.n - 1);
      ModelParams p = apply(apply(fixed, x.name, vx), y.name, vy);
      p.validate();
      SweepPoint pt;
      pt.x = vx;
      pt.y = vy;
      pt.neutral = neutral_a(p.rho0, p);
      pt.w2 = linear_coeffs(p).w2;
      pt.max_growth = 1.0;
      for (int i = 1; i <= 512; ++i) {
        const double k = M_PI * i / 512.0;
        pt.max_growth = std::max(pt.max_growth, dispersion_max_root(p.rho0, p, k));
      }
      pt.unstable = pt.max_growth > 1.0 + 1e-12;
      pt.separatrix = separatrix_ac(p);
      pt.kink_exists = mkdv::kink_exists(p.gamma);
      out.push_back(pt);
    }
  }
  return out;
}

}  // namespace traffic::stability
