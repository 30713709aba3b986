// Linear stability of the uniform state: long-wavelength expansion
// coefficients, neutral curve, critical densities, kink/chaos separatrix and
// an exact Fourier-mode growth oracle for the full difference equation.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "traffic/types.hpp"

namespace traffic::stability {

// First and second coefficients of the expansion w = w1(ik) + w2(ik)^2 + ...
// of the dispersion relation around k = 0. The uniform flow is stable at
// long wavelength iff w2 > 0.
struct LinearCoeffs {
  double w1 = 0.0;
  double w2 = 0.0;
};

LinearCoeffs linear_coeffs(const ModelParams& params);

// Sensitivity at which w2 vanishes for the given mean density:
//   a_neutral = -3 rho0^2 B C V'(rho0) / (1 - 2 gamma).
// Flow is stable for a above this value. Returns nullopt for gamma >= 1/2,
// where no finite neutral point exists (the flow is long-wave unstable at
// every sensitivity).
std::optional<double> neutral_a(double rho0, const ModelParams& params);

// Larger root magnitude |z| of
//   z^2 - z + g (e^{ik}-1) - gamma g (e^{ik}-1)^2 = 0,  g = tau rho0^2 B C V'.
// z = e^{w tau} is the per-step growth factor of the Fourier mode with
// wavenumber k. No small-k approximation is involved.
double dispersion_max_root(double rho0, const ModelParams& params, double k);

struct StabilityVerdict {
  double margin = 0.0;             // w2 at this point
  bool stable = true;              // lattice-mode verdict: max growth <= 1
  std::optional<double> neutral;   // neutral sensitivity, if finite
  double max_growth_factor = 1.0;  // max over modes k = 2 pi n / L, n = 0..L/2
  double argmax_k = 0.0;
};

// Exact verdict for an L-site ring: the uniform state is unstable iff some
// lattice wavenumber has |z| > 1. k = 0 is included and always contributes
// exactly 1 (translation mode).
StabilityVerdict lattice_verdict(double rho0, const ModelParams& params, int L);

struct CriticalDensities {
  bool unstable_band = false;  // false = stable at every density
  double rho_c1 = 0.0;         // lower edge, scaled-density units
  double rho_c2 = 0.0;         // upper edge
};

// Roots of a_neutral(rho) = a bracketing the unstable band, located by a
// dense scan and bisection to |drho| < 1e-10. Densities are reported in the
// units of the evolving (scaled) field.
CriticalDensities critical_densities(double a, const ModelParams& params, int scan_points = 2000);

// Separatrix sensitivity a_c = -7 B rho0^2 C V'(rho0) / 2. Inside the
// unstable band the congested pattern is a kink wave for a < a_c and
// irregular for a > a_c.
double separatrix_ac(const ModelParams& params);

// One evaluated point of a 2-d parameter sweep.
struct SweepPoint {
  double x = 0.0;
  double y = 0.0;
  std::optional<double> neutral;  // neutral sensitivity at this point
  double w2 = 0.0;
  double max_growth = 1.0;
  bool unstable = false;
  double separatrix = 0.0;
  bool kink_exists = false;
};

// Axis names accepted by sweep(): "rho0", "a", "B", "gamma".
struct SweepAxis {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  int n = 2;
};

// Evaluates the stability quantities on a grid. The growth verdict uses a
// 512-point wavenumber grid on (0, pi], independent of any lattice size.
std::vector<SweepPoint> sweep(const SweepAxis& x, const SweepAxis& y, const ModelParams& fixed);

// Neutral curve a_neutral(rho) sampled on [rho_lo, rho_hi].
std::vector<std::pair<double, double>> neutral_curve(const ModelParams& params, double rho_lo,
                                                     double rho_hi, int n);

}  // namespace traffic::stability
