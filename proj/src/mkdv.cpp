#include "traffic/mkdv.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "traffic/model.hpp"
#include "traffic/stability.hpp"

namespace traffic::mkdv {

namespace {

// Slope of the optimal-velocity law with respect to its argument. The h
// table evaluates at the configured mean density (the critical point when
// rho0 = rhoc); the b table is tied to the critical point itself.
double vderiv_at(double rho, double rhoc, int order) {
  return model::ov_derivative(rho, rhoc, 1.0, order);
}

double vderiv(const ModelParams& p, int order) { return vderiv_at(p.rhoc, p.rhoc, order); }

// Normalized kink and the closed-form X-derivatives entering the
// solvability integrand. T = tanh, S = sech^2 at xi = sqrt(mu/2) X.
struct KinkTerms {
  double r0, d2, d4, d2cube;
};

KinkTerms kink_terms(double mu_value, double x) {
  const double s = std::sqrt(mu_value / 2.0);
  const double xi = s * x;
  const double t = std::tanh(xi);
  const double sc = 1.0 - t * t;
  const double rm = std::sqrt(mu_value);
  KinkTerms k;
  k.r0 = rm * t;
  k.d2 = rm * s * s * (-2.0 * t * sc);
  k.d4 = rm * s * s * s * s * (16.0 * t * sc * sc - 8.0 * t * t * t * sc);
  k.d2cube = rm * rm * rm * s * s * (6.0 * t * sc * sc - 6.0 * t * t * t * sc);
  return k;
}

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double fl, double fm, double fh, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
  const double flm = f(lm), frm = f(rm);
  const double whole = (hi - lo) / 6.0 * (fl + 4.0 * fm + fh);
  const double left = (mid - lo) / 6.0 * (fl + 4.0 * flm + fm);
  const double right = (hi - mid) / 6.0 * (fm + 4.0 * frm + fh);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, lo, mid, fl, flm, fm, tol / 2.0, depth - 1) +
         adaptive_simpson(f, mid, hi, fm, frm, fh, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double mid = 0.5 * (lo + hi);
  return adaptive_simpson(f, lo, hi, f(lo), f(mid), f(hi), tol, 24);
}

}  // namespace

bool kink_exists(double gamma) {
  if (gamma < 0.0) throw ValidationError("kink_exists: gamma must be non-negative");
  return 13.0 * gamma + 14.0 * gamma * gamma < 1.0;
}

HCoeffs h_coeffs(const ModelParams& params, double b, double tau) {
  params.validate();
  const double g = params.gamma;
  const double r2 = params.rho0 * params.rho0;
  const double B = params.B, C = params.C;
  const double vp = B * C * r2 * vderiv_at(params.rho0, params.rhoc, 1);
  const double vpp = B * B * C * r2 * vderiv_at(params.rho0, params.rhoc, 2);
  const double vppp = B * B * B * C * r2 * vderiv_at(params.rho0, params.rhoc, 3);
  HCoeffs out;
  out.h[0] = b + vp;
  out.h[1] = 1.5 * b * b * tau + 0.5 * (1.0 - 2.0 * g) * vp;
  out.h[2] = 0.5 * vpp;
  out.h[3] = 7.0 / 6.0 * b * b * b * tau * tau + vp / 6.0 - g * vp;
  out.h[4] = 0.25 * (1.0 - 2.0 * g) * vpp;
  out.h[5] = vppp / 6.0;
  out.h[6] = 3.0 * b * tau;
  out.h[7] = 5.0 / 8.0 * b * b * b * b * tau * tau * tau + vp / 24.0 - 7.0 / 12.0 * g * vp;
  out.h[8] = (1.0 - 6.0 * g) * vpp / 12.0;
  out.h[9] = (1.0 - 2.0 * g) * vppp / 12.0;
  return out;
}

double b_param(const ModelParams& params) {
  return -params.B * params.C * params.rhoc * params.rhoc * vderiv(params, 1);
}

double b2_equation(const ModelParams& params) {
  return params.B * params.C * params.rhoc * params.rhoc * vderiv(params, 3) / 6.0;
}

BCoeffs b_coeffs(const ModelParams& params, double tau_c) {
  params.validate();
  const double g = params.gamma;
  const double b = b_param(params);
  const double r2 = params.rhoc * params.rhoc;
  const double vp = params.B * params.C * r2 * vderiv(params, 1);
  const double vppp = params.B * params.B * params.B * params.C * r2 * vderiv(params, 3);
  BCoeffs out;
  out.b1 = -7.0 / 6.0 * b * b * b * tau_c * tau_c - vp / 6.0 + vp * g;
  out.b2 = vppp / 6.0;
  out.b3 = 1.5 * b * b * tau_c;
  out.b4 = 5.0 / 8.0 * b * b * b * b * tau_c * tau_c * tau_c + vp / 24.0 - 7.0 / 12.0 * vp * g +
           3.0 * b * tau_c * out.b1;
  out.b5 = vppp * (1.0 - 2.0 * g) / 12.0 - 3.0 * b * tau_c * out.b2;
  return out;
}

double mu(const BCoeffs& b) {
  const double den = 2.0 * b.b2 * b.b4 - 3.0 * b.b1 * b.b5;
  const double num = 5.0 * b.b2 * b.b3;
  if (den == 0.0 || std::abs(den) < 1e-300 * std::abs(num))
    throw NumericalError("mu: singular parameters, vanishing denominator");
  return num / den;
}

KinkSolution kink_solution(const ModelParams& params, double a) {
  if (!kink_exists(params.gamma))
    throw ValidationError("kink_solution: no kink for gamma >= 1/14");
  const auto apex = stability::neutral_a(params.rhoc, params);
  if (!apex) throw ValidationError("kink_solution: neutral sensitivity undefined");
  if (a > *apex * (1.0 + 1e-12))
    throw ValidationError("kink_solution: sensitivity above the neutral apex");
  KinkSolution sol;
  sol.rho_c = params.rhoc;
  sol.tau_c = 1.0 / *apex;
  sol.b = b_param(params);
  sol.coeffs = b_coeffs(params, sol.tau_c);
  sol.mu = mu(sol.coeffs);
  sol.epsilon_sq = (1.0 / a) / sol.tau_c - 1.0;
  const double arg = sol.coeffs.b1 * sol.epsilon_sq * sol.mu / b2_equation(params);
  if (arg < 0.0) throw NumericalError("kink_solution: amplitude argument is negative");
  sol.amplitude = std::sqrt(arg);
  return sol;
}

double kink_profile(double X, double T, const KinkSolution& sol) {
  const double phase = std::sqrt(sol.mu / 2.0) * (X - sol.mu * sol.coeffs.b1 * T);
  return sol.rho_c + sol.amplitude * std::tanh(phase);
}

double mkdv_residual(double mu_value, int n, double x_max) {
  if (!(mu_value > 0.0)) throw ValidationError("mkdv_residual: mu must be positive");
  if (n < 64) throw ValidationError("mkdv_residual: grid too small");
  const double h = 2.0 * x_max / (n - 1);
  if (h > 1.0 / (20.0 * std::sqrt(mu_value)))
    throw ValidationError("mkdv_residual: grid does not resolve the kink width");

  const double rm = std::sqrt(mu_value);
  auto profile = [&](double x, double tp) { return rm * std::tanh(std::sqrt(mu_value / 2.0) * (x - mu_value * tp)); };

  const double ht = h;  // time step of the same size as the grid spacing
  double worst = 0.0;
  // 4th-order central stencils; skip a 3-point margin at each end.
  for (int i = 3; i < n - 3; ++i) {
    const double x = -x_max + i * h;
    auto rx = [&](int off) { return profile(x + off * h, 0.0); };
    auto rt = [&](int off) { return profile(x, off * ht); };
    const double dt = (-rt(2) + 8.0 * rt(1) - 8.0 * rt(-1) + rt(-2)) / (12.0 * ht);
    const double dx3 = (-rx(3) + 8.0 * rx(2) - 13.0 * rx(1) + 13.0 * rx(-1) - 8.0 * rx(-2) +
                        rx(-3)) /
                       (8.0 * h * h * h);
    auto cube = [&](int off) { const double v = rx(off); return v * v * v; };
    const double dxc = (-cube(2) + 8.0 * cube(1) - 8.0 * cube(-1) + cube(-2)) / (12.0 * h);
    worst = std::max(worst, std::abs(dt - dx3 + dxc));
  }
  return worst;
}

double solvability_residual(const BCoeffs& b, double mu_value) {
  if (!(mu_value > 0.0)) throw ValidationError("solvability_residual: mu must be positive");
  const double x_max = 40.0 / std::sqrt(mu_value);
  auto signed_part = [&](double x) {
    const KinkTerms k = kink_terms(mu_value, x);
    const double m = (b.b3 * k.d2 + b.b4 * k.d4 + (b.b1 * b.b5 / b.b2) * k.d2cube) / b.b1;
    return k.r0 * m;
  };
  auto abs_part = [&](double x) { return std::abs(signed_part(x)); };
  const double num = integrate(signed_part, -x_max, x_max, 1e-12);
  const double den = integrate(abs_part, -x_max, x_max, 1e-12);
  if (den == 0.0) throw NumericalError("solvability_residual: degenerate integrand");
  return num / den;
}

std::vector<CoexistPoint> coexisting_curve(const ModelParams& params,
                                           const std::vector<double>& rho0_grid) {
  if (!kink_exists(params.gamma))
    throw ValidationError("coexisting_curve: no kink solution for gamma >= 1/14");
  if (rho0_grid.empty()) throw ValidationError("coexisting_curve: empty density grid");
  const auto apex = stability::neutral_a(params.rhoc, params);
  if (!apex) throw ValidationError("coexisting_curve: neutral sensitivity undefined");

  std::vector<CoexistPoint> out;
  out.reserve(rho0_grid.size() * 2);
  for (double rho : rho0_grid) {
    const auto a_edge = stability::neutral_a(rho, params);
    if (!a_edge || *a_edge > *apex || !(*a_edge > 0.0)) continue;
    KinkSolution sol = kink_solution(params, *a_edge);
    out.push_back({params.rhoc - sol.amplitude, *a_edge, -1});
    out.push_back({params.rhoc + sol.amplitude, *a_edge, +1});
  }
  return out;
}

}  // namespace traffic::mkdv
