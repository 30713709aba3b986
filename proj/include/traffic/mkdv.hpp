// Weakly nonlinear reduction near the instability apex: expansion
// coefficients, the kink soliton of the reduced equation, its propagation
// velocity, the existence bound in the passing rate, and coexisting curves.
#pragma once

#include <array>
#include <vector>

#include "traffic/types.hpp"

namespace traffic::mkdv {

// The reduced equation (and hence the kink) exists iff 13 g + 14 g^2 < 1,
// i.e. 0 <= gamma < 1/14.
bool kink_exists(double gamma);

// Coefficients of the fifth-order slow-scale expansion of the lattice
// equation around the critical density. b and tau are free so the freezing
// point can be chosen by the caller; derivatives of the optimal-velocity law
// are taken with respect to its scaled-density argument at rho0.
struct HCoeffs {
  std::array<double, 10> h{};  // h[0] = h1, ..., h[9] = h10
};

HCoeffs h_coeffs(const ModelParams& params, double b, double tau);

// Coefficients of the reduced equation after substituting b = -B C rhoc^2 V'
// and tau = tau_c (1 + eps^2); everything is evaluated at the critical point.
struct BCoeffs {
  double b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0;
};

// b parameter of the slow frame, -B C rho^2 V'(rho), at rho = params.rhoc.
double b_param(const ModelParams& params);

BCoeffs b_coeffs(const ModelParams& params, double tau_c);

// Cubic coefficient the evolution equation itself produces in the
// reduction, B C rhoc^2 V''' / 6. The tabulated b2 carries the cubed
// area-occupancy prefactor instead; both agree at B = 1, and the kink
// amplitude must use this one for the coexisting curve to bracket the
// neutral curve at B > 1.
double b2_equation(const ModelParams& params);

// Propagation velocity mu = 5 b2 b3 / (2 b2 b4 - 3 b1 b5) of the selected
// kink. Throws when the denominator vanishes.
double mu(const BCoeffs& b);

// Kink context assembled at the critical point for a given sensitivity a.
struct KinkSolution {
  double mu = 0.0;
  double epsilon_sq = 0.0;  // tau/tau_c - 1, >= 0
  double amplitude = 0.0;   // sqrt(b1 eps^2 mu / b2)
  double rho_c = 0.0;
  double b = 0.0;
  double tau_c = 0.0;
  BCoeffs coeffs;
};

// Builds the kink for sensitivity a <= apex where apex is the neutral
// sensitivity at the critical density. Requires kink_exists(gamma).
KinkSolution kink_solution(const ModelParams& params, double a);

// Scaled-density profile rho_c + alpha tanh(sqrt(mu/2) (X - mu b1 T)).
double kink_profile(double X, double T, const KinkSolution& sol);

// Max |d_T' R' - d_X^3 R' + d_X R'^3| of the normalized kink
// sqrt(mu) tanh(sqrt(mu/2)(X - mu T')) on an n-point grid over [-Xmax, Xmax],
// all derivatives by 4th-order central differences. The grid must resolve
// the kink: at least 20 points per unit of 1/sqrt(mu).
double mkdv_residual(double mu, int n, double x_max);

// Solvability integral (R0, M[R0]) evaluated by adaptive Simpson quadrature
// over [-40/sqrt(mu), 40/sqrt(mu)], normalized by the integral of |R0 M[R0]|.
// Vanishes (to quadrature accuracy) exactly at the selected velocity.
double solvability_residual(const BCoeffs& b, double mu_value);

// One point of the coexisting curve: density edge and sensitivity.
struct CoexistPoint {
  double rho_star = 0.0;
  double a = 0.0;
  int branch = +1;  // +1 upper edge, -1 lower edge
};

// Coexisting curve rho_c +/- alpha(a) for the sensitivities where each grid
// density goes neutral. Requires kink_exists(gamma); refuses otherwise.
std::vector<CoexistPoint> coexisting_curve(const ModelParams& params,
                                           const std::vector<double>& rho0_grid);

}  // namespace traffic::mkdv
