// Pointwise mathematics of the evolution equation: optimal-velocity law,
// its derivatives, the single-step update rule, ramp and noise terms.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "traffic/types.hpp"

namespace traffic::model {

using Eigen::ArrayXd;

// Portable Gaussian generator: mt19937_64 bits mapped to [0,1) doubles and
// Box-Muller on top. The engine is bit-exact by the standard and the
// transforms are spelled out here, so streams reproduce across toolchains.
class GaussianRng {
public:
  explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // in [0, 1)
  double normal();   // standard normal

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Optimal-velocity factor tanh(2/rho0 - rho_star/rho0^2 - 1/rhoc) + tanh(1/rhoc).
// Strictly decreasing in rho_star; inflects at rho_star = rhoc when rho0 = rhoc.
double optimal_velocity(double rho_star, double rho0, double rhoc);
ArrayXd optimal_velocity(const ArrayXd& rho_star, double rho0, double rhoc);

// n-th derivative (n = 1..3) of rho -> V(B*rho) evaluated at rho = rho0,
// i.e. the analytic chain-rule derivative with inner factor -B/rho0^2.
// The stability and soliton formulas use B = 1 here: their printed
// area-occupancy prefactors supply the B powers explicitly.
double ov_derivative(double rho0, double rhoc, double B, int order);

// Per-step report of the update rule.
struct StepDiag {
  int negative_sites = 0;   // sites left negative by this step
  bool nonfinite = false;   // any non-finite output value
  int first_bad_site = -1;  // 1-based site of the first offending value
};

// Options threaded through the update.
struct StepOptions {
  bool recompute_rho0 = true;  // use the spatial mean of the newest slice
  bool clamp_at_zero = false;  // optional floor at zero (off by default)
};

// Advances the two-slice recurrence by one delay step tau:
//   next_j = curr_j + B*C*tau*rho0^2 * (gamma*D2V_j - DV_j) + ramp_j + noise_j
// where DV and D2V are forward first/second differences of V over sites
// (j, j+1, j+2) with periodic wrap, evaluated on the older slice `prev`.
// With ramp and noise absent the site sum of `next` equals the site sum of
// `curr` up to rounding (the differences telescope around the ring).
ArrayXd step(const ArrayXd& prev, const ArrayXd& curr, const ModelParams& params,
             const RampConfig* ramp, const NoiseConfig* noise, GaussianRng* rng,
             double t, StepDiag* diag = nullptr, const StepOptions& opts = {});

// Density increment contributed by the ramp at 1-based site j and time t.
// Point mode: q_in*schedule(t) at j_in, -q_out*schedule(t) at j_out (summed
// when they coincide), 0 elsewhere. Distributed mode: the same totals spread
// evenly, (q_in - q_out)*schedule(t)/L at every site.
double ramp_term(const RampConfig& ramp, int j, double t, int L);

// Vector of i.i.d. N(0, sigma^2) increments, one per site. With
// zero_mean_projection the spatial mean is subtracted from the draw.
ArrayXd noise_term(const NoiseConfig& noise, int L, GaussianRng& rng);

}  // namespace traffic::model
