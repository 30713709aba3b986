// Core parameter types for the disordered-traffic lattice model.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace traffic {

// Thrown when a configuration or argument violates a documented precondition.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a computation produces non-finite values or cannot proceed.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// One vehicle class of a heterogeneous mix.
//   fraction      share of this class in the mix, (0, 1]
//   area          projected road area of one vehicle, length^2
//   max_speed     free-flow speed cap, length/time
//   delay_scale   k_l in tau_l = k_l * tau, (0, 1]; smaller vehicles react faster
//   passing_rate  strength of the overtaking flux for this class, >= 0
struct VehicleClass {
  double fraction = 1.0;
  double area = 1.0;
  double max_speed = 1.0;
  double delay_scale = 1.0;
  double passing_rate = 0.0;

  void validate() const;
};

// Aggregated description of a vehicle mix on a road of width W.
// The scalar coefficients are recomputed from the classes on construction:
//   B = sum_l c_l A_l / W
//   C = sum_l c_l k_l v_l / 2
//   D = sum_l c_l k_l gamma_l v_l / 2
//   gamma = D / C
struct Mixture {
  std::vector<VehicleClass> classes;
  double road_width = 1.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;
  double gamma = 0.0;
};

// Builds a Mixture and checks: fractions sum to 1 (1e-12), delay scales
// strictly increasing (classes ordered small to large), per-class ranges.
Mixture aggregate(std::vector<VehicleClass> classes, double road_width);

// Full parameter set of the density evolution equation.
// Densities handled by the model are area-occupancy scaled; rho0 is the
// spatial mean of the evolving field and rhoc the safety density of the
// optimal-velocity law. a is the sensitivity, tau = 1/a the driver delay.
struct ModelParams {
  double B = 1.6;
  double C = 0.7;
  double gamma = 0.4;
  double rho0 = 0.2;
  double rhoc = 0.2;
  double a = 3.5;

  double tau() const { return 1.0 / a; }
  void validate() const;

  static ModelParams from_mixture(const Mixture& mix, double rho0, double rhoc, double a);
};

// Piecewise-linear function of time used as a ramp multiplier.
// Knots must be strictly increasing in time; evaluation clamps outside the
// knot range. An empty knot list means the constant 1.
struct Schedule {
  std::vector<std::pair<double, double>> knots;

  double operator()(double t) const;
  void validate() const;
};

// On/off-ramp configuration. Site indices are 1-based.
// In point mode the full inflow q_in enters at j_in and q_out leaves at
// j_out each step. In distributed mode the same totals are spread evenly
// over all sites, which keeps the field spatially uniform while the mean
// density ramps.
struct RampConfig {
  double q_in = 0.0;
  int j_in = 1;
  double q_out = 0.0;
  int j_out = 1;
  Schedule schedule;
  bool distributed = false;

  void validate(int L) const;
};

// Additive Gaussian white noise applied per site per step.
// zero_mean_projection subtracts the spatial mean of each draw so the noise
// never changes total mass; identical seeds give identical streams.
struct NoiseConfig {
  double sigma = 1e-3;
  bool zero_mean_projection = true;
  std::uint64_t seed = 0;

  void validate() const;
};

}  // namespace traffic
