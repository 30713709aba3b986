// Scenario runner for the periodic lattice: initial conditions, recording,
// ramped experiments, phase portraits and attractor classification.
#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "traffic/model.hpp"
#include "traffic/types.hpp"

namespace traffic::sim {

using Eigen::ArrayXd;

// What to record while a scenario runs. Sites are 1-based. An empty `sites`
// list means all sites. `sensor_noise_sigma` adds Gaussian read noise to the
// sampled values only (the dynamics and diagnostics see the true field),
// mimicking a roadside detector.
struct RecorderConfig {
  double sample_interval_seconds = 20.0;
  std::vector<int> sites;
  long record_full_field_every = 0;       // steps; 0 = no snapshots
  long record_full_field_from = 0;        // first step eligible for snapshots
  std::vector<int> every_step_sites;      // per-step series, e.g. for portraits
  double sensor_noise_sigma = 0.0;

  void validate(int L, double tau) const;
};

struct InitialCondition {
  enum class Kind { UniformPerturbed, Explicit };
  Kind kind = Kind::UniformPerturbed;
  double delta_rho = 0.05;  // used by UniformPerturbed
  ArrayXd values;           // used by Explicit
};

struct ScenarioConfig {
  int L = 100;
  ModelParams params;
  InitialCondition init;
  long steps = 25200;
  std::optional<RampConfig> ramp;
  std::optional<NoiseConfig> noise;
  RecorderConfig recorder;
  bool clamp_at_zero = false;
  double ramp_start_seconds = 0.0;  // bookkeeping for analysis; 0 = none

  void validate() const;
};

// Two time slices of the second-order recurrence plus bookkeeping.
struct LatticeState {
  int L = 0;
  ArrayXd slice_prev;  // state at t
  ArrayXd slice_curr;  // state at t + tau
  long step_index = 0;
  double time = 0.0;

  void validate() const;
};

// Recorded history of one run. `samples` holds the sampled field values,
// one row per sample time, one column per recorded site.
struct Trajectory {
  double tau = 0.0;
  long steps = 0;
  double cadence_seconds = 0.0;
  std::vector<int> sites;  // 1-based, column order of `samples`
  std::vector<double> sample_times;
  Eigen::MatrixXd samples;

  std::vector<double> mass_series;         // site sum per sample
  std::vector<double> rho0_series;         // spatial mean per sample
  std::vector<double> spatial_std_series;  // spatial std per sample

  std::vector<std::pair<long, ArrayXd>> snapshots;     // (step, full field)
  std::map<int, std::vector<double>> per_step_series;  // site -> value per step

  long negative_events = 0;
  long first_negative_step = -1;
  double ramp_start_seconds = 0.0;
};

// Uniform slices at rho0 with +delta at site L/2-1 and -delta at site L/2
// (1-based). Both slices are identical; the perturbation is mass-neutral.
std::pair<ArrayXd, ArrayXd> init_perturbed(double rho0, double delta_rho, int L);

// Runs the recurrence for the configured number of steps. Deterministic for
// a fixed seed. Aborts with NumericalError when the field leaves the finite
// range, reporting step and site.
Trajectory run(const ScenarioConfig& scenario);

// Derives a ramped-density scenario from a base configuration: the mean
// density holds at rho_start for hold_seconds, then rises linearly at
// ramp_rate (density per second) until the end of the run.
ScenarioConfig ramped_scenario(ScenarioConfig base, double rho_start = 0.01,
                               double hold_seconds = 7200.0, double ramp_rate = 1.8e-5,
                               double total_seconds = 19200.0);

struct PortraitPoint {
  double value = 0.0;  // x(t)
  double diff = 0.0;   // x(t) - x(t-1)
};

// Consecutive-step difference pairs of a per-step series over the step
// window (t_lo, t_hi].
std::vector<PortraitPoint> phase_portrait(const std::vector<double>& series, long t_lo, long t_hi);

enum class Attractor { Uniform, Kink, Chaotic };

struct ClassifierConfig {
  double eps_amp = 1e-4;
  double ring_threshold = 0.9;
  double spectral_threshold = 0.5;
  double annulus_halfwidth_frac = 0.25;
};

struct Classification {
  Attractor type = Attractor::Uniform;
  double amplitude = 0.0;              // peak-to-peak of the series
  double ring_score = 0.0;             // fraction of portrait points in the fitted annulus
  double spectral_concentration = 0.0; // power fraction of the top-3 bins
};

// Classifies the stationary attractor from a portrait and the matching
// series window. Uniform when the amplitude is below eps_amp; otherwise
// Kink when both scores clear their thresholds, else Chaotic.
Classification classify_attractor(const std::vector<PortraitPoint>& portrait,
                                  const std::vector<double>& series,
                                  const ClassifierConfig& cfg = {});

// Fraction of portrait points inside the annulus fitted robustly to the
// point cloud (median center, median-absolute-deviation axis scales).
double ring_score(const std::vector<PortraitPoint>& portrait, double halfwidth_frac = 0.25);

// Fraction of spectral power carried by the three largest non-zero-frequency
// bins of the series.
double spectral_concentration(const std::vector<double>& series);

// First sample time at which the spatial std exceeds `factor` times the
// median spatial std over samples before `baseline_end_seconds`.
std::optional<double> onset_time(const Trajectory& traj, double baseline_end_seconds,
                                 double factor = 10.0);

}  // namespace traffic::sim
