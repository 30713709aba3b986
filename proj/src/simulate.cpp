#include "traffic/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include <unsupported/Eigen/FFT>

namespace traffic::sim {

void RecorderConfig::validate(int L, double tau) const {
  if (!(sample_interval_seconds >= tau - 1e-12))
    throw ValidationError("recorder: sample interval must be at least one step tau");
  for (int s : sites)
    if (s < 1 || s > L) throw ValidationError("recorder: site index out of range");
  for (int s : every_step_sites)
    if (s < 1 || s > L) throw ValidationError("recorder: per-step site index out of range");
  if (record_full_field_every < 0 || record_full_field_from < 0)
    throw ValidationError("recorder: snapshot interval and start must be non-negative");
  if (!(sensor_noise_sigma >= 0.0))
    throw ValidationError("recorder: sensor noise must be non-negative");
}

void ScenarioConfig::validate() const {
  if (L < 4) throw ValidationError("scenario: lattice size L must be at least 4");
  if (steps < 1) throw ValidationError("scenario: step count must be at least 1");
  params.validate();
  recorder.validate(L, params.tau());
  if (ramp) ramp->validate(L);
  if (noise) noise->validate();
  if (init.kind == InitialCondition::Kind::Explicit && init.values.size() != L)
    throw ValidationError("scenario: explicit initial condition must have L values");
}

void LatticeState::validate() const {
  if (slice_prev.size() != L || slice_curr.size() != L)
    throw ValidationError("lattice state: slice lengths must equal L");
  if (step_index < 0) throw ValidationError("lattice state: negative step index");
}

std::pair<ArrayXd, ArrayXd> init_perturbed(double rho0, double delta_rho, int L) {
  if (L < 4) throw ValidationError("init_perturbed: L must be at least 4");
  if (L % 2 != 0) throw ValidationError("init_perturbed: L must be even");
  ArrayXd s = ArrayXd::Constant(L, rho0);
  s[L / 2 - 2] = rho0 + delta_rho;  // 1-based site L/2 - 1
  s[L / 2 - 1] = rho0 - delta_rho;  // 1-based site L/2
  return {s, s};
}

Trajectory run(const ScenarioConfig& scenario) {
  scenario.validate();
  const int L = scenario.L;
  const double tau = scenario.params.tau();
  const long n_per = std::max<long>(1, std::lround(scenario.recorder.sample_interval_seconds / tau));

  ArrayXd prev, curr;
  if (scenario.init.kind == InitialCondition::Kind::UniformPerturbed) {
    std::tie(prev, curr) = init_perturbed(scenario.params.rho0, scenario.init.delta_rho, L);
  } else {
    prev = scenario.init.values;
    curr = scenario.init.values;
  }

  std::vector<int> rec_sites = scenario.recorder.sites;
  if (rec_sites.empty()) {
    rec_sites.resize(L);
    std::iota(rec_sites.begin(), rec_sites.end(), 1);
  }

  Trajectory traj;
  traj.tau = tau;
  traj.steps = scenario.steps;
  traj.cadence_seconds = n_per * tau;
  traj.sites = rec_sites;
  traj.ramp_start_seconds = scenario.ramp_start_seconds;
  const long n_samples = scenario.steps / n_per + 1;
  traj.samples.resize(n_samples, static_cast<Eigen::Index>(rec_sites.size()));
  traj.sample_times.reserve(n_samples);
  traj.mass_series.reserve(n_samples);
  traj.rho0_series.reserve(n_samples);
  traj.spatial_std_series.reserve(n_samples);
  for (int s : scenario.recorder.every_step_sites)
    traj.per_step_series[s].reserve(scenario.steps + 1);

  model::GaussianRng dyn_rng(scenario.noise ? scenario.noise->seed : 0);
  // Decorrelated stream for the detector so read noise never perturbs the
  // dynamics stream.
  model::GaussianRng sensor_rng((scenario.noise ? scenario.noise->seed : 0) ^
                                0x5851f42d4c957f2dull);

  long sample_row = 0;
  auto record_sample = [&](long step, const ArrayXd& field) {
    traj.sample_times.push_back(step * tau);
    for (std::size_t c = 0; c < rec_sites.size(); ++c) {
      double v = field[rec_sites[c] - 1];
      if (scenario.recorder.sensor_noise_sigma > 0.0)
        v += scenario.recorder.sensor_noise_sigma * sensor_rng.normal();
      traj.samples(sample_row, static_cast<Eigen::Index>(c)) = v;
    }
    traj.mass_series.push_back(field.sum());
    const double mean = field.mean();
    traj.rho0_series.push_back(mean);
    traj.spatial_std_series.push_back(std::sqrt((field - mean).square().mean()));
    ++sample_row;
  };
  auto record_step = [&](long step, const ArrayXd& field) {
    for (int s : scenario.recorder.every_step_sites)
      traj.per_step_series[s].push_back(field[s - 1]);
    if (scenario.recorder.record_full_field_every > 0 &&
        step >= scenario.recorder.record_full_field_from &&
        (step % scenario.recorder.record_full_field_every == 0 || step == scenario.steps))
      traj.snapshots.emplace_back(step, field);
    if (step % n_per == 0) record_sample(step, field);
  };

  record_step(0, prev);
  if (scenario.steps >= 1) record_step(1, curr);

  model::StepDiag diag;
  model::StepOptions opts;
  opts.clamp_at_zero = scenario.clamp_at_zero;
  const RampConfig* ramp = scenario.ramp ? &*scenario.ramp : nullptr;
  const NoiseConfig* noise = scenario.noise ? &*scenario.noise : nullptr;

  for (long step = 2; step <= scenario.steps; ++step) {
    const double t_old = (step - 2) * tau;
    ArrayXd next = model::step(prev, curr, scenario.params, ramp, noise, &dyn_rng, t_old,
                               &diag, opts);
    if (diag.nonfinite)
      throw NumericalError("run: non-finite density at step " + std::to_string(step) +
                           ", site " + std::to_string(diag.first_bad_site));
    if (diag.negative_sites > 0) {
      traj.negative_events += diag.negative_sites;
      if (traj.first_negative_step < 0) traj.first_negative_step = step;
    }
    prev.swap(curr);
    curr.swap(next);
    record_step(step, curr);
  }
  traj.samples.conservativeResize(sample_row, Eigen::NoChange);
  return traj;
}

ScenarioConfig ramped_scenario(ScenarioConfig base, double rho_start, double hold_seconds,
                               double ramp_rate, double total_seconds) {
  if (!(ramp_rate > 0.0)) throw ValidationError("ramped_scenario: ramp rate must be positive");
  if (!(total_seconds > hold_seconds))
    throw ValidationError("ramped_scenario: run must extend past the hold phase");
  base.params.rho0 = rho_start;
  base.init.kind = InitialCondition::Kind::UniformPerturbed;
  base.init.delta_rho = 0.0;
  base.steps = std::lround(total_seconds / base.params.tau());
  base.ramp_start_seconds = hold_seconds;

  // Mean density gains q_in * schedule / L once per step, i.e. per tau
  // seconds, so q_in = rate * L * tau yields d(rho0)/dt = rate.
  RampConfig ramp;
  ramp.distributed = true;
  ramp.q_in = ramp_rate * base.L * base.params.tau();
  ramp.j_in = 1;
  ramp.schedule.knots = {{hold_seconds, 0.0}, {hold_seconds + 1.0, 1.0}};
  base.ramp = ramp;

  if (!base.noise) base.noise = NoiseConfig{};
  if (base.recorder.sites.empty()) base.recorder.sites = {48, 49, 50, 51, 52};
  base.recorder.sample_interval_seconds = 20.0;
  return base;
}

std::vector<PortraitPoint> phase_portrait(const std::vector<double>& series, long t_lo, long t_hi) {
  if (!(t_hi > t_lo + 1)) throw ValidationError("phase_portrait: window too short");
  if (t_lo < 0 || t_hi >= static_cast<long>(series.size()))
    throw ValidationError("phase_portrait: window outside the recorded series");
  std::vector<PortraitPoint> out;
  out.reserve(t_hi - t_lo);
  for (long t = t_lo + 1; t <= t_hi; ++t)
    out.push_back({series[t], series[t] - series[t - 1]});
  return out;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
  return 0.5 * (hi + v[mid - 1]);
}

}  // namespace

double ring_score(const std::vector<PortraitPoint>& portrait, double halfwidth_frac) {
  if (portrait.size() < 8) throw ValidationError("ring_score: too few portrait points");
  std::vector<double> xs, ys;
  xs.reserve(portrait.size());
  ys.reserve(portrait.size());
  for (const auto& p : portrait) {
    xs.push_back(p.value);
    ys.push_back(p.diff);
  }
  const double cx = median(xs), cy = median(ys);
  std::vector<double> ax, ay;
  ax.reserve(xs.size());
  ay.reserve(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ax.push_back(std::abs(xs[i] - cx));
    ay.push_back(std::abs(ys[i] - cy));
  }
  const double sx = std::max(median(ax), 1e-300);
  const double sy = std::max(median(ay), 1e-300);
  std::vector<double> r;
  r.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    r.push_back(std::hypot((xs[i] - cx) / sx, (ys[i] - cy) / sy));
  const double rbar = median(r);
  long inside = 0;
  for (double ri : r)
    if (std::abs(ri - rbar) <= halfwidth_frac * rbar) ++inside;
  return static_cast<double>(inside) / static_cast<double>(r.size());
}

double spectral_concentration(const std::vector<double>& series) {
  if (series.size() < 16) throw ValidationError("spectral_concentration: series too short");
  const std::size_t n = series.size();
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = series[i] - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, centered);
  std::vector<double> power;
  power.reserve(n / 2);
  double total = 0.0;
  for (std::size_t i = 1; i <= n / 2; ++i) {
    const double p = std::norm(spec[i]);
    power.push_back(p);
    total += p;
  }
  if (total <= 0.0) return 0.0;
  std::partial_sort(power.begin(), power.begin() + std::min<std::size_t>(3, power.size()),
                    power.end(), std::greater<double>());
  double top = 0.0;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, power.size()); ++i) top += power[i];
  return top / total;
}

Classification classify_attractor(const std::vector<PortraitPoint>& portrait,
                                  const std::vector<double>& series,
                                  const ClassifierConfig& cfg) {
  if (series.size() < 32) throw ValidationError("classify_attractor: window too short");
  Classification c;
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  c.amplitude = *hi - *lo;
  if (c.amplitude < cfg.eps_amp) {
    c.type = Attractor::Uniform;
    return c;
  }
  c.ring_score = ring_score(portrait, cfg.annulus_halfwidth_frac);
  c.spectral_concentration = spectral_concentration(series);
  c.type = (c.ring_score >= cfg.ring_threshold && c.spectral_concentration >= cfg.spectral_threshold)
               ? Attractor::Kink
               : Attractor::Chaotic;
  return c;
}

std::optional<double> onset_time(const Trajectory& traj, double baseline_end_seconds,
                                 double factor) {
  std::vector<double> base;
  for (std::size_t i = 0; i < traj.sample_times.size(); ++i)
    if (traj.sample_times[i] < baseline_end_seconds) base.push_back(traj.spatial_std_series[i]);
  if (base.size() < 4) throw ValidationError("onset_time: baseline window has too few samples");
  const double threshold = factor * median(base);
  for (std::size_t i = 0; i < traj.sample_times.size(); ++i)
    if (traj.sample_times[i] >= baseline_end_seconds && traj.spatial_std_series[i] > threshold)
      return traj.sample_times[i];
  return std::nullopt;
}

}  // namespace traffic::sim
