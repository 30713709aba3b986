#include <doctest.h>

#include <cmath>

#include "traffic/simulate.hpp"

using namespace traffic;
using Eigen::ArrayXd;

TEST_CASE("perturbed initial condition") {
  const auto [prev, curr] = sim::init_perturbed(0.2, 0.05, 100);
  CHECK(prev.size() == 100);
  CHECK(prev[48] == doctest::Approx(0.25).epsilon(1e-15));  // 1-based site 49
  CHECK(prev[49] == doctest::Approx(0.15).epsilon(1e-15));  // 1-based site 50
  for (int j = 0; j < 100; ++j) {
    if (j != 48 && j != 49) CHECK(prev[j] == 0.2);
    CHECK(prev[j] == curr[j]);
  }
  CHECK(prev.sum() == doctest::Approx(20.0).epsilon(1e-14));
  // Mass neutrality for any perturbation size.
  const auto [p2, c2] = sim::init_perturbed(0.13, 0.011, 50);
  CHECK(p2.sum() == doctest::Approx(50 * 0.13).epsilon(1e-13));
  CHECK_THROWS_AS(sim::init_perturbed(0.2, 0.05, 99), ValidationError);
}

TEST_CASE("zero perturbation stays uniform forever") {
  sim::ScenarioConfig s;
  s.L = 20;
  s.steps = 200;
  s.init.delta_rho = 0.0;
  s.recorder.sample_interval_seconds = s.params.tau();
  const auto traj = sim::run(s);
  for (std::size_t r = 0; r < traj.sample_times.size(); ++r)
    for (int c = 0; c < 20; ++c) CHECK(traj.samples(r, c) == 0.2);
}

TEST_CASE("runs are deterministic for a fixed seed") {
  sim::ScenarioConfig s;
  s.L = 32;
  s.steps = 500;
  NoiseConfig noise;
  noise.sigma = 1e-4;
  noise.seed = 777;
  s.noise = noise;
  s.recorder.sample_interval_seconds = s.params.tau();
  const auto a = sim::run(s);
  const auto b = sim::run(s);
  REQUIRE(a.samples.rows() == b.samples.rows());
  CHECK((a.samples - b.samples).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("projected noise keeps the recorded mass constant") {
  sim::ScenarioConfig s;
  s.L = 50;
  s.steps = 5000;
  NoiseConfig noise;
  noise.sigma = 1e-4;
  noise.zero_mean_projection = true;
  noise.seed = 5;
  s.noise = noise;
  const auto traj = sim::run(s);
  const double m0 = traj.mass_series.front();
  for (double m : traj.mass_series) CHECK(std::abs(m - m0) / m0 < 1e-10);
}

TEST_CASE("rotating the initial condition rotates the snapshots") {
  const int L = 24, shift = 7;
  sim::ScenarioConfig s;
  s.L = L;
  s.steps = 300;
  s.init.kind = sim::InitialCondition::Kind::Explicit;
  ArrayXd base = ArrayXd::Constant(L, 0.2);
  base[3] = 0.26;
  base[4] = 0.14;
  s.init.values = base;
  s.recorder.record_full_field_every = 100;
  const auto plain = sim::run(s);

  ArrayXd rotated(L);
  for (int j = 0; j < L; ++j) rotated[(j + shift) % L] = base[j];
  s.init.values = rotated;
  const auto shifted = sim::run(s);

  REQUIRE(plain.snapshots.size() == shifted.snapshots.size());
  for (std::size_t i = 0; i < plain.snapshots.size(); ++i) {
    const auto& [step_a, field_a] = plain.snapshots[i];
    const auto& [step_b, field_b] = shifted.snapshots[i];
    CHECK(step_a == step_b);
    for (int j = 0; j < L; ++j)
      CHECK(field_b[(j + shift) % L] == doctest::Approx(field_a[j]).epsilon(1e-12));
  }
}

TEST_CASE("distributed ramp raises the mean at the configured rate") {
  sim::ScenarioConfig base;
  base.L = 40;
  base.params.a = 5.0;
  auto s = sim::ramped_scenario(base, 0.01, 100.0, 2e-5, 500.0);
  s.noise->sigma = 0.0;
  s.recorder.sample_interval_seconds = 20.0;
  const auto traj = sim::run(s);
  // After the hold the mean climbs linearly: slope = q_in / (L tau).
  const double expected_slope = 2e-5;
  const std::size_t n = traj.sample_times.size();
  const double t1 = traj.sample_times[n - 6], t2 = traj.sample_times[n - 1];
  const double r1 = traj.rho0_series[n - 6], r2 = traj.rho0_series[n - 1];
  CHECK((r2 - r1) / (t2 - t1) == doctest::Approx(expected_slope).epsilon(1e-6));
  // Doubling the inflow doubles the slope.
  auto s2 = s;
  s2.ramp->q_in *= 2.0;
  const auto traj2 = sim::run(s2);
  const double d1 = traj2.rho0_series[n - 6], d2 = traj2.rho0_series[n - 1];
  CHECK((d2 - d1) / (t2 - t1) == doctest::Approx(2.0 * expected_slope).epsilon(1e-6));
  // Before the ramp starts the mean holds at the start value.
  CHECK(traj.rho0_series[2] == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("non-finite densities abort with a located error") {
  sim::ScenarioConfig s;
  s.L = 4;
  s.steps = 10;
  s.init.kind = sim::InitialCondition::Kind::Explicit;
  s.init.values = ArrayXd::Constant(4, 1e308);
  s.recorder.sample_interval_seconds = s.params.tau();
  CHECK_THROWS_AS(sim::run(s), NumericalError);
}

TEST_CASE("phase portrait windows and degenerate series") {
  std::vector<double> constant(100, 0.7);
  const auto flat = sim::phase_portrait(constant, 10, 80);
  for (const auto& p : flat) {
    CHECK(p.value == 0.7);
    CHECK(p.diff == 0.0);
  }
  std::vector<double> alternating(100);
  for (int i = 0; i < 100; ++i) alternating[i] = i % 2 == 0 ? 0.1 : 0.3;
  const auto two = sim::phase_portrait(alternating, 0, 99);
  for (const auto& p : two) {
    CHECK((p.value == 0.1 || p.value == 0.3));
    CHECK(std::abs(p.diff) == doctest::Approx(0.2).epsilon(1e-15));
  }
  CHECK_THROWS_AS(sim::phase_portrait(constant, 50, 51), ValidationError);
  CHECK_THROWS_AS(sim::phase_portrait(constant, 0, 100), ValidationError);
}

TEST_CASE("classifier separates flat, periodic and noisy series") {
  std::vector<double> series(4000);
  // Uniform: tiny amplitude.
  for (int i = 0; i < 4000; ++i) series[i] = 0.2 + 1e-6 * std::sin(0.01 * i);
  auto portrait = sim::phase_portrait(series, 0, 3999);
  auto c = sim::classify_attractor(portrait, series);
  CHECK(c.type == sim::Attractor::Uniform);

  // Clean oscillation: ring-like portrait, concentrated spectrum.
  for (int i = 0; i < 4000; ++i) series[i] = 0.2 + 0.05 * std::sin(2.0 * M_PI * i / 40.0);
  portrait = sim::phase_portrait(series, 0, 3999);
  c = sim::classify_attractor(portrait, series);
  CHECK(c.type == sim::Attractor::Kink);
  CHECK(c.ring_score >= 0.9);
  CHECK(c.spectral_concentration >= 0.5);

  // White noise: dispersed cloud, broadband spectrum.
  model::GaussianRng rng(4);
  for (int i = 0; i < 4000; ++i) series[i] = 0.2 + 0.05 * rng.normal();
  portrait = sim::phase_portrait(series, 0, 3999);
  c = sim::classify_attractor(portrait, series);
  CHECK(c.type == sim::Attractor::Chaotic);
  CHECK(c.ring_score < 0.9);
}

TEST_CASE("onset time from the spatial-std series") {
  sim::Trajectory traj;
  traj.tau = 0.2;
  for (int i = 0; i < 100; ++i) {
    traj.sample_times.push_back(20.0 * i);
    traj.spatial_std_series.push_back(i < 60 ? 1e-4 : (i - 59) * 2e-3);
    traj.rho0_series.push_back(0.1);
    traj.mass_series.push_back(10.0);
  }
  const auto onset = sim::onset_time(traj, 400.0);
  REQUIRE(onset.has_value());
  CHECK(*onset == doctest::Approx(20.0 * 60).epsilon(1e-12));
  sim::Trajectory quiet = traj;
  for (auto& v : quiet.spatial_std_series) v = 1e-4;
  CHECK(!sim::onset_time(quiet, 400.0).has_value());
}
