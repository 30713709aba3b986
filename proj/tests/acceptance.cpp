// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Everything runs from the library presets so the numbers
// match the CLI pipelines bit for bit.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <vector>

#include "traffic/ews.hpp"
#include "traffic/mkdv.hpp"
#include "traffic/model.hpp"
#include "traffic/presets.hpp"
#include "traffic/simulate.hpp"
#include "traffic/stability.hpp"

using namespace traffic;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d. %-34s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* spec, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), spec, a, b, c, d);
  return buf;
}

// ---------------------------------------------------------------------------

void criterion_conservation() {
  const auto t0 = std::chrono::steady_clock::now();
  auto scenario = presets::case_scenario(true);
  scenario.recorder.sample_interval_seconds = 20.0;
  const auto traj = sim::run(scenario);
  double worst = 0.0;
  const double m0 = traj.mass_series.front();
  for (double m : traj.mass_series) worst = std::max(worst, std::abs(m - m0) / m0);
  const double elapsed = seconds_since(t0);
  report(1, "conservation over 25200 steps", worst < 1e-10 && elapsed < 5.0,
         fmt("max rel drift %.2e, %.2f s", worst, elapsed));
}

void criterion_dispersion_vs_w2() {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelParams base = presets::reference_params(3.5);
  int checked = 0, agreed = 0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double rho0 = 0.06 + (0.40 - 0.06) * i / 19.0;
      const double a = 0.5 + (20.0 - 0.5) * j / 19.0;
      ModelParams p = base;
      p.rho0 = rho0;
      p.a = a;
      const auto neutral = stability::neutral_a(rho0, p);
      if (!neutral) continue;
      const double margin = (a - *neutral) / *neutral;
      if (std::abs(margin) <= 0.01) continue;
      ++checked;
      const double w2 = stability::linear_coeffs(p).w2;
      auto est = [&](double k) {
        return -std::log(stability::dispersion_max_root(rho0, p, k)) / (p.tau() * k * k);
      };
      const double w2_hat = (4.0 * est(5e-4) - est(1e-3)) / 3.0;
      if ((w2 < 0.0) == (w2_hat < 0.0)) ++agreed;
    }
  }
  const double elapsed = seconds_since(t0);
  report(2, "w2 sign vs small-k growth oracle", agreed == checked && elapsed < 10.0,
         fmt("%.0f/%.0f points agree, %.2f s", static_cast<double>(agreed),
             static_cast<double>(checked), elapsed));
}

void criterion_oracle_vs_simulation() {
  const ModelParams base = presets::reference_params(3.5);
  model::GaussianRng rng(2024);
  int agreed = 0, total = 0;
  while (total < 20) {
    const double rho0 = 0.08 + 0.28 * rng.uniform();
    const double a = 1.0 + 17.0 * rng.uniform();
    ModelParams p = base;
    p.rho0 = rho0;
    p.a = a;
    const auto neutral = stability::neutral_a(rho0, p);
    if (!neutral || !(*neutral > 0.0)) continue;
    if (std::abs((a - *neutral) / *neutral) < 0.01) continue;  // boundary band
    ++total;

    const auto verdict = stability::lattice_verdict(rho0, p, 100);

    sim::ScenarioConfig s;
    s.L = 100;
    s.params = p;
    s.init.delta_rho = 1e-4;
    s.steps = 5000;
    s.recorder.sample_interval_seconds = p.tau();
    s.recorder.sites = {};  // all
    const auto traj = sim::run(s);
    const Eigen::Index last = traj.samples.rows() - 1;
    double amp0 = 0.0, amp1 = 0.0;
    for (int jcol = 0; jcol < 100; ++jcol) {
      amp0 = std::max(amp0, std::abs(traj.samples(0, jcol) - rho0));
      amp1 = std::max(amp1, std::abs(traj.samples(last, jcol) - traj.rho0_series[last]));
    }
    const bool grew = amp1 > amp0;
    if (grew == !verdict.stable) ++agreed;
  }
  report(3, "lattice oracle vs 5000-step runs", agreed >= 19,
         fmt("%.0f/20 agree", static_cast<double>(agreed)));
}

void criterion_kink_chaos() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto kink = presets::run_case(true);
  const double t_kink = seconds_since(t0);
  const auto t1 = std::chrono::steady_clock::now();
  const auto chaos = presets::run_case(false);
  const double t_chaos = seconds_since(t1);

  const bool kink_ok = kink.classification.type == sim::Attractor::Kink &&
                       kink.classification.ring_score >= 0.9;
  const bool chaos_ok = chaos.classification.type == sim::Attractor::Chaotic &&
                        chaos.classification.ring_score < 0.9 &&
                        chaos.classification.spectral_concentration < 0.5;
  report(4, "kink/chaos case reproduction",
         kink_ok && chaos_ok && t_kink < 30.0 && t_chaos < 30.0,
         fmt("ring %.3f/%.3f spectral %.3f/%.3f", kink.classification.ring_score,
             chaos.classification.ring_score, kink.classification.spectral_concentration,
             chaos.classification.spectral_concentration));
}

void criterion_kink_existence() {
  ModelParams p = presets::reference_params(3.0);
  p.gamma = 0.05;
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(p.rhoc + 0.2 * i / 200.0);
  bool produced = false, apex_touch = false;
  try {
    const auto curve = mkdv::coexisting_curve(p, grid);
    produced = curve.size() >= 2;
    double min_gap = 1e9;
    for (const auto& pt : curve) min_gap = std::min(min_gap, std::abs(pt.rho_star - p.rhoc));
    apex_touch = min_gap < 1e-6;
  } catch (const std::exception&) {
  }
  int refused = 0;
  for (double gamma : {1.0 / 14.0, 0.2, 0.4}) {
    ModelParams q = p;
    q.gamma = gamma;
    try {
      mkdv::coexisting_curve(q, grid);
    } catch (const ValidationError&) {
      ++refused;
    }
  }
  report(5, "kink existence boundary", produced && apex_touch && refused == 3,
         fmt("produced=%.0f apex_gap_ok=%.0f refused=%.0f/3", produced ? 1.0 : 0.0,
             apex_touch ? 1.0 : 0.0, static_cast<double>(refused)));
}

void criterion_mkdv_residual() {
  const double r4096 = mkdv::mkdv_residual(1.0, 4096, 30.0);
  const double r2048 = mkdv::mkdv_residual(1.0, 2048, 30.0);
  const double r1024 = mkdv::mkdv_residual(1.0, 1024, 30.0);
  const double order_a = std::log2(r1024 / r2048);
  const double order_b = std::log2(r2048 / r4096);

  ModelParams p = presets::reference_params(3.0);
  p.gamma = 0.05;
  const double tau_c = (1.0 - 2.0 * p.gamma) / (3.0 * mkdv::b_param(p));
  const auto bc = mkdv::b_coeffs(p, tau_c);
  const double mu_star = mkdv::mu(bc);
  const double solv = std::abs(mkdv::solvability_residual(bc, mu_star));
  report(6, "kink residual and solvability",
         r4096 < 1e-6 && order_a > 3.5 && order_b > 3.5 && solv < 1e-6,
         fmt("res %.2e, orders %.2f/%.2f, solv %.2e", r4096, order_a, order_b, solv));
}

void criterion_monotonicity() {
  double prev_apex = 0.0;
  bool apex_up = true;
  for (double B : {1.0, 1.3, 1.6}) {
    ModelParams p;
    p.B = B;
    p.C = 0.7;
    p.gamma = 0.05;
    p.rhoc = 0.2;
    p.rho0 = 0.2;
    p.a = 1.0;
    double apex = 0.0;
    for (int i = 0; i <= 800; ++i) {
      const double rho = 0.05 + (0.5 - 0.05) * i / 800.0;
      const auto na = stability::neutral_a(rho, p);
      if (na) apex = std::max(apex, *na);
    }
    apex_up = apex_up && apex > prev_apex;
    prev_apex = apex;
  }
  bool gamma_up = true;
  double prev = 0.0;
  for (double gamma : {0.05, 0.2, 0.4}) {
    ModelParams p = presets::reference_params(1.0);
    p.gamma = gamma;
    const auto na = stability::neutral_a(0.2, p);
    gamma_up = gamma_up && na && *na > prev;
    if (na) prev = *na;
  }
  report(7, "neutral-curve monotonicity", apex_up && gamma_up,
         fmt("apex_up=%.0f gamma_up=%.0f", apex_up ? 1.0 : 0.0, gamma_up ? 1.0 : 0.0));
}

void criterion_ews_ensemble() {
  const auto t0 = std::chrono::steady_clock::now();
  int tau_ok = 0, alarm_ok = 0, total = 0;
  for (bool kink : {false, true}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto result = presets::run_fig3(kink, seed);
      ++total;
      const auto& r = result.report;
      if (r.tau_variance && *r.tau_variance > 0.0 && r.tau_ac1 && *r.tau_ac1 > 0.0) ++tau_ok;
      if (r.alarm_time && r.onset_time && *r.alarm_time < *r.onset_time) ++alarm_ok;
    }
  }
  const double elapsed = seconds_since(t0);
  report(8, "EWS rise before onset (40 runs)",
         tau_ok >= 36 && alarm_ok >= 32 && elapsed < 300.0,
         fmt("tau>0 %.0f/40, alarm<onset %.0f/40, %.0f s", static_cast<double>(tau_ok),
             static_cast<double>(alarm_ok), elapsed));
}

void criterion_reference_report() {
  const auto j = presets::reference_report();
  bool complete = true;
  for (const char* key : {"closed_form", "growth_oracle", "chained_convention", "reference"})
    complete = complete && j.contains(key);
  complete = complete && std::isfinite(j["closed_form"]["rho_c1"].get<double>()) &&
             std::isfinite(j["closed_form"]["rho_c2"].get<double>()) &&
             std::isfinite(j["closed_form"]["separatrix_ac"].get<double>()) &&
             std::isfinite(j["closed_form"]["rho_c1_rel_diff"].get<double>()) &&
             j["reference"]["rho_c1"].get<double>() == 0.1573 &&
             j["reference"]["rho_c2"].get<double>() == 0.2743 &&
             j["reference"]["separatrix_ac"].get<double>() == 3.93;
  report(9, "critical-parameter report", complete,
         complete ? fmt("rho_c1 %.4f vs 0.1573, rho_c2 %.4f vs 0.2743, a_c %.3f vs 3.93",
                        j["closed_form"]["rho_c1"].get<double>(),
                        j["closed_form"]["rho_c2"].get<double>(),
                        j["closed_form"]["separatrix_ac"].get<double>())
                  : "incomplete report");
}

void criterion_affine_invariance() {
  model::GaussianRng rng(515);
  int ok = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const int n = 10 + static_cast<int>(rng.uniform() * 90);
    std::vector<double> w(n), mapped(n);
    for (auto& v : w) v = rng.normal() * (0.5 + rng.uniform());
    const double lambda = 0.1 + 3.0 * rng.uniform();
    const double shift = -5.0 + 10.0 * rng.uniform();
    for (int i = 0; i < n; ++i) mapped[i] = lambda * w[i] + shift;
    std::vector<double> times(n);
    for (int i = 0; i < n; ++i) times[i] = 20.0 * i;
    const auto a = ews::rolling_indicators(w, times, n, 1).windows[0];
    const auto b = ews::rolling_indicators(mapped, times, n, 1).windows[0];
    bool good = std::abs(b.variance - lambda * lambda * a.variance) <=
                1e-9 * std::max(1.0, lambda * lambda * a.variance);
    if (a.ac1 && b.ac1) good = good && std::abs(*a.ac1 - *b.ac1) < 1e-9;
    if (a.skewness && b.skewness) good = good && std::abs(*a.skewness - *b.skewness) < 1e-9;
    if (a.kurtosis && b.kurtosis) {
      good = good && std::abs(*a.kurtosis - *b.kurtosis) < 1e-9;
      good = good && *a.kurtosis >= *a.skewness * *a.skewness + 1.0 - 1e-9;
    }
    if (good) ++ok;
  }
  report(10, "indicator affine invariance", ok == trials,
         fmt("%.0f/%.0f windows", static_cast<double>(ok), static_cast<double>(trials)));
}

}  // namespace

int main() {
  std::printf("acceptance suite\n----------------\n");
  criterion_conservation();
  criterion_dispersion_vs_w2();
  criterion_oracle_vs_simulation();
  criterion_kink_chaos();
  criterion_kink_existence();
  criterion_mkdv_residual();
  criterion_monotonicity();
  criterion_ews_ensemble();
  criterion_reference_report();
  criterion_affine_invariance();
  std::printf("----------------\n%s\n", failures == 0 ? "all criteria passed"
                                                      : "some criteria FAILED");
  return failures == 0 ? 0 : 1;
}
