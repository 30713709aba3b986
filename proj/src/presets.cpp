#include "traffic/presets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "traffic/config.hpp"
#include "traffic/csv.hpp"
#include "traffic/exports.hpp"
#include "traffic/manifest.hpp"
#include "traffic/model.hpp"
#include "traffic/svg.hpp"

namespace traffic::presets {

using nlohmann::json;

namespace {

// Published reference constants for B=1.6, C=0.7, gamma=0.4: band edges at
// a = 3.93 and the kink/chaos separatrix.
constexpr double kRefRhoC1 = 0.1573;
constexpr double kRefRhoC2 = 0.2743;
constexpr double kRefAc = 3.93;

// Ramped-run calibration shared by the fig3 presets.
constexpr double kFig3HoldSeconds = 7200.0;
constexpr double kFig3Rate = 1.8e-5;        // mean density per second
constexpr double kFig3TotalSeconds = 19200.0;
constexpr double kFig3DynSigma = 1e-5;      // dynamics noise per site per step
constexpr double kFig3SensorSigma = 1e-3;   // detector read noise per sample

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

}  // namespace

ModelParams reference_params(double a) {
  ModelParams p;
  p.B = 1.6;
  p.C = 0.7;
  p.gamma = 0.4;
  p.rho0 = 0.2;
  p.rhoc = 0.2;
  p.a = a;
  return p;
}

sim::ScenarioConfig case_scenario(bool kink, long steps) {
  sim::ScenarioConfig s;
  s.L = 100;
  s.params = reference_params(kink ? 3.5 : 5.0);
  s.init.kind = sim::InitialCondition::Kind::UniformPerturbed;
  s.init.delta_rho = 0.05;
  s.steps = steps;
  s.recorder.sample_interval_seconds = 20.0;
  s.recorder.every_step_sites = {50};
  s.recorder.record_full_field_every = 1;
  s.recorder.record_full_field_from = std::max<long>(0, steps - 200);
  return s;
}

sim::ScenarioConfig fig3_scenario(bool kink, std::uint64_t seed) {
  sim::ScenarioConfig base;
  base.L = 100;
  base.params = reference_params(kink ? 3.5 : 5.0);
  NoiseConfig noise;
  noise.sigma = kFig3DynSigma;
  noise.zero_mean_projection = true;
  noise.seed = seed;
  base.noise = noise;
  base.recorder.sensor_noise_sigma = kFig3SensorSigma;
  base.recorder.record_full_field_every = 2000;
  sim::ScenarioConfig s = sim::ramped_scenario(std::move(base), 0.01, kFig3HoldSeconds,
                                               kFig3Rate, kFig3TotalSeconds);
  s.recorder.sites.clear();  // record the whole ring; the probe picks 48..52
  return s;
}

ews::PipelineConfig fig3_ews_config() {
  ews::PipelineConfig cfg;
  cfg.alarm.eval_start_seconds = kFig3HoldSeconds;
  return cfg;
}

CaseResult run_case(bool kink, long steps) {
  CaseResult out;
  out.trajectory = sim::run(case_scenario(kink, steps));
  const auto& series = out.trajectory.per_step_series.at(50);
  const long t_lo = std::min<long>(16000, 2 * steps / 3);
  out.portrait = sim::phase_portrait(series, t_lo, steps);
  const long w_lo = 2 * steps / 3;
  std::vector<double> window(series.begin() + w_lo, series.end());
  const auto window_portrait = sim::phase_portrait(series, w_lo, steps);
  out.classification = sim::classify_attractor(window_portrait, window);
  return out;
}

Fig3Result run_fig3(bool kink, std::uint64_t seed) {
  Fig3Result out;
  out.trajectory = sim::run(fig3_scenario(kink, seed));
  out.probe = ews::extract_probe(out.trajectory);
  const auto onset = sim::onset_time(out.trajectory, kFig3HoldSeconds);
  out.report = ews::analyze(out.probe, fig3_ews_config(), onset);
  return out;
}

json reference_report() {
  const ModelParams p = reference_params(3.93);
  const auto closed = stability::critical_densities(p.a, p);
  const double ac = stability::separatrix_ac(p);

  // Band edges from the exact growth oracle on a 512-point wavenumber grid.
  auto max_growth = [&](double rho) {
    double mg = 1.0;
    for (int i = 1; i <= 512; ++i)
      mg = std::max(mg, stability::dispersion_max_root(rho, p, M_PI * i / 512.0));
    return mg - (1.0 + 1e-12);
  };
  double o1 = 0.0, o2 = 0.0;
  {
    std::vector<double> roots;
    double prev_rho = 0.02, prev = max_growth(prev_rho);
    for (int i = 1; i <= 600; ++i) {
      const double rho = 0.02 + (1.0 - 0.02) * i / 600.0;
      const double cur = max_growth(rho);
      if ((prev < 0) != (cur < 0)) {
        double lo = prev_rho, hi = rho, flo = prev;
        while (hi - lo > 1e-10) {
          const double mid = 0.5 * (lo + hi);
          const double fm = max_growth(mid);
          if ((flo < 0) == (fm < 0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        roots.push_back(0.5 * (lo + hi));
      }
      prev_rho = rho;
      prev = cur;
    }
    if (roots.size() >= 2) {
      o1 = roots.front();
      o2 = roots.back();
    }
  }

  // The same quantities under the alternative derivative convention, where
  // the slope of the optimal-velocity law is chained through the
  // area-occupancy scaling (argument B*rho0, inner factor -B/rho0^2).
  auto neutral_alt = [&](double rho) {
    const double vp = model::ov_derivative(rho, p.rhoc, p.B, 1);
    return -3.0 * rho * rho * p.B * p.C * vp / (1.0 - 2.0 * p.gamma);
  };
  double a1 = 0.0, a2 = 0.0;
  {
    std::vector<double> roots;
    double prev_rho = 0.01, prev = neutral_alt(prev_rho) - p.a;
    for (int i = 1; i <= 2000; ++i) {
      const double rho = 0.01 + (1.0 - 0.01) * i / 2000.0;
      const double cur = neutral_alt(rho) - p.a;
      if ((prev < 0) != (cur < 0)) {
        double lo = prev_rho, hi = rho, flo = prev;
        while (hi - lo > 1e-12) {
          const double mid = 0.5 * (lo + hi);
          const double fm = neutral_alt(mid) - p.a;
          if ((flo < 0) == (fm < 0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        roots.push_back(0.5 * (lo + hi));
      }
      prev_rho = rho;
      prev = cur;
    }
    if (roots.size() >= 2) {
      a1 = roots.front();
      a2 = roots.back();
    }
  }
  const double ac_alt =
      -3.5 * p.B * p.rhoc * p.rhoc * p.C * model::ov_derivative(p.rhoc, p.rhoc, p.B, 1);

  auto rel = [](double computed, double ref) { return (computed - ref) / ref; };
  json j;
  j["params"] = config::to_json(p);
  j["closed_form"] = {{"rho_c1", closed.rho_c1},
                      {"rho_c2", closed.rho_c2},
                      {"separatrix_ac", ac},
                      {"rho_c1_rel_diff", rel(closed.rho_c1, kRefRhoC1)},
                      {"rho_c2_rel_diff", rel(closed.rho_c2, kRefRhoC2)},
                      {"separatrix_ac_rel_diff", rel(ac, kRefAc)}};
  j["growth_oracle"] = {{"rho_c1", o1},
                        {"rho_c2", o2},
                        {"rho_c1_rel_diff", rel(o1, kRefRhoC1)},
                        {"rho_c2_rel_diff", rel(o2, kRefRhoC2)}};
  j["chained_convention"] = {{"rho_c1_scaled", a1 * p.B},
                             {"rho_c2_scaled", a2 * p.B},
                             {"separatrix_ac", ac_alt},
                             {"separatrix_ac_rel_diff", rel(ac_alt, kRefAc)}};
  j["reference"] = {{"rho_c1", kRefRhoC1}, {"rho_c2", kRefRhoC2}, {"separatrix_ac", kRefAc}};
  return j;
}

namespace {

void heatmap_from_snapshots(svg::Panel& panel, const sim::Trajectory& traj) {
  const Eigen::Index rows = static_cast<Eigen::Index>(traj.snapshots.size());
  if (rows == 0) return;
  const Eigen::Index L = traj.snapshots.front().second.size();
  Eigen::MatrixXd m(rows, L);
  for (Eigen::Index r = 0; r < rows; ++r) m.row(r) = traj.snapshots[r].second.transpose();
  // First snapshot maps to the bottom row of the drawn map.
  m = m.colwise().reverse().eval();
  panel.set_heatmap(std::move(m), 1.0, static_cast<double>(L),
                    traj.snapshots.front().first * traj.tau,
                    traj.snapshots.back().first * traj.tau);
  panel.xlabel = "site";
  panel.ylabel = "t (s)";
}

json run_fig2a_or_b(const std::string& preset, manifest::Run& run) {
  const bool is_a = preset == "fig2a";
  ModelParams base;
  base.C = 0.7;
  base.rhoc = 0.2;
  base.rho0 = 0.2;
  base.a = 3.5;  // placeholder; curves do not depend on it
  std::vector<double> values = is_a ? std::vector<double>{1.0, 1.3, 1.6}
                                    : std::vector<double>{0.05, 0.2, 0.4};
  json summary;
  summary["preset"] = preset;
  svg::Panel panel;
  panel.title = is_a ? "neutral and coexisting curves by area occupancy"
                     : "neutral and coexisting curves by passing rate";
  panel.xlabel = "rho_star";
  panel.ylabel = "a";
  const char* colors[3] = {"#1f77b4", "#2ca02c", "#d62728"};
  json refused = json::array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    ModelParams p = base;
    if (is_a) {
      p.B = values[i];
      p.gamma = 0.05;
    } else {
      p.B = 1.6;
      p.gamma = values[i];
    }
    const std::string tag = (is_a ? "B" : "gamma") + std::string("_") + csv::fmt(values[i]);
    const auto curve = stability::neutral_curve(p, 0.08, 0.45, 300);
    const std::string curve_file = "neutral_" + tag + ".csv";
    exports::curve_csv(run.path(curve_file), curve);
    run.add_output(curve_file);
    std::vector<double> xs, ys;
    for (const auto& [x, y] : curve) {
      xs.push_back(x);
      ys.push_back(y);
    }
    panel.add_line(xs, ys, colors[i % 3], (is_a ? "B=" : "gamma=") + csv::fmt(values[i]));

    if (mkdv::kink_exists(p.gamma)) {
      const auto coexist = mkdv::coexisting_curve(p, linspace(p.rhoc, 0.42, 200));
      const std::string cfile = "coexisting_" + tag + ".csv";
      exports::coexist_csv(run.path(cfile), coexist);
      run.add_output(cfile);
      std::vector<double> cxm, cym, cxp, cyp;
      for (const auto& pt : coexist) {
        if (pt.branch < 0) {
          cxm.push_back(pt.rho_star);
          cym.push_back(pt.a);
        } else {
          cxp.push_back(pt.rho_star);
          cyp.push_back(pt.a);
        }
      }
      panel.add_line(cxm, cym, colors[i % 3], "", true);
      panel.add_line(cxp, cyp, colors[i % 3], "", true);
    } else {
      refused.push_back(tag);
    }
  }
  summary["coexisting_refused"] = refused;
  svg::write(run.path(preset + ".svg"), {panel});
  run.add_output(preset + ".svg");
  return summary;
}

json run_fig2c(manifest::Run& run) {
  json summary;
  summary["preset"] = "fig2c";
  std::vector<svg::Panel> panels;
  for (double gamma : {0.05, 0.4}) {
    ModelParams fixed;
    fixed.C = 0.7;
    fixed.rhoc = 0.2;
    fixed.gamma = gamma;
    fixed.a = 3.5;
    stability::SweepAxis x{"rho0", 0.08, 0.45, 80};
    stability::SweepAxis y{"B", 1.0, 2.0, 60};
    const auto points = stability::sweep(x, y, fixed);
    const std::string file = "sweep_gamma_" + csv::fmt(gamma) + ".csv";
    exports::sweep_csv(run.path(file), points);
    run.add_output(file);
    svg::Panel panel;
    panel.title = "neutral sensitivity, gamma=" + csv::fmt(gamma);
    Eigen::MatrixXd m(y.n, x.n);
    for (int iy = 0; iy < y.n; ++iy)
      for (int ix = 0; ix < x.n; ++ix) {
        const auto& pt = points[iy * x.n + ix];
        m(y.n - 1 - iy, ix) = pt.neutral ? *pt.neutral : 0.0;
      }
    panel.set_heatmap(std::move(m), x.lo, x.hi, y.lo, y.hi);
    panel.xlabel = "rho_star";
    panel.ylabel = "B";
    panels.push_back(std::move(panel));
  }
  svg::write(run.path("fig2c.svg"), panels, 2);
  run.add_output("fig2c.svg");
  return summary;
}

json run_fig2d(manifest::Run& run) {
  json summary;
  summary["preset"] = "fig2d";
  ModelParams fixed;
  fixed.B = 1.6;
  fixed.C = 0.7;
  fixed.rho0 = 0.2;
  fixed.rhoc = 0.2;
  fixed.a = 3.5;
  stability::SweepAxis x{"gamma", 0.0, 0.49, 50};
  stability::SweepAxis y{"a", 0.5, 20.0, 40};
  const auto points = stability::sweep(x, y, fixed);
  exports::sweep_csv(run.path("sweep_gamma_a.csv"), points);
  run.add_output("sweep_gamma_a.csv");

  svg::Panel panel;
  panel.title = "kink/chaos regions in the (gamma, a) plane";
  panel.xlabel = "gamma";
  panel.ylabel = "a";
  std::vector<double> gx, gy_neutral, gy_sep;
  for (int i = 0; i < 200; ++i) {
    ModelParams p = fixed;
    p.gamma = 0.49 * i / 199.0;
    gx.push_back(p.gamma);
    const auto na = stability::neutral_a(p.rho0, p);
    gy_neutral.push_back(na ? *na : std::numeric_limits<double>::quiet_NaN());
    gy_sep.push_back(stability::separatrix_ac(p));
  }
  panel.add_line(gx, gy_neutral, "#1f77b4", "neutral a");
  panel.add_line(gx, gy_sep, "#d62728", "separatrix a_c", true);
  std::vector<double> kx, ky, cx2, cy2;
  for (const auto& pt : points) {
    if (!pt.unstable) continue;
    if (pt.y < pt.separatrix) {
      kx.push_back(pt.x);
      ky.push_back(pt.y);
    } else {
      cx2.push_back(pt.x);
      cy2.push_back(pt.y);
    }
  }
  panel.add_scatter(kx, ky, "#2ca02c", "kink", 2.0);
  panel.add_scatter(cx2, cy2, "#9467bd", "chaotic", 2.0);
  svg::write(run.path("fig2d.svg"), {panel});
  run.add_output("fig2d.svg");
  summary["separatrix_at_reference"] = stability::separatrix_ac(fixed);
  return summary;
}

json run_fig4(const std::string& preset, manifest::Run& run) {
  const bool kink = preset == "fig4-kink";
  CaseResult result = run_case(kink);
  json summary;
  summary["preset"] = preset;

  exports::field_csv(run.path("field.csv"), result.trajectory);
  run.add_output("field.csv");
  exports::snapshots_csv(run.path("snapshots.csv"), result.trajectory);
  run.add_output("snapshots.csv");
  exports::series_csv(run.path("site50_series.csv"), result.trajectory.per_step_series.at(50),
                      result.trajectory.tau);
  run.add_output("site50_series.csv");
  exports::portrait_csv(run.path("portrait.csv"), result.portrait);
  run.add_output("portrait.csv");

  svg::Panel heat;
  heat.title = "density waves, late window";
  heatmap_from_snapshots(heat, result.trajectory);

  svg::Panel profile;
  profile.title = "final density profile";
  profile.xlabel = "site";
  profile.ylabel = "rho_star";
  const auto& last = result.trajectory.snapshots.back().second;
  std::vector<double> sx(last.size()), sy(last.size());
  for (Eigen::Index j = 0; j < last.size(); ++j) {
    sx[j] = j + 1;
    sy[j] = last[j];
  }
  profile.add_line(sx, sy, "#1f77b4");

  svg::Panel portrait;
  portrait.title = "phase portrait, steps 16000..25200";
  portrait.xlabel = "rho_star(t)";
  portrait.ylabel = "rho_star(t) - rho_star(t-1)";
  std::vector<double> px, py;
  for (const auto& p : result.portrait) {
    px.push_back(p.value);
    py.push_back(p.diff);
  }
  portrait.add_scatter(px, py, "#d62728", "", 1.2);

  svg::write(run.path("heatmap.svg"), {heat});
  run.add_output("heatmap.svg");
  svg::write(run.path("profile.svg"), {profile});
  run.add_output("profile.svg");
  svg::write(run.path("portrait.svg"), {portrait});
  run.add_output("portrait.svg");

  const auto& c = result.classification;
  summary["classification"] = c.type == sim::Attractor::Kink      ? "Kink"
                              : c.type == sim::Attractor::Chaotic ? "Chaotic"
                                                                  : "Uniform";
  summary["ring_score"] = c.ring_score;
  summary["spectral_concentration"] = c.spectral_concentration;
  summary["amplitude"] = c.amplitude;
  summary["mass_drift_rel"] =
      (result.trajectory.mass_series.back() - result.trajectory.mass_series.front()) /
      result.trajectory.mass_series.front();
  return summary;
}

json run_fig3_pipeline(const std::string& preset, std::uint64_t seed, manifest::Run& run) {
  const bool kink = preset == "fig3-kink";
  Fig3Result result = run_fig3(kink, seed);
  json summary;
  summary["preset"] = preset;
  summary["seed"] = seed;

  exports::probe_csv(run.path("probe.csv"), result.probe);
  run.add_output("probe.csv");
  exports::snapshots_csv(run.path("snapshots.csv"), result.trajectory);
  run.add_output("snapshots.csv");
  exports::report_csv(run.path("report.csv"), result.report);
  run.add_output("report.csv");

  svg::Panel heat;
  heat.title = "ramped run: density evolution";
  heatmap_from_snapshots(heat, result.trajectory);
  svg::write(run.path("heatmap.svg"), {heat});
  run.add_output("heatmap.svg");

  svg::Panel probe_panel;
  probe_panel.title = "probe: mean density over sites 48..52";
  probe_panel.xlabel = "t (s)";
  probe_panel.ylabel = "rho_star";
  probe_panel.add_line(result.probe.times, result.probe.values, "#1f77b4");
  svg::write(run.path("probe.svg"), {probe_panel});
  run.add_output("probe.svg");

  const char* names[4] = {"variance", "lag-1 autocorrelation", "skewness", "kurtosis"};
  std::vector<svg::Panel> panels(4);
  for (int i = 0; i < 4; ++i) {
    panels[i].title = names[i];
    panels[i].xlabel = "t (s)";
    std::vector<double> xs, ys;
    for (const auto& w : result.report.windows) {
      const std::optional<double> v = i == 0   ? std::optional<double>(w.variance)
                                      : i == 1 ? w.ac1
                                      : i == 2 ? w.skewness
                                               : w.kurtosis;
      if (!v) continue;
      xs.push_back(w.t_center);
      ys.push_back(*v);
    }
    panels[i].add_line(xs, ys, "#1f77b4");
  }
  svg::write(run.path("indicators.svg"), panels, 2);
  run.add_output("indicators.svg");

  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) summary[key] = *v;
    else summary[key] = nullptr;
  };
  put("kendall_tau_variance", result.report.tau_variance);
  put("kendall_tau_ac1", result.report.tau_ac1);
  put("kendall_tau_skewness", result.report.tau_skewness);
  put("kendall_tau_kurtosis", result.report.tau_kurtosis);
  put("alarm_time", result.report.alarm_time);
  put("onset_time", result.report.onset_time);
  summary["negative_density_events"] = result.trajectory.negative_events;
  return summary;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig2a",     "fig2b",        "fig2c",
                                                 "fig2d",     "fig3-kink",    "fig3-chaotic",
                                                 "fig4-kink", "fig4-chaotic", "reference-report"};
  return names;
}

json run_pipeline(const std::string& preset, std::uint64_t seed, const std::string& out_dir) {
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), preset) == names.end())
    throw ValidationError("pipeline: unknown preset '" + preset + "'");

  json cfg;
  cfg["preset"] = preset;
  cfg["seed"] = seed;
  if (preset == "fig4-kink" || preset == "fig4-chaotic")
    cfg["scenario"] = config::to_json(case_scenario(preset == "fig4-kink"));
  if (preset == "fig3-kink" || preset == "fig3-chaotic") {
    cfg["scenario"] = config::to_json(fig3_scenario(preset == "fig3-kink", seed));
    cfg["ews"] = config::to_json(fig3_ews_config());
  }
  manifest::Run run(out_dir, cfg, seed);

  json summary;
  if (preset == "fig2a" || preset == "fig2b") summary = run_fig2a_or_b(preset, run);
  else if (preset == "fig2c") summary = run_fig2c(run);
  else if (preset == "fig2d") summary = run_fig2d(run);
  else if (preset == "fig4-kink" || preset == "fig4-chaotic") summary = run_fig4(preset, run);
  else if (preset == "fig3-kink" || preset == "fig3-chaotic")
    summary = run_fig3_pipeline(preset, seed, run);
  else {
    summary = reference_report();
    summary["preset"] = preset;
    std::ofstream txt(run.path("report.txt"));
    txt << "critical parameters at B=1.6 C=0.7 gamma=0.4 a=3.93\n"
        << "  closed form:   rho_c1=" << summary["closed_form"]["rho_c1"].get<double>()
        << " rho_c2=" << summary["closed_form"]["rho_c2"].get<double>()
        << " a_c=" << summary["closed_form"]["separatrix_ac"].get<double>() << "\n"
        << "  growth oracle: rho_c1=" << summary["growth_oracle"]["rho_c1"].get<double>()
        << " rho_c2=" << summary["growth_oracle"]["rho_c2"].get<double>() << "\n"
        << "  reference:     rho_c1=" << kRefRhoC1 << " rho_c2=" << kRefRhoC2
        << " a_c=" << kRefAc << "\n"
        << "  rel diff:      rho_c1="
        << summary["closed_form"]["rho_c1_rel_diff"].get<double>()
        << " rho_c2=" << summary["closed_form"]["rho_c2_rel_diff"].get<double>()
        << " a_c=" << summary["closed_form"]["separatrix_ac_rel_diff"].get<double>() << "\n";
    txt.close();
    run.add_output("report.txt");
  }

  std::ofstream out(run.path("summary.json"));
  out << summary.dump(2) << '\n';
  out.close();
  run.add_output("summary.json");
  run.finalize();
  return summary;
}

}  // namespace traffic::presets
