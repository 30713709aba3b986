// Command-line front end: scenario simulation, stability sweeps, early
// warning analysis and the figure-reproduction pipelines.
#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "traffic/config.hpp"
#include "traffic/exports.hpp"
#include "traffic/manifest.hpp"
#include "traffic/mkdv.hpp"
#include "traffic/presets.hpp"
#include "traffic/svg.hpp"

namespace {

using nlohmann::json;
using namespace traffic;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

std::string default_out_dir() {
  const char* env = std::getenv("TRAFFIC_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : "out";
}

int cmd_simulate(const std::string& config_path, std::uint64_t seed_override, bool has_seed,
                 const std::string& out_dir, bool validate_only) {
  json doc = config_path.empty() ? config::default_scenario() : config::load_file(config_path);
  sim::ScenarioConfig scenario = config::scenario_from_json(doc);
  if (has_seed) {
    if (!scenario.noise) scenario.noise = NoiseConfig{};
    scenario.noise->seed = seed_override;
  }
  scenario.validate();
  if (validate_only) {
    std::cout << "configuration is valid\n";
    return kExitOk;
  }

  manifest::Run run(out_dir, config::to_json(scenario),
                    scenario.noise ? scenario.noise->seed : 0);
  sim::Trajectory traj = sim::run(scenario);
  exports::field_csv(run.path("field.csv"), traj);
  run.add_output("field.csv");
  if (!traj.snapshots.empty()) {
    exports::snapshots_csv(run.path("snapshots.csv"), traj);
    run.add_output("snapshots.csv");
    svg::Panel heat;
    heat.title = "density evolution";
    const Eigen::Index rows = static_cast<Eigen::Index>(traj.snapshots.size());
    const Eigen::Index L = traj.snapshots.front().second.size();
    if (rows >= 2) {
      Eigen::MatrixXd m(rows, L);
      for (Eigen::Index r = 0; r < rows; ++r)
        m.row(rows - 1 - r) = traj.snapshots[r].second.transpose();
      heat.set_heatmap(std::move(m), 1.0, static_cast<double>(L),
                       traj.snapshots.front().first * traj.tau,
                       traj.snapshots.back().first * traj.tau);
      heat.xlabel = "site";
      heat.ylabel = "t (s)";
      svg::write(run.path("heatmap.svg"), {heat});
      run.add_output("heatmap.svg");
    }
  }

  json summary;
  summary["steps"] = traj.steps;
  summary["mass_first"] = traj.mass_series.front();
  summary["mass_last"] = traj.mass_series.back();
  summary["negative_density_events"] = traj.negative_events;
  if (traj.per_step_series.count(50) != 0u && traj.steps >= 3000) {
    const auto& series = traj.per_step_series.at(50);
    const long w_lo = 2 * traj.steps / 3;
    std::vector<double> window(series.begin() + w_lo, series.end());
    const auto portrait = sim::phase_portrait(series, w_lo, traj.steps);
    const auto c = sim::classify_attractor(portrait, window);
    summary["classification"] = c.type == sim::Attractor::Kink      ? "Kink"
                                : c.type == sim::Attractor::Chaotic ? "Chaotic"
                                                                    : "Uniform";
    summary["ring_score"] = c.ring_score;
    summary["spectral_concentration"] = c.spectral_concentration;
  }
  std::ofstream s(run.path("summary.json"));
  s << summary.dump(2) << '\n';
  s.close();
  run.add_output("summary.json");
  run.finalize();
  std::cout << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_stability(const std::string& sweep_spec, bool reference, const std::string& out_dir) {
  if (reference) {
    manifest::Run run(out_dir, json{{"report", "reference"}}, 0);
    json report = presets::reference_report();
    std::ofstream out(run.path("reference_report.json"));
    out << report.dump(2) << '\n';
    out.close();
    run.add_output("reference_report.json");
    run.finalize();
    std::cout << report.dump(2) << '\n';
    return kExitOk;
  }
  json doc = config::load_file(sweep_spec);
  auto axis = [&](const char* key) {
    if (!doc.contains(key)) throw ValidationError(std::string("sweep: missing axis '") + key + "'");
    const json& a = doc.at(key);
    stability::SweepAxis ax;
    ax.name = a.at("name").get<std::string>();
    ax.lo = a.at("lo").get<double>();
    ax.hi = a.at("hi").get<double>();
    ax.n = a.at("n").get<int>();
    return ax;
  };
  const stability::SweepAxis x = axis("x");
  const stability::SweepAxis y = axis("y");
  ModelParams fixed = doc.contains("fixed") ? config::params_from_json(doc.at("fixed"))
                                            : ModelParams{};
  manifest::Run run(out_dir, doc, 0);
  const auto points = stability::sweep(x, y, fixed);
  exports::sweep_csv(run.path("sweep.csv"), points);
  run.add_output("sweep.csv");

  // Neutral curve along the x axis when it is a density axis.
  if (x.name == "rho0") {
    const auto curve = stability::neutral_curve(fixed, x.lo, x.hi, std::max(2, x.n));
    exports::curve_csv(run.path("neutral_curve.csv"), curve);
    run.add_output("neutral_curve.csv");
    svg::Panel panel;
    panel.title = "neutral stability curve";
    panel.xlabel = "rho_star";
    panel.ylabel = "a";
    std::vector<double> xs, ys;
    for (const auto& [cx, cy] : curve) {
      xs.push_back(cx);
      ys.push_back(cy);
    }
    panel.add_line(xs, ys, "#1f77b4", "neutral a");
    svg::write(run.path("curves.svg"), {panel});
    run.add_output("curves.svg");
  }
  run.finalize();
  std::cout << "sweep points: " << points.size() << '\n';
  return kExitOk;
}

int cmd_ews(const std::string& input, const std::string& cfg_path, const std::string& out_dir) {
  const ews::PipelineConfig cfg =
      cfg_path.empty() ? ews::PipelineConfig{} : config::ews_from_json(config::load_file(cfg_path));
  const ews::ProbeSeries probe = exports::read_probe_csv(input);
  manifest::Run run(out_dir,
                    json{{"input", input}, {"ews", config::to_json(cfg)}}, 0);
  const ews::EwsReport report = ews::analyze(probe, cfg);
  exports::report_csv(run.path("report.csv"), report);
  run.add_output("report.csv");

  json summary;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) summary[key] = *v;
    else summary[key] = nullptr;
  };
  put("kendall_tau_variance", report.tau_variance);
  put("kendall_tau_ac1", report.tau_ac1);
  put("kendall_tau_skewness", report.tau_skewness);
  put("kendall_tau_kurtosis", report.tau_kurtosis);
  put("alarm_time", report.alarm_time);
  put("onset_time", report.onset_time);
  std::ofstream s(run.path("summary.json"));
  s << summary.dump(2) << '\n';
  s.close();
  run.add_output("summary.json");

  const char* names[4] = {"variance", "lag-1 autocorrelation", "skewness", "kurtosis"};
  std::vector<svg::Panel> panels(4);
  for (int i = 0; i < 4; ++i) {
    panels[i].title = names[i];
    panels[i].xlabel = "t (s)";
    std::vector<double> xs, ys;
    for (const auto& w : report.windows) {
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
  run.finalize();
  std::cout << summary.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"disordered-traffic lattice simulator and early-warning toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = default_out_dir();
  std::uint64_t seed = 0;
  bool validate_only = false;

  auto* sim_cmd = app.add_subcommand("simulate", "run a scenario from a JSON config");
  sim_cmd->add_option("--config", config_path, "scenario JSON file");
  auto* seed_opt = sim_cmd->add_option("--seed", seed, "override the noise seed");
  sim_cmd->add_option("--out", out_dir, "output directory");
  sim_cmd->add_flag("--validate", validate_only, "validate the config and exit");
  bool print_defaults = false;
  sim_cmd->add_flag("--print-defaults", print_defaults, "print the default config and exit");

  std::string sweep_spec;
  bool reference_report = false;
  auto* stab_cmd = app.add_subcommand("stability", "parameter sweeps and critical parameters");
  stab_cmd->add_option("--sweep", sweep_spec, "sweep spec JSON file");
  stab_cmd->add_flag("--reference-report", reference_report,
                     "report computed critical parameters next to the published values");
  stab_cmd->add_option("--out", out_dir, "output directory");

  std::string ews_input, ews_cfg;
  auto* ews_cmd = app.add_subcommand("ews", "early-warning indicators from a probe CSV");
  ews_cmd->add_option("--input", ews_input, "probe CSV (t_seconds,value)")->required();
  ews_cmd->add_option("--config", ews_cfg, "analysis JSON file");
  ews_cmd->add_option("--out", out_dir, "output directory");
  bool ews_defaults = false;
  ews_cmd->add_flag("--print-defaults", ews_defaults, "print the default analysis config");

  std::string preset;
  auto* pipe_cmd = app.add_subcommand("pipeline", "end-to-end reproduction presets");
  pipe_cmd->add_option("--preset", preset, "preset name")->required();
  pipe_cmd->add_option("--seed", seed, "noise seed");
  pipe_cmd->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (sim_cmd->parsed()) {
      if (print_defaults) {
        std::cout << traffic::config::default_scenario().dump(2) << '\n';
        return kExitOk;
      }
      return cmd_simulate(config_path, seed, seed_opt->count() > 0, out_dir, validate_only);
    }
    if (stab_cmd->parsed()) {
      if (!reference_report && sweep_spec.empty())
        throw traffic::ValidationError("stability: provide --sweep or --reference-report");
      return cmd_stability(sweep_spec, reference_report, out_dir);
    }
    if (ews_cmd->parsed()) {
      if (ews_defaults) {
        std::cout << traffic::config::default_ews().dump(2) << '\n';
        return kExitOk;
      }
      return cmd_ews(ews_input, ews_cfg, out_dir);
    }
    if (pipe_cmd->parsed()) {
      const auto summary = traffic::presets::run_pipeline(preset, seed, out_dir);
      std::cout << summary.dump(2) << '\n';
      return kExitOk;
    }
  } catch (const traffic::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const traffic::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
