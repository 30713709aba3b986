// Canned experiment configurations and the end-to-end pipelines behind the
// CLI presets: perturbed reference cases, ramped-density runs, phase-diagram
// sweeps and the critical-parameter reference report.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "traffic/ews.hpp"
#include "traffic/simulate.hpp"
#include "traffic/stability.hpp"

namespace traffic::presets {

// Reference parameter set: B = 1.6, C = 0.7, gamma = 0.4, rhoc = 0.2.
ModelParams reference_params(double a);

// Perturbed closed-ring scenario (kink: a = 3.5, chaotic: a = 5), 25200
// steps, per-step recording at the center site and late-run snapshots.
sim::ScenarioConfig case_scenario(bool kink, long steps = 25200);

// Ramped-density scenario: hold at 0.01 for two hours, then a linear mean
// density increase through the instability threshold, with dynamics noise
// and detector read noise on the probe.
sim::ScenarioConfig fig3_scenario(bool kink, std::uint64_t seed);

// Default analysis settings for the ramped scenarios.
ews::PipelineConfig fig3_ews_config();

struct CaseResult {
  sim::Trajectory trajectory;
  std::vector<sim::PortraitPoint> portrait;
  sim::Classification classification;
};

// Runs a case scenario and classifies the stationary attractor on the
// final-third window (portrait window 16000..steps).
CaseResult run_case(bool kink, long steps = 25200);

struct Fig3Result {
  sim::Trajectory trajectory;
  ews::ProbeSeries probe;
  ews::EwsReport report;
};

Fig3Result run_fig3(bool kink, std::uint64_t seed);

// Critical-parameter report at B=1.6, C=0.7, gamma=0.4, a=3.93: band edges
// from the closed-form neutral condition and from the exact growth oracle,
// the separatrix sensitivity, and relative differences against the published
// reference values 0.1573, 0.2743 and 3.93 for this parameter set.
nlohmann::json reference_report();

// Runs a named preset end to end, writing CSVs, SVGs, a summary and a
// manifest into out_dir. Known presets: fig2a fig2b fig2c fig2d fig3-kink
// fig3-chaotic fig4-kink fig4-chaotic reference-report.
nlohmann::json run_pipeline(const std::string& preset, std::uint64_t seed,
                            const std::string& out_dir);

const std::vector<std::string>& preset_names();

}  // namespace traffic::presets
