// CSV export of trajectories, probes, indicator reports and sweep tables.
// Column layouts are part of the tool's external interface; floats carry 17
// significant digits. Sites are 1-based in all files.
#pragma once

#include <string>
#include <vector>

#include "traffic/ews.hpp"
#include "traffic/mkdv.hpp"
#include "traffic/simulate.hpp"
#include "traffic/stability.hpp"

namespace traffic::exports {

// t_seconds,site,rho_star — one row per (sample time, recorded site).
void field_csv(const std::string& path, const sim::Trajectory& traj);

// t_seconds,site,rho_star — one row per (snapshot time, site).
void snapshots_csv(const std::string& path, const sim::Trajectory& traj);

// t_seconds,rho_star_mean_probe
void probe_csv(const std::string& path, const ews::ProbeSeries& probe);

// t_seconds,rho_star — a single-site per-step series.
void series_csv(const std::string& path, const std::vector<double>& series, double tau);

// rho_star,delta_rho_star — phase-portrait points.
void portrait_csv(const std::string& path, const std::vector<sim::PortraitPoint>& points);

// t_center,variance,ac1,skewness,kurtosis — undefined cells are written as NA.
void report_csv(const std::string& path, const ews::EwsReport& report);

// x,y,neutral_a,w2,max_growth,verdict,kink_exists
void sweep_csv(const std::string& path, const std::vector<stability::SweepPoint>& points);

// rho_star,a_neutral
void curve_csv(const std::string& path, const std::vector<std::pair<double, double>>& curve);

// rho_star,a,branch — branch is + or -.
void coexist_csv(const std::string& path, const std::vector<mkdv::CoexistPoint>& points);

// Parses a probe CSV; accepts the headers t_seconds,value and
// t_seconds,rho_star_mean_probe.
ews::ProbeSeries read_probe_csv(const std::string& path);

}  // namespace traffic::exports
