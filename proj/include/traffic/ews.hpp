// Early-warning indicators from uniform-cadence probe series: detrending,
// rolling moments, lag-1 autocorrelation, Kendall trend and alarm logic.
#pragma once

#include <optional>
#include <vector>

#include "traffic/simulate.hpp"
#include "traffic/types.hpp"

namespace traffic::ews {

// Uniform-cadence scalar series, typically the mean scaled density over a
// handful of adjacent probe sites.
struct ProbeSeries {
  std::vector<double> times;
  std::vector<double> values;
  double cadence = 20.0;

  void validate() const;
};

enum class DetrendMethod { GaussianKernel, RollingMean, Linear };

struct DetrendConfig {
  DetrendMethod method = DetrendMethod::GaussianKernel;
  int bandwidth = 0;  // samples; 0 = 10% of series length

  int resolve_bandwidth(std::size_t n) const;
};

// Mean of the recorded probe sites per sample.
ProbeSeries extract_probe(const sim::Trajectory& traj,
                          const std::vector<int>& sites = {48, 49, 50, 51, 52});

// values - smooth(values). Linear detrending leaves exactly zero residuals
// on an exactly linear series.
std::vector<double> detrend(const std::vector<double>& values, const DetrendConfig& cfg);

// One rolling-window snapshot of the four indicators. All moments use the
// population convention (divide by n); kurtosis is the Pearson ratio
// m4/m2^2, so a normal distribution sits at 3, not 0. When a window has no
// variance the last three indicators are undefined and marked as such.
struct IndicatorWindow {
  double t_center = 0.0;
  double variance = 0.0;
  std::optional<double> ac1;
  std::optional<double> skewness;
  std::optional<double> kurtosis;
};

struct EwsReport {
  int window = 0;
  int stride = 1;
  std::vector<IndicatorWindow> windows;
  // Kendall rank trend of each indicator series against window time.
  std::optional<double> tau_variance, tau_ac1, tau_skewness, tau_kurtosis;
  std::optional<double> alarm_time;
  std::optional<double> onset_time;
};

// Rolling indicators over `residuals` sampled at `times`; window and stride
// in samples, window >= 10.
EwsReport rolling_indicators(const std::vector<double>& residuals,
                             const std::vector<double>& times, int window, int stride);

// Tie-adjusted Kendall rank correlation (tau-b) of y against sample order.
// Requires at least 3 defined points.
double kendall_tau(const std::vector<double>& y);
double kendall_tau(const std::vector<std::optional<double>>& y);

// Running Kendall tau of the prefix y[0..i] for every i (NaN until two
// defined points are seen). Undefined entries are skipped.
std::vector<double> running_kendall(const std::vector<std::optional<double>>& y);

struct AlarmConfig {
  double tau_min_variance = 0.5;
  double tau_min_ac1 = 0.5;
  double tau_min_skewness = 0.5;
  double tau_min_kurtosis = 0.5;
  int quorum = 2;
  // Windows centered before this time are ignored by the running trend, so
  // the pre-forcing quiescent phase does not dilute the statistics.
  double eval_start_seconds = 0.0;
};

// Earliest window-center time at which at least `quorum` indicators carry a
// running Kendall tau at or above their thresholds.
std::optional<double> alarm(const EwsReport& report, const AlarmConfig& cfg = {});

// Full pipeline: probe -> detrend -> rolling indicators -> trends -> alarm.
struct PipelineConfig {
  DetrendConfig detrend;
  int window = 0;  // samples; 0 = 25% of the pre-onset series length
  int stride = 1;
  AlarmConfig alarm;
  double onset_factor = 10.0;
};

EwsReport analyze(const ProbeSeries& probe, const PipelineConfig& cfg,
                  std::optional<double> onset = std::nullopt);

}  // namespace traffic::ews
