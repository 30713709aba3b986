#include "traffic/ews.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace traffic::ews {

void ProbeSeries::validate() const {
  if (times.size() != values.size()) throw ValidationError("probe: times/values length mismatch");
  if (times.size() < 2) throw ValidationError("probe: need at least two samples");
  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw ValidationError("probe: times must be strictly increasing");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double d = times[i] - times[i - 1];
    if (std::abs(d - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw ValidationError("probe: sampling cadence is not uniform");
  }
}

int DetrendConfig::resolve_bandwidth(std::size_t n) const {
  int bw = bandwidth > 0 ? bandwidth : static_cast<int>(std::lround(0.1 * n));
  bw = std::max(bw, 3);
  if (bw >= static_cast<int>(n))
    throw ValidationError("detrend: bandwidth must be smaller than the series");
  return bw;
}

ProbeSeries extract_probe(const sim::Trajectory& traj, const std::vector<int>& sites) {
  std::vector<Eigen::Index> cols;
  for (int s : sites) {
    auto it = std::find(traj.sites.begin(), traj.sites.end(), s);
    if (it == traj.sites.end())
      throw ValidationError("extract_probe: site " + std::to_string(s) + " was not recorded");
    cols.push_back(std::distance(traj.sites.begin(), it));
  }
  ProbeSeries probe;
  probe.times = traj.sample_times;
  probe.cadence = traj.cadence_seconds;
  probe.values.resize(traj.sample_times.size());
  for (std::size_t i = 0; i < probe.values.size(); ++i) {
    double acc = 0.0;
    for (Eigen::Index c : cols) acc += traj.samples(static_cast<Eigen::Index>(i), c);
    probe.values[i] = acc / static_cast<double>(cols.size());
  }
  probe.validate();
  return probe;
}

std::vector<double> detrend(const std::vector<double>& values, const DetrendConfig& cfg) {
  const std::size_t n = values.size();
  if (n < 4) throw ValidationError("detrend: series too short");
  std::vector<double> residual(n);

  switch (cfg.method) {
    case DetrendMethod::Linear: {
      // Least-squares line through (i, values[i]).
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < n; ++i) {
        sx += i;
        sy += values[i];
        sxx += static_cast<double>(i) * i;
        sxy += i * values[i];
      }
      const double denom = n * sxx - sx * sx;
      const double slope = (n * sxy - sx * sy) / denom;
      const double inter = (sy - slope * sx) / n;
      for (std::size_t i = 0; i < n; ++i) residual[i] = values[i] - (inter + slope * i);
      return residual;
    }
    case DetrendMethod::RollingMean: {
      const int bw = cfg.resolve_bandwidth(n);
      const int half = bw / 2;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= static_cast<std::size_t>(half) ? i - half : 0;
        const std::size_t hi = std::min(n - 1, i + half);
        double acc = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) acc += values[j];
        residual[i] = values[i] - acc / static_cast<double>(hi - lo + 1);
      }
      return residual;
    }
    case DetrendMethod::GaussianKernel:
    default: {
      const int bw = cfg.resolve_bandwidth(n);
      const int reach = 4 * bw;
      // Precompute the kernel once; edges renormalize over the truncated
      // support.
      std::vector<double> w(reach + 1);
      for (int d = 0; d <= reach; ++d)
        w[d] = std::exp(-0.5 * (static_cast<double>(d) / bw) * (static_cast<double>(d) / bw));
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0, norm = 0.0;
        const long lo = std::max<long>(0, static_cast<long>(i) - reach);
        const long hi = std::min<long>(n - 1, static_cast<long>(i) + reach);
        for (long j = lo; j <= hi; ++j) {
          const double wij = w[std::labs(j - static_cast<long>(i))];
          acc += wij * values[j];
          norm += wij;
        }
        residual[i] = values[i] - acc / norm;
      }
      return residual;
    }
  }
}

namespace {

bool degenerate(double m2, double mean) {
  const double scale = std::max(1.0, mean * mean);
  return !(m2 > 1e-28 * scale);
}

std::optional<double> pearson_lag1(const double* x, int n) {
  // Pearson correlation of the (x_t, x_{t+1}) pairs inside the window.
  const int m = n - 1;
  double ma = 0, mb = 0;
  for (int i = 0; i < m; ++i) {
    ma += x[i];
    mb += x[i + 1];
  }
  ma /= m;
  mb /= m;
  double saa = 0, sbb = 0, sab = 0;
  for (int i = 0; i < m; ++i) {
    const double da = x[i] - ma, db = x[i + 1] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (degenerate(saa / m, ma) || degenerate(sbb / m, mb)) return std::nullopt;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

EwsReport rolling_indicators(const std::vector<double>& residuals,
                             const std::vector<double>& times, int window, int stride) {
  if (residuals.size() != times.size())
    throw ValidationError("rolling_indicators: residuals/times length mismatch");
  if (window < 10) throw ValidationError("rolling_indicators: window must be at least 10 samples");
  if (static_cast<std::size_t>(window) > residuals.size())
    throw ValidationError("rolling_indicators: window exceeds series length");
  if (stride < 1) throw ValidationError("rolling_indicators: stride must be positive");

  EwsReport report;
  report.window = window;
  report.stride = stride;
  const std::size_t n = residuals.size();
  for (std::size_t start = 0; start + window <= n; start += stride) {
    const double* x = residuals.data() + start;
    IndicatorWindow w;
    w.t_center = 0.5 * (times[start] + times[start + window - 1]);
    double mean = 0.0;
    for (int i = 0; i < window; ++i) mean += x[i];
    mean /= window;
    double m2 = 0, m3 = 0, m4 = 0;
    for (int i = 0; i < window; ++i) {
      const double d = x[i] - mean;
      const double d2 = d * d;
      m2 += d2;
      m3 += d2 * d;
      m4 += d2 * d2;
    }
    m2 /= window;
    m3 /= window;
    m4 /= window;
    w.variance = m2;
    if (!degenerate(m2, mean)) {
      w.skewness = m3 / std::pow(m2, 1.5);
      w.kurtosis = m4 / (m2 * m2);
      w.ac1 = pearson_lag1(x, window);
    }
    report.windows.push_back(w);
  }

  auto series_of = [&](auto getter) {
    std::vector<std::optional<double>> s;
    s.reserve(report.windows.size());
    for (const auto& w : report.windows) s.push_back(getter(w));
    return s;
  };
  auto tau_of = [&](const std::vector<std::optional<double>>& s) -> std::optional<double> {
    int defined = 0;
    for (const auto& v : s)
      if (v) ++defined;
    if (defined < 3) return std::nullopt;
    return kendall_tau(s);
  };
  report.tau_variance = tau_of(series_of([](const IndicatorWindow& w) {
    return std::optional<double>(w.variance);
  }));
  report.tau_ac1 = tau_of(series_of([](const IndicatorWindow& w) { return w.ac1; }));
  report.tau_skewness = tau_of(series_of([](const IndicatorWindow& w) { return w.skewness; }));
  report.tau_kurtosis = tau_of(series_of([](const IndicatorWindow& w) { return w.kurtosis; }));
  return report;
}

namespace {

// Merge-sort inversion count: the number of pairs i < j with v[i] > v[j].
long long count_inversions(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo,
                           std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  long long inv = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
  std::size_t a = lo, b = mid, out = lo;
  while (a < mid && b < hi) {
    if (v[b] < v[a]) {
      inv += static_cast<long long>(mid - a);
      scratch[out++] = v[b++];
    } else {
      scratch[out++] = v[a++];
    }
  }
  while (a < mid) scratch[out++] = v[a++];
  while (b < hi) scratch[out++] = v[b++];
  std::copy(scratch.begin() + lo, scratch.begin() + hi, v.begin() + lo);
  return inv;
}

}  // namespace

double kendall_tau(const std::vector<double>& y) {
  std::vector<std::optional<double>> tmp(y.begin(), y.end());
  return kendall_tau(tmp);
}

double kendall_tau(const std::vector<std::optional<double>>& y) {
  std::vector<double> v;
  v.reserve(y.size());
  for (const auto& o : y)
    if (o) v.push_back(*o);
  const long long n = static_cast<long long>(v.size());
  if (n < 3) throw ValidationError("kendall_tau: need at least 3 defined points");

  // Sample order is strictly increasing, so discordant pairs are exactly the
  // inversions of y and only y can carry ties (tau-b adjustment).
  std::vector<double> sorted = v, scratch(v.size());
  const long long discordant = count_inversions(sorted, scratch, 0, sorted.size());
  long long ties = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const long long t = static_cast<long long>(j - i);
    ties += t * (t - 1) / 2;
    i = j;
  }
  const long long n0 = n * (n - 1) / 2;
  const long long concordant = n0 - ties - discordant;
  const double denom = std::sqrt(static_cast<double>(n0) * static_cast<double>(n0 - ties));
  if (denom == 0.0) return 0.0;
  return static_cast<double>(concordant - discordant) / denom;
}

std::vector<double> running_kendall(const std::vector<std::optional<double>>& y) {
  std::vector<double> out(y.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<double> seen;
  long long concordant = 0, discordant = 0, ties = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i]) {
      const double v = *y[i];
      for (double prev : seen) {
        if (prev < v) ++concordant;
        else if (prev > v) ++discordant;
        else ++ties;
      }
      seen.push_back(v);
    }
    const long long n = static_cast<long long>(seen.size());
    if (n >= 2) {
      const long long n0 = n * (n - 1) / 2;
      const double denom =
          std::sqrt(static_cast<double>(n0) * static_cast<double>(n0 - ties));
      out[i] = denom == 0.0 ? 0.0 : static_cast<double>(concordant - discordant) / denom;
    }
  }
  return out;
}

std::optional<double> alarm(const EwsReport& report, const AlarmConfig& cfg) {
  if (report.windows.empty()) return std::nullopt;
  auto pick = [&](auto getter) {
    std::vector<std::optional<double>> s;
    s.reserve(report.windows.size());
    for (const auto& w : report.windows) {
      if (w.t_center < cfg.eval_start_seconds) s.push_back(std::nullopt);
      else s.push_back(getter(w));
    }
    return running_kendall(s);
  };
  const auto rv = pick([](const IndicatorWindow& w) { return std::optional<double>(w.variance); });
  const auto ra = pick([](const IndicatorWindow& w) { return w.ac1; });
  const auto rs = pick([](const IndicatorWindow& w) { return w.skewness; });
  const auto rk = pick([](const IndicatorWindow& w) { return w.kurtosis; });
  const double thresholds[4] = {cfg.tau_min_variance, cfg.tau_min_ac1, cfg.tau_min_skewness,
                                cfg.tau_min_kurtosis};
  for (std::size_t i = 0; i < report.windows.size(); ++i) {
    const double vals[4] = {rv[i], ra[i], rs[i], rk[i]};
    int votes = 0;
    for (int j = 0; j < 4; ++j)
      if (std::isfinite(vals[j]) && vals[j] >= thresholds[j]) ++votes;
    if (votes >= cfg.quorum) return report.windows[i].t_center;
  }
  return std::nullopt;
}

EwsReport analyze(const ProbeSeries& probe, const PipelineConfig& cfg,
                  std::optional<double> onset) {
  probe.validate();
  const auto residuals = detrend(probe.values, cfg.detrend);
  std::size_t pre_onset = probe.values.size();
  if (onset) {
    pre_onset = 0;
    while (pre_onset < probe.times.size() && probe.times[pre_onset] < *onset) ++pre_onset;
  }
  int window = cfg.window > 0 ? cfg.window : static_cast<int>(std::lround(0.25 * pre_onset));
  window = std::max(window, 10);
  window = std::min<int>(window, static_cast<int>(probe.values.size()));
  EwsReport report = rolling_indicators(residuals, probe.times, window, cfg.stride);
  report.onset_time = onset;

  // Kendall trends restricted to the pre-onset, post-forcing segment.
  auto tau_segment = [&](auto getter) -> std::optional<double> {
    std::vector<std::optional<double>> s;
    int defined = 0;
    for (const auto& w : report.windows) {
      const bool in_segment =
          w.t_center >= cfg.alarm.eval_start_seconds && (!onset || w.t_center < *onset);
      std::optional<double> v = in_segment ? getter(w) : std::nullopt;
      if (v) ++defined;
      s.push_back(v);
    }
    if (defined < 3) return std::nullopt;
    return kendall_tau(s);
  };
  report.tau_variance =
      tau_segment([](const IndicatorWindow& w) { return std::optional<double>(w.variance); });
  report.tau_ac1 = tau_segment([](const IndicatorWindow& w) { return w.ac1; });
  report.tau_skewness = tau_segment([](const IndicatorWindow& w) { return w.skewness; });
  report.tau_kurtosis = tau_segment([](const IndicatorWindow& w) { return w.kurtosis; });
  report.alarm_time = alarm(report, cfg.alarm);
  return report;
}

}  // namespace traffic::ews
