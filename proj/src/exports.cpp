#include "traffic/exports.hpp"

#include "traffic/csv.hpp"

namespace traffic::exports {

void field_csv(const std::string& path, const sim::Trajectory& traj) {
  csv::Writer w(path, "t_seconds,site,rho_star");
  for (std::size_t r = 0; r < traj.sample_times.size(); ++r)
    for (std::size_t c = 0; c < traj.sites.size(); ++c)
      w.row({csv::fmt(traj.sample_times[r]), std::to_string(traj.sites[c]),
             csv::fmt(traj.samples(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)))});
}

void snapshots_csv(const std::string& path, const sim::Trajectory& traj) {
  csv::Writer w(path, "t_seconds,site,rho_star");
  for (const auto& [step, field] : traj.snapshots)
    for (Eigen::Index j = 0; j < field.size(); ++j)
      w.row({csv::fmt(step * traj.tau), std::to_string(j + 1), csv::fmt(field[j])});
}

void probe_csv(const std::string& path, const ews::ProbeSeries& probe) {
  csv::Writer w(path, "t_seconds,rho_star_mean_probe");
  for (std::size_t i = 0; i < probe.times.size(); ++i)
    w.row(std::vector<double>{probe.times[i], probe.values[i]});
}

void series_csv(const std::string& path, const std::vector<double>& series, double tau) {
  csv::Writer w(path, "t_seconds,rho_star");
  for (std::size_t i = 0; i < series.size(); ++i)
    w.row(std::vector<double>{i * tau, series[i]});
}

void portrait_csv(const std::string& path, const std::vector<sim::PortraitPoint>& points) {
  csv::Writer w(path, "rho_star,delta_rho_star");
  for (const auto& p : points) w.row(std::vector<double>{p.value, p.diff});
}

void report_csv(const std::string& path, const ews::EwsReport& report) {
  csv::Writer w(path, "t_center,variance,ac1,skewness,kurtosis");
  auto cell = [](const std::optional<double>& v) { return v ? csv::fmt(*v) : std::string("NA"); };
  for (const auto& win : report.windows)
    w.row({csv::fmt(win.t_center), csv::fmt(win.variance), cell(win.ac1), cell(win.skewness),
           cell(win.kurtosis)});
}

void sweep_csv(const std::string& path, const std::vector<stability::SweepPoint>& points) {
  csv::Writer w(path, "x,y,neutral_a,w2,max_growth,verdict,kink_exists");
  for (const auto& p : points)
    w.row({csv::fmt(p.x), csv::fmt(p.y), p.neutral ? csv::fmt(*p.neutral) : std::string("NA"),
           csv::fmt(p.w2), csv::fmt(p.max_growth),
           p.unstable ? std::string("unstable") : std::string("stable"),
           p.kink_exists ? std::string("1") : std::string("0")});
}

void curve_csv(const std::string& path, const std::vector<std::pair<double, double>>& curve) {
  csv::Writer w(path, "rho_star,a_neutral");
  for (const auto& [rho, a] : curve) w.row(std::vector<double>{rho, a});
}

void coexist_csv(const std::string& path, const std::vector<mkdv::CoexistPoint>& points) {
  csv::Writer w(path, "rho_star,a,branch");
  for (const auto& p : points)
    w.row({csv::fmt(p.rho_star), csv::fmt(p.a), p.branch > 0 ? std::string("+") : std::string("-")});
}

ews::ProbeSeries read_probe_csv(const std::string& path) {
  const csv::Table table = csv::read_numeric(path);
  if (table.header.size() != 2 || table.header[0] != "t_seconds" ||
      (table.header[1] != "value" && table.header[1] != "rho_star_mean_probe"))
    throw ValidationError("probe csv: expected header t_seconds,value");
  ews::ProbeSeries probe;
  for (const auto& row : table.rows) {
    probe.times.push_back(row[0]);
    probe.values.push_back(row[1]);
  }
  if (probe.times.size() >= 2) probe.cadence = probe.times[1] - probe.times[0];
  probe.validate();
  return probe;
}

}  // namespace traffic::exports
