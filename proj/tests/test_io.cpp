#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "traffic/config.hpp"
#include "traffic/csv.hpp"
#include "traffic/exports.hpp"
#include "traffic/manifest.hpp"
#include "traffic/svg.hpp"

using namespace traffic;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / "traffic_io_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("17-digit float formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 3.141592653589793, 1e-17, -2.5e300}) {
    const std::string s = csv::fmt(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("csv writer and reader round trip") {
  const auto path = (temp_dir() / "round.csv").string();
  {
    csv::Writer w(path, "a,b");
    w.row(std::vector<double>{1.0 / 3.0, 2e-19});
    w.row(std::vector<double>{-4.25, 17.0});
  }
  const auto table = csv::read_numeric(path);
  REQUIRE(table.header.size() == 2);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0][0] == 1.0 / 3.0);
  CHECK(table.rows[0][1] == 2e-19);
  CHECK(table.rows[1][0] == -4.25);
}

TEST_CASE("malformed csv cells are rejected with a location") {
  const auto path = (temp_dir() / "bad.csv").string();
  std::ofstream(path) << "t_seconds,value\n1.0,2.0\n3.0,oops\n";
  CHECK_THROWS_AS(csv::read_numeric(path), ValidationError);
  CHECK_THROWS_AS(exports::read_probe_csv(path), ValidationError);
}

TEST_CASE("probe csv accepts both headers") {
  const auto path = (temp_dir() / "probe.csv").string();
  std::ofstream(path) << "t_seconds,value\n0,1.5\n20,1.25\n40,1.75\n";
  const auto probe = exports::read_probe_csv(path);
  CHECK(probe.cadence == doctest::Approx(20.0));
  CHECK(probe.values[2] == 1.75);

  std::ofstream(path) << "t_seconds,rho_star_mean_probe\n0,1\n20,2\n40,3\n";
  CHECK(exports::read_probe_csv(path).values.size() == 3);

  std::ofstream(path) << "site,value\n0,1\n20,2\n";
  CHECK_THROWS_AS(exports::read_probe_csv(path), ValidationError);
}

TEST_CASE("report csv writes NA for undefined indicators") {
  ews::EwsReport report;
  ews::IndicatorWindow w;
  w.t_center = 10.0;
  w.variance = 0.0;
  report.windows.push_back(w);
  const auto path = (temp_dir() / "report.csv").string();
  exports::report_csv(path, report);
  std::ifstream in(path);
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  CHECK(header == "t_center,variance,ac1,skewness,kurtosis");
  CHECK(line == "10,0,NA,NA,NA");
}

TEST_CASE("sha256 matches the reference vector") {
  const auto path = (temp_dir() / "abc.txt").string();
  std::ofstream(path) << "abc";
  CHECK(manifest::sha256_file(path) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("manifest lists every registered output with its digest") {
  const auto dir = (temp_dir() / "run1").string();
  {
    manifest::Run run(dir, nlohmann::json{{"k", 1}}, 42);
    std::ofstream(run.path("data.csv")) << "x\n1\n";
    run.add_output("data.csv");
    run.finalize();
  }
  const auto m = config::load_file(dir + "/manifest.json");
  CHECK(m.at("seed") == 42);
  CHECK(m.at("outputs").contains("data.csv"));
  CHECK(m.at("outputs").at("data.csv").get<std::string>().size() == 64);
  CHECK(m.at("config").at("k") == 1);
}

TEST_CASE("svg writer emits a well-formed document") {
  svg::Panel panel;
  panel.title = "demo";
  panel.add_line({0, 1, 2}, {0.5, 0.2, 0.9}, "#1f77b4", "series");
  panel.add_scatter({0.5, 1.5}, {0.4, 0.6});
  Eigen::MatrixXd heat(2, 3);
  heat << 1, 2, 3, 4, 5, 6;
  panel.set_heatmap(heat, 0, 2, 0, 1);
  const auto path = (temp_dir() / "plot.svg").string();
  svg::write(path, {panel});
  std::ifstream in(path);
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(all.find("<svg") == 0);
  CHECK(all.find("polyline") != std::string::npos);
  CHECK(all.find("</svg>") != std::string::npos);
}

TEST_CASE("scenario config round-trips through json") {
  sim::ScenarioConfig s;
  s.L = 64;
  s.steps = 1234;
  s.params.a = 4.2;
  RampConfig ramp;
  ramp.q_in = 1e-4;
  ramp.distributed = true;
  ramp.schedule.knots = {{0.0, 0.0}, {100.0, 1.0}};
  s.ramp = ramp;
  NoiseConfig noise;
  noise.sigma = 2e-5;
  noise.seed = 99;
  s.noise = noise;
  s.recorder.sites = {48, 49, 50, 51, 52};
  s.recorder.sensor_noise_sigma = 1e-3;

  const auto j = config::to_json(s);
  const auto back = config::scenario_from_json(j);
  CHECK(back.L == 64);
  CHECK(back.steps == 1234);
  CHECK(back.params.a == 4.2);
  REQUIRE(back.ramp.has_value());
  CHECK(back.ramp->q_in == 1e-4);
  CHECK(back.ramp->distributed);
  CHECK(back.ramp->schedule.knots.size() == 2);
  REQUIRE(back.noise.has_value());
  CHECK(back.noise->seed == 99);
  CHECK(back.recorder.sites.size() == 5);
  CHECK(back.recorder.sensor_noise_sigma == 1e-3);

  CHECK_THROWS_AS(config::scenario_from_json(nlohmann::json{{"L", "ten"}}), ValidationError);
  CHECK_THROWS_AS(config::scenario_from_json(nlohmann::json{{"initial", {{"type", "bogus"}}}}),
                  ValidationError);
}
