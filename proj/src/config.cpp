#include "traffic/config.hpp"

#include <fstream>

namespace traffic::config {

namespace {

// Fetches j[key] with type checking; falls back to `def` when absent.
template <typename T>
T get_or(const json& j, const char* key, T def) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config: field '") + key + "' has the wrong type");
  }
}

}  // namespace

json to_json(const ModelParams& p) {
  return json{{"B", p.B},       {"C", p.C},       {"gamma", p.gamma},
              {"rho0", p.rho0}, {"rhoc", p.rhoc}, {"a", p.a}};
}

ModelParams params_from_json(const json& j) {
  ModelParams p;
  p.B = get_or(j, "B", p.B);
  p.C = get_or(j, "C", p.C);
  p.gamma = get_or(j, "gamma", p.gamma);
  p.rho0 = get_or(j, "rho0", p.rho0);
  p.rhoc = get_or(j, "rhoc", p.rhoc);
  p.a = get_or(j, "a", p.a);
  return p;
}

json to_json(const sim::ScenarioConfig& s) {
  json j;
  j["L"] = s.L;
  j["steps"] = s.steps;
  j["params"] = to_json(s.params);
  j["initial"] = {{"type", s.init.kind == sim::InitialCondition::Kind::UniformPerturbed
                               ? "perturbed"
                               : "explicit"},
                  {"delta_rho", s.init.delta_rho}};
  if (s.init.kind == sim::InitialCondition::Kind::Explicit) {
    std::vector<double> v(s.init.values.data(), s.init.values.data() + s.init.values.size());
    j["initial"]["values"] = v;
  }
  if (s.ramp) {
    json r;
    r["q_in"] = s.ramp->q_in;
    r["j_in"] = s.ramp->j_in;
    r["q_out"] = s.ramp->q_out;
    r["j_out"] = s.ramp->j_out;
    r["distributed"] = s.ramp->distributed;
    json knots = json::array();
    for (const auto& [t, v] : s.ramp->schedule.knots) knots.push_back({t, v});
    r["schedule"] = knots;
    j["ramp"] = r;
  }
  if (s.noise) {
    j["noise"] = {{"sigma", s.noise->sigma},
                  {"zero_mean_projection", s.noise->zero_mean_projection},
                  {"seed", s.noise->seed}};
  }
  j["recorder"] = {{"sample_interval_seconds", s.recorder.sample_interval_seconds},
                   {"sites", s.recorder.sites},
                   {"record_full_field_every", s.recorder.record_full_field_every},
                   {"record_full_field_from", s.recorder.record_full_field_from},
                   {"every_step_sites", s.recorder.every_step_sites},
                   {"sensor_noise_sigma", s.recorder.sensor_noise_sigma}};
  j["clamp_at_zero"] = s.clamp_at_zero;
  j["ramp_start_seconds"] = s.ramp_start_seconds;
  return j;
}

sim::ScenarioConfig scenario_from_json(const json& j) {
  sim::ScenarioConfig s;
  s.L = get_or(j, "L", s.L);
  s.steps = get_or<long>(j, "steps", s.steps);
  if (j.contains("params")) s.params = params_from_json(j.at("params"));
  if (j.contains("initial")) {
    const json& init = j.at("initial");
    const std::string type = get_or<std::string>(init, "type", "perturbed");
    if (type == "perturbed") {
      s.init.kind = sim::InitialCondition::Kind::UniformPerturbed;
      s.init.delta_rho = get_or(init, "delta_rho", s.init.delta_rho);
    } else if (type == "explicit") {
      s.init.kind = sim::InitialCondition::Kind::Explicit;
      const auto v = get_or<std::vector<double>>(init, "values", {});
      s.init.values = Eigen::Map<const Eigen::ArrayXd>(v.data(), v.size());
    } else {
      throw ValidationError("config: initial.type must be 'perturbed' or 'explicit'");
    }
  }
  if (j.contains("ramp") && !j.at("ramp").is_null()) {
    const json& r = j.at("ramp");
    RampConfig ramp;
    ramp.q_in = get_or(r, "q_in", 0.0);
    ramp.j_in = get_or(r, "j_in", 1);
    ramp.q_out = get_or(r, "q_out", 0.0);
    ramp.j_out = get_or(r, "j_out", 1);
    ramp.distributed = get_or(r, "distributed", false);
    if (r.contains("schedule")) {
      for (const auto& knot : r.at("schedule")) {
        if (!knot.is_array() || knot.size() != 2)
          throw ValidationError("config: ramp.schedule knots must be [t, value] pairs");
        ramp.schedule.knots.emplace_back(knot[0].get<double>(), knot[1].get<double>());
      }
    }
    s.ramp = ramp;
  }
  if (j.contains("noise") && !j.at("noise").is_null()) {
    const json& n = j.at("noise");
    NoiseConfig noise;
    noise.sigma = get_or(n, "sigma", noise.sigma);
    noise.zero_mean_projection = get_or(n, "zero_mean_projection", noise.zero_mean_projection);
    noise.seed = get_or<std::uint64_t>(n, "seed", noise.seed);
    s.noise = noise;
  }
  if (j.contains("recorder")) {
    const json& r = j.at("recorder");
    s.recorder.sample_interval_seconds =
        get_or(r, "sample_interval_seconds", s.recorder.sample_interval_seconds);
    s.recorder.sites = get_or<std::vector<int>>(r, "sites", {});
    s.recorder.record_full_field_every =
        get_or<long>(r, "record_full_field_every", s.recorder.record_full_field_every);
    s.recorder.record_full_field_from =
        get_or<long>(r, "record_full_field_from", s.recorder.record_full_field_from);
    s.recorder.every_step_sites = get_or<std::vector<int>>(r, "every_step_sites", {});
    s.recorder.sensor_noise_sigma =
        get_or(r, "sensor_noise_sigma", s.recorder.sensor_noise_sigma);
  }
  s.clamp_at_zero = get_or(j, "clamp_at_zero", s.clamp_at_zero);
  s.ramp_start_seconds = get_or(j, "ramp_start_seconds", s.ramp_start_seconds);
  return s;
}

json to_json(const ews::PipelineConfig& c) {
  const char* method = c.detrend.method == ews::DetrendMethod::GaussianKernel ? "gaussian_kernel"
                       : c.detrend.method == ews::DetrendMethod::RollingMean  ? "rolling_mean"
                                                                              : "linear";
  return json{{"detrend", {{"method", method}, {"bandwidth", c.detrend.bandwidth}}},
              {"window", c.window},
              {"stride", c.stride},
              {"onset_factor", c.onset_factor},
              {"alarm",
               {{"tau_min_variance", c.alarm.tau_min_variance},
                {"tau_min_ac1", c.alarm.tau_min_ac1},
                {"tau_min_skewness", c.alarm.tau_min_skewness},
                {"tau_min_kurtosis", c.alarm.tau_min_kurtosis},
                {"quorum", c.alarm.quorum},
                {"eval_start_seconds", c.alarm.eval_start_seconds}}}};
}

ews::PipelineConfig ews_from_json(const json& j) {
  ews::PipelineConfig c;
  if (j.contains("detrend")) {
    const json& d = j.at("detrend");
    const std::string m = get_or<std::string>(d, "method", "gaussian_kernel");
    if (m == "gaussian_kernel") c.detrend.method = ews::DetrendMethod::GaussianKernel;
    else if (m == "rolling_mean") c.detrend.method = ews::DetrendMethod::RollingMean;
    else if (m == "linear") c.detrend.method = ews::DetrendMethod::Linear;
    else throw ValidationError("config: unknown detrend.method '" + m + "'");
    c.detrend.bandwidth = get_or(d, "bandwidth", 0);
  }
  c.window = get_or(j, "window", c.window);
  c.stride = get_or(j, "stride", c.stride);
  c.onset_factor = get_or(j, "onset_factor", c.onset_factor);
  if (j.contains("alarm")) {
    const json& a = j.at("alarm");
    c.alarm.tau_min_variance = get_or(a, "tau_min_variance", c.alarm.tau_min_variance);
    c.alarm.tau_min_ac1 = get_or(a, "tau_min_ac1", c.alarm.tau_min_ac1);
    c.alarm.tau_min_skewness = get_or(a, "tau_min_skewness", c.alarm.tau_min_skewness);
    c.alarm.tau_min_kurtosis = get_or(a, "tau_min_kurtosis", c.alarm.tau_min_kurtosis);
    c.alarm.quorum = get_or(a, "quorum", c.alarm.quorum);
    c.alarm.eval_start_seconds = get_or(a, "eval_start_seconds", c.alarm.eval_start_seconds);
  }
  return c;
}

json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config: '" + path + "' is not valid JSON: " + e.what());
  }
}

json default_scenario() { return to_json(sim::ScenarioConfig{}); }
json default_ews() { return to_json(ews::PipelineConfig{}); }

}  // namespace traffic::config
