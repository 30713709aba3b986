#include "traffic/model.hpp"

#include <cmath>

namespace traffic {

void VehicleClass::validate() const {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw ValidationError("vehicle class: fraction must lie in (0, 1]");
  if (!(area > 0.0)) throw ValidationError("vehicle class: area must be positive");
  if (!(max_speed > 0.0)) throw ValidationError("vehicle class: max_speed must be positive");
  if (!(delay_scale > 0.0 && delay_scale <= 1.0))
    throw ValidationError("vehicle class: delay_scale must lie in (0, 1]");
  if (!(passing_rate >= 0.0))
    throw ValidationError("vehicle class: passing_rate must be non-negative");
}

Mixture aggregate(std::vector<VehicleClass> classes, double road_width) {
  if (classes.empty()) throw ValidationError("aggregate: class list is empty");
  if (!(road_width > 0.0)) throw ValidationError("aggregate: road width must be positive");
  double frac_sum = 0.0;
  for (const auto& vc : classes) {
    vc.validate();
    frac_sum += vc.fraction;
  }
  if (std::abs(frac_sum - 1.0) > 1e-12)
    throw ValidationError("aggregate: class fractions must sum to 1");
  for (std::size_t i = 1; i < classes.size(); ++i) {
    if (!(classes[i - 1].delay_scale < classes[i].delay_scale))
      throw ValidationError("aggregate: delay scales must be strictly increasing");
  }

  Mixture mix;
  mix.road_width = road_width;
  double area_sum = 0.0;
  bool same_passing = true;
  for (const auto& vc : classes) {
    area_sum += vc.fraction * vc.area;
    mix.C += vc.fraction * vc.delay_scale * vc.max_speed / 2.0;
    mix.D += vc.fraction * vc.delay_scale * vc.passing_rate * vc.max_speed / 2.0;
    same_passing = same_passing && vc.passing_rate == classes.front().passing_rate;
  }
  mix.B = area_sum / road_width;
  // D = g*C algebraically when every class passes at the same rate g; take
  // that branch so the identity holds exactly in floating point too.
  mix.gamma = same_passing ? classes.front().passing_rate : mix.D / mix.C;
  mix.classes = std::move(classes);
  return mix;
}

void ModelParams::validate() const {
  if (!(a > 0.0)) throw ValidationError("params: sensitivity a must be positive");
  if (!(rho0 > 0.0)) throw ValidationError("params: rho0 must be positive");
  if (!(rhoc > 0.0)) throw ValidationError("params: rhoc must be positive");
  if (!(B > 0.0)) throw ValidationError("params: B must be positive");
  if (!(C > 0.0)) throw ValidationError("params: C must be positive");
  if (!(gamma >= 0.0)) throw ValidationError("params: gamma must be non-negative");
}

ModelParams ModelParams::from_mixture(const Mixture& mix, double rho0, double rhoc, double a) {
  ModelParams p;
  p.B = mix.B;
  p.C = mix.C;
  p.gamma = mix.gamma;
  p.rho0 = rho0;
  p.rhoc = rhoc;
  p.a = a;
  p.validate();
  return p;
}

double Schedule::operator()(double t) const {
  if (knots.empty()) return 1.0;
  if (t <= knots.front().first) return knots.front().second;
  if (t >= knots.back().first) return knots.back().second;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (t <= knots[i].first) {
      const auto& [t0, v0] = knots[i - 1];
      const auto& [t1, v1] = knots[i];
      const double w = (t - t0) / (t1 - t0);
      return v0 + w * (v1 - v0);
    }
  }
  return knots.back().second;
}

void Schedule::validate() const {
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i - 1].first < knots[i].first))
      throw ValidationError("schedule: knot times must be strictly increasing");
}

void RampConfig::validate(int L) const {
  if (!(q_in >= 0.0 && q_out >= 0.0))
    throw ValidationError("ramp: q_in and q_out must be non-negative");
  if (j_in < 1 || j_in > L || j_out < 1 || j_out > L)
    throw ValidationError("ramp: site indices must lie in [1, L]");
  schedule.validate();
}

void NoiseConfig::validate() const {
  if (!(sigma >= 0.0)) throw ValidationError("noise: sigma must be non-negative");
}

}  // namespace traffic

namespace traffic::model {

double GaussianRng::uniform() {
  // Top 53 bits of the engine output give a uniform double in [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double optimal_velocity(double rho_star, double rho0, double rhoc) {
  if (!(rho0 > 0.0) || !(rhoc > 0.0))
    throw ValidationError("optimal_velocity: rho0 and rhoc must be positive");
  return std::tanh(2.0 / rho0 - rho_star / (rho0 * rho0) - 1.0 / rhoc) + std::tanh(1.0 / rhoc);
}

ArrayXd optimal_velocity(const ArrayXd& rho_star, double rho0, double rhoc) {
  if (!(rho0 > 0.0) || !(rhoc > 0.0))
    throw ValidationError("optimal_velocity: rho0 and rhoc must be positive");
  const double c = 2.0 / rho0 - 1.0 / rhoc;
  const double inv2 = 1.0 / (rho0 * rho0);
  return (c - rho_star * inv2).tanh() + std::tanh(1.0 / rhoc);
}

double ov_derivative(double rho0, double rhoc, double B, int order) {
  if (!(rho0 > 0.0) || !(rhoc > 0.0))
    throw ValidationError("ov_derivative: rho0 and rhoc must be positive");
  if (order < 1 || order > 3) throw ValidationError("ov_derivative: order must be 1, 2 or 3");
  const double u = 2.0 / rho0 - B * rho0 / (rho0 * rho0) - 1.0 / rhoc;
  const double p = -B / (rho0 * rho0);  // inner derivative of rho -> B*rho/rho0^2
  const double t = std::tanh(u);
  const double s = 1.0 - t * t;  // sech^2
  switch (order) {
    case 1: return p * s;
    case 2: return p * p * (-2.0 * t * s);
    default: return p * p * p * (4.0 * t * t * s - 2.0 * s * s);
  }
}

double ramp_term(const RampConfig& ramp, int j, double t, int L) {
  const double mult = ramp.schedule(t);
  if (ramp.distributed) return (ramp.q_in - ramp.q_out) * mult / static_cast<double>(L);
  double g = 0.0;
  if (j == ramp.j_in) g += ramp.q_in * mult;
  if (j == ramp.j_out) g -= ramp.q_out * mult;
  return g;
}

ArrayXd noise_term(const NoiseConfig& noise, int L, GaussianRng& rng) {
  ArrayXd xi = ArrayXd::Zero(L);
  if (noise.sigma == 0.0) return xi;
  for (int j = 0; j < L; ++j) xi[j] = noise.sigma * rng.normal();
  if (noise.zero_mean_projection) xi -= xi.mean();
  return xi;
}

ArrayXd step(const ArrayXd& prev, const ArrayXd& curr, const ModelParams& params,
             const RampConfig* ramp, const NoiseConfig* noise, GaussianRng* rng,
             double t, StepDiag* diag, const StepOptions& opts) {
  const Eigen::Index L = curr.size();
  if (prev.size() != L) throw ValidationError("step: slice lengths differ");
  if (L < 4) throw ValidationError("step: lattice needs at least 4 sites");
  params.validate();

  const double rho0 = opts.recompute_rho0 ? curr.mean() : params.rho0;
  const double coef = params.B * params.C * params.tau() * rho0 * rho0;

  const ArrayXd v = optimal_velocity(prev, rho0, params.rhoc);
  ArrayXd next(L);
  for (Eigen::Index j = 0; j < L; ++j) {
    const double v0 = v[j];
    const double v1 = v[(j + 1) % L];
    const double v2 = v[(j + 2) % L];
    const double dv = v1 - v0;
    const double d2v = v2 - 2.0 * v1 + v0;
    next[j] = curr[j] + coef * (params.gamma * d2v - dv);
  }

  if (ramp != nullptr) {
    ramp->validate(static_cast<int>(L));
    if (ramp->distributed) {
      next += ramp_term(*ramp, 1, t, static_cast<int>(L));
    } else {
      next[ramp->j_in - 1] += ramp->q_in * ramp->schedule(t);
      next[ramp->j_out - 1] -= ramp->q_out * ramp->schedule(t);
    }
  }
  if (noise != nullptr && rng != nullptr && noise->sigma > 0.0)
    next += noise_term(*noise, static_cast<int>(L), *rng);

  if (diag != nullptr) {
    diag->negative_sites = 0;
    diag->nonfinite = false;
    diag->first_bad_site = -1;
    for (Eigen::Index j = 0; j < L; ++j) {
      if (next[j] < 0.0) {
        ++diag->negative_sites;
        if (diag->first_bad_site < 0) diag->first_bad_site = static_cast<int>(j) + 1;
      }
      if (!std::isfinite(next[j])) {
        diag->nonfinite = true;
        if (diag->first_bad_site < 0) diag->first_bad_site = static_cast<int>(j) + 1;
      }
    }
  }
  if (opts.clamp_at_zero) next = next.max(0.0);
  return next;
}

}  // namespace traffic::model
