#include <doctest.h>

#include <cmath>

#include "traffic/model.hpp"
#include "traffic/stability.hpp"

using namespace traffic;

namespace {

ModelParams reference(double a) {
  ModelParams p;
  p.B = 1.6;
  p.C = 0.7;
  p.gamma = 0.4;
  p.rho0 = 0.2;
  p.rhoc = 0.2;
  p.a = a;
  return p;
}

}  // namespace

TEST_CASE("linear coefficients at the reference point") {
  // Independent arithmetic: V'(0.2) = -25, so w1 = -0.04*1.6*0.7*(-25) = 1.12
  // and w2 = -(3/2)(1/3.5) 1.12^2 + 0.1*1.12 = -0.4256.
  const auto c = stability::linear_coeffs(reference(3.5));
  CHECK(c.w1 == doctest::Approx(1.12).epsilon(1e-12));
  CHECK(c.w2 == doctest::Approx(-0.4256).epsilon(1e-12));
  CHECK(c.w1 > 0.0);  // V' < 0 forces w1 > 0
}

TEST_CASE("gamma = 1/2 removes the stabilizing term") {
  ModelParams p = reference(2.0);
  p.gamma = 0.5;
  const auto c = stability::linear_coeffs(p);
  CHECK(c.w2 == doctest::Approx(-1.5 * p.tau() * c.w1 * c.w1).epsilon(1e-12));
  CHECK(c.w2 < 0.0);
  CHECK(!stability::neutral_a(0.2, p).has_value());
}

TEST_CASE("neutral sensitivity zeroes w2 and fixes the stability side") {
  for (double rho0 : {0.1, 0.15, 0.2, 0.3}) {
    for (double gamma : {0.0, 0.05, 0.2, 0.4}) {
      ModelParams p = reference(1.0);
      p.gamma = gamma;
      p.rho0 = rho0;
      const auto na = stability::neutral_a(rho0, p);
      REQUIRE(na.has_value());
      ModelParams at = p;
      at.a = *na;
      const auto c = stability::linear_coeffs(at);
      CHECK(std::abs(c.w2) < 1e-12 * std::max(1.0, c.w1 * c.w1 / *na));
      at.a = *na * 1.10;
      CHECK(stability::linear_coeffs(at).w2 > 0.0);  // stable above
      at.a = *na * 0.90;
      CHECK(stability::linear_coeffs(at).w2 < 0.0);  // unstable below
    }
  }
}

TEST_CASE("the printed reciprocal form differs from the derived one") {
  // The neutral condition implemented here is the one forced by w2 = 0;
  // its reciprocal variant does not zero w2 away from the fixed points of
  // x -> 1/x.
  ModelParams p = reference(1.0);
  const auto na = stability::neutral_a(0.2, p);
  REQUIRE(na.has_value());
  const double f = 0.2 * 0.2 * p.B * p.C * model::ov_derivative(0.2, p.rhoc, 1.0, 1);
  const double reciprocal = -(1.0 - 2.0 * p.gamma) / (3.0 * f);
  REQUIRE(std::abs(reciprocal - *na) > 1e-3);  // genuinely different here
  ModelParams at = p;
  at.a = reciprocal;
  CHECK(std::abs(stability::linear_coeffs(at).w2) > 1e-3);
}

TEST_CASE("neutral sensitivity grows with the passing rate") {
  ModelParams p = reference(1.0);
  double prev = 0.0;
  for (double gamma : {0.05, 0.2, 0.4, 0.45}) {
    p.gamma = gamma;
    const auto na = stability::neutral_a(0.2, p);
    REQUIRE(na.has_value());
    CHECK(*na > prev);
    prev = *na;
  }
}

TEST_CASE("area occupancy uplifts the neutral curve maximum") {
  double prev_apex = 0.0;
  for (double B : {1.0, 1.3, 1.6}) {
    ModelParams p = reference(1.0);
    p.B = B;
    p.gamma = 0.05;
    double apex = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double rho = 0.05 + (0.45 - 0.05) * i / 400.0;
      const auto na = stability::neutral_a(rho, p);
      if (na) apex = std::max(apex, *na);
    }
    CHECK(apex > prev_apex);
    prev_apex = apex;
  }
}

TEST_CASE("neutral curve peaks at rhoc and is symmetric in the argument") {
  ModelParams p = reference(1.0);
  p.B = 1.0;
  p.gamma = 0.05;
  const auto apex = stability::neutral_a(p.rhoc, p);
  REQUIRE(apex.has_value());
  for (double rho : {0.1, 0.15, 0.25, 0.3}) {
    const auto na = stability::neutral_a(rho, p);
    REQUIRE(na.has_value());
    CHECK(*na < *apex);
  }
  // Reflection u -> -u of the optimal-velocity argument maps densities
  // 1/(1/rhoc + u) <-> 1/(1/rhoc - u).
  for (double u : {0.3, 0.9, 1.7}) {
    const double rp = 1.0 / (1.0 / p.rhoc + u);
    const double rm = 1.0 / (1.0 / p.rhoc - u);
    const auto np = stability::neutral_a(rp, p);
    const auto nm = stability::neutral_a(rm, p);
    REQUIRE(np.has_value());
    REQUIRE(nm.has_value());
    CHECK(*np == doctest::Approx(*nm).epsilon(1e-12));
  }
}

TEST_CASE("dispersion roots at k = 0 are {0, 1}") {
  const double z = stability::dispersion_max_root(0.2, reference(3.5), 0.0);
  CHECK(z == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("far above neutral every mode decays") {
  ModelParams p = reference(25.0);  // neutral at the reference point is 16.8
  for (int i = 1; i <= 256; ++i) {
    const double k = M_PI * i / 256.0;
    CHECK(stability::dispersion_max_root(0.2, p, k) < 1.0);
  }
}

TEST_CASE("small-k growth of the oracle reproduces w2") {
  for (double a : {3.0, 8.0, 20.0}) {
    const ModelParams p = reference(a);
    const auto c = stability::linear_coeffs(p);
    // Richardson extrapolation of -log|z| / (tau k^2) at k and k/2.
    auto estimate = [&](double k) {
      return -std::log(stability::dispersion_max_root(0.2, p, k)) / (p.tau() * k * k);
    };
    const double k = 1e-3;
    const double w2_hat = (4.0 * estimate(k / 2) - estimate(k)) / 3.0;
    CHECK(w2_hat == doctest::Approx(c.w2).epsilon(0.01));
  }
}

TEST_CASE("lattice verdict includes the translation mode") {
  const auto stable = stability::lattice_verdict(0.2, reference(20.0), 100);
  CHECK(stable.stable);
  CHECK(stable.max_growth_factor >= 1.0);
  const auto unstable = stability::lattice_verdict(0.2, reference(3.5), 100);
  CHECK(!unstable.stable);
  CHECK(unstable.max_growth_factor > 1.0);
  CHECK(unstable.argmax_k > 0.0);
}

TEST_CASE("critical densities at the published sensitivity") {
  const auto cd = stability::critical_densities(3.93, reference(3.93));
  REQUIRE(cd.unstable_band);
  // Frozen from an independent high-precision evaluation of the neutral
  // condition 16.8 sech^2(1/rho - 5) = 3.93.
  CHECK(cd.rho_c1 == doctest::Approx(0.157353579289638).epsilon(1e-7));
  CHECK(cd.rho_c2 == doctest::Approx(0.274357034449403).epsilon(1e-7));
  // Root-finding contract.
  const ModelParams p = reference(3.93);
  CHECK(std::abs(*stability::neutral_a(cd.rho_c1, p) - 3.93) < 1e-8);
  CHECK(std::abs(*stability::neutral_a(cd.rho_c2, p) - 3.93) < 1e-8);
  // Inside the band the flow is unstable, outside stable.
  CHECK(!stability::lattice_verdict(0.5 * (cd.rho_c1 + cd.rho_c2), p, 100).stable);
  CHECK(stability::lattice_verdict(cd.rho_c1 * 0.8, p, 100).stable);

  const auto none = stability::critical_densities(17.0, reference(17.0));
  CHECK(!none.unstable_band);  // above the apex: stable everywhere
}

TEST_CASE("separatrix value and linear scaling") {
  const double ac = stability::separatrix_ac(reference(3.5));
  CHECK(ac == doctest::Approx(3.92).epsilon(1e-12));
  ModelParams doubled = reference(3.5);
  doubled.C *= 2.0;  // a_c is linear in C V'
  CHECK(stability::separatrix_ac(doubled) == doctest::Approx(2.0 * ac).epsilon(1e-12));
  CHECK(3.5 < ac);
  CHECK(5.0 > ac);
}

TEST_CASE("sweep single point equals the scalar operations") {
  const ModelParams p = reference(3.5);
  const auto pts = stability::sweep({"rho0", 0.2, 0.2, 1}, {"a", 3.5, 3.5, 1}, p);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].w2 == doctest::Approx(stability::linear_coeffs(p).w2).epsilon(1e-14));
  CHECK(*pts[0].neutral == doctest::Approx(*stability::neutral_a(0.2, p)).epsilon(1e-14));
  CHECK(pts[0].separatrix == doctest::Approx(stability::separatrix_ac(p)).epsilon(1e-14));
  CHECK(pts[0].unstable);
  CHECK(!pts[0].kink_exists);  // gamma = 0.4
  CHECK_THROWS_AS(stability::sweep({"bogus", 0, 1, 2}, {"a", 1, 2, 2}, p), ValidationError);
}
