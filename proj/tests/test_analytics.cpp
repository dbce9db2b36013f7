#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "robustcool/analytics.hpp"

using namespace robustcool;

namespace {

ModelParams base_params() {
  ModelParams p;
  p.nu = 1.0;
  p.gamma = 1.0;
  p.delta = 0.0;
  p.omega_a = 0.3;
  p.omega_b = 0.5;
  p.eta_a = 0.02;
  p.eta_b = 0.08;
  p.cutoffs = {10};
  return p;
}

// Independent scalar route to A+ and its parts: the printed component
// formulas with the spectral denominator written in the conventions of this
// model (excited level at -delta, gamma the population decay rate).
struct ClosedForm {
  double eit, ssh, inter, total, curly;
};
ClosedForm closed_form_reference(const ModelParams& p) {
  const double P = p.nu + 2.0 * p.omega_b;
  const double R = p.nu + p.omega_b - p.delta;
  const double bracket = P * R - 2.0 * p.omega_a * p.omega_a;
  const double dden = bracket * bracket + 0.25 * p.gamma * p.gamma * P * P;
  const double inv_curly = 2.0 * p.omega_a * p.omega_a * p.gamma / dden;
  ClosedForm c;
  c.eit = p.eta_a * p.eta_a * P * P * inv_curly;
  c.ssh = p.eta_b * p.eta_b * p.omega_b * p.omega_b * inv_curly;
  c.inter = -2.0 * p.eta_a * p.eta_b * P * p.omega_b * inv_curly;
  const double amp = p.eta_a * P - p.eta_b * p.omega_b;
  c.total = amp * amp * inv_curly;
  c.curly = 1.0 / inv_curly;
  return c;
}

}  // namespace

TEST_CASE("resonance condition solves") {
  CHECK(resonance_omega_b(4.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(resonance_omega_b(2.0 * std::sqrt(2.0), 1.0) ==
        doctest::Approx(0.5 * (std::sqrt(2.0) + 1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(resonance_omega_b(2.0, 1.0), config_error);
  CHECK_THROWS_AS(resonance_omega_b(1.5, 1.0), config_error);
  CHECK(resonance_eta_ratio(0.5, 1.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK_THROWS_AS(resonance_eta_ratio(0.0, 1.0), config_error);
}

TEST_CASE("heating components against the independent scalar evaluation") {
  ModelParams p = base_params();
  p.omega_b = 0.45;  // off resonance so every component is exercised
  const RateCoefficients rc = heating_components(p);
  const ClosedForm ref = closed_form_reference(p);
  CHECK(rc.a_plus_eit == doctest::Approx(ref.eit).epsilon(1e-12));
  CHECK(rc.a_plus_ssh == doctest::Approx(ref.ssh).epsilon(1e-12));
  CHECK(rc.a_plus_int == doctest::Approx(ref.inter).epsilon(1e-12));
  CHECK(rc.a_plus == doctest::Approx(ref.total).epsilon(1e-12));
  CHECK(rc.curly_D == doctest::Approx(ref.curly).epsilon(1e-12));
  // the component split sums to the total
  CHECK(rc.a_plus ==
        doctest::Approx(rc.a_plus_eit + rc.a_plus_ssh + rc.a_plus_int).epsilon(1e-12));
  // frozen reference values for this parameter point
  CHECK(rc.a_plus_eit == doctest::Approx(3.45036090599851e-05).epsilon(1e-10));
  CHECK(rc.a_plus_ssh == doctest::Approx(3.09672280759977e-05).epsilon(1e-10));
  CHECK(rc.a_plus_int == doctest::Approx(-6.53752592715507e-05).epsilon(1e-10));
  CHECK(rc.a_plus == doctest::Approx(9.55778644320916e-08).epsilon(1e-10));

  // cross-check the same point against the numeric spectrum route
  const double a_plus_numeric = 2.0 * spectrum_numeric(p, -p.nu).value.real();
  CHECK(rc.a_plus == doctest::Approx(a_plus_numeric).epsilon(1e-8));
  const double a_minus_numeric = 2.0 * spectrum_numeric(p, p.nu).value.real();
  CHECK(rc.a_minus == doctest::Approx(a_minus_numeric).epsilon(1e-8));
}

TEST_CASE("EIT limit: omega_b = 0 leaves only the EIT component") {
  ModelParams p = base_params();
  p.omega_b = 0.0;
  p.eta_b = 0.0;
  const RateCoefficients rc = heating_components(p);
  CHECK(rc.a_plus_ssh == 0.0);
  CHECK(rc.a_plus_int == 0.0);
  const ClosedForm ref = closed_form_reference(p);
  CHECK(rc.a_plus == doctest::Approx(ref.eit).epsilon(1e-12));
  CHECK(rc.a_plus == doctest::Approx(rc.a_plus_eit).epsilon(1e-12));
}

TEST_CASE("interference cancellation is exact on the resonance condition") {
  std::mt19937 rng(20260809);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    ModelParams p;
    p.nu = 1.0;
    p.gamma = 0.2 + 4.8 * u(rng);
    p.delta = -3.0 + 6.0 * u(rng);
    p.omega_a = 0.1 + 0.9 * u(rng);
    p.eta_a = 0.01 + 0.09 * u(rng);
    const double ratio = 2.2 + 5.8 * u(rng);
    p.eta_b = ratio * p.eta_a;
    p.omega_b = resonance_omega_b(ratio, p.nu);
    const RateCoefficients rc = heating_components(p);
    const double scale = std::max(rc.a_plus_eit, rc.a_plus_ssh);
    CHECK(std::abs(rc.a_plus) <= 1e-14 * scale);
  }
}

TEST_CASE("spectrum routes agree over random parameters inside the validity gate") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int tested = 0;
  while (tested < 100) {
    ModelParams p;
    p.nu = 1.0;
    p.gamma = 0.2 + 4.8 * u(rng);
    p.delta = -3.0 + 6.0 * u(rng);
    p.omega_a = 0.1 + 0.9 * u(rng);
    p.omega_b = u(rng);
    p.eta_a = 0.01 + 0.09 * u(rng);
    p.eta_b = (0.5 + 7.5 * u(rng)) * p.eta_a;
    if (!p.validity_gate_ok()) continue;
    ++tested;

    const RateCoefficients rc = heating_components(p);
    const double spec_plus = 2.0 * spectrum_numeric(p, -p.nu).value.real();
    const double spec_minus = 2.0 * spectrum_numeric(p, p.nu).value.real();
    const double scale_p = std::max({std::abs(rc.a_plus), rc.a_plus_eit, 1e-300});
    CHECK(std::abs(rc.a_plus - spec_plus) <= 1e-6 * scale_p);
    CHECK(std::abs(rc.a_minus - spec_minus) <=
          1e-6 * std::max(std::abs(rc.a_minus), std::abs(spec_minus)));

    // closed 2x2 resolvent equals the 9x9 Liouvillian route
    const Complex closed = spectrum_closed(p, 0.37);
    const Complex numeric = spectrum_numeric(p, 0.37).value;
    CHECK(std::abs(closed - numeric) <= 1e-9 * std::max(1e-300, std::abs(closed)));
  }
}

TEST_CASE("spectrum is bilinear in the force operator") {
  ModelParams p = base_params();
  p.omega_b = 0.37;
  const Complex s1 = spectrum_closed(p, -p.nu);
  ModelParams q = p;
  q.eta_a *= 3.0;
  q.eta_b *= 3.0;
  const Complex s9 = spectrum_closed(q, -p.nu);
  CHECK(std::abs(s9 - 9.0 * s1) <= 1e-12 * std::abs(s9));

  const SpectrumPoint n1 = spectrum_numeric(p, -p.nu);
  const SpectrumPoint n9 = spectrum_numeric(q, -p.nu);
  CHECK(std::abs(n9.value - 9.0 * n1.value) <= 1e-9 * std::abs(n9.value));
}

TEST_CASE("spectrum precondition rejects a non-mixing internal model") {
  ModelParams p = base_params();
  p.omega_a = 0.0;
  CHECK_THROWS_AS(spectrum_numeric(p, 1.0), numerical_error);
  CHECK_THROWS_AS(heating_components(p), numerical_error);
}

TEST_CASE("closed-form cooling rate") {
  SUBCASE("reduces to 2 gamma eta_a^2 nu^2 / omega_a^2 at omega_b = nu/2") {
    ModelParams p = base_params();
    const double w = cooling_rate_closed(p);
    const double reduced = 2.0 * p.gamma * p.eta_a * p.eta_a * p.nu * p.nu /
                           (p.omega_a * p.omega_a);
    CHECK(w == doctest::Approx(reduced).epsilon(1e-14));
    // and with eta_b = 4 eta_a this equals gamma eta_b^2 nu^2 / (8 omega_a^2)
    const double via_eta_b = p.gamma * p.eta_b * p.eta_b * p.nu * p.nu /
                             (8.0 * p.omega_a * p.omega_a);
    CHECK(w == doctest::Approx(via_eta_b).epsilon(1e-14));
    CHECK(w == doctest::Approx(2.0 * 0.02 * 0.02 / 0.09).epsilon(1e-12));
  }
  SUBCASE("vanishes with eta_a") {
    ModelParams p = base_params();
    p.eta_a = 0.0;
    CHECK(cooling_rate_closed(p) == 0.0);
  }
  SUBCASE("equals a_minus - a_plus from the spectrum route on resonance") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
      ModelParams p;
      p.nu = 1.0;
      p.gamma = 0.2 + 4.8 * u(rng);
      p.delta = -3.0 + 6.0 * u(rng);
      p.omega_a = 0.1 + 0.9 * u(rng);
      p.eta_a = 0.01 + 0.09 * u(rng);
      const double ratio = 2.2 + 5.8 * u(rng);
      p.eta_b = ratio * p.eta_a;
      p.omega_b = resonance_omega_b(ratio, p.nu);
      const RateCoefficients rc = heating_components(p);
      const double w_closed = cooling_rate_closed(p);
      CHECK(std::abs(w_closed - (rc.a_minus - rc.a_plus)) <= 1e-6 * w_closed);
    }
  }
}

TEST_CASE("n_final is invariant under a joint Lamb-Dicke rescaling") {
  ModelParams p = base_params();
  p.omega_b = 0.41;
  const RateCoefficients rc1 = heating_components(p);
  ModelParams q = p;
  q.eta_a *= 2.5;
  q.eta_b *= 2.5;
  const RateCoefficients rc2 = heating_components(q);
  CHECK(rc1.n_final == doctest::Approx(rc2.n_final).epsilon(1e-12));
  CHECK(rc2.a_plus == doctest::Approx(rc1.a_plus * 6.25).epsilon(1e-12));
  CHECK(rc2.a_minus == doctest::Approx(rc1.a_minus * 6.25).epsilon(1e-12));
}

TEST_CASE("diffusion coefficient vanishes on the internal dark state") {
  ModelParams p = base_params();
  p.omega_b = 0.45;
  const RateCoefficients rc = heating_components(p);
  CHECK(std::abs(rc.D) < 1e-14);
}

TEST_CASE("validity gate flag") {
  ModelParams p = base_params();
  p.omega_a = 0.01;  // < eta_a * nu would need eta_a > 0.01
  p.eta_a = 0.05;
  p.eta_b = 0.2;
  const RateCoefficients rc = heating_components(p);
  CHECK(!rc.validity_ok);
}

TEST_CASE("robustness exponents") {
  ModelParams p = base_params();
  p.eta_a = 0.05;
  p.eta_b = 0.2;
  std::vector<double> offsets;
  for (int k = 0; k < 7; ++k)
    offsets.push_back(1e-3 * std::pow(10.0, double(k) / 6.0));

  const RobustnessResult res = robustness_exponents(p, offsets);

  // omega_b offsets break the interference quadratically
  REQUIRE(res.slope_b.has_value());
  CHECK(*res.slope_b > 1.7);
  CHECK(*res.slope_b < 2.3);

  // omega_a never enters the cancellation amplitude: n_final stays
  // identically zero along this axis, which the fit reports as a degenerate
  // window rather than a slope.
  CHECK(!res.slope_a.has_value());
  CHECK(res.a_error.find("fit-window") != std::string::npos);

  CHECK_THROWS_AS(robustness_exponents(p, {}), config_error);
}

TEST_CASE("degenerate parameter guard") {
  ModelParams p = base_params();
  p.omega_a = 0.0;
  CHECK_THROWS_AS(heating_components(p), numerical_error);
}
