#pragma once

#include <optional>
#include <string>
#include <vector>

#include "robustcool/model.hpp"

namespace robustcool {

// Closed-form heating/cooling coefficients of the phonon rate equation.
// a_plus splits into the EIT, Stark-shift and interference parts; the total
// vanishes identically on the resonance condition. curly_D is the common
// spectral denominator, D the spontaneous-emission diffusion coefficient
// (zero whenever the internal steady state is the dark state).
struct RateCoefficients {
  double a_plus_eit = 0.0;
  double a_plus_ssh = 0.0;
  double a_plus_int = 0.0;
  double a_plus = 0.0;
  double a_minus = 0.0;
  double D = 0.0;
  double curly_D = 0.0;
  double W = 0.0;        // a_minus - a_plus
  double n_final = 0.0;  // a_plus / (a_minus - a_plus); +inf when heating wins
  bool validity_ok = true;  // omega_a >= eta_a * nu
};

struct SpectrumPoint {
  double omega = 0.0;
  Complex value{0.0, 0.0};
};

// Interference resonance: eta_b/eta_a = nu/omega_b + 2.
double resonance_omega_b(double eta_ratio, double nu);   // solve for omega_b
double resonance_eta_ratio(double omega_b, double nu);   // solve for the ratio

// Closed-form fluctuation spectrum S(omega) of the sideband force operator,
// evaluated on the zeroth-order internal dynamics (2x2 resolvent in the
// bright/excited sector). A_± = 2 Re[D + S(∓nu)].
Complex spectrum_closed(const ModelParams& p, double omega);

// Same spectrum from the full internal Liouvillian via the quantum
// regression theorem: S(omega) = Tr[F X] with (L0 + i omega) X = -F rho_ss.
SpectrumPoint spectrum_numeric(const ModelParams& p, double omega);

RateCoefficients heating_components(const ModelParams& p);

// Cooling rate W on the resonance condition (closed form).
double cooling_rate_closed(const ModelParams& p);

// Log-log slopes of n_final against Rabi-frequency offsets applied on each
// axis separately. A degenerate axis (n_final <= 0 somewhere, or a
// non-monotone window) is reported through the error string instead of a
// slope.
struct RobustnessResult {
  std::optional<double> slope_a;
  std::optional<double> slope_b;
  std::string a_error;
  std::string b_error;
};
RobustnessResult robustness_exponents(const ModelParams& p,
                                      const std::vector<double>& offsets);

}  // namespace robustcool
