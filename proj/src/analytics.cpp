#include "robustcool/analytics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "robustcool/numerics.hpp"

namespace robustcool {

double resonance_omega_b(double eta_ratio, double nu) {
  if (eta_ratio <= 2.0)
    throw config_error("resonance condition has no positive solution for "
                       "eta_b/eta_a <= 2");
  return nu / (eta_ratio - 2.0);
}

double resonance_eta_ratio(double omega_b, double nu) {
  if (omega_b <= 0.0)
    throw config_error("resonance ratio requires omega_b > 0");
  return nu / omega_b + 2.0;
}

// Zeroth-order internal Hamiltonian and the 2x2 restriction of the effective
// non-Hermitian dynamics to the {bright, excited} sector, measured from the
// dark-state energy -omega_b:
//   M = [ 2 omega_b            sqrt(2) omega_a            ]
//       [ sqrt(2) omega_a      omega_b - delta - i gamma/2 ]
// The force operator couples the dark state to phi = (eta_b omega_b,
// sqrt(2) eta_a omega_a) in this sector, and
//   S(omega) = -i phi^T (M - omega)^{-1} phi.
Complex spectrum_closed(const ModelParams& p, double omega) {
  p.validate();
  const Complex m00(2.0 * p.omega_b, 0.0);
  const Complex m01(std::sqrt(2.0) * p.omega_a, 0.0);
  const Complex m11(p.omega_b - p.delta, -0.5 * p.gamma);
  const Complex a = m00 - omega;
  const Complex d = m11 - omega;
  const Complex det = a * d - m01 * m01;
  if (std::abs(det) == 0.0)
    throw numerical_error("spectrum_closed: singular resolvent");
  const double phi_b = p.eta_b * p.omega_b;
  const double phi_e = std::sqrt(2.0) * p.eta_a * p.omega_a;
  // phi^T adj(M - omega) phi / det
  const Complex quad =
      phi_b * phi_b * d - 2.0 * phi_b * phi_e * m01 + phi_e * phi_e * a;
  return -kI * quad / det;
}

namespace {

// Internal-only (eta = 0) Liouvillian, its steady state and the force
// operator; shared by spectrum_numeric and the diffusion coefficient.
struct InternalDynamics {
  HilbertSpace space{3, {}};
  Mat gen;     // 9x9
  Mat rho_ss;  // 3x3
  Mat force;   // 3x3
};

Mat vec_of(const Mat& m) {
  return Eigen::Map<const Mat>(m.data(), m.size(), 1);
}

Mat unvec(const Mat& v, int d) {
  return Eigen::Map<const Mat>(v.data(), d, d);
}

InternalDynamics internal_dynamics(const ModelParams& p) {
  InternalDynamics sys;
  const HilbertSpace& s = sys.space;
  Mat h = -p.delta * internal_projector(s, Level::e).mat +
          eit_carrier(s, p.omega_a).mat + ssh_carrier(s, p.omega_b).mat;
  std::vector<std::pair<Mat, double>> channels = {
      {transition(s, Level::g1, Level::e).mat, p.gamma * p.branch_g1},
      {transition(s, Level::g2, Level::e).mat, p.gamma * p.branch_g2}};
  sys.gen = lindblad_generator_dense(h, channels);

  // Steady state by a bordered solve: (L + w q q^d) x = w q with q = vec(1).
  const int d = 3;
  Mat q = vec_of(Mat::Identity(d, d));
  const double w = std::max(1.0, sys.gen.cwiseAbs().maxCoeff());
  Mat bordered = sys.gen + w * q * q.adjoint();
  Eigen::FullPivLU<Mat> lu(bordered);
  if (!lu.isInvertible())
    throw numerical_error("internal dynamics is not mixing (no unique steady state); "
                          "requires omega_a > 0 and gamma > 0");
  Mat x = lu.solve(w * q);
  if ((sys.gen * x).norm() > 1e-9 * std::max(1.0, w))
    throw numerical_error("internal dynamics is not mixing (no unique steady state); "
                          "requires omega_a > 0 and gamma > 0");
  Mat rho = unvec(x, d);
  rho = Mat(0.5 * (rho + rho.adjoint()));
  rho /= rho.trace().real();
  sys.rho_ss = rho;

  sys.force = p.eta_a * p.omega_a * eit_sideband_internal(s).mat +
              p.eta_b * p.omega_b * ssh_sideband_internal(s).mat;
  return sys;
}

}  // namespace

SpectrumPoint spectrum_numeric(const ModelParams& p, double omega) {
  p.validate();
  InternalDynamics sys = internal_dynamics(p);
  const int d2 = 9;
  Mat a = sys.gen + kI * omega * Mat::Identity(d2, d2);
  Eigen::FullPivLU<Mat> lu(a);
  if (!lu.isInvertible())
    throw numerical_error("spectrum_numeric: singular resolvent at this frequency");
  Mat rhs = -vec_of(Mat(sys.force * sys.rho_ss));
  Mat x = lu.solve(rhs);
  SpectrumPoint pt;
  pt.omega = omega;
  pt.value = (sys.force * unvec(x, 3)).trace();
  return pt;
}

RateCoefficients heating_components(const ModelParams& p) {
  p.validate();
  if (p.omega_a == 0.0)
    throw numerical_error("heating_components: degenerate parameters (omega_a = 0 "
                          "leaves no optical pumping path)");

  RateCoefficients rc;
  rc.validity_ok = p.validity_gate_ok();

  const double P = p.nu + 2.0 * p.omega_b;
  const double R = p.nu + p.omega_b - p.delta;
  const double bracket = P * R - 2.0 * p.omega_a * p.omega_a;
  const double dden = bracket * bracket + 0.25 * p.gamma * p.gamma * P * P;
  if (dden == 0.0)
    throw numerical_error("heating_components: degenerate parameters (vanishing "
                          "spectral denominator)");
  const double inv_curly = 2.0 * p.omega_a * p.omega_a * p.gamma / dden;
  rc.curly_D = 1.0 / inv_curly;

  rc.a_plus_eit = p.eta_a * p.eta_a * P * P * inv_curly;
  rc.a_plus_ssh = p.eta_b * p.eta_b * p.omega_b * p.omega_b * inv_curly;
  rc.a_plus_int = -2.0 * p.eta_a * p.eta_b * P * p.omega_b * inv_curly;
  const double amp = p.eta_a * P - p.eta_b * p.omega_b;
  rc.a_plus = amp * amp * inv_curly;

  rc.a_minus = 2.0 * spectrum_closed(p, p.nu).real();

  // Diffusion from recoil on the excited population; the zeroth-order steady
  // state is the dark state, so this vanishes for any mixing parameters.
  // Populations below the direct-solve resolution are treated as zero.
  InternalDynamics sys = internal_dynamics(p);
  double pop_e = std::real(sys.rho_ss(2, 2));
  if (pop_e < 1e-12) pop_e = 0.0;
  rc.D = p.gamma * p.eta_a * p.eta_a * pop_e / 3.0;

  rc.a_plus += 2.0 * rc.D;
  rc.a_minus += 2.0 * rc.D;
  rc.W = rc.a_minus - rc.a_plus;
  rc.n_final = (rc.W > 0.0) ? rc.a_plus / rc.W
                            : std::numeric_limits<double>::infinity();
  return rc;
}

double cooling_rate_closed(const ModelParams& p) {
  p.validate();
  const double num = 8.0 * p.gamma * p.eta_a * p.eta_a * p.nu * p.nu * p.omega_a *
                     p.omega_a;
  const double q = p.nu - 2.0 * p.omega_b;
  const double bracket =
      2.0 * p.omega_a * p.omega_a + q * (p.omega_b - p.nu - p.delta);
  const double den = bracket * bracket + 0.25 * p.gamma * p.gamma * q * q;
  return num / den;
}

namespace {

struct AxisFit {
  std::optional<double> slope;
  std::string error;
};

AxisFit fit_axis(const ModelParams& p, const std::vector<double>& offsets,
                 bool axis_a) {
  AxisFit out;
  std::vector<double> log_off, log_n;
  double prev = -std::numeric_limits<double>::infinity();
  for (double off : offsets) {
    if (off <= 0.0) {
      out.error = "fit-window error: offsets must be positive";
      return out;
    }
    ModelParams q = p;
    (axis_a ? q.omega_a : q.omega_b) += off;
    const RateCoefficients rc = heating_components(q);
    if (!(rc.n_final > 0.0) || !std::isfinite(rc.n_final)) {
      out.error = "fit-window error: n_final is not positive over the window "
                  "(offset " + std::to_string(off) + " gives n_final = " +
                  std::to_string(rc.n_final) + ")";
      return out;
    }
    if (rc.n_final < prev) {
      out.error = "fit-window error: n_final is non-monotone over the window";
      return out;
    }
    prev = rc.n_final;
    log_off.push_back(std::log(off));
    log_n.push_back(std::log(rc.n_final));
  }
  out.slope = linear_fit(log_off, log_n).slope;
  return out;
}

}  // namespace

RobustnessResult robustness_exponents(const ModelParams& p,
                                      const std::vector<double>& offsets) {
  if (offsets.empty())
    throw config_error("robustness_exponents: offsets must not be empty");
  RobustnessResult res;
  AxisFit a = fit_axis(p, offsets, true);
  AxisFit b = fit_axis(p, offsets, false);
  res.slope_a = a.slope;
  res.a_error = a.error;
  res.slope_b = b.slope;
  res.b_error = b.error;
  return res;
}

}  // namespace robustcool
