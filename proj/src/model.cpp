#include "robustcool/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "robustcool/numerics.hpp"

namespace robustcool {

std::string to_string(CouplingOrder order) {
  return order == CouplingOrder::first_order ? "first_order" : "exact_exponential";
}

CouplingOrder coupling_order_from_string(const std::string& s) {
  if (s == "first_order") return CouplingOrder::first_order;
  if (s == "exact_exponential") return CouplingOrder::exact_exponential;
  throw config_error("unknown coupling_order value: " + s);
}

void ModelParams::validate() const {
  if (nu <= 0.0) throw config_error("nu must be positive");
  // gamma = 0 is allowed for closed-system trajectory checks; the analytic
  // layer rejects it through its mixing precondition.
  if (gamma < 0.0) throw config_error("gamma must be nonnegative");
  if (omega_a < 0.0) throw config_error("omega_a must be nonnegative");
  if (omega_b < 0.0) throw config_error("omega_b must be nonnegative");
  if (eta_a < 0.0 || eta_b < 0.0)
    throw config_error("Lamb-Dicke parameters must be nonnegative");
  if (branch_g1 < 0.0 || branch_g2 < 0.0)
    throw config_error("branching fractions must be nonnegative");
  if (std::abs(branch_g1 + branch_g2 - 1.0) > 1e-12)
    throw config_error("branching fractions must sum to 1");
  if (cutoffs.empty()) throw config_error("at least one mode cutoff required");
  for (int c : cutoffs)
    if (c < 1) throw config_error("cutoffs must be >= 1");
}

HilbertSpace ModelParams::space() const {
  if (cutoffs.size() != 1)
    throw dimension_error("the single-ion model uses exactly one mode");
  return HilbertSpace(3, cutoffs);
}

Operator eit_carrier(const HilbertSpace& s, double omega_a) {
  return Operator(s, omega_a * (sigma_x(s, Level::g1, Level::e).mat +
                                sigma_x(s, Level::g2, Level::e).mat));
}

Operator ssh_carrier(const HilbertSpace& s, double omega_b) {
  return Operator(s, omega_b * sigma_x(s, Level::g1, Level::g2).mat);
}

Operator eit_sideband_internal(const HilbertSpace& s) {
  return Operator(s, sigma_y(s, Level::g1, Level::e).mat -
                         sigma_y(s, Level::g2, Level::e).mat);
}

Operator ssh_sideband_internal(const HilbertSpace& s) {
  return sigma_y(s, Level::g1, Level::g2);
}

Operator mode_displacement(const HilbertSpace& s, int mode, double phase) {
  const int c = s.mode_cutoffs.at(mode);
  Mat b = annihilation(c);
  Mat x = b + b.adjoint();
  // x is Hermitian, so exp(i phase x) via its eigendecomposition is unitary
  // at any truncation.
  Eigen::SelfAdjointEigenSolver<Mat> es(x);
  Vec phases(c + 1);
  for (int k = 0; k <= c; ++k)
    phases(k) = std::exp(kI * phase * es.eigenvalues()(k));
  Mat d = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return embed_mode_op(s, mode, d);
}

Operator build_h0(const ModelParams& p) {
  p.validate();
  const HilbertSpace s = p.space();
  Mat h = p.nu * number_operator(s, 0).mat - p.delta * internal_projector(s, Level::e).mat;
  return Operator(s, std::move(h));
}

Operator build_h_eit(const ModelParams& p) {
  p.validate();
  const HilbertSpace s = p.space();
  if (p.coupling_order == CouplingOrder::first_order) {
    Mat h = eit_carrier(s, p.omega_a).mat +
            p.eta_a * p.omega_a *
                (eit_sideband_internal(s).mat * position_coupling(s, 0).mat);
    return Operator(s, std::move(h));
  }
  // Opposite displacement phases on the two legs; expands to the first-order
  // form carrier + eta_a omega_a (sigma_y^{g1e} - sigma_y^{g2e})(b + b^d).
  Mat dm = mode_displacement(s, 0, -p.eta_a).mat;
  Mat dp = mode_displacement(s, 0, +p.eta_a).mat;
  Mat raw = p.omega_a * (dm * transition(s, Level::e, Level::g1).mat +
                         dp * transition(s, Level::e, Level::g2).mat);
  return Operator(s, Mat(raw + raw.adjoint()));
}

Operator build_h_ssh(const ModelParams& p) {
  p.validate();
  const HilbertSpace s = p.space();
  if (p.coupling_order == CouplingOrder::first_order) {
    Mat h = ssh_carrier(s, p.omega_b).mat +
            p.eta_b * p.omega_b *
                (ssh_sideband_internal(s).mat * position_coupling(s, 0).mat);
    return Operator(s, std::move(h));
  }
  Mat d = mode_displacement(s, 0, p.eta_b).mat;
  Mat raw = p.omega_b * (d * transition(s, Level::g1, Level::g2).mat);
  return Operator(s, Mat(raw + raw.adjoint()));
}

Operator build_hamiltonian(const ModelParams& p) {
  const HilbertSpace s = p.space();
  return Operator(s, build_h0(p).mat + build_h_eit(p).mat + build_h_ssh(p).mat);
}

std::vector<JumpChannel> build_jump_channels_on(
    const HilbertSpace& s, double gamma, double branch_g1, double branch_g2,
    const std::vector<double>& recoil_etas, int n_recoil_points,
    CouplingOrder order) {
  if (n_recoil_points < 1)
    throw config_error("build_jump_channels: need at least one recoil node");
  if (static_cast<int>(recoil_etas.size()) != s.n_modes())
    throw dimension_error("build_jump_channels: one recoil eta per mode required");

  bool no_recoil = true;
  for (double e : recoil_etas)
    if (e != 0.0) no_recoil = false;

  std::vector<JumpChannel> channels;
  const Mat sig_g1e = transition(s, Level::g1, Level::e).mat;
  const Mat sig_g2e = transition(s, Level::g2, Level::e).mat;

  if (no_recoil) {
    channels.push_back({Operator(s, sig_g1e), gamma * branch_g1});
    channels.push_back({Operator(s, sig_g2e), gamma * branch_g2});
    return channels;
  }

  const Quadrature q = gauss_legendre(n_recoil_points);
  for (int k = 0; k < n_recoil_points; ++k) {
    Mat recoil;
    if (order == CouplingOrder::exact_exponential) {
      recoil = Mat::Identity(s.dim(), s.dim());
      for (int m = 0; m < s.n_modes(); ++m) {
        if (recoil_etas[m] == 0.0) continue;
        recoil = mode_displacement(s, m, recoil_etas[m] * q.nodes[k]).mat * recoil;
      }
    } else {
      recoil = Mat::Identity(s.dim(), s.dim());
      for (int m = 0; m < s.n_modes(); ++m) {
        if (recoil_etas[m] == 0.0) continue;
        recoil += kI * recoil_etas[m] * q.nodes[k] * position_coupling(s, m).mat;
      }
    }
    const double node_weight = 0.5 * q.weights[k];  // the 1/2 of the angular average
    channels.push_back({Operator(s, Mat(sig_g1e * recoil)),
                        gamma * branch_g1 * node_weight});
    channels.push_back({Operator(s, Mat(sig_g2e * recoil)),
                        gamma * branch_g2 * node_weight});
  }
  return channels;
}

std::vector<JumpChannel> build_jump_channels(const ModelParams& p,
                                             int n_recoil_points) {
  p.validate();
  return build_jump_channels_on(p.space(), p.gamma, p.branch_g1, p.branch_g2,
                                {p.eta_a}, n_recoil_points, p.coupling_order);
}

RamanEffective raman_effective(double omega_p, double eta_p, double delta, double nu,
                               int n) {
  if (delta == 0.0 || delta * delta == nu * nu)
    throw numerical_error("raman_effective: adiabatic elimination is singular at "
                          "delta = 0 or |delta| = nu");
  RamanEffective out;
  const double d2 = delta * delta - nu * nu;
  out.omega_b =
      omega_p * omega_p * (1.0 / delta - delta / d2 * eta_p * eta_p * (2.0 * n + 1.0));
  const double coupling =
      omega_p * omega_p * eta_p * (2.0 * delta * delta - nu * nu) / (delta * d2);
  if (out.omega_b != 0.0) out.eta_b = coupling / out.omega_b;
  return out;
}

std::pair<double, double> gradient_effective(double lambda, double nu,
                                             double omega_d) {
  if (nu <= 0.0) throw config_error("gradient_effective: nu must be positive");
  return {omega_d, lambda / nu};
}

double geometry_eta_ratio(double theta_a_deg) {
  if (theta_a_deg < 0.0 || theta_a_deg >= 90.0)
    throw config_error("geometry_eta_ratio: beam A angle must lie in [0, 90) degrees");
  return 2.0 / std::cos(theta_a_deg * M_PI / 180.0);
}

Vec interference_dark_state(const ModelParams& p) {
  p.validate();
  const HilbertSpace s = p.space();
  const double c = p.eta_b * p.omega_b / (p.nu + 2.0 * p.omega_b);
  Vec psi = Vec::Zero(s.dim());
  psi(s.index(level_index(Level::g1), {0})) = 1.0;
  psi(s.index(level_index(Level::g2), {0})) = -1.0;
  psi(s.index(level_index(Level::g1), {1})) = kI * c;
  psi(s.index(level_index(Level::g2), {1})) = kI * c;
  psi.normalize();
  return psi;
}

}  // namespace robustcool
