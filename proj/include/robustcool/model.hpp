#pragma once

#include <optional>
#include <string>
#include <vector>

#include "robustcool/hilbert.hpp"

namespace robustcool {

// How the oscillator enters the couplings: expanded to first order in the
// Lamb-Dicke parameters (the working model), or with the full displacement
// exponentials (kept as a cross-check).
enum class CouplingOrder { first_order, exact_exponential };

std::string to_string(CouplingOrder order);
CouplingOrder coupling_order_from_string(const std::string& s);

// Effective parameters of the three-level-plus-oscillator model.
//
// Frame and sign conventions used throughout:
//  * rotating frame with the g-manifold at zero energy and the excited level
//    at -delta, i.e. H0 = nu b^d b - delta |e><e|; delta > 0 is blue detuning;
//  * sigma_y^{m,n} = i|m><n| - i|n><m|;
//  * gamma is the population decay rate of |e> (pure decay goes as e^{-gamma t}).
struct ModelParams {
  double nu = 1.0;        // trap frequency (unit scale)
  double gamma = 1.0;     // excited-state linewidth
  double delta = 0.0;     // single-photon detuning of the EIT pair
  double omega_a = 0.0;   // EIT Rabi frequency (each beam)
  double omega_b = 0.0;   // effective Stark-shift Rabi frequency
  double eta_a = 0.0;     // EIT Lamb-Dicke parameter
  double eta_b = 0.0;     // effective Stark-shift Lamb-Dicke parameter
  double branch_g1 = 0.5;  // decay branching fraction into g1
  double branch_g2 = 0.5;  // decay branching fraction into g2
  std::vector<int> cutoffs{15};
  CouplingOrder coupling_order = CouplingOrder::first_order;

  void validate() const;
  HilbertSpace space() const;  // single-mode model space
  bool validity_gate_ok() const { return omega_a >= eta_a * nu; }
};

struct JumpChannel {
  Operator op;
  double rate = 0.0;
};

// --- Hamiltonian pieces (single-mode model) ---------------------------------

Operator build_h0(const ModelParams& p);
Operator build_h_eit(const ModelParams& p);
Operator build_h_ssh(const ModelParams& p);
Operator build_hamiltonian(const ModelParams& p);  // H0 + H_EIT + H_SSh

// Spontaneous-emission channels |g_i><e| dressed with the photon-recoil
// displacement, discretized with an n-point Gauss-Legendre rule over the
// emission projection x in [-1, 1]. The rates sum to gamma.
std::vector<JumpChannel> build_jump_channels(const ModelParams& p,
                                             int n_recoil_points = 3);

// --- reusable pieces for composite spaces (multi-mode Monte Carlo) ----------

Operator eit_carrier(const HilbertSpace& s, double omega_a);
Operator ssh_carrier(const HilbertSpace& s, double omega_b);
Operator eit_sideband_internal(const HilbertSpace& s);  // sigma_y^{g1,e} - sigma_y^{g2,e}
Operator ssh_sideband_internal(const HilbertSpace& s);  // sigma_y^{g1,g2}
// exp(i phase (b_m + b_m^d)) embedded on mode m.
Operator mode_displacement(const HilbertSpace& s, int mode, double phase);

// Recoil-dressed decay channels on an arbitrary space; recoil_etas holds the
// Lamb-Dicke parameter of each mode along the emission axis.
std::vector<JumpChannel> build_jump_channels_on(
    const HilbertSpace& s, double gamma, double branch_g1, double branch_g2,
    const std::vector<double>& recoil_etas, int n_recoil_points,
    CouplingOrder order);

// --- physical-parameter maps -------------------------------------------------

// Effective (omega_b, eta_b) of a far-detuned Raman pair with physical Rabi
// frequency omega_p and Lamb-Dicke parameter eta_p at phonon number n.
// eta_b is undefined when the carrier coupling vanishes.
struct RamanEffective {
  double omega_b = 0.0;
  std::optional<double> eta_b;
};
RamanEffective raman_effective(double omega_p, double eta_p, double delta, double nu,
                               int n);

// Magnetic-gradient (polaron-frame) realization: omega_b = omega_d,
// eta_b = lambda / nu.
std::pair<double, double> gradient_effective(double lambda, double nu, double omega_d);

// eta_b / eta_a for beam B along the trap axis and beam A at theta degrees
// from it (equal bare Lamb-Dicke parameters, eta_b = 2 eta_p).
double geometry_eta_ratio(double theta_a_deg);

// Normalized O(eta) dark state of the full first-order Hamiltonian:
//   |g1-g2>|0> + i c |g1+g2>|1>,  c = eta_b omega_b / (nu + 2 omega_b).
// At the interference resonance c equals eta_a and the state is annihilated
// by the EIT coupling exactly at this order.
Vec interference_dark_state(const ModelParams& p);

}  // namespace robustcool
