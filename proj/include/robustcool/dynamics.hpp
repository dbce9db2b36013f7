#pragma once

#include <Eigen/SparseCore>
#include <iosfwd>
#include <string>
#include <vector>

#include "robustcool/model.hpp"

namespace robustcool {

using SparseMat = Eigen::SparseMatrix<Complex>;

// Largest state dimension for which we assemble the d^2 x d^2 generator.
inline constexpr int kMaxLiouvilleDim = 64;

// Lindblad generator on vectorized density matrices (column stacking).
// Assembled sparsely; dense_generator() materializes the full matrix.
struct Liouvillian {
  HilbertSpace space;
  ModelParams params;
  SparseMat gen;

  Mat dense_generator() const { return Mat(gen); }
  // Residual of trace preservation: ||vec(1)^dagger gen||_inf.
  double trace_residual() const;
};

Liouvillian assemble_liouvillian(const ModelParams& p, int n_recoil_points = 3);
Liouvillian assemble_liouvillian(const HilbertSpace& s, const Operator& h,
                                 const std::vector<JumpChannel>& channels,
                                 const ModelParams& meta);

// Stationary state of the generator, solved directly with the unit-trace
// constraint. Throws degenerate_steady_state when the null space has more
// than one dimension (e.g. omega_a = 0 decouples sectors).
DensityMatrix steady_state(const Liouvillian& liou);

struct EvolutionResult {
  std::vector<double> times;
  std::vector<double> mean_n;
  std::vector<double> pop_g1, pop_g2, pop_e;
  std::vector<double> purity;
  DensityMatrix final_state;
  std::vector<std::string> warnings;

  // Columns: t, mean_n, pop_g1, pop_g2, pop_e, purity.
  void write_csv(std::ostream& out) const;
};

// Adaptive Runge-Kutta integration of d(vec rho)/dt = gen vec(rho), sampled
// at n_samples + 1 uniform times including t = 0 and t_final.
EvolutionResult evolve(const Liouvillian& liou, const DensityMatrix& rho0,
                       double t_final, int n_samples, double rtol = 1e-8,
                       double atol = 1e-10);

struct CoolingFit {
  double w = 0.0;         // fitted rate of mean_n(t) = n_ss + (n0 - n_ss) e^{-w t}
  double n_ss = 0.0;
  double n0 = 0.0;
  double rms_residual = 0.0;
  double amplitude = 0.0;
  bool poor_fit = false;      // residual above 10% of the amplitude, or heating
  std::string warning;
};
// Fits the tail of mean_n(t) after the internal relaxation time 10/gamma.
CoolingFit fit_cooling_rate(const EvolutionResult& result, double gamma);

// Birth-death rate equation dp_n/dt = (n+1)(A- p_{n+1} - A+ p_n)
//                                    + n(A+ p_{n-1} - A- p_n).
struct RateEquationResult {
  std::vector<double> p;
  double mean_n = 0.0;
  std::vector<std::string> warnings;
};
RateEquationResult rate_equation_evolve(double a_plus, double a_minus,
                                        std::vector<double> p0, double t);

}  // namespace robustcool
