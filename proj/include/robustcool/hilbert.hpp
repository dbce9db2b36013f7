#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "robustcool/errors.hpp"

namespace robustcool {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

// Largest total dimension we allow for dense state-space work.
inline constexpr int kMaxStateDim = 4096;

// Internal electronic levels. The ordering (g1, g2, e) = (0, 1, 2) is fixed
// so that serialized states and populations are reproducible.
enum class Level : int { g1 = 0, g2 = 1, e = 2 };

inline int level_index(Level l) { return static_cast<int>(l); }

// Composite Hilbert space: the internal manifold tensored with one or more
// truncated oscillator modes. Mode m keeps Fock states 0..cutoff[m].
// Basis index convention: idx = ((internal * d_0 + n_0) * d_1 + n_1) ...
// with d_m = cutoff[m] + 1, i.e. internal factor first, then modes in order.
struct HilbertSpace {
  int internal_dim = 3;
  std::vector<int> mode_cutoffs;

  HilbertSpace() = default;
  HilbertSpace(int internal, std::vector<int> cutoffs);

  int n_modes() const { return static_cast<int>(mode_cutoffs.size()); }
  int mode_dim(int m) const { return mode_cutoffs.at(m) + 1; }
  int dim() const;

  int index(int internal, const std::vector<int>& fock) const;
  // Fock occupation of mode m for a flat basis index.
  int fock_of_index(int idx, int mode) const;
  int internal_of_index(int idx) const;

  bool operator==(const HilbertSpace& other) const {
    return internal_dim == other.internal_dim && mode_cutoffs == other.mode_cutoffs;
  }
};

// Dense operator bound to its space. Thin wrapper: arithmetic goes through
// .mat, construction validates the shape.
struct Operator {
  HilbertSpace space;
  Mat mat;

  Operator() = default;
  Operator(HilbertSpace s, Mat m);

  double hermiticity_error() const;  // max |A - A^dagger| entrywise
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_error() <= tol; }
  Operator dagger() const { return Operator(space, mat.adjoint()); }
};

struct DensityMatrix {
  HilbertSpace space;
  Mat rho;

  DensityMatrix() = default;
  DensityMatrix(HilbertSpace s, Mat m);

  double trace_error() const { return std::abs(rho.trace() - Complex(1.0, 0.0)); }
  double hermiticity_error() const;
  double min_eigenvalue() const;  // smallest eigenvalue of the hermitized matrix
  // Throws if the state violates the numerical invariants.
  void validate(double herm_tol = 1e-10, double trace_tol = 1e-10,
                double pos_tol = 1e-8) const;
  // Population of the top `levels` Fock states of mode `mode`.
  double fock_tail(int mode, int levels = 2) const;
};

// --- mode-local building blocks -------------------------------------------

// Annihilation operator on a single truncated mode, (cutoff+1) dimensional.
Mat annihilation(int cutoff);

// --- operators on the composite space --------------------------------------

Operator identity(const HilbertSpace& s);
Operator transition(const HilbertSpace& s, Level j, Level k);  // |j><k| x 1
Operator transition(const HilbertSpace& s, int j, int k);      // validated labels
Operator sigma_x(const HilbertSpace& s, Level m, Level n);     // |m><n| + h.c.
Operator sigma_y(const HilbertSpace& s, Level m, Level n);     // i|m><n| + h.c.
Operator internal_projector(const HilbertSpace& s, Level l);

// 1 x ... x op x ... x 1 with `op` acting on the given mode.
Operator embed_mode_op(const HilbertSpace& s, int mode_index, const Mat& op);
Operator number_operator(const HilbertSpace& s, int mode_index);
Operator position_coupling(const HilbertSpace& s, int mode_index);  // b + b^dagger

Complex expectation(const Operator& op, const DensityMatrix& rho);

// --- states ------------------------------------------------------------------

Vec basis_vector(const HilbertSpace& s, int internal, const std::vector<int>& fock);
DensityMatrix pure_state(const HilbertSpace& s, const Vec& psi);
// Internal level `l` tensored with a truncated (renormalized) thermal state of
// mean occupation nbar on every mode.
DensityMatrix thermal_state(const HilbertSpace& s, Level l, double nbar);
// Thermal weights on a single truncated mode, normalized over 0..cutoff.
std::vector<double> thermal_weights(int cutoff, double nbar);

// Dense Lindblad generator on vectorized density matrices (column stacking,
// vec(A X B) = (B^T kron A) vec(X)):
//   L = -i(1 kron H - H^T kron 1)
//       + sum_k rate_k [conj(L_k) kron L_k - 1/2 (1 kron L_k^d L_k)
//                       - 1/2 ((L_k^d L_k)^T kron 1)].
// Intended for small spaces; the dynamics module assembles large generators
// sparsely with the same convention.
Mat lindblad_generator_dense(const Mat& h,
                             const std::vector<std::pair<Mat, double>>& channels);

}  // namespace robustcool
