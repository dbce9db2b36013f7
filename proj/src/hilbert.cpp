#include "robustcool/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace robustcool {

HilbertSpace::HilbertSpace(int internal, std::vector<int> cutoffs)
    : internal_dim(internal), mode_cutoffs(std::move(cutoffs)) {
  if (internal_dim < 2) throw dimension_error("internal dimension must be >= 2");
  for (int c : mode_cutoffs) {
    if (c < 1) throw dimension_error("every Fock cutoff must be >= 1");
  }
  if (dim() > kMaxStateDim) {
    throw resource_error("total dimension " + std::to_string(dim()) +
                         " exceeds the dense-matrix budget of " +
                         std::to_string(kMaxStateDim));
  }
}

int HilbertSpace::dim() const {
  int d = internal_dim;
  for (int c : mode_cutoffs) d *= (c + 1);
  return d;
}

int HilbertSpace::index(int internal, const std::vector<int>& fock) const {
  if (internal < 0 || internal >= internal_dim)
    throw dimension_error("internal level out of range");
  if (static_cast<int>(fock.size()) != n_modes())
    throw dimension_error("fock index count does not match mode count");
  int idx = internal;
  for (int m = 0; m < n_modes(); ++m) {
    if (fock[m] < 0 || fock[m] > mode_cutoffs[m])
      throw dimension_error("fock index out of range");
    idx = idx * mode_dim(m) + fock[m];
  }
  return idx;
}

int HilbertSpace::fock_of_index(int idx, int mode) const {
  int stride = 1;
  for (int m = n_modes() - 1; m > mode; --m) stride *= mode_dim(m);
  return (idx / stride) % mode_dim(mode);
}

int HilbertSpace::internal_of_index(int idx) const {
  int stride = 1;
  for (int m = 0; m < n_modes(); ++m) stride *= mode_dim(m);
  return idx / stride;
}

Operator::Operator(HilbertSpace s, Mat m) : space(std::move(s)), mat(std::move(m)) {
  if (mat.rows() != mat.cols()) throw dimension_error("operator matrix must be square");
  if (mat.rows() != space.dim())
    throw dimension_error("operator dimension does not match its space");
}

double Operator::hermiticity_error() const {
  return (mat - mat.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(HilbertSpace s, Mat m)
    : space(std::move(s)), rho(std::move(m)) {
  if (rho.rows() != rho.cols() || rho.rows() != space.dim())
    throw dimension_error("density matrix dimension does not match its space");
}

double DensityMatrix::hermiticity_error() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Mat h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::validate(double herm_tol, double trace_tol, double pos_tol) const {
  if (hermiticity_error() > herm_tol)
    throw numerical_error("density matrix is not Hermitian to tolerance");
  if (trace_error() > trace_tol)
    throw numerical_error("density matrix trace deviates from 1");
  if (min_eigenvalue() < -pos_tol)
    throw numerical_error("density matrix has a negative eigenvalue beyond tolerance");
}

double DensityMatrix::fock_tail(int mode, int levels) const {
  double tail = 0.0;
  const int top = space.mode_cutoffs.at(mode);
  for (int idx = 0; idx < space.dim(); ++idx) {
    if (space.fock_of_index(idx, mode) > top - levels)
      tail += std::real(rho(idx, idx));
  }
  return tail;
}

Mat annihilation(int cutoff) {
  if (cutoff < 1) throw dimension_error("annihilation: cutoff must be >= 1");
  Mat b = Mat::Zero(cutoff + 1, cutoff + 1);
  for (int n = 1; n <= cutoff; ++n) b(n - 1, n) = std::sqrt(double(n));
  return b;
}

Operator identity(const HilbertSpace& s) {
  return Operator(s, Mat::Identity(s.dim(), s.dim()));
}

static Mat embed_internal(const HilbertSpace& s, const Mat& internal_op) {
  int mode_total = 1;
  for (int m = 0; m < s.n_modes(); ++m) mode_total *= s.mode_dim(m);
  Mat out = Mat::Zero(s.dim(), s.dim());
  for (int i = 0; i < s.internal_dim; ++i) {
    for (int j = 0; j < s.internal_dim; ++j) {
      const Complex v = internal_op(i, j);
      if (v == Complex(0.0, 0.0)) continue;
      for (int k = 0; k < mode_total; ++k)
        out(i * mode_total + k, j * mode_total + k) = v;
    }
  }
  return out;
}

Operator transition(const HilbertSpace& s, Level j, Level k) {
  Mat t = Mat::Zero(s.internal_dim, s.internal_dim);
  t(level_index(j), level_index(k)) = 1.0;
  return Operator(s, embed_internal(s, t));
}

Operator transition(const HilbertSpace& s, int j, int k) {
  if (j < 0 || j >= s.internal_dim || k < 0 || k >= s.internal_dim)
    throw dimension_error("transition: invalid internal level label");
  return transition(s, static_cast<Level>(j), static_cast<Level>(k));
}

Operator sigma_x(const HilbertSpace& s, Level m, Level n) {
  return Operator(s, transition(s, m, n).mat + transition(s, n, m).mat);
}

Operator sigma_y(const HilbertSpace& s, Level m, Level n) {
  return Operator(s, kI * transition(s, m, n).mat - kI * transition(s, n, m).mat);
}

Operator internal_projector(const HilbertSpace& s, Level l) {
  return transition(s, l, l);
}

Operator embed_mode_op(const HilbertSpace& s, int mode_index, const Mat& op) {
  if (mode_index < 0 || mode_index >= s.n_modes())
    throw dimension_error("embed_mode_op: mode index out of range");
  if (op.rows() != op.cols() || op.rows() != s.mode_dim(mode_index))
    throw dimension_error("embed_mode_op: operator does not match the mode cutoff");

  // left block: internal x modes before `mode_index`; right block: modes after.
  int left = s.internal_dim;
  for (int m = 0; m < mode_index; ++m) left *= s.mode_dim(m);
  int right = 1;
  for (int m = mode_index + 1; m < s.n_modes(); ++m) right *= s.mode_dim(m);
  const int dm = s.mode_dim(mode_index);

  Mat out = Mat::Zero(s.dim(), s.dim());
  for (int a = 0; a < dm; ++a) {
    for (int b = 0; b < dm; ++b) {
      const Complex v = op(a, b);
      if (v == Complex(0.0, 0.0)) continue;
      for (int l = 0; l < left; ++l) {
        const int base_r = (l * dm + a) * right;
        const int base_c = (l * dm + b) * right;
        for (int r = 0; r < right; ++r) out(base_r + r, base_c + r) = v;
      }
    }
  }
  return Operator(s, std::move(out));
}

Operator number_operator(const HilbertSpace& s, int mode_index) {
  const int c = s.mode_cutoffs.at(mode_index);
  Mat n = Mat::Zero(c + 1, c + 1);
  for (int k = 0; k <= c; ++k) n(k, k) = double(k);
  return embed_mode_op(s, mode_index, n);
}

Operator position_coupling(const HilbertSpace& s, int mode_index) {
  Mat b = annihilation(s.mode_cutoffs.at(mode_index));
  return embed_mode_op(s, mode_index, Mat(b + b.adjoint()));
}

Complex expectation(const Operator& op, const DensityMatrix& rho) {
  if (!(op.space == rho.space))
    throw dimension_error("expectation: operator and state live on different spaces");
  return (op.mat * rho.rho).trace();
}

Vec basis_vector(const HilbertSpace& s, int internal, const std::vector<int>& fock) {
  Vec v = Vec::Zero(s.dim());
  v(s.index(internal, fock)) = 1.0;
  return v;
}

DensityMatrix pure_state(const HilbertSpace& s, const Vec& psi) {
  if (psi.size() != s.dim()) throw dimension_error("pure_state: dimension mismatch");
  const double n2 = psi.squaredNorm();
  if (n2 <= 0.0) throw dimension_error("pure_state: zero vector");
  return DensityMatrix(s, Mat(psi * psi.adjoint() / n2));
}

std::vector<double> thermal_weights(int cutoff, double nbar) {
  std::vector<double> w(cutoff + 1, 0.0);
  if (nbar <= 0.0) {
    w[0] = 1.0;
    return w;
  }
  const double r = nbar / (nbar + 1.0);
  double sum = 0.0;
  double p = 1.0;
  for (int n = 0; n <= cutoff; ++n) {
    w[n] = p;
    sum += p;
    p *= r;
  }
  for (double& x : w) x /= sum;
  return w;
}

DensityMatrix thermal_state(const HilbertSpace& s, Level l, double nbar) {
  Mat rho = Mat::Zero(s.dim(), s.dim());
  const int li = level_index(l);
  std::vector<std::vector<double>> weights;
  for (int m = 0; m < s.n_modes(); ++m)
    weights.push_back(thermal_weights(s.mode_cutoffs[m], nbar));
  for (int idx = 0; idx < s.dim(); ++idx) {
    if (s.internal_of_index(idx) != li) continue;
    double p = 1.0;
    for (int m = 0; m < s.n_modes(); ++m) p *= weights[m][s.fock_of_index(idx, m)];
    rho(idx, idx) = p;
  }
  return DensityMatrix(s, std::move(rho));
}

Mat lindblad_generator_dense(const Mat& h,
                             const std::vector<std::pair<Mat, double>>& channels) {
  const int d = static_cast<int>(h.rows());
  const Mat id = Mat::Identity(d, d);
  auto kron = [d](const Mat& a, const Mat& b) {
    Mat out(d * d, d * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out.block(i * d, j * d, d, d) = a(i, j) * b;
    return out;
  };
  Mat gen = -kI * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& [l, rate] : channels) {
    const Mat ldl = l.adjoint() * l;
    gen += rate * (kron(l.conjugate(), l) - 0.5 * kron(id, ldl) -
                   0.5 * kron(ldl.transpose(), id));
  }
  return gen;
}

}  // namespace robustcool
