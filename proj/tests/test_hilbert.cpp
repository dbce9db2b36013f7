#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "robustcool/hilbert.hpp"

using namespace robustcool;

TEST_CASE("annihilation operator entries and number spectrum") {
  Mat b1 = annihilation(1);
  CHECK(b1.rows() == 2);
  CHECK(b1(0, 1) == Complex(1.0, 0.0));
  CHECK(b1(0, 0) == Complex(0.0, 0.0));
  CHECK(b1(1, 0) == Complex(0.0, 0.0));
  CHECK(b1(1, 1) == Complex(0.0, 0.0));

  Mat b2 = annihilation(2);
  CHECK(std::abs(b2(0, 1) - Complex(1.0, 0.0)) == 0.0);
  CHECK(std::abs(b2(1, 2) - Complex(std::sqrt(2.0), 0.0)) < 1e-15);

  // b^d b on cutoff 5 has eigenvalues {0,...,5}
  Mat b5 = annihilation(5);
  Mat n = b5.adjoint() * b5;
  Eigen::SelfAdjointEigenSolver<Mat> es(n);
  for (int k = 0; k <= 5; ++k) CHECK(std::abs(es.eigenvalues()(k) - k) < 1e-12);

  CHECK_THROWS_AS(annihilation(0), dimension_error);
}

TEST_CASE("number operator from ladder operators matches the diagonal build") {
  HilbertSpace s(3, {7});
  Mat b = annihilation(7);
  Operator from_ladder = embed_mode_op(s, 0, Mat(b.adjoint() * b));
  Operator direct = number_operator(s, 0);
  // sqrt(n)*sqrt(n) rounds within one ulp of n
  CHECK((from_ladder.mat - direct.mat).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("transition projectors and Pauli-like combinations") {
  HilbertSpace s(3, {3});
  Operator p = transition(s, Level::g1, Level::g1);
  CHECK((p.mat * p.mat - p.mat).cwiseAbs().maxCoeff() < 1e-15);

  Operator sx = sigma_x(s, Level::g1, Level::e);
  Operator expected_sx(s, transition(s, Level::g1, Level::e).mat +
                              transition(s, Level::e, Level::g1).mat);
  CHECK((sx.mat - expected_sx.mat).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sx.is_hermitian(1e-12));

  Operator sy = sigma_y(s, Level::g1, Level::e);
  Operator expected_sy(s, kI * transition(s, Level::g1, Level::e).mat -
                              kI * transition(s, Level::e, Level::g1).mat);
  CHECK((sy.mat - expected_sy.mat).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sy.is_hermitian(1e-12));

  CHECK_THROWS_AS(transition(s, 3, 0), dimension_error);
  CHECK_THROWS_AS(transition(s, 0, -1), dimension_error);
}

TEST_CASE("embedding identities, commutators and cross-mode commutation") {
  HilbertSpace s(3, {4, 3});

  Operator id_embedded = embed_mode_op(s, 0, Mat::Identity(5, 5));
  CHECK((id_embedded.mat - Mat::Identity(s.dim(), s.dim())).cwiseAbs().maxCoeff() ==
        0.0);

  // truncated [b, b^d] = 1 - (N+1)|N><N|
  const int c = 4;
  Operator b = embed_mode_op(s, 0, annihilation(c));
  Operator bd = b.dagger();
  Mat comm = b.mat * bd.mat - bd.mat * b.mat;
  Mat defect = Mat::Identity(s.dim(), s.dim());
  Mat top = Mat::Zero(c + 1, c + 1);
  top(c, c) = double(c + 1);
  defect -= embed_mode_op(s, 0, top).mat;
  CHECK((comm - defect).cwiseAbs().maxCoeff() < 1e-12);

  // operators embedded on different modes commute exactly
  Operator x0 = position_coupling(s, 0);
  Operator x1 = position_coupling(s, 1);
  CHECK((x0.mat * x1.mat - x1.mat * x0.mat).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(embed_mode_op(s, 0, Mat::Identity(3, 3)), dimension_error);
  CHECK_THROWS_AS(embed_mode_op(s, 2, Mat::Identity(4, 4)), dimension_error);
}

TEST_CASE("kron-style embedding is associative across grouping") {
  // (A x B) x C equals A x (B x C) entrywise for the mode embeddings: build
  // the same two-mode operator by embedding in either order.
  HilbertSpace s(3, {2, 2});
  Mat op0 = annihilation(2);
  Mat op1 = annihilation(2).adjoint();
  Mat both1 = embed_mode_op(s, 0, op0).mat * embed_mode_op(s, 1, op1).mat;
  Mat both2 = embed_mode_op(s, 1, op1).mat * embed_mode_op(s, 0, op0).mat;
  CHECK((both1 - both2).cwiseAbs().maxCoeff() == 0.0);

  // and against a direct kron of the mode blocks
  Mat modes = Mat::Zero(9, 9);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) modes(a * 3 + c, b * 3 + d) = op0(a, b) * op1(c, d);
  Mat expected = Mat::Zero(27, 27);
  for (int i = 0; i < 3; ++i) expected.block(i * 9, i * 9, 9, 9) = modes;
  CHECK((both1 - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("expectation values") {
  HilbertSpace s(3, {5});
  DensityMatrix ground = pure_state(s, basis_vector(s, 0, {0}));
  DensityMatrix two = pure_state(s, basis_vector(s, 0, {2}));

  CHECK(std::abs(expectation(identity(s), ground) - Complex(1.0, 0.0)) < 1e-14);
  CHECK(std::abs(expectation(number_operator(s, 0), ground)) < 1e-14);
  CHECK(std::abs(expectation(number_operator(s, 0), two) - Complex(2.0, 0.0)) <
        1e-14);

  HilbertSpace other(3, {4});
  DensityMatrix wrong = pure_state(other, basis_vector(other, 0, {0}));
  CHECK_THROWS_AS(expectation(identity(s), wrong), dimension_error);

  // Hermitian operator => real expectation to 1e-10
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat r = Mat::Zero(s.dim(), s.dim());
  for (int i = 0; i < s.dim(); ++i)
    for (int j = 0; j < s.dim(); ++j) r(i, j) = Complex(u(rng), u(rng));
  Operator herm(s, Mat(r + r.adjoint()));
  DensityMatrix mixed = thermal_state(s, Level::g2, 1.0);
  CHECK(std::abs(expectation(herm, mixed).imag()) < 1e-10);
}

TEST_CASE("space invariants") {
  CHECK_THROWS_AS(HilbertSpace(1, {2}), dimension_error);
  CHECK_THROWS_AS(HilbertSpace(3, {0}), dimension_error);
  CHECK_THROWS_AS(HilbertSpace(3, {200, 200}), resource_error);

  HilbertSpace s(3, {4, 2});
  CHECK(s.dim() == 3 * 5 * 3);
  const int idx = s.index(2, {3, 1});
  CHECK(s.internal_of_index(idx) == 2);
  CHECK(s.fock_of_index(idx, 0) == 3);
  CHECK(s.fock_of_index(idx, 1) == 1);
}

TEST_CASE("density matrix invariants and thermal states") {
  HilbertSpace s(3, {10});
  DensityMatrix th = thermal_state(s, Level::g1, 2.0);
  th.validate();
  CHECK(th.min_eigenvalue() >= -1e-12);
  const double n = std::real(expectation(number_operator(s, 0), th));
  // truncated thermal mean lies below nbar but close for cutoff >> nbar
  CHECK(n > 1.5);
  CHECK(n <= 2.0);

  DensityMatrix vacuum = thermal_state(s, Level::g1, 0.0);
  CHECK(std::abs(expectation(number_operator(s, 0), vacuum)) < 1e-15);
}
