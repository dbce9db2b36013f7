#include "robustcool/dynamics.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <cmath>
#include <ostream>
#include <unsupported/Eigen/KroneckerProduct>

#include "robustcool/detail/rk45.hpp"
#include "robustcool/numerics.hpp"

namespace robustcool {

namespace {

SparseMat sparsify(const Mat& m) {
  std::vector<Eigen::Triplet<Complex>> trip;
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (m(i, j) != Complex(0.0, 0.0)) trip.emplace_back(i, j, m(i, j));
  SparseMat s(m.rows(), m.cols());
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

Vec vec_identity(int d) {
  Vec q = Vec::Zero(d * d);
  for (int i = 0; i < d; ++i) q(i * (d + 1)) = 1.0;
  return q;
}

}  // namespace

double Liouvillian::trace_residual() const {
  const int d = space.dim();
  const Vec q = vec_identity(d);
  Vec r = SparseMat(gen.transpose()) * q;
  return r.cwiseAbs().maxCoeff();
}

Liouvillian assemble_liouvillian(const HilbertSpace& s, const Operator& h,
                                 const std::vector<JumpChannel>& channels,
                                 const ModelParams& meta) {
  const int d = s.dim();
  if (d > kMaxLiouvilleDim)
    throw resource_error("Liouvillian assembly for dimension " + std::to_string(d) +
                         " exceeds the superoperator budget of " +
                         std::to_string(kMaxLiouvilleDim));
  if (!(h.space == s)) throw dimension_error("Hamiltonian space mismatch");

  SparseMat id(d, d);
  id.setIdentity();
  const SparseMat hs = sparsify(h.mat);

  SparseMat gen = SparseMat(Eigen::kroneckerProduct(id, hs)) * (-kI);
  gen += SparseMat(Eigen::kroneckerProduct(SparseMat(hs.transpose()), id)) * kI;
  for (const auto& ch : channels) {
    if (!(ch.op.space == s)) throw dimension_error("jump-channel space mismatch");
    if (ch.rate < 0.0) throw config_error("jump-channel rate must be nonnegative");
    const SparseMat l = sparsify(ch.op.mat);
    const SparseMat ldl = SparseMat(l.adjoint()) * l;
    gen += SparseMat(Eigen::kroneckerProduct(SparseMat(l.conjugate()), l)) *
           Complex(ch.rate, 0.0);
    gen += SparseMat(Eigen::kroneckerProduct(id, ldl)) * Complex(-0.5 * ch.rate, 0.0);
    gen += SparseMat(Eigen::kroneckerProduct(SparseMat(ldl.transpose()), id)) *
           Complex(-0.5 * ch.rate, 0.0);
  }
  gen.makeCompressed();

  Liouvillian liou;
  liou.space = s;
  liou.params = meta;
  liou.gen = std::move(gen);
  return liou;
}

Liouvillian assemble_liouvillian(const ModelParams& p, int n_recoil_points) {
  p.validate();
  const HilbertSpace s = p.space();
  return assemble_liouvillian(s, build_hamiltonian(p),
                              build_jump_channels(p, n_recoil_points), p);
}

namespace {

// Direct stationary solve with the unit-trace row folded in as a rank-one
// bordering: (gen + w q q^dagger) x = w q has the trace-one stationary state
// as its unique solution when the null space is one dimensional.
Vec bordered_solve(const SparseMat& gen, const Vec& left, const Vec& rhs, double w,
                   bool& ok) {
  const int n = int(gen.rows());
  SparseMat bordered = gen;
  {
    std::vector<Eigen::Triplet<Complex>> trip;
    const Vec q = vec_identity(int(std::lround(std::sqrt(double(n)))));
    for (int i = 0; i < n; ++i) {
      if (left(i) == Complex(0.0, 0.0)) continue;
      for (int j = 0; j < n; ++j) {
        if (q(j) == Complex(0.0, 0.0)) continue;
        trip.emplace_back(i, j, w * left(i) * std::conj(q(j)));
      }
    }
    SparseMat outer(n, n);
    outer.setFromTriplets(trip.begin(), trip.end());
    bordered += outer;
  }
  Eigen::SparseLU<SparseMat> lu;
  lu.compute(bordered);
  if (lu.info() != Eigen::Success) {
    ok = false;
    return Vec::Zero(n);
  }
  Vec x = lu.solve(rhs);
  // one pass of iterative refinement
  Vec resid = rhs - bordered * x;
  x += lu.solve(resid);
  ok = lu.info() == Eigen::Success;
  return x;
}

[[noreturn]] void dense_degeneracy_report(const Liouvillian& liou) {
  const int d = liou.space.dim();
  const int d2 = d * d;
  if (d2 > 2704)
    throw degenerate_steady_state(
        "steady state is not unique (degeneracy not resolved at dimension " +
            std::to_string(d) + "); at least 2 stationary states",
        2);
  Mat aug(d2 + 1, d2);
  aug.topRows(d2) = liou.dense_generator();
  aug.row(d2) = vec_identity(d).adjoint();
  Eigen::ColPivHouseholderQR<Mat> qr(aug);
  qr.setThreshold(1e-9);
  const int k = d2 + 1 - int(qr.rank());
  if (k > 1)
    throw degenerate_steady_state(
        "steady state is not unique: the generator null space has dimension " +
            std::to_string(k),
        k);
  throw numerical_error("steady-state solve failed although the null space "
                        "appears one dimensional");
}

}  // namespace

DensityMatrix steady_state(const Liouvillian& liou) {
  const int d = liou.space.dim();
  const int d2 = d * d;
  const Vec q = vec_identity(d);
  double scale = 0.0;
  for (int k = 0; k < liou.gen.outerSize(); ++k)
    for (SparseMat::InnerIterator it(liou.gen, k); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  const double w = std::max(1.0, scale);

  bool ok1 = false, ok2 = false;
  Vec x1 = bordered_solve(liou.gen, q, w * q, w, ok1);

  // Probe with a different bordering column; a degenerate null space cannot
  // satisfy both solves with the same state.
  Vec r = Vec::Zero(d2);
  std::uint64_t st = 0x2545f4914f6cdd1dULL;
  for (int i = 0; i < d2; ++i) {
    st ^= st << 13;
    st ^= st >> 7;
    st ^= st << 17;
    r(i) = Complex(u01_from_bits(st) - 0.5, 0.0);
  }
  r += q;  // keep a healthy trace component
  Vec x2 = ok1 ? bordered_solve(liou.gen, r, w * r, w, ok2) : Vec::Zero(d2);

  if (!ok1 || !ok2) dense_degeneracy_report(liou);

  const double resid1 = (liou.gen * x1).norm();
  const double resid2 = (liou.gen * x2).norm();
  const double diff = (x1 - x2).norm() / std::max(1e-300, x1.norm());
  if (resid1 > 1e-10 || resid2 > 1e-10 || diff > 1e-6) dense_degeneracy_report(liou);

  Mat rho = Eigen::Map<const Mat>(x1.data(), d, d);
  rho = Mat(0.5 * (rho + rho.adjoint()));
  rho /= rho.trace().real();
  return DensityMatrix(liou.space, std::move(rho));
}

void EvolutionResult::write_csv(std::ostream& out) const {
  out << "t,mean_n,pop_g1,pop_g2,pop_e,purity\n";
  for (size_t i = 0; i < times.size(); ++i) {
    out << times[i] << ',' << mean_n[i] << ',' << pop_g1[i] << ',' << pop_g2[i]
        << ',' << pop_e[i] << ',' << purity[i] << '\n';
  }
}

EvolutionResult evolve(const Liouvillian& liou, const DensityMatrix& rho0,
                       double t_final, int n_samples, double rtol, double atol) {
  if (!(rho0.space == liou.space))
    throw dimension_error("evolve: initial state space mismatch");
  if (t_final < 0.0) throw config_error("evolve: t_final must be nonnegative");
  const int d = liou.space.dim();
  const int d2 = d * d;

  EvolutionResult res;
  res.final_state = rho0;

  // diagonal decodings for the sampled observables
  std::vector<double> fockn(d);
  std::vector<int> internal(d);
  for (int i = 0; i < d; ++i) {
    double n = 0.0;
    for (int m = 0; m < liou.space.n_modes(); ++m)
      n += liou.space.fock_of_index(i, m);
    fockn[i] = n;
    internal[i] = liou.space.internal_of_index(i);
  }

  Vec y = Eigen::Map<const Vec>(rho0.rho.data(), d2);

  auto record = [&](double t, const Vec& state) {
    res.times.push_back(t);
    double n = 0, p1 = 0, p2 = 0, pe = 0;
    for (int i = 0; i < d; ++i) {
      const double pop = std::real(state(i * (d + 1)));
      n += fockn[i] * pop;
      if (internal[i] == 0) p1 += pop;
      if (internal[i] == 1) p2 += pop;
      if (internal[i] == 2) pe += pop;
    }
    res.mean_n.push_back(n);
    res.pop_g1.push_back(p1);
    res.pop_g2.push_back(p2);
    res.pop_e.push_back(pe);
    res.purity.push_back(state.squaredNorm());
  };

  record(0.0, y);
  if (t_final == 0.0 || n_samples < 1) return res;

  detail::Rk45Driver<Vec> driver(
      [&liou](double, const Vec& v, Vec& dv) { dv = liou.gen * v; }, rtol, atol,
      t_final);

  double t = 0.0;
  for (int k = 1; k <= n_samples; ++k) {
    const double target = t_final * double(k) / double(n_samples);
    driver.advance(t, y, target);
    record(t, y);
  }

  Mat rho = Eigen::Map<const Mat>(y.data(), d, d);
  res.final_state = DensityMatrix(liou.space, Mat(0.5 * (rho + rho.adjoint())));

  const double drift = std::abs(Complex(res.pop_g1.back() + res.pop_g2.back() +
                                        res.pop_e.back()) - Complex(1.0));
  if (drift > 1e-8)
    res.warnings.push_back("trace drift " + std::to_string(drift) +
                           " exceeds 1e-8 over the run");
  for (int m = 0; m < liou.space.n_modes(); ++m) {
    if (res.final_state.fock_tail(m, 2) >= 1e-8) {
      res.warnings.push_back("truncation warning: top two Fock levels of mode " +
                             std::to_string(m) + " carry population " +
                             std::to_string(res.final_state.fock_tail(m, 2)));
    }
  }
  return res;
}

CoolingFit fit_cooling_rate(const EvolutionResult& result, double gamma) {
  if (gamma <= 0.0) throw config_error("fit_cooling_rate: gamma must be positive");
  const double t_start = 10.0 / gamma;
  std::vector<double> ts, ns;
  for (size_t i = 0; i < result.times.size(); ++i) {
    if (result.times[i] >= t_start) {
      ts.push_back(result.times[i]);
      ns.push_back(result.mean_n[i]);
    }
  }
  if (ts.size() < 5)
    throw numerical_error("fit_cooling_rate: fewer than five samples after the "
                          "internal relaxation window 10/gamma");

  CoolingFit fit;
  bool increasing = false;
  for (size_t i = 1; i < ns.size(); ++i)
    if (ns[i] > ns[i - 1] + 1e-12 * std::max(1.0, std::abs(ns[i]))) increasing = true;

  // Separable least squares: for a trial rate, (n_ss, amplitude) follow from
  // a 2x2 linear solve; the rate is found by golden section on log|W|.
  auto solve_linear = [&](double wrate, double& nss, double& amp) {
    double s11 = double(ts.size()), s12 = 0, s22 = 0, b1 = 0, b2 = 0;
    for (size_t i = 0; i < ts.size(); ++i) {
      const double e = std::exp(-wrate * (ts[i] - ts[0]));
      s12 += e;
      s22 += e * e;
      b1 += ns[i];
      b2 += e * ns[i];
    }
    const double det = s11 * s22 - s12 * s12;
    if (std::abs(det) < 1e-300) {
      nss = b1 / s11;
      amp = 0.0;
      return;
    }
    nss = (s22 * b1 - s12 * b2) / det;
    amp = (s11 * b2 - s12 * b1) / det;
  };
  auto sse = [&](double wrate) {
    double nss, amp;
    solve_linear(wrate, nss, amp);
    double acc = 0.0;
    for (size_t i = 0; i < ts.size(); ++i) {
      const double model = nss + amp * std::exp(-wrate * (ts[i] - ts[0]));
      acc += (ns[i] - model) * (ns[i] - model);
    }
    return acc;
  };

  const double span = ts.back() - ts.front();
  auto fit_branch = [&](double sign) {
    const double ulo = std::log(1e-4 / span), uhi = std::log(1e4 / span);
    const double u =
        golden_minimize([&](double v) { return sse(sign * std::exp(v)); }, ulo, uhi,
                        260);
    return sign * std::exp(u);
  };
  double w_best = fit_branch(+1.0);
  if (increasing) {
    const double w_neg = fit_branch(-1.0);
    if (sse(w_neg) < sse(w_best)) w_best = w_neg;
  }

  double nss, amp;
  solve_linear(w_best, nss, amp);
  fit.w = w_best;
  fit.n_ss = nss;
  fit.amplitude = amp;
  fit.n0 = nss + amp;  // value extrapolated at the window start
  fit.rms_residual = std::sqrt(sse(w_best) / double(ts.size()));
  if (std::abs(amp) > 0.0 && fit.rms_residual > 0.1 * std::abs(amp)) {
    fit.poor_fit = true;
    fit.warning = "poor fit: rms residual " + std::to_string(fit.rms_residual) +
                  " exceeds 10% of the amplitude " + std::to_string(amp);
  }
  if (increasing) {
    fit.poor_fit = true;
    fit.warning += std::string(fit.warning.empty() ? "" : "; ") +
                   "mean_n is not monotone decreasing over the fit window";
  }
  return fit;
}

RateEquationResult rate_equation_evolve(double a_plus, double a_minus,
                                        std::vector<double> p0, double t) {
  if (a_plus < 0.0 || a_minus < 0.0)
    throw config_error("rate_equation_evolve: rates must be nonnegative");
  if (p0.empty()) throw config_error("rate_equation_evolve: empty distribution");
  double sum = 0.0;
  for (double p : p0) sum += p;
  if (std::abs(sum - 1.0) > 1e-8)
    throw config_error("rate_equation_evolve: initial distribution must be normalized");

  RateEquationResult out;
  if (a_plus >= a_minus)
    out.warnings.push_back("no steady state: a_plus >= a_minus (heating regime)");

  const int n = int(p0.size());
  Eigen::VectorXd p = Eigen::Map<Eigen::VectorXd>(p0.data(), n);
  auto rhs = [&](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy.setZero(n);
    for (int k = 0; k < n; ++k) {
      const double up = (k + 1 < n) ? y(k + 1) : 0.0;
      const double down = (k >= 1) ? y(k - 1) : 0.0;
      // birth into k+1 is switched off at the truncation boundary so that
      // probability is conserved exactly
      const double birth = (k + 1 < n) ? (k + 1) * a_plus * y(k) : 0.0;
      dy(k) += (k + 1) * a_minus * up - birth;
      dy(k) += k * a_plus * down - k * a_minus * y(k);
    }
  };
  detail::Rk45Driver<Eigen::VectorXd> driver(rhs, 1e-9, 1e-12, std::max(t, 1e-6));
  double tt = 0.0;
  Eigen::VectorXd y = p;
  driver.advance(tt, y, t);

  out.p.assign(y.data(), y.data() + n);
  double norm = 0.0, mean = 0.0;
  for (int k = 0; k < n; ++k) {
    norm += out.p[k];
    mean += k * out.p[k];
  }
  out.mean_n = mean;
  if (std::abs(norm - 1.0) > 1e-10)
    out.warnings.push_back("probability conservation drift " +
                           std::to_string(std::abs(norm - 1.0)));
  return out;
}

}  // namespace robustcool
