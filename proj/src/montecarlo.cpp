#include "robustcool/montecarlo.hpp"

#include <Eigen/SparseCore>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "robustcool/detail/rk45.hpp"
#include "robustcool/numerics.hpp"

namespace robustcool {

void TrajectoryConfig::validate() const {
  if (n_traj < 1) throw config_error("trajectory config: n_traj must be >= 1");
  if (t_final <= 0.0) throw config_error("trajectory config: t_final must be > 0");
  if (n_samples < 1) throw config_error("trajectory config: n_samples must be >= 1");
  if (dt_max <= 0.0) throw config_error("trajectory config: dt_max must be > 0");
  if (initial_nbar < 0.0) throw config_error("trajectory config: negative nbar");
}

void MultiModeParams::validate() const {
  base.validate();
  const size_t m = mode_freqs.size();
  if (m == 0) throw config_error("multi-mode params: need at least one mode");
  if (eta_a_modes.size() != m || eta_b_modes.size() != m ||
      base.cutoffs.size() != m)
    throw config_error("multi-mode params: list lengths must match the mode count");
  for (double f : mode_freqs)
    if (f <= 0.0) throw config_error("multi-mode params: mode frequencies must be > 0");
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 1; j < m; ++j)
      if (mode_freqs[i] == mode_freqs[j])
        throw config_error("multi-mode params: mode frequencies must be distinct");
  if (target_mode < 0 || target_mode >= int(m))
    throw config_error("multi-mode params: target mode out of range");
}

HilbertSpace MultiModeParams::space() const { return HilbertSpace(3, base.cutoffs); }

Operator build_multimode_hamiltonian(const MultiModeParams& mm) {
  mm.validate();
  const HilbertSpace s = mm.space();
  const ModelParams& p = mm.base;
  Mat h = -p.delta * internal_projector(s, Level::e).mat +
          eit_carrier(s, p.omega_a).mat + ssh_carrier(s, p.omega_b).mat;
  const Mat eit_int = eit_sideband_internal(s).mat;
  const Mat ssh_int = ssh_sideband_internal(s).mat;
  for (int m = 0; m < s.n_modes(); ++m) {
    h += mm.mode_freqs[m] * number_operator(s, m).mat;
    const Mat x = position_coupling(s, m).mat;
    h += p.omega_a * mm.eta_a_modes[m] * (eit_int * x);
    h += p.omega_b * mm.eta_b_modes[m] * (ssh_int * x);
  }
  return Operator(s, std::move(h));
}

std::vector<JumpChannel> build_multimode_jump_channels(const MultiModeParams& mm,
                                                       int n_recoil_points) {
  mm.validate();
  return build_jump_channels_on(mm.space(), mm.base.gamma, mm.base.branch_g1,
                                mm.base.branch_g2, mm.eta_a_modes, n_recoil_points,
                                mm.base.coupling_order);
}

namespace {

using SparseMat = Eigen::SparseMatrix<Complex>;

SparseMat sparsify(const Mat& m) {
  std::vector<Eigen::Triplet<Complex>> trip;
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (m(i, j) != Complex(0.0, 0.0)) trip.emplace_back(i, j, m(i, j));
  SparseMat s(m.rows(), m.cols());
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

struct JumpSystem {
  HilbertSpace space;
  SparseMat drift;  // -i H - 1/2 sum rate L^d L
  std::vector<SparseMat> jumps;
  std::vector<double> rates;
  std::vector<std::vector<double>> fock_of_index;  // [mode][idx]
};

JumpSystem make_system(const HilbertSpace& s, const Operator& h,
                       const std::vector<JumpChannel>& channels) {
  JumpSystem sys;
  sys.space = s;
  Mat heff = -kI * h.mat;
  for (const auto& ch : channels) {
    heff -= 0.5 * ch.rate * (ch.op.mat.adjoint() * ch.op.mat);
    sys.jumps.push_back(sparsify(ch.op.mat));
    sys.rates.push_back(ch.rate);
  }
  sys.drift = sparsify(heff);
  sys.fock_of_index.resize(s.n_modes());
  for (int m = 0; m < s.n_modes(); ++m) {
    sys.fock_of_index[m].resize(s.dim());
    for (int i = 0; i < s.dim(); ++i)
      sys.fock_of_index[m][i] = double(s.fock_of_index(i, m));
  }
  return sys;
}

class TrajectoryRng {
 public:
  TrajectoryRng(std::uint64_t seed, int index)
      : gen_(derive_stream_seed(seed, std::uint64_t(index))) {}
  double uniform() { return u01_from_bits(gen_()); }

 private:
  std::mt19937_64 gen_;
};

int sample_thermal(TrajectoryRng& rng, const std::vector<double>& weights) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (size_t n = 0; n < weights.size(); ++n) {
    acc += weights[n];
    if (u < acc) return int(n);
  }
  return int(weights.size()) - 1;
}

TrajectoryResult run_jump_trajectory(const JumpSystem& sys, const TrajectoryConfig& cfg,
                                     int traj_index) {
  cfg.validate();
  const int d = sys.space.dim();
  TrajectoryRng rng(cfg.seed, traj_index);

  // initial state: the configured level x product of thermally sampled Fock states
  std::vector<int> fock(sys.space.n_modes());
  for (int m = 0; m < sys.space.n_modes(); ++m) {
    const auto w = thermal_weights(sys.space.mode_cutoffs[m], cfg.initial_nbar);
    fock[m] = sample_thermal(rng, w);
  }
  Vec psi = basis_vector(sys.space, level_index(cfg.initial_level), fock);

  detail::Rk45Driver<Vec> driver(
      [&sys](double, const Vec& y, Vec& dy) { dy = sys.drift * y; }, 1e-8, 1e-10,
      cfg.dt_max);

  TrajectoryResult res;
  res.mean_n.reserve(cfg.n_samples + 1);

  auto record = [&](double t, const Vec& state) {
    const double norm2 = state.squaredNorm();
    std::vector<double> n(sys.space.n_modes(), 0.0);
    for (int i = 0; i < d; ++i) {
      const double w = std::norm(state(i)) / norm2;
      for (int m = 0; m < sys.space.n_modes(); ++m)
        n[m] += sys.fock_of_index[m][i] * w;
    }
    res.times.push_back(t);
    res.mean_n.push_back(std::move(n));
  };

  record(0.0, psi);

  double t = 0.0;
  double threshold = rng.uniform();
  int sample = 1;
  while (sample <= cfg.n_samples) {
    const double t_target = cfg.t_final * double(sample) / double(cfg.n_samples);
    while (t < t_target - 1e-15 * cfg.t_final) {
      const double t_before = t;
      const Vec psi_before = psi;
      const double h = driver.step(t, psi, t_target);
      if (psi.squaredNorm() <= threshold) {
        // Bisect the jump time inside the step to h * 1e-3.
        double lo = t_before, hi = t;
        Vec psi_lo = psi_before;
        while (hi - lo > 1e-3 * h) {
          const double mid = 0.5 * (lo + hi);
          Vec psi_mid = psi_lo;
          double tm = lo;
          detail::Rk45Driver<Vec> fine(
              [&sys](double, const Vec& y, Vec& dy) { dy = sys.drift * y; }, 1e-10,
              1e-12, cfg.dt_max);
          fine.advance(tm, psi_mid, mid);
          if (psi_mid.squaredNorm() <= threshold) {
            hi = mid;
          } else {
            lo = mid;
            psi_lo = psi_mid;
          }
        }
        // state at the jump time
        double tj = lo;
        psi = psi_lo;
        detail::Rk45Driver<Vec> fine(
            [&sys](double, const Vec& y, Vec& dy) { dy = sys.drift * y; }, 1e-10,
            1e-12, cfg.dt_max);
        fine.advance(tj, psi, hi);
        t = hi;

        // pick the channel proportionally to rate * ||L psi||^2
        std::vector<double> weights(sys.jumps.size());
        double total = 0.0;
        for (size_t k = 0; k < sys.jumps.size(); ++k) {
          weights[k] = sys.rates[k] * (sys.jumps[k] * psi).squaredNorm();
          total += weights[k];
        }
        if (total <= 0.0)
          throw numerical_error("jump detected but all channel weights vanish");
        double u = rng.uniform() * total;
        size_t pick = 0;
        for (; pick + 1 < weights.size(); ++pick) {
          if (u < weights[pick]) break;
          u -= weights[pick];
        }
        psi = sys.jumps[pick] * psi;
        psi.normalize();
        res.jump_times.push_back(t);
        ++res.n_jumps;
        threshold = rng.uniform();
        driver.reset_step();
      }
    }
    record(t, psi);
    ++sample;
  }
  return res;
}

TrajectoryEnsemble average(const JumpSystem& sys, const TrajectoryConfig& cfg) {
  cfg.validate();
  const int modes = sys.space.n_modes();
  std::vector<TrajectoryResult> all(cfg.n_traj);
  parallel_for(cfg.n_traj, cfg.threads,
               [&](int i) { all[i] = run_jump_trajectory(sys, cfg, i); });

  TrajectoryEnsemble ens;
  ens.config = cfg;
  ens.times = all[0].times;
  const size_t nt = ens.times.size();
  ens.mean_n.assign(nt, std::vector<double>(modes, 0.0));
  ens.stderr_n.assign(nt, std::vector<double>(modes, 0.0));

  // ordered reduction over trajectory index
  for (int i = 0; i < cfg.n_traj; ++i) {
    for (size_t s = 0; s < nt; ++s)
      for (int m = 0; m < modes; ++m) ens.mean_n[s][m] += all[i].mean_n[s][m];
    ens.jump_histogram[all[i].n_jumps] += 1;
  }
  for (size_t s = 0; s < nt; ++s)
    for (int m = 0; m < modes; ++m) ens.mean_n[s][m] /= double(cfg.n_traj);

  if (cfg.n_traj >= 2) {
    for (int i = 0; i < cfg.n_traj; ++i)
      for (size_t s = 0; s < nt; ++s)
        for (int m = 0; m < modes; ++m) {
          const double dev = all[i].mean_n[s][m] - ens.mean_n[s][m];
          ens.stderr_n[s][m] += dev * dev;
        }
    for (size_t s = 0; s < nt; ++s)
      for (int m = 0; m < modes; ++m)
        ens.stderr_n[s][m] = std::sqrt(ens.stderr_n[s][m] / double(cfg.n_traj - 1) /
                                       double(cfg.n_traj));
  }
  return ens;
}

}  // namespace

TrajectoryResult run_trajectory(const ModelParams& p, const TrajectoryConfig& cfg,
                                int traj_index) {
  p.validate();
  const HilbertSpace s = p.space();
  const JumpSystem sys = make_system(
      s, build_hamiltonian(p), build_jump_channels(p, cfg.n_recoil_points));
  return run_jump_trajectory(sys, cfg, traj_index);
}

TrajectoryResult run_trajectory(const MultiModeParams& mm, const TrajectoryConfig& cfg,
                                int traj_index) {
  const JumpSystem sys =
      make_system(mm.space(), build_multimode_hamiltonian(mm),
                  build_multimode_jump_channels(mm, cfg.n_recoil_points));
  return run_jump_trajectory(sys, cfg, traj_index);
}

TrajectoryEnsemble ensemble_average(const ModelParams& p, const TrajectoryConfig& cfg) {
  p.validate();
  const JumpSystem sys = make_system(
      p.space(), build_hamiltonian(p), build_jump_channels(p, cfg.n_recoil_points));
  return average(sys, cfg);
}

TrajectoryEnsemble ensemble_average(const MultiModeParams& mm,
                                    const TrajectoryConfig& cfg) {
  const JumpSystem sys =
      make_system(mm.space(), build_multimode_hamiltonian(mm),
                  build_multimode_jump_channels(mm, cfg.n_recoil_points));
  return average(sys, cfg);
}

void TrajectoryEnsemble::write_csv(std::ostream& out) const {
  const int modes = mean_n.empty() ? 0 : int(mean_n[0].size());
  out << "t";
  for (int m = 0; m < modes; ++m)
    out << ",mean_n_mode_" << m << ",stderr_mode_" << m;
  out << '\n';
  for (size_t s = 0; s < times.size(); ++s) {
    out << times[s];
    for (int m = 0; m < modes; ++m)
      out << ',' << mean_n[s][m] << ',' << stderr_n[s][m];
    out << '\n';
  }
}

std::string TrajectoryEnsemble::summary_json() const {
  std::ostringstream out;
  const int modes = mean_n.empty() ? 0 : int(mean_n[0].size());
  out << "{\"n_traj\":" << config.n_traj << ",\"seed\":" << config.seed
      << ",\"t_final\":" << config.t_final << ",\"final_mean_n\":[";
  for (int m = 0; m < modes; ++m)
    out << (m ? "," : "") << mean_n.back()[m];
  out << "],\"final_stderr\":[";
  for (int m = 0; m < modes; ++m)
    out << (m ? "," : "") << stderr_n.back()[m];
  out << "],\"jump_histogram\":{";
  bool first = true;
  for (const auto& [k, v] : jump_histogram) {
    out << (first ? "" : ",") << '"' << k << "\":" << v;
    first = false;
  }
  out << "}}";
  return out.str();
}

}  // namespace robustcool
