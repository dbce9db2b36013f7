#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "robustcool/model.hpp"

namespace robustcool {

struct TrajectoryConfig {
  int n_traj = 500;
  std::uint64_t seed = 1;
  double t_final = 100.0;
  int n_samples = 50;
  double dt_max = 0.1;
  // Initial state: `initial_level` with a truncated thermal distribution of
  // this mean occupation on every mode, sampled per trajectory.
  double initial_nbar = 3.0;
  Level initial_level = Level::g1;
  int n_recoil_points = 3;
  int threads = 0;  // <= 0: hardware concurrency

  void validate() const;
};

// Small chain stand-in: one internal manifold shared by several modes, each
// with its own frequency and Lamb-Dicke parameters. The resonance condition
// is a property of the chosen eta lists and omega_b, typically imposed on
// target_mode only.
struct MultiModeParams {
  ModelParams base;  // cutoffs holds one entry per mode
  std::vector<double> mode_freqs;
  std::vector<double> eta_a_modes;
  std::vector<double> eta_b_modes;
  int target_mode = 0;

  void validate() const;
  HilbertSpace space() const;
};

Operator build_multimode_hamiltonian(const MultiModeParams& mm);
std::vector<JumpChannel> build_multimode_jump_channels(const MultiModeParams& mm,
                                                       int n_recoil_points);

struct TrajectoryResult {
  std::vector<double> times;
  std::vector<std::vector<double>> mean_n;  // [sample][mode]
  std::vector<double> jump_times;
  int n_jumps = 0;
};

struct TrajectoryEnsemble {
  TrajectoryConfig config;
  std::vector<double> times;
  std::vector<std::vector<double>> mean_n;    // [sample][mode]
  std::vector<std::vector<double>> stderr_n;  // sample std / sqrt(n_traj)
  std::map<int, int> jump_histogram;          // jumps per trajectory -> count

  // Columns: t, mean_n_mode_0, stderr_mode_0, mean_n_mode_1, ...
  void write_csv(std::ostream& out) const;
  std::string summary_json() const;
};

// One quantum-jump trajectory, fully determined by (seed, traj_index).
TrajectoryResult run_trajectory(const ModelParams& p, const TrajectoryConfig& cfg,
                                int traj_index);
TrajectoryResult run_trajectory(const MultiModeParams& mm, const TrajectoryConfig& cfg,
                                int traj_index);

// Ensemble average over trajectory indices 0..n_traj-1. Bit-identical for a
// fixed (seed, n_traj) regardless of the worker count.
TrajectoryEnsemble ensemble_average(const ModelParams& p, const TrajectoryConfig& cfg);
TrajectoryEnsemble ensemble_average(const MultiModeParams& mm,
                                    const TrajectoryConfig& cfg);

}  // namespace robustcool
