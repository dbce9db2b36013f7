#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "robustcool/analytics.hpp"
#include "robustcool/config.hpp"
#include "robustcool/dynamics.hpp"

namespace robustcool {

inline constexpr const char* kCodeVersion = "1.0.0";

enum class ScanQuantity {
  n_final_closed,
  n_ss_numeric,
  w_closed,
  w_fit,
  a_plus,
  deviation,  // |n_ss_numeric - n_final_closed|
};
std::string to_string(ScanQuantity q);
ScanQuantity scan_quantity_from_string(const std::string& s);

struct ScanAxis {
  std::string param;  // a ModelParams field, "eta_ratio", or "omega_b_offset"
  double min = 0.0;
  double max = 0.0;
  int n_points = 2;
  bool log_scale = false;
  std::vector<double> grid() const;
};

// Parameter scan over one or two axes. Besides the plain ModelParams fields,
// two derived axes keep the scan on physically coupled manifolds:
//  * eta_ratio: sets eta_b = r * eta_a,
//  * omega_b_offset: sets omega_b to the resonance value of the current
//    eta_b/eta_a ratio plus the offset.
// eta_ratio_lock applies the fixed ratio after the axis values.
struct ScanSpec {
  ModelParams base;
  std::vector<ScanAxis> axes;  // 1 or 2
  ScanQuantity quantity = ScanQuantity::n_final_closed;
  std::optional<double> eta_ratio_lock;
  int n_recoil_points = 3;
  // w_fit evolution controls
  double evolve_t_final = 400.0;
  int evolve_samples = 200;

  void validate() const;
};

struct ScanCell {
  double axis1 = 0.0;
  double axis2 = 0.0;  // unused for 1-D scans
  double value = 0.0;
  bool ok = false;
  std::string error;
};

struct ScanResult {
  ScanSpec spec;
  std::vector<ScanCell> cells;  // row-major over (axis1, axis2)
  std::string config_hash;
  std::string code_version;
  std::string timestamp;

  // Long format: axis names, quantity, status; provenance as # comments.
  void write_csv(std::ostream& out) const;
};

ScanResult run_scan(const ScanSpec& spec, int threads = 0);

ScanSpec parse_scan_spec(const KeyValues& kv);
ScanSpec load_scan_spec(const std::string& path);

// --- operating points --------------------------------------------------------

enum class Scenario { colinear60, window45_temperature, window45_rate };
Scenario scenario_from_string(const std::string& s);
std::string to_string(Scenario s);

struct OperatingPointReport {
  Scenario scenario;
  ModelParams params;
  double eta_ratio = 0.0;
  double resonance_residual = 0.0;  // eta_b/eta_a - (nu/omega_b + 2)
  RateCoefficients rates;
  double n_ss_numeric = -1.0;           // < 0 when not evaluated
  double n_ss_numeric_offset = -1.0;    // with a 5% omega_b offset
  std::vector<std::pair<double, double>> gamma_sweep;  // (gamma, n_ss_numeric)
  std::string to_json() const;
};

OperatingPointReport operating_point_report(Scenario scenario);

}  // namespace robustcool
