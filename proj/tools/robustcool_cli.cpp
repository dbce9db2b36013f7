// Command-line front end: closed-form rates, steady states, time evolution,
// parameter scans, quantum-jump ensembles and parameter-map derivations.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 validity-gate violation (omega_a < eta_a * nu) unless --force.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "robustcool/analytics.hpp"
#include "robustcool/config.hpp"
#include "robustcool/dynamics.hpp"
#include "robustcool/montecarlo.hpp"
#include "robustcool/numerics.hpp"
#include "robustcool/scan.hpp"

using nlohmann::json;
using namespace robustcool;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitValidity = 4;

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  int threads = 0;
  std::uint64_t seed = 1;
  bool force = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config = true) {
  auto* c = cmd->add_option("--config", opts.config_path, "model config file");
  if (needs_config) c->required();
  cmd->add_option("--out", opts.out_path, "output path (default: stdout)");
  cmd->add_option("--format", opts.format, "output format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", opts.threads, "worker threads (default: hardware)");
  cmd->add_option("--seed", opts.seed, "random seed");
  cmd->add_flag("--force", opts.force, "bypass the analytic validity gate");
}

void write_output(const CommonOpts& opts, const std::string& text) {
  if (opts.out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(opts.out_path);
  if (!out) throw config_error("cannot open output file: " + opts.out_path);
  out << text;
}

json provenance_json(const ModelParams& p) {
  json j;
  const std::string cfg = model_to_config(p);
  json resolved;
  for (const auto& [k, v] : parse_key_values(cfg)) resolved[k] = v;
  j["resolved_config"] = resolved;
  std::ostringstream hash;
  hash << std::hex << fnv1a64(cfg);
  j["config_hash"] = hash.str();
  j["code_version"] = kCodeVersion;
  j["timestamp"] = iso_timestamp_utc();
  return j;
}

std::string provenance_comments(const ModelParams& p) {
  std::ostringstream out;
  out << "# code_version = " << kCodeVersion << '\n';
  std::ostringstream hash;
  hash << std::hex << fnv1a64(model_to_config(p));
  out << "# config_hash = " << hash.str() << '\n';
  out << "# timestamp = " << iso_timestamp_utc() << '\n';
  std::istringstream cfg(model_to_config(p));
  std::string line;
  while (std::getline(cfg, line)) out << "# " << line << '\n';
  return out.str();
}

ModelParams load_gated(const CommonOpts& opts) {
  ModelParams p = load_model_config(opts.config_path);
  if (!p.validity_gate_ok() && !opts.force)
    throw validity_error("validity gate: omega_a < eta_a * nu (the perturbative "
                         "rate theory does not apply); rerun with --force to "
                         "proceed anyway");
  return p;
}

json rates_json(const RateCoefficients& rc) {
  return json{{"a_plus_eit", rc.a_plus_eit}, {"a_plus_ssh", rc.a_plus_ssh},
              {"a_plus_int", rc.a_plus_int}, {"a_plus", rc.a_plus},
              {"a_minus", rc.a_minus},       {"D", rc.D},
              {"curly_D", rc.curly_D},       {"W", rc.W},
              {"n_final", rc.n_final}};
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw config_error("malformed list value: " + tok);
    }
  }
  return out;
}

int run_rates(const CommonOpts& opts) {
  const ModelParams p = load_gated(opts);
  const RateCoefficients rc = heating_components(p);
  if (!rc.validity_ok)
    std::cerr << "warning: omega_a < eta_a * nu, analytic rates outside their "
                 "validity window\n";
  if (opts.format == "json") {
    json j = rates_json(rc);
    j["provenance"] = provenance_json(p);
    write_output(opts, j.dump(2));
  } else {
    std::ostringstream out;
    out << provenance_comments(p);
    out << "a_plus_eit,a_plus_ssh,a_plus_int,a_plus,a_minus,D,curly_D,W,n_final\n";
    out.precision(12);
    out << rc.a_plus_eit << ',' << rc.a_plus_ssh << ',' << rc.a_plus_int << ','
        << rc.a_plus << ',' << rc.a_minus << ',' << rc.D << ',' << rc.curly_D
        << ',' << rc.W << ',' << rc.n_final << '\n';
    write_output(opts, out.str());
  }
  return kExitOk;
}

int run_steady(const CommonOpts& opts, int recoil_points) {
  const ModelParams p = load_gated(opts);
  const Liouvillian liou = assemble_liouvillian(p, recoil_points);
  const DensityMatrix rho = steady_state(liou);
  const HilbertSpace s = p.space();
  const double n = std::real(expectation(number_operator(s, 0), rho));
  const double p1 = std::real(expectation(internal_projector(s, Level::g1), rho));
  const double p2 = std::real(expectation(internal_projector(s, Level::g2), rho));
  const double pe = std::real(expectation(internal_projector(s, Level::e), rho));
  const double purity = std::real((rho.rho * rho.rho).trace());
  const double tail = rho.fock_tail(0, 2);
  if (tail >= 1e-8)
    std::cerr << "truncation warning: top two Fock levels carry population " << tail
              << "\n";

  if (opts.format == "json") {
    json j{{"mean_n", n},   {"pop_g1", p1},   {"pop_g2", p2},
           {"pop_e", pe},   {"purity", purity}, {"fock_tail", tail}};
    j["provenance"] = provenance_json(p);
    write_output(opts, j.dump(2));
  } else {
    std::ostringstream out;
    out << provenance_comments(p);
    out << "mean_n,pop_g1,pop_g2,pop_e,purity,fock_tail\n";
    out.precision(12);
    out << n << ',' << p1 << ',' << p2 << ',' << pe << ',' << purity << ',' << tail
        << '\n';
    write_output(opts, out.str());
  }
  return kExitOk;
}

int run_evolve(const CommonOpts& opts, double t_final, int samples, double nbar,
               int recoil_points) {
  const ModelParams p = load_gated(opts);
  const Liouvillian liou = assemble_liouvillian(p, recoil_points);
  const DensityMatrix rho0 = thermal_state(p.space(), Level::g1, nbar);
  const EvolutionResult res = evolve(liou, rho0, t_final, samples);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  std::ostringstream out;
  out << provenance_comments(p);
  res.write_csv(out);
  write_output(opts, out.str());
  return kExitOk;
}

int run_scan_cmd(const CommonOpts& opts) {
  const ScanSpec spec = load_scan_spec(opts.config_path);
  if (!spec.base.validity_gate_ok() && !opts.force)
    throw validity_error("validity gate: omega_a < eta_a * nu; rerun with --force");
  const ScanResult res = run_scan(spec, opts.threads);
  std::ostringstream out;
  res.write_csv(out);
  write_output(opts, out.str());
  return kExitOk;
}

int run_mc(const CommonOpts& opts, TrajectoryConfig cfg, const std::string& modes,
           const std::string& eta_a_modes, const std::string& eta_b_modes,
           int target_mode, int mode_cutoff) {
  const ModelParams p = load_gated(opts);
  cfg.seed = opts.seed;
  cfg.threads = opts.threads;

  TrajectoryEnsemble ens;
  if (modes.empty()) {
    ens = ensemble_average(p, cfg);
  } else {
    MultiModeParams mm;
    mm.base = p;
    mm.mode_freqs = parse_list(modes);
    mm.eta_a_modes = eta_a_modes.empty()
                         ? std::vector<double>(mm.mode_freqs.size(), p.eta_a)
                         : parse_list(eta_a_modes);
    mm.eta_b_modes = eta_b_modes.empty()
                         ? std::vector<double>(mm.mode_freqs.size(), p.eta_b)
                         : parse_list(eta_b_modes);
    mm.target_mode = target_mode;
    mm.base.cutoffs.assign(mm.mode_freqs.size(),
                           mode_cutoff > 0 ? mode_cutoff : p.cutoffs.at(0));
    ens = ensemble_average(mm, cfg);
  }
  if (opts.format == "json") {
    json j = json::parse(ens.summary_json());
    j["provenance"] = provenance_json(p);
    write_output(opts, j.dump(2));
  } else {
    std::ostringstream out;
    out << provenance_comments(p);
    out << "# seed = " << cfg.seed << ", n_traj = " << cfg.n_traj << '\n';
    ens.write_csv(out);
    write_output(opts, out.str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robustcool: interference-robust dark-state cooling toolkit"};
  app.require_subcommand(1);

  CommonOpts rates_opts, steady_opts, evolve_opts, scan_opts, mc_opts, derive_opts,
      report_opts;

  auto* rates = app.add_subcommand("rates", "closed-form heating/cooling rates");
  add_common(rates, rates_opts);

  auto* steady = app.add_subcommand("steady", "numeric steady state");
  add_common(steady, steady_opts);
  int steady_recoil = 3;
  steady->add_option("--recoil-points", steady_recoil, "recoil quadrature nodes");

  auto* evo = app.add_subcommand("evolve", "master-equation time series");
  add_common(evo, evolve_opts);
  double evolve_t = 100.0, evolve_nbar = 3.0;
  int evolve_samples = 100, evolve_recoil = 3;
  evo->add_option("--t-final", evolve_t, "integration time");
  evo->add_option("--samples", evolve_samples, "number of samples");
  evo->add_option("--nbar", evolve_nbar, "initial thermal occupation");
  evo->add_option("--recoil-points", evolve_recoil, "recoil quadrature nodes");

  auto* scan = app.add_subcommand("scan", "parameter scan from a scan-spec file");
  add_common(scan, scan_opts);
  scan_opts.format = "csv";

  auto* mc = app.add_subcommand("mc", "quantum-jump trajectory ensemble");
  add_common(mc, mc_opts);
  mc_opts.format = "csv";
  TrajectoryConfig mc_cfg;
  std::string mc_modes, mc_eta_a, mc_eta_b;
  int mc_target = 0, mc_mode_cutoff = 0;
  mc->add_option("--traj", mc_cfg.n_traj, "number of trajectories");
  mc->add_option("--t-final", mc_cfg.t_final, "integration time");
  mc->add_option("--samples", mc_cfg.n_samples, "number of samples");
  mc->add_option("--nbar", mc_cfg.initial_nbar, "initial thermal occupation");
  mc->add_option("--dt-max", mc_cfg.dt_max, "maximum step size");
  mc->add_option("--modes", mc_modes, "multi-mode frequencies, comma separated");
  mc->add_option("--eta-a-modes", mc_eta_a, "per-mode EIT Lamb-Dicke parameters");
  mc->add_option("--eta-b-modes", mc_eta_b, "per-mode SSh Lamb-Dicke parameters");
  mc->add_option("--target-mode", mc_target, "mode the resonance is tuned to");
  mc->add_option("--mode-cutoff", mc_mode_cutoff, "Fock cutoff per mode");

  auto* derive = app.add_subcommand("derive", "physical-to-effective parameter maps");
  add_common(derive, derive_opts, /*needs_config=*/false);
  std::string map_kind;
  double d_omega_p = 0, d_eta_p = 0, d_delta = 0, d_nu = 1, d_lambda = 0,
         d_omega_d = 0, d_theta = 0;
  int d_n = 0;
  derive->add_option("--map", map_kind, "raman | gradient | geometry")->required();
  derive->add_option("--omega-p", d_omega_p, "physical Raman Rabi frequency");
  derive->add_option("--eta-p", d_eta_p, "physical Lamb-Dicke parameter");
  derive->add_option("--delta", d_delta, "Raman single-photon detuning");
  derive->add_option("--nu", d_nu, "trap frequency");
  derive->add_option("--n", d_n, "phonon number for the eta_p^2 correction");
  derive->add_option("--lambda", d_lambda, "magnetic-gradient coupling");
  derive->add_option("--omega-d", d_omega_d, "microwave drive Rabi frequency");
  derive->add_option("--theta-deg", d_theta, "beam A angle from the trap axis");

  auto* report = app.add_subcommand("report", "operating-point report");
  add_common(report, report_opts, /*needs_config=*/false);
  std::string scenario_name;
  report
      ->add_option("--scenario", scenario_name,
                   "colinear60 | window45_temperature | window45_rate")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (rates->parsed()) return run_rates(rates_opts);
    if (steady->parsed()) return run_steady(steady_opts, steady_recoil);
    if (evo->parsed())
      return run_evolve(evolve_opts, evolve_t, evolve_samples, evolve_nbar,
                        evolve_recoil);
    if (scan->parsed()) return run_scan_cmd(scan_opts);
    if (mc->parsed())
      return run_mc(mc_opts, mc_cfg, mc_modes, mc_eta_a, mc_eta_b, mc_target,
                    mc_mode_cutoff);
    if (derive->parsed()) {
      json j;
      json inputs;
      if (map_kind == "raman") {
        const RamanEffective eff = raman_effective(d_omega_p, d_eta_p, d_delta, d_nu, d_n);
        j["omega_b"] = eff.omega_b;
        if (eff.eta_b) j["eta_b"] = *eff.eta_b;
        else j["eta_b"] = nullptr;
        inputs = {{"omega_p", d_omega_p}, {"eta_p", d_eta_p}, {"delta", d_delta},
                  {"nu", d_nu},           {"n", d_n}};
      } else if (map_kind == "gradient") {
        const auto [ob, eb] = gradient_effective(d_lambda, d_nu, d_omega_d);
        j["omega_b"] = ob;
        j["eta_b"] = eb;
        inputs = {{"lambda", d_lambda}, {"nu", d_nu}, {"omega_d", d_omega_d}};
      } else if (map_kind == "geometry") {
        j["eta_ratio"] = geometry_eta_ratio(d_theta);
        inputs = {{"theta_deg", d_theta}};
      } else {
        throw config_error("unknown map: " + map_kind);
      }
      j["map"] = map_kind;
      j["inputs"] = inputs;
      j["code_version"] = kCodeVersion;
      write_output(derive_opts, j.dump(2));
      return kExitOk;
    }
    if (report->parsed()) {
      const OperatingPointReport rep =
          operating_point_report(scenario_from_string(scenario_name));
      write_output(report_opts, rep.to_json());
      return kExitOk;
    }
  } catch (const validity_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidity;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dimension_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
