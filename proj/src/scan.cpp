#include "robustcool/scan.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "robustcool/numerics.hpp"

namespace robustcool {

std::string to_string(ScanQuantity q) {
  switch (q) {
    case ScanQuantity::n_final_closed: return "n_final_closed";
    case ScanQuantity::n_ss_numeric: return "n_ss_numeric";
    case ScanQuantity::w_closed: return "W_closed";
    case ScanQuantity::w_fit: return "W_fit";
    case ScanQuantity::a_plus: return "a_plus";
    case ScanQuantity::deviation: return "deviation";
  }
  return "unknown";
}

ScanQuantity scan_quantity_from_string(const std::string& s) {
  if (s == "n_final_closed") return ScanQuantity::n_final_closed;
  if (s == "n_ss_numeric") return ScanQuantity::n_ss_numeric;
  if (s == "W_closed") return ScanQuantity::w_closed;
  if (s == "W_fit") return ScanQuantity::w_fit;
  if (s == "a_plus") return ScanQuantity::a_plus;
  if (s == "deviation") return ScanQuantity::deviation;
  throw config_error("unknown scan quantity: " + s);
}

std::vector<double> ScanAxis::grid() const {
  if (n_points < 2) throw config_error("scan axis needs at least 2 points");
  std::vector<double> g(n_points);
  if (log_scale) {
    if (min <= 0.0 || max <= 0.0)
      throw config_error("log-scale axis requires positive bounds");
    const double l0 = std::log(min), l1 = std::log(max);
    for (int i = 0; i < n_points; ++i)
      g[i] = std::exp(l0 + (l1 - l0) * double(i) / double(n_points - 1));
  } else {
    for (int i = 0; i < n_points; ++i)
      g[i] = min + (max - min) * double(i) / double(n_points - 1);
  }
  return g;
}

namespace {

const std::vector<std::string> kModelFields = {
    "nu", "gamma", "delta", "omega_a", "omega_b", "eta_a", "eta_b",
    "branch_g1", "branch_g2"};

bool is_model_field(const std::string& name) {
  for (const auto& f : kModelFields)
    if (f == name) return true;
  return false;
}

void apply_field(ModelParams& p, const std::string& name, double v) {
  if (name == "nu") p.nu = v;
  else if (name == "gamma") p.gamma = v;
  else if (name == "delta") p.delta = v;
  else if (name == "omega_a") p.omega_a = v;
  else if (name == "omega_b") p.omega_b = v;
  else if (name == "eta_a") p.eta_a = v;
  else if (name == "eta_b") p.eta_b = v;
  else if (name == "branch_g1") p.branch_g1 = v;
  else if (name == "branch_g2") p.branch_g2 = v;
  else throw config_error("unknown scan parameter: " + name);
}

double mean_n_of_steady_state(const ModelParams& p, int n_recoil_points) {
  const Liouvillian liou = assemble_liouvillian(p, n_recoil_points);
  const DensityMatrix rho = steady_state(liou);
  return std::real(expectation(number_operator(p.space(), 0), rho));
}

double evaluate_quantity(const ScanSpec& spec, const ModelParams& p) {
  switch (spec.quantity) {
    case ScanQuantity::n_final_closed:
      return heating_components(p).n_final;
    case ScanQuantity::a_plus:
      return heating_components(p).a_plus;
    case ScanQuantity::w_closed:
      return cooling_rate_closed(p);
    case ScanQuantity::n_ss_numeric:
      return mean_n_of_steady_state(p, spec.n_recoil_points);
    case ScanQuantity::deviation: {
      const double numeric = mean_n_of_steady_state(p, spec.n_recoil_points);
      const double closed = heating_components(p).n_final;
      return std::abs(numeric - closed);
    }
    case ScanQuantity::w_fit: {
      const Liouvillian liou = assemble_liouvillian(p, spec.n_recoil_points);
      const DensityMatrix rho0 = thermal_state(p.space(), Level::g1, 3.0);
      const EvolutionResult evo =
          evolve(liou, rho0, spec.evolve_t_final, spec.evolve_samples);
      return fit_cooling_rate(evo, p.gamma).w;
    }
  }
  throw config_error("unhandled scan quantity");
}

ModelParams cell_params(const ScanSpec& spec, const std::vector<double>& axis_values) {
  ModelParams p = spec.base;
  std::optional<double> omega_b_offset;
  double eta_ratio = (p.eta_a > 0.0) ? p.eta_b / p.eta_a : 0.0;

  for (size_t a = 0; a < spec.axes.size(); ++a) {
    const std::string& name = spec.axes[a].param;
    const double v = axis_values[a];
    if (name == "eta_ratio") {
      eta_ratio = v;
      p.eta_b = v * p.eta_a;
    } else if (name == "omega_b_offset") {
      omega_b_offset = v;
    } else {
      apply_field(p, name, v);
      if (name == "eta_a" || name == "eta_b")
        eta_ratio = (p.eta_a > 0.0) ? p.eta_b / p.eta_a : 0.0;
    }
  }
  if (spec.eta_ratio_lock) {
    eta_ratio = *spec.eta_ratio_lock;
    p.eta_b = eta_ratio * p.eta_a;
  }
  if (omega_b_offset)
    p.omega_b = resonance_omega_b(eta_ratio, p.nu) + *omega_b_offset;
  p.validate();
  return p;
}

}  // namespace

void ScanSpec::validate() const {
  if (axes.empty() || axes.size() > 2)
    throw config_error("scan spec: need one or two axes");
  for (const auto& ax : axes) {
    if (!is_model_field(ax.param) && ax.param != "eta_ratio" &&
        ax.param != "omega_b_offset")
      throw config_error("unknown scan parameter: " + ax.param);
    if (ax.n_points < 2) throw config_error("scan axis needs at least 2 points");
  }
  base.validate();
}

ScanResult run_scan(const ScanSpec& spec, int threads) {
  spec.validate();
  const std::vector<double> g1 = spec.axes[0].grid();
  const std::vector<double> g2 =
      spec.axes.size() > 1 ? spec.axes[1].grid() : std::vector<double>{0.0};

  ScanResult res;
  res.spec = spec;
  res.code_version = kCodeVersion;
  res.timestamp = iso_timestamp_utc();
  res.config_hash = [&] {
    std::ostringstream h;
    h << model_to_config(spec.base) << to_string(spec.quantity);
    for (const auto& ax : spec.axes)
      h << ax.param << ax.min << ax.max << ax.n_points << ax.log_scale;
    std::ostringstream hex;
    hex << std::hex << fnv1a64(h.str());
    return hex.str();
  }();

  const int total = int(g1.size() * g2.size());
  res.cells.assign(total, ScanCell{});
  parallel_for(total, threads, [&](int idx) {
    ScanCell& cell = res.cells[idx];
    const int i = idx / int(g2.size());
    const int j = idx % int(g2.size());
    cell.axis1 = g1[i];
    cell.axis2 = g2[j];
    try {
      const ModelParams p = cell_params(spec, {cell.axis1, cell.axis2});
      cell.value = evaluate_quantity(spec, p);
      cell.ok = std::isfinite(cell.value);
      if (!cell.ok) cell.error = "non-finite result";
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
  });

  bool any_ok = false;
  for (const auto& c : res.cells) any_ok |= c.ok;
  if (!any_ok) throw numerical_error("scan failure: every grid cell failed");
  return res;
}

void ScanResult::write_csv(std::ostream& out) const {
  out << "# robustcool scan\n";
  out << "# code_version = " << code_version << '\n';
  out << "# config_hash = " << config_hash << '\n';
  out << "# timestamp = " << timestamp << '\n';
  out << "# quantity = " << to_string(spec.quantity) << '\n';
  for (size_t a = 0; a < spec.axes.size(); ++a) {
    const auto& ax = spec.axes[a];
    out << "# axis" << (a + 1) << " = " << ax.param << " [" << ax.min << ", "
        << ax.max << "] points=" << ax.n_points
        << (ax.log_scale ? " log" : " linear") << '\n';
  }
  if (spec.eta_ratio_lock) out << "# eta_ratio = " << *spec.eta_ratio_lock << '\n';
  std::istringstream base(model_to_config(spec.base));
  std::string line;
  while (std::getline(base, line)) out << "# " << line << '\n';

  const bool two_d = spec.axes.size() > 1;
  out << spec.axes[0].param;
  if (two_d) out << ',' << spec.axes[1].param;
  out << ',' << to_string(spec.quantity) << ",status\n";
  out.precision(12);
  for (const auto& c : cells) {
    out << c.axis1;
    if (two_d) out << ',' << c.axis2;
    if (c.ok)
      out << ',' << c.value << ",ok\n";
    else
      out << ",," << "error: " << c.error << '\n';
  }
}

ScanSpec parse_scan_spec(const KeyValues& kv) {
  static const std::vector<std::string> reserved = {
      "axis1_param", "axis1_min", "axis1_max", "axis1_points", "axis1_scale",
      "axis2_param", "axis2_min", "axis2_max", "axis2_points", "axis2_scale",
      "quantity",    "eta_ratio", "recoil_points", "evolve_t_final",
      "evolve_samples"};
  KeyValues extras;
  ScanSpec spec;
  spec.base = model_from_key_values_filtered(kv, reserved, &extras);

  auto get = [&](const std::string& key) -> std::optional<std::string> {
    for (const auto& [k, v] : extras)
      if (k == key) return v;
    return std::nullopt;
  };
  auto get_double = [&](const std::string& key) -> std::optional<double> {
    auto v = get(key);
    if (!v) return std::nullopt;
    try {
      return std::stod(*v);
    } catch (const std::exception&) {
      throw config_error("config key '" + key + "' has a non-numeric value: " + *v);
    }
  };

  for (int a = 1; a <= 2; ++a) {
    const std::string prefix = "axis" + std::to_string(a) + "_";
    auto param = get(prefix + "param");
    if (!param) {
      if (a == 1) throw config_error("scan spec: axis1_param is required");
      break;
    }
    ScanAxis ax;
    ax.param = *param;
    auto mn = get_double(prefix + "min"), mx = get_double(prefix + "max"),
         np = get_double(prefix + "points");
    if (!mn || !mx || !np)
      throw config_error("scan spec: axis " + std::to_string(a) +
                         " needs min, max and points");
    ax.min = *mn;
    ax.max = *mx;
    ax.n_points = int(*np);
    if (auto scale = get(prefix + "scale")) {
      if (*scale == "log") ax.log_scale = true;
      else if (*scale == "linear") ax.log_scale = false;
      else throw config_error("scan axis scale must be linear or log");
    }
    spec.axes.push_back(ax);
  }
  if (auto q = get("quantity")) spec.quantity = scan_quantity_from_string(*q);
  if (auto r = get_double("eta_ratio")) spec.eta_ratio_lock = *r;
  if (auto n = get_double("recoil_points")) spec.n_recoil_points = int(*n);
  if (auto t = get_double("evolve_t_final")) spec.evolve_t_final = *t;
  if (auto s = get_double("evolve_samples")) spec.evolve_samples = int(*s);
  spec.validate();
  return spec;
}

ScanSpec load_scan_spec(const std::string& path) {
  return parse_scan_spec(load_key_values(path));
}

Scenario scenario_from_string(const std::string& s) {
  if (s == "colinear60") return Scenario::colinear60;
  if (s == "window45_temperature") return Scenario::window45_temperature;
  if (s == "window45_rate") return Scenario::window45_rate;
  throw config_error("unknown scenario: " + s);
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::colinear60: return "colinear60";
    case Scenario::window45_temperature: return "window45_temperature";
    case Scenario::window45_rate: return "window45_rate";
  }
  return "unknown";
}

OperatingPointReport operating_point_report(Scenario scenario) {
  OperatingPointReport rep;
  rep.scenario = scenario;

  ModelParams p;  // nu = gamma = 1, branch 1/2 each, cutoff 15
  p.eta_a = 0.05;

  switch (scenario) {
    case Scenario::colinear60:
      rep.eta_ratio = geometry_eta_ratio(60.0);  // = 4
      p.omega_a = 0.3;
      p.delta = 0.0;
      p.omega_b = resonance_omega_b(rep.eta_ratio, p.nu);  // nu/2
      p.eta_b = rep.eta_ratio * p.eta_a;
      break;
    case Scenario::window45_temperature:
      rep.eta_ratio = geometry_eta_ratio(45.0);  // = 2 sqrt(2)
      p.omega_a = 0.6;
      p.delta = 0.0;
      p.omega_b = resonance_omega_b(rep.eta_ratio, p.nu);
      p.eta_b = rep.eta_ratio * p.eta_a;
      break;
    case Scenario::window45_rate:
      rep.eta_ratio = geometry_eta_ratio(45.0);
      p.omega_a = 0.4;
      p.omega_b = 0.45;  // rate-optimized, off the resonance condition
      p.delta = -2.0;
      p.eta_b = rep.eta_ratio * p.eta_a;
      break;
  }
  p.validate();
  rep.params = p;
  rep.resonance_residual = p.eta_b / p.eta_a - (p.nu / p.omega_b + 2.0);
  rep.rates = heating_components(p);

  const Liouvillian liou = assemble_liouvillian(p);
  rep.n_ss_numeric =
      std::real(expectation(number_operator(p.space(), 0), steady_state(liou)));

  if (scenario == Scenario::window45_rate) {
    ModelParams off = p;
    off.omega_b *= 1.05;
    rep.n_ss_numeric_offset = std::real(expectation(
        number_operator(off.space(), 0), steady_state(assemble_liouvillian(off))));
    for (double g : {0.5, 1.0, 2.0, 5.0}) {
      ModelParams q = off;
      q.gamma = g;
      const double n = std::real(expectation(
          number_operator(q.space(), 0), steady_state(assemble_liouvillian(q))));
      rep.gamma_sweep.emplace_back(g, n);
    }
  }
  return rep;
}

std::string OperatingPointReport::to_json() const {
  nlohmann::json j;
  j["scenario"] = robustcool::to_string(scenario);
  j["eta_ratio"] = eta_ratio;
  j["resonance_residual"] = resonance_residual;
  nlohmann::json cfg;
  std::istringstream base(model_to_config(params));
  std::string line;
  while (std::getline(base, line)) {
    const auto eq = line.find('=');
    cfg[line.substr(0, eq - 1)] = line.substr(eq + 2);
  }
  j["params"] = cfg;
  j["rates"] = {{"a_plus_eit", rates.a_plus_eit}, {"a_plus_ssh", rates.a_plus_ssh},
                {"a_plus_int", rates.a_plus_int}, {"a_plus", rates.a_plus},
                {"a_minus", rates.a_minus},       {"D", rates.D},
                {"curly_D", rates.curly_D},       {"W", rates.W},
                {"n_final", rates.n_final}};
  if (n_ss_numeric >= 0.0) j["n_ss_numeric"] = n_ss_numeric;
  if (n_ss_numeric_offset >= 0.0) j["n_ss_numeric_5pct_offset"] = n_ss_numeric_offset;
  if (!gamma_sweep.empty()) {
    nlohmann::json sweep = nlohmann::json::array();
    for (const auto& [g, n] : gamma_sweep) sweep.push_back({{"gamma", g}, {"n_ss", n}});
    j["gamma_sweep"] = sweep;
  }
  return j.dump(2);
}

}  // namespace robustcool
