#include "robustcool/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace robustcool {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "' has a non-numeric value: " + value);
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "' has a non-integer value: " + value);
  }
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) +
                         " is not of the form key = value: " + line);
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

ModelParams model_from_key_values_filtered(const KeyValues& kv,
                                           const std::vector<std::string>& reserved,
                                           KeyValues* extras) {
  ModelParams p;
  for (const auto& [key, value] : kv) {
    if (std::find(reserved.begin(), reserved.end(), key) != reserved.end()) {
      if (extras) extras->emplace_back(key, value);
      continue;
    }
    if (key == "nu") p.nu = parse_double(key, value);
    else if (key == "gamma") p.gamma = parse_double(key, value);
    else if (key == "delta") p.delta = parse_double(key, value);
    else if (key == "omega_a") p.omega_a = parse_double(key, value);
    else if (key == "omega_b") p.omega_b = parse_double(key, value);
    else if (key == "eta_a") p.eta_a = parse_double(key, value);
    else if (key == "eta_b") p.eta_b = parse_double(key, value);
    else if (key == "branch_g1") p.branch_g1 = parse_double(key, value);
    else if (key == "branch_g2") p.branch_g2 = parse_double(key, value);
    else if (key == "cutoff") p.cutoffs = {parse_int(key, value)};
    else if (key == "coupling_order") p.coupling_order = coupling_order_from_string(value);
    else throw config_error("unknown config key: " + key);
  }
  p.validate();
  return p;
}

ModelParams model_from_key_values(const KeyValues& kv) {
  return model_from_key_values_filtered(kv, {}, nullptr);
}

ModelParams load_model_config(const std::string& path) {
  return model_from_key_values(load_key_values(path));
}

std::string model_to_config(const ModelParams& p) {
  std::ostringstream out;
  out.precision(17);
  out << "nu = " << p.nu << '\n'
      << "gamma = " << p.gamma << '\n'
      << "delta = " << p.delta << '\n'
      << "omega_a = " << p.omega_a << '\n'
      << "omega_b = " << p.omega_b << '\n'
      << "eta_a = " << p.eta_a << '\n'
      << "eta_b = " << p.eta_b << '\n'
      << "branch_g1 = " << p.branch_g1 << '\n'
      << "branch_g2 = " << p.branch_g2 << '\n'
      << "cutoff = " << p.cutoffs.at(0) << '\n'
      << "coupling_order = " << to_string(p.coupling_order) << '\n';
  return out.str();
}

}  // namespace robustcool
