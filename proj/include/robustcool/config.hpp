#pragma once

#include <map>
#include <string>
#include <vector>

#include "robustcool/model.hpp"

namespace robustcool {

// Flat key-value text format: one `key = value` per line, `#` comments,
// UTF-8. Model keys are exactly: nu, gamma, delta, omega_a, omega_b, eta_a,
// eta_b, branch_g1, branch_g2, cutoff, coupling_order.

using KeyValues = std::vector<std::pair<std::string, std::string>>;

KeyValues parse_key_values(const std::string& text);
KeyValues load_key_values(const std::string& path);

// Builds ModelParams from key-values; unknown keys raise config_error naming
// the key. Missing keys keep their defaults.
ModelParams model_from_key_values(const KeyValues& kv);
ModelParams load_model_config(const std::string& path);

// Serialization of the resolved parameter set (all keys, fixed order).
std::string model_to_config(const ModelParams& p);

// Like model_from_key_values but ignores (and returns) entries whose keys are
// in `reserved`; used by file formats that embed a model plus extra keys.
ModelParams model_from_key_values_filtered(const KeyValues& kv,
                                           const std::vector<std::string>& reserved,
                                           KeyValues* extras);

}  // namespace robustcool
