#pragma once

#include <stdexcept>
#include <string>

namespace robustcool {

// Error taxonomy shared by the whole library. The CLI maps these onto
// process exit codes (config -> 2, numerical -> 3, validity gate -> 4).
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad config keys/values, invalid parameter combinations.
class config_error : public error {
 public:
  using error::error;
};

// Operator/space shape mismatches and invalid level labels.
class dimension_error : public error {
 public:
  using error::error;
};

// Solver breakdowns: singular resolvents, step-size underflow, failed fits.
class numerical_error : public error {
 public:
  using error::error;
};

// Requested problem exceeds the dense-matrix budget.
class resource_error : public error {
 public:
  using error::error;
};

// Analytic validity gate omega_a >= eta_a * nu violated.
class validity_error : public error {
 public:
  using error::error;
};

// The Lindblad generator has more than one stationary state.
class degenerate_steady_state : public error {
 public:
  degenerate_steady_state(const std::string& what, int dimension)
      : error(what), dimension_(dimension) {}
  int dimension() const { return dimension_; }

 private:
  int dimension_;
};

}  // namespace robustcool
