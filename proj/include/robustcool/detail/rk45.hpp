#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "robustcool/errors.hpp"

namespace robustcool::detail {

// Dormand-Prince 5(4) adaptive stepper on Eigen vectors. Linear invariants
// of the right-hand side (trace, probability sums) are preserved exactly by
// the scheme, up to roundoff.
template <class VecT>
class Rk45Driver {
 public:
  using Rhs = std::function<void(double, const VecT&, VecT&)>;

  Rk45Driver(Rhs rhs, double rtol, double atol, double dt_max)
      : rhs_(std::move(rhs)), rtol_(rtol), atol_(atol), dt_max_(dt_max) {}

  void reset_step() { h_ = 0.0; }
  double current_step() const { return h_; }

  // One accepted step, capped at t_cap. Returns the step size taken and
  // advances t and y. Throws on step-size underflow.
  double step(double& t, VecT& y, double t_cap) {
    const double span = t_cap - t;
    if (span <= 0.0) return 0.0;
    if (h_ <= 0.0) h_ = std::min(dt_max_, span / 100.0 + 1e-12);

    for (int attempt = 0; attempt < 200; ++attempt) {
      const double h = std::min({h_, dt_max_, span});
      // underflow means the controller collapsed the step, not that the
      // remaining target interval happens to be small
      if (h < span && h < 1e-14 * std::max(1.0, std::abs(t_cap)))
        throw numerical_error(
            "adaptive integrator step-size underflow (stiff problem); consider "
            "smaller Rabi-to-linewidth ratios or the matrix-exponential path");
      const double err = attempt_(t, y, h);
      if (err <= 1.0) {
        t += h;
        y = y_new_;
        const double grow = (err == 0.0) ? 5.0 : 0.9 * std::pow(err, -0.2);
        const double grown = h * std::clamp(grow, 0.2, 5.0);
        // a step clipped to the target interval must not shrink the
        // controller's step memory
        h_ = (h < h_) ? std::max(h_, grown) : grown;
        return h;
      }
      h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9);
    }
    throw numerical_error("adaptive integrator failed to find an acceptable step");
  }

  // Advance to exactly t_target.
  void advance(double& t, VecT& y, double t_target) {
    while (t < t_target - 1e-15 * std::max(1.0, std::abs(t_target)))
      step(t, y, t_target);
    t = t_target;
  }

 private:
  // Returns the scaled error estimate of a trial step of size h; stores the
  // 5th-order result in y_new_.
  double attempt_(double t, const VecT& y, double h) {
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                     a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                     a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    rhs_(t, y, k1_);
    tmp_ = y + h * (a21 * k1_);
    rhs_(t + h / 5.0, tmp_, k2_);
    tmp_ = y + h * (a31 * k1_ + a32 * k2_);
    rhs_(t + 3.0 * h / 10.0, tmp_, k3_);
    tmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    rhs_(t + 4.0 * h / 5.0, tmp_, k4_);
    tmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    rhs_(t + 8.0 * h / 9.0, tmp_, k5_);
    tmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    rhs_(t + h, tmp_, k6_);
    y_new_ = y + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
    rhs_(t + h, y_new_, k7_);

    err_vec_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double scale =
          atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y_new_[i]));
      worst = std::max(worst, std::abs(err_vec_[i]) / scale);
    }
    return worst;
  }

  Rhs rhs_;
  double rtol_, atol_, dt_max_;
  double h_ = 0.0;
  VecT k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y_new_, err_vec_;
};

}  // namespace robustcool::detail
