#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace robustcool {

// Gauss-Legendre nodes and weights on [-1, 1]. Exact for polynomials of
// degree 2n-1; used for the recoil angular average.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_legendre(int n);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Golden-section minimization of a unimodal function on [lo, hi].
double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                       int iterations = 120);

// Two-sided Kolmogorov-Smirnov p-value of `samples` against Exp(rate).
double ks_exponential_pvalue(std::vector<double> samples, double rate);

// Deterministic per-stream seeding (splitmix64 over (seed, index)).
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index);
// Uniform double in [0, 1) from raw bits; independent of library
// distribution implementations.
double u01_from_bits(std::uint64_t bits);

// Static-partition parallel loop. Deterministic given the work items;
// threads <= 0 picks the hardware concurrency.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

std::uint64_t fnv1a64(const std::string& data);
std::string iso_timestamp_utc();

}  // namespace robustcool
