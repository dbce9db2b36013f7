#include "robustcool/numerics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "robustcool/errors.hpp"

namespace robustcool {

Quadrature gauss_legendre(int n) {
  if (n < 1) throw config_error("gauss_legendre: need at least one node");
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  // Newton iteration on P_n with the Chebyshev-like initial guess.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      if (n == 1) p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pm = (n == 1) ? 1.0 : p0;
      pp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) q.nodes[n / 2] = 0.0;
  return q;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw config_error("linear_fit: need at least two points");
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw numerical_error("linear_fit: degenerate abscissae");
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                       int iterations) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

static double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-12) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_exponential_pvalue(std::vector<double> samples, double rate) {
  if (samples.empty()) throw config_error("ks test: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = double(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double cdf = 1.0 - std::exp(-rate * samples[i]);
    d = std::max(d, std::abs(cdf - double(i) / n));
    d = std::max(d, std::abs(double(i + 1) / n - cdf));
  }
  const double sqrt_n = std::sqrt(n);
  return kolmogorov_q((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
}

static std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = seed;
  (void)splitmix64(state);
  state ^= 0x6a09e667f3bcc909ULL + index * 0x9e3779b97f4a7c15ULL;
  (void)splitmix64(state);
  return splitmix64(state);
}

double u01_from_bits(std::uint64_t bits) {
  return double(bits >> 11) * 0x1.0p-53;
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) threads = int(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (int i = t; i < n; i += threads) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string iso_timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

}  // namespace robustcool
