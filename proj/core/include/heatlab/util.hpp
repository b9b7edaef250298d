#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace heatlab {

// Thrown for invalid parameters / malformed inputs (maps to CLI exit code 1).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a certified numerical guarantee is violated at runtime
// (maps to CLI exit code 2).
struct assertion_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw config_error(msg);
}

// Deterministic pairwise summation; bit-reproducible regardless of thread
// count because it is a fixed reduction tree over a fixed element order.
double pairwise_sum(std::span<const double> v);

// Sums f(i) for i in [0, n) through a fixed-shape pairwise tree.
template <class F>
double pairwise_sum_f(std::size_t n, F&& f) {
  if (n <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += f(i);
    return s;
  }
  std::vector<double> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = f(i);
  return pairwise_sum(buf);
}

inline double sqr(double x) { return x * x; }

// (1+r)^{-theta} with a fast path for integral theta (the default parameter
// sets are integers and this sits in the innermost atom-sweep loops).
inline double poly_decay(double r, double theta) {
  double q = 1.0 / (1.0 + r);
  int it = static_cast<int>(theta);
  if (static_cast<double>(it) == theta && it > 0 && it <= 64) {
    double acc = 1.0, base = q;
    int e = it;
    while (e) {
      if (e & 1) acc *= base;
      base *= base;
      e >>= 1;
    }
    return acc;
  }
  return std::pow(q, theta);
}

// FNV-1a over raw bytes; used for content hashes in run manifests.
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ull);

// Shortest round-trip formatting of a double (17 significant digits).
std::string format_g17(double x);

}  // namespace heatlab
