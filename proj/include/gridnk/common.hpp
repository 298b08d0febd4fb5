// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridnk {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Error taxonomy. The CLI maps these onto process exit codes:
// ConfigError -> 1, SolverError -> 2, CapExceeded -> 3.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& msg) : Error(msg) {}
};

class CapExceeded : public Error {
 public:
  explicit CapExceeded(const std::string& msg) : Error(msg) {}
};

// Deterministic RNG. The engine (mt19937_64) is fully pinned by the C++
// standard; the distribution helpers below are hand-specified so that a
// given seed yields the same stream on every platform and stdlib. Library
// <random> distributions are deliberately not used (their mappings are
// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t u64() { return eng_(); }

  // Uniform in [0, 1) with 53 random bits.
  double real01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Rejection sampling, unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw Error("Rng::below called with n = 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = eng_();
    while (v >= limit) v = eng_();
    return v % n;
  }

  // Uniform integer in [lo, hi] inclusive.
  std::int64_t in_range(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw Error("Rng::in_range: hi < lo");
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * real01(); }

  bool bernoulli(double p) { return real01() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    // Fisher-Yates, fixed traversal order.
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

inline bool nearly_equal(double a, double b, double atol = 1e-9,
                         double rtol = 1e-9) {
  return std::fabs(a - b) <= atol + rtol * std::max(std::fabs(a), std::fabs(b));
}

inline bool is_finite(double v) { return std::isfinite(v); }

}  // namespace gridnk
