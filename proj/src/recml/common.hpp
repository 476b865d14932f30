#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace recml {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Error classes map 1:1 onto the C API status codes (and CLI exit codes).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SamplerStallError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConnectivityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

/// log(exp(a) + exp(b)) without overflow; -inf absorbing.
inline double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = a > b ? a : b;
    return m + std::log1p(std::exp(-std::fabs(a - b)));
}

/// logsumexp over a span; returns -inf for empty input or all -inf.
double log_sum_exp(std::span<const double> xs);

/// Streaming logsumexp accumulator (two-pass-free, max tracked online).
class LogSumExp {
  public:
    void add(double x) {
        if (x == kNegInf) return;
        if (x > max_) {
            sum_ = sum_ * std::exp(max_ - x) + 1.0;
            max_ = x;
        } else {
            sum_ += std::exp(x - max_);
        }
    }
    double value() const { return sum_ > 0.0 ? max_ + std::log(sum_) : kNegInf; }

  private:
    double max_ = kNegInf;
    double sum_ = 0.0;
};

/// Composite Simpson weights on a uniform grid of n points (n odd, >= 3),
/// step h; returns w with sum_i w_i f(x_i) ~ integral.
std::vector<double> simpson_weights(std::size_t n, double h);

/// 64-bit FNV-1a, used for config hashing and seed-stream tags.
std::uint64_t fnv1a64(std::string_view s);

}  // namespace recml
