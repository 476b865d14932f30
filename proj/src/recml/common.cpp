#include "recml/common.hpp"

#include <algorithm>

namespace recml {

double log_sum_exp(std::span<const double> xs) {
    double m = kNegInf;
    for (double x : xs)
        if (x > m) m = x;
    if (m == kNegInf || std::isnan(m)) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

std::vector<double> simpson_weights(std::size_t n, double h) {
    if (n < 3 || n % 2 == 0) throw ContractViolation("simpson_weights: n must be odd and >= 3");
    std::vector<double> w(n, h / 3.0);
    for (std::size_t i = 1; i + 1 < n; ++i) w[i] *= (i % 2 == 1) ? 4.0 : 2.0;
    return w;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace recml
