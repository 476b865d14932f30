#include "recml/rng.hpp"

#include <cmath>

#include "recml/common.hpp"

namespace recml {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index) {
    return splitmix64(splitmix64(base ^ fnv1a64(tag)) + index);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

double Rng::gamma(double shape, double rate) {
    if (shape <= 0.0 || rate <= 0.0) throw ContractViolation("gamma: shape and rate must be positive");
    if (shape < 1.0) {
        // boost: X ~ Gamma(shape+1), X * U^(1/shape) ~ Gamma(shape)
        const double u = uniform01();
        return gamma(shape + 1.0, rate) * std::pow(u > 0.0 ? u : 1e-300, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

void Rng::dirichlet(std::span<const double> alpha, std::span<double> out) {
    if (alpha.size() != out.size()) throw ContractViolation("dirichlet: size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        out[i] = gamma(alpha[i], 1.0);
        sum += out[i];
    }
    for (auto& x : out) x /= sum;
}

std::size_t Rng::categorical(std::span<const double> probs) {
    double total = 0.0;
    for (double p : probs) total += p;
    double u = uniform01() * total;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        u -= probs[i];
        if (u < 0.0) return i;
    }
    return probs.empty() ? 0 : probs.size() - 1;
}

std::size_t Rng::uniform_index(std::size_t n) {
    // rejection to avoid modulo bias
    if (n == 0) throw ContractViolation("uniform_index: n == 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
}

}  // namespace recml
