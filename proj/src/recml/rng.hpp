#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace recml {

/// splitmix64 mixing step; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives the seed for a named substream: mix(base, fnv(tag), index).
/// Every random draw in the project flows from (base_seed, tag, index)
/// through this function, so replicate parallelism cannot reorder results.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index = 0);

/// mt19937_64-backed generator with in-repo variate transforms.
/// std::*_distribution output is implementation-defined, so uniform,
/// normal, gamma, Dirichlet and categorical draws are implemented here
/// to keep fixed-seed runs bit-stable.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng stream(std::uint64_t base, std::string_view tag, std::uint64_t index = 0) {
        return Rng(derive_seed(base, tag, index));
    }

    /// Uniform on [0,1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Marsaglia polar; caches the spare deviate.
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Gamma(shape, rate) by Marsaglia–Tsang (with the shape<1 boost).
    double gamma(double shape, double rate);

    void dirichlet(std::span<const double> alpha, std::span<double> out);

    /// Index draw from unnormalized probabilities.
    std::size_t categorical(std::span<const double> probs);

    /// Uniform integer on [0, n).
    std::size_t uniform_index(std::size_t n);

    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace recml
