#include <doctest.h>

#include <cmath>

#include "recml/mixture.hpp"
#include "recml/model.hpp"

using namespace recml;

namespace {
// brute-force product-of-sums likelihood on a tiny instance
double tiny_mixture_loglik(const std::vector<double>& y, const std::vector<double>& phi,
                           const std::vector<double>& mu, const std::vector<double>& tau) {
    double total = 0.0;
    for (double yi : y) {
        double density = 0.0;
        for (std::size_t j = 0; j < phi.size(); ++j)
            density += phi[j] * std::sqrt(tau[j] / (2.0 * M_PI)) * std::exp(-0.5 * tau[j] * (yi - mu[j]) * (yi - mu[j]));
        total += std::log(density);
    }
    return total;
}

std::vector<double> pack(std::vector<double> phi, std::vector<double> mu, std::vector<double> tau, double beta) {
    std::vector<double> th;
    th.insert(th.end(), phi.begin(), phi.end());
    th.insert(th.end(), mu.begin(), mu.end());
    th.insert(th.end(), tau.begin(), tau.end());
    th.push_back(beta);
    return th;
}
}  // namespace

TEST_CASE("banana log-likelihood pinned values") {
    // same multiplication order as the implementation, so both exponent
    // terms cancel exactly in floating point
    const double x4 = 0.45 * 0.45 * 0.45 * 0.45;
    const std::vector<double> peak{0.45, 2.0 * x4};
    CHECK(banana_log_likelihood(peak) == 0.0);
    const std::vector<double> below{0.45, 0.0};
    CHECK(banana_log_likelihood(below) == doctest::Approx(-0.672605015625).epsilon(1e-15));
    const std::vector<double> corner{1.5, 1.5};
    CHECK(banana_log_likelihood(corner) < -100.0);
}

TEST_CASE("banana log-likelihood is nonpositive with max at the known point") {
    BananaModel model;
    for (double x = -0.5; x <= 1.5; x += 0.05)
        for (double y = -0.5; y <= 1.5; y += 0.05) {
            const std::vector<double> th{x, y};
            CHECK(model.log_likelihood(th) <= 0.0);
        }
}

TEST_CASE("quadrature evidence on the banana") {
    BananaModel model;
    const double lz = quadrature_evidence(model, 2001);
    CHECK(lz == doctest::Approx(-4.1543).epsilon(0.00025));  // +- 0.001 absolute
    CHECK(std::fabs(lz - (-4.1543)) < 0.001);
    // self-convergence
    const double lz501 = quadrature_evidence(model, 501);
    CHECK(std::fabs(lz501 - lz) < 1e-6);
}

TEST_CASE("quadrature refinement gains at least Simpson order") {
    BananaModel model;
    const double a = quadrature_evidence(model, 126 * 2 + 1);  // 253
    const double b = quadrature_evidence(model, 252 * 2 + 1);  // 505
    const double c = quadrature_evidence(model, 504 * 2 + 1);  // 1009
    const double d1 = std::fabs(a - b), d2 = std::fabs(b - c);
    CHECK(d2 <= d1 / 4.0 + 1e-15);
}

TEST_CASE("quadrature with constant likelihood returns zero") {
    struct Flat final : Model {
        std::size_t dimension() const override { return 2; }
        std::optional<Box> support() const override { return Box{{0.0, 0.0}, {2.0, 3.0}}; }
        double log_prior(std::span<const double> th) const override {
            return support()->contains(th) ? -std::log(6.0) : kNegInf;
        }
        double log_likelihood(std::span<const double>) const override { return 0.0; }
    } flat;
    CHECK(quadrature_evidence(flat, 101) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("quadrature rejects unbounded models") {
    MixtureModel m({1.0, 2.0}, 1, MixtureHyper{});
    CHECK_THROWS_AS(quadrature_evidence(m, 101), ContractViolation);
}

TEST_CASE("mixture likelihood: single component equals closed form") {
    std::vector<double> y{1.0, 2.0, 2.5};
    MixtureModel m(y, 1, MixtureHyper{});
    const double mu = 1.7, tau = 2.0;
    const auto th = pack({1.0}, {mu}, {tau}, 1.0);
    double closed = 0.0;
    for (double yi : y) closed += 0.5 * std::log(tau / (2.0 * M_PI)) - 0.5 * tau * (yi - mu) * (yi - mu);
    CHECK(m.log_likelihood(th) == doctest::Approx(closed).epsilon(1e-13));
}

TEST_CASE("mixture likelihood: identical components collapse") {
    std::vector<double> y{0.3, -1.0, 4.0, 2.2};
    MixtureModel m1(y, 1, MixtureHyper{});
    MixtureModel m2(y, 2, MixtureHyper{});
    const auto th1 = pack({1.0}, {1.5}, {0.7}, 1.0);
    const auto th2 = pack({0.3, 0.7}, {1.5, 1.5}, {0.7, 0.7}, 1.0);
    CHECK(m2.log_likelihood(th2) == doctest::Approx(m1.log_likelihood(th1)).epsilon(1e-13));
}

TEST_CASE("mixture likelihood: matches tiny brute force and label permutation") {
    std::vector<double> y{1.0, 2.0, 3.5};
    MixtureModel m(y, 2, MixtureHyper{});
    std::vector<double> phi{0.4, 0.6}, mu{1.2, 3.0}, tau{1.5, 0.5};
    const auto th = pack(phi, mu, tau, 1.0);
    CHECK(m.log_likelihood(th) == doctest::Approx(tiny_mixture_loglik(y, phi, mu, tau)).epsilon(1e-13));
    const auto swapped = pack({0.6, 0.4}, {3.0, 1.2}, {0.5, 1.5}, 1.0);
    CHECK(m.log_likelihood(swapped) == doctest::Approx(m.log_likelihood(th)).epsilon(1e-13));
}

TEST_CASE("mixture likelihood contract violations") {
    MixtureModel m({1.0}, 2, MixtureHyper{});
    const auto bad_phi = pack({0.5, 0.4}, {0.0, 0.0}, {1.0, 1.0}, 1.0);
    CHECK_THROWS_AS(m.log_likelihood(bad_phi), ContractViolation);
    const auto bad_tau = pack({0.5, 0.5}, {0.0, 0.0}, {1.0, -1.0}, 1.0);
    CHECK_THROWS_AS(m.log_likelihood(bad_tau), ContractViolation);
}

TEST_CASE("partial likelihood: prefixes, endpoints, complement identity") {
    std::vector<double> y{1.0, 2.0, 3.5};
    MixtureModel m(y, 2, MixtureHyper{});
    const auto th = pack({0.4, 0.6}, {1.2, 3.0}, {1.5, 0.5}, 1.0);
    CHECK(m.partial_log_likelihood(0, th) == 0.0);
    CHECK(m.partial_log_likelihood(3, th) == doctest::Approx(m.log_likelihood(th)).epsilon(1e-13));
    CHECK(m.partial_log_likelihood(2, th) ==
          doctest::Approx(tiny_mixture_loglik({1.0, 2.0}, {0.4, 0.6}, {1.2, 3.0}, {1.5, 0.5})).epsilon(1e-13));
    // complement identity
    const double head = m.partial_log_likelihood(2, th);
    const double tail = tiny_mixture_loglik({3.5}, {0.4, 0.6}, {1.2, 3.0}, {1.5, 0.5});
    CHECK(head + tail == doctest::Approx(m.log_likelihood(th)).epsilon(1e-12));
    CHECK_THROWS_AS(m.partial_log_likelihood(4, th), ContractViolation);
}

TEST_CASE("galaxy loader validates both variants") {
    const auto roeder = load_galaxy_data(std::string(RECML_DATA_DIR) + "/galaxies_roeder.txt", "roeder");
    CHECK(roeder.size() == 82);
    const auto chib = load_galaxy_data(std::string(RECML_DATA_DIR) + "/galaxies_chib78.txt", "chib78");
    CHECK(chib.size() == 82);
    // the two variants differ in exactly one entry
    int diff = 0;
    for (std::size_t i = 0; i < 82; ++i) diff += roeder[i] != chib[i];
    CHECK(diff == 1);
    CHECK_THROWS_AS(load_galaxy_data("/nonexistent/file.txt", "roeder"), ConfigError);
    CHECK_THROWS_AS(load_galaxy_data(std::string(RECML_DATA_DIR) + "/galaxies_roeder.txt", "bogus"), ConfigError);
}

TEST_CASE("truncated poisson pmf normalizes and peaks sensibly") {
    const auto p = truncated_poisson_pmf(5.0, 3, 10);
    double s = 0.0;
    for (double v : p) s += v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    // lambda=5 on 3..10 peaks at k in {4,5}
    std::size_t arg = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
        if (p[i] > p[arg]) arg = i;
    CHECK((arg == 1 || arg == 2));
}
