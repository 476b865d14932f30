#include <doctest.h>

#include <cmath>
#include <numeric>

#include "recml/sampler.hpp"

using namespace recml;

namespace {
double mean_of(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}
double var_of(const std::vector<double>& xs) {
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}
}  // namespace

TEST_CASE("rwm on a box-uniform target accepts in-box proposals and centers") {
    const Box box{{0.0, 0.0}, {2.0, 2.0}};
    auto target = [&](std::span<const double> th) { return box.contains(th) ? 0.0 : kNegInf; };
    ChainConfig cfg;
    cfg.steps = 20000;
    cfg.burn_in = 0;  // no adaptation: scales stay frozen at the small value
    cfg.thin = 1.0;
    cfg.proposal_scale = {0.05, 0.05};
    cfg.seed = 5;
    const std::vector<double> init{1.0, 1.0};
    const auto res = rwm_chain(target, init, cfg);
    REQUIRE(res.draws.size() == 20000);
    std::vector<double> xs;
    for (const auto& d : res.draws) xs.push_back(d[0]);
    // every in-box proposal is accepted, so the rate is the in-box fraction
    // (near 1 at this scale)
    CHECK(res.acceptance_rate > 0.9);
    const double se = std::sqrt(var_of(xs) / static_cast<double>(xs.size()));
    CHECK(std::fabs(mean_of(xs) - 1.0) < 3.0 * se * 20.0);  // wide margin for correlated draws
}

TEST_CASE("rwm on a 1-d standard normal recovers unit variance") {
    auto target = [](std::span<const double> th) { return -0.5 * th[0] * th[0]; };
    ChainConfig cfg;
    cfg.steps = 101000;
    cfg.burn_in = 1000;
    cfg.thin = 1.0;
    cfg.seed = 11;
    const std::vector<double> init{0.0};
    const auto res = rwm_chain(target, init, cfg);
    std::vector<double> xs;
    for (const auto& d : res.draws) xs.push_back(d[0]);
    CHECK(var_of(xs) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(res.acceptance_rate > 0.25);
    CHECK(res.acceptance_rate < 0.55);
}

TEST_CASE("rwm degenerate budget returns empty draws") {
    auto target = [](std::span<const double> th) { return -0.5 * th[0] * th[0]; };
    ChainConfig cfg;
    cfg.steps = 100;
    cfg.burn_in = 100;
    cfg.thin = 0.25;
    const std::vector<double> init{0.0};
    const auto res = rwm_chain(target, init, cfg);
    CHECK(res.draws.empty());
    cfg.steps = 50;
    CHECK_THROWS_AS(rwm_chain(target, init, cfg), ConfigError);
    cfg.steps = 200;
    const Box box{{0.0}, {1.0}};
    auto boxed = [&](std::span<const double> th) { return box.contains(th) ? 0.0 : kNegInf; };
    const std::vector<double> outside{9.0};
    CHECK_THROWS_AS(rwm_chain(boxed, outside, cfg), ContractViolation);
}

TEST_CASE("thinning retention fraction semantics") {
    auto target = [](std::span<const double> th) { return -0.5 * th[0] * th[0]; };
    ChainConfig cfg;
    cfg.burn_in = 0;
    cfg.steps = 40;
    cfg.thin = 0.25;
    cfg.seed = 2;
    const std::vector<double> init{0.0};
    CHECK(rwm_chain(target, init, cfg).draws.size() == 10);
    cfg.thin = 0.9;
    CHECK(rwm_chain(target, init, cfg).draws.size() == 36);
}

TEST_CASE("mc3 pool shape, labels, determinism") {
    BananaModel model;
    const auto spec = BridgeSpec::power(5, 5.0);
    ChainConfig cfg;
    cfg.burn_in = 200;
    cfg.thin = 0.25;
    cfg.seed = 17;
    const auto pool = mc3_sample(model, spec, 100, cfg);
    CHECK(pool.size() == 500);
    CHECK(pool.counts == std::vector<std::size_t>{100, 100, 100, 100, 100});
    std::size_t total = 0;
    for (auto c : pool.counts) total += c;
    CHECK(total == pool.labels.size());
    // bit-identical repeat under the same seed
    const auto pool2 = mc3_sample(model, spec, 100, cfg);
    CHECK(pool.draws == pool2.draws);
    CHECK(pool.loglik == pool2.loglik);
    // different seed differs
    cfg.seed = 18;
    const auto pool3 = mc3_sample(model, spec, 100, cfg);
    CHECK(pool.draws != pool3.draws);
    CHECK_THROWS_AS(mc3_sample(model, spec, 0, cfg), ContractViolation);
}

TEST_CASE("mc3 prior rung matches prior moments on the banana box") {
    BananaModel model;
    const auto spec = BridgeSpec::power(5, 5.0);
    ChainConfig cfg;
    cfg.burn_in = 500;
    cfg.thin = 0.25;
    cfg.seed = 23;
    const auto pool = mc3_sample(model, spec, 4000, cfg);
    std::vector<double> x0;
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (pool.labels[i] == 0) x0.push_back(pool.draw(i)[0]);
    REQUIRE(x0.size() == 4000);
    // U(-0.5, 1.5): mean 0.5, var 1/3; allow 3 sigma with an autocorrelation cushion
    const double se = std::sqrt(var_of(x0) / static_cast<double>(x0.size()));
    CHECK(std::fabs(mean_of(x0) - 0.5) < 3.0 * se * 6.0);
    CHECK(var_of(x0) == doctest::Approx(1.0 / 3.0).epsilon(0.1));
}

TEST_CASE("swap between identical rungs always accepted, marginals preserved") {
    // two identical rungs: t = {0, 0} is not a valid spec, so use a tiny
    // custom check through mc3 with m=2 and a likelihood that is constant,
    // making all rungs identical regardless of t.
    struct FlatLik final : Model {
        std::size_t dimension() const override { return 1; }
        std::optional<Box> support() const override { return Box{{0.0}, {1.0}}; }
        double log_prior(std::span<const double> th) const override {
            return support()->contains(th) ? 0.0 : kNegInf;
        }
        double log_likelihood(std::span<const double>) const override { return 3.25; }
    } flat;
    const auto spec = BridgeSpec::power(2, 1.0);
    ChainConfig cfg;
    cfg.burn_in = 100;
    cfg.thin = 1.0;
    cfg.seed = 31;
    const auto pool = mc3_sample(flat, spec, 10000, cfg);
    // both rungs are U(0,1); two-sample KS statistic below the 1% critical value
    std::vector<double> a, b;
    for (std::size_t i = 0; i < pool.size(); ++i)
        (pool.labels[i] == 0 ? a : b).push_back(pool.draw(i)[0]);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double ks = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] < b[ib]) ++ia;
        else ++ib;
        ks = std::max(ks, std::fabs(static_cast<double>(ia) / a.size() - static_cast<double>(ib) / b.size()));
    }
    const double crit = 1.63 * std::sqrt(2.0 / 10000.0);  // ~1% level, inflated for correlation
    CHECK(ks < 3.0 * crit);
}

TEST_CASE("gibbs r=0 samples the prior") {
    MixtureHyper hyper;
    hyper.kappa = 17.0;
    hyper.xi = 0.008;
    MixtureModel model(std::vector<double>(82, 20.0), 3, hyper);
    const auto draws = gibbs_mixture(model, 0, 10000, 1.0, 0, 99);
    REQUIRE(draws.size() == 10000);
    std::vector<double> mu0;
    for (const auto& d : draws) mu0.push_back(d.theta[3]);  // first mu
    const double want_sd = 1.0 / std::sqrt(hyper.xi);
    const double se = want_sd / std::sqrt(static_cast<double>(mu0.size()));
    CHECK(std::fabs(mean_of(mu0) - hyper.kappa) < 3.0 * se);
    CHECK(var_of(mu0) == doctest::Approx(1.0 / hyper.xi).epsilon(0.05));
}

TEST_CASE("gibbs identifiability guard and conjugate concentration") {
    MixtureHyper hyper;
    MixtureModel model(std::vector<double>{1.0, 1.1, 0.9, 1.05, 0.95}, 2, hyper);
    CHECK_THROWS_AS(gibbs_mixture(model, 1, 10, 1.0, 0, 1), ContractViolation);

    // k=1 with lots of near-identical data: posterior mean of mu matches the
    // closed-form Normal-Gamma update within MC error
    std::vector<double> y(60, 2.0);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += 0.01 * ((i % 2) ? 1.0 : -1.0);
    MixtureHyper h1;
    h1.kappa = 0.0;
    h1.xi = 1.0;
    h1.alpha = 2.0;
    h1.beta1 = 1.0;
    h1.beta2 = 1.0;
    MixtureModel m1(y, 1, h1);
    const auto draws = gibbs_mixture(m1, y.size(), 4000, 1.0, 500, 7);
    std::vector<double> mus, taus;
    for (const auto& d : draws) {
        mus.push_back(d.theta[1]);
        taus.push_back(d.theta[2]);
    }
    // conditional posterior mean of mu given tau: (xi k + tau sum y)/(xi + n tau);
    // with the data tight around 2.0 the marginal mean sits near that value
    const double tau_hat = mean_of(taus);
    const double want = (h1.xi * h1.kappa + tau_hat * std::accumulate(y.begin(), y.end(), 0.0)) /
                        (h1.xi + static_cast<double>(y.size()) * tau_hat);
    const double se = std::sqrt(var_of(mus) / static_cast<double>(mus.size()));
    CHECK(std::fabs(mean_of(mus) - want) < 5.0 * se + 1e-3);
}

TEST_CASE("gibbs fixed seed is bit-stable") {
    MixtureHyper hyper;
    MixtureModel model(std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0}, 2, hyper);
    const auto a = gibbs_mixture(model, 5, 50, 0.5, 20, 1234);
    const auto b = gibbs_mixture(model, 5, 50, 0.5, 20, 1234);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].theta == b[i].theta);
}
