#include <doctest.h>

#include <cmath>

#include "recml/estimators.hpp"
#include "recml/rng.hpp"

using namespace recml;

namespace {

LogWeightMatrix make_matrix(std::size_t m, const std::vector<std::vector<double>>& rows,
                            const std::vector<int>& labels) {
    LogWeightMatrix W;
    W.n = rows.size();
    W.m = m;
    W.labels = labels;
    W.counts.assign(m, 0);
    for (int l : labels) ++W.counts[static_cast<std::size_t>(l)];
    for (const auto& r : rows) W.entries.insert(W.entries.end(), r.begin(), r.end());
    return W;
}

// The two-state toy: states {a, b}, uniform prior, w1 = 1, w2 = 2 on a and
// 0.5 on b. Rung 1 drew 2 of a and 2 of b; rung 2 drew 4 of a and 1 of b.
LogWeightMatrix two_state_toy() {
    const double la = std::log(2.0), lb = std::log(0.5);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 2; ++i) rows.push_back({0.0, la}), labels.push_back(0);
    for (int i = 0; i < 2; ++i) rows.push_back({0.0, lb}), labels.push_back(0);
    for (int i = 0; i < 4; ++i) rows.push_back({0.0, la}), labels.push_back(1);
    rows.push_back({0.0, lb}), labels.push_back(1);
    return make_matrix(2, rows, labels);
}

// independent long-hand iteration of the update equation on the toy,
// in plain (non-log) arithmetic, to 12+ digits
double two_state_oracle() {
    double z2 = 1.0;
    for (int it = 0; it < 10000; ++it) {
        const double da = 4.0 * 1.0 / 1.0 + 5.0 * 2.0 / z2;   // denominators at state a
        const double db = 4.0 * 1.0 / 1.0 + 5.0 * 0.5 / z2;   // and state b
        const double z2_new = 6.0 * 2.0 / da + 3.0 * 0.5 / db;
        const double z1_new = 6.0 * 1.0 / da + 3.0 * 1.0 / db;
        const double next = z2_new / z1_new;
        if (std::fabs(next - z2) < 1e-14) return next;
        z2 = next;
    }
    return z2;
}

}  // namespace

TEST_CASE("connectivity: complete overlap, block split, chain overlap") {
    // all entries finite -> strongly connected
    auto Wfull = make_matrix(3,
                             {{0.0, -1.0, -2.0}, {0.0, -0.5, -0.1}, {0.0, 0.0, 0.0}},
                             {0, 1, 2});
    CHECK(check_connectivity(Wfull).strongly_connected);

    // block-diagonal finiteness -> two components
    const double ni = kNegInf;
    auto Wsplit = make_matrix(4,
                              {{0.0, -1.0, ni, ni},
                               {0.0, -0.2, ni, ni},
                               {ni, ni, 0.0, -0.3},
                               {ni, ni, 0.0, -0.9}},
                              {0, 1, 2, 3});
    const auto split = check_connectivity(Wsplit);
    CHECK_FALSE(split.strongly_connected);
    CHECK(split.components.size() == 2);

    // 3-rung chain: 1 overlaps 2, 2 overlaps 3, no direct 1-3 overlap
    auto Wchain = make_matrix(3,
                              {{0.0, -1.0, ni},
                               {0.0, -1.0, ni},
                               {-2.0, 0.0, -1.0},
                               {ni, -1.0, 0.0},
                               {ni, -1.0, 0.0},
                               {-2.0, 0.0, -1.0}},
                              {0, 1, 1, 2, 2, 0});
    CHECK(check_connectivity(Wchain).strongly_connected);
}

TEST_CASE("recursive normalize: constant-weight fixed point") {
    const double c = 7.3;
    auto W = make_matrix(2, {{0.0, std::log(c)}, {0.0, std::log(c)}, {0.0, std::log(c)}}, {0, 0, 1});
    const auto z = recursive_normalize(W, 1e-13);
    CHECK(z.converged);
    CHECK(z.log_z[0] == 0.0);
    CHECK(z.log_z[1] == doctest::Approx(std::log(c)).epsilon(1e-10));
    CHECK(z.iterations <= 50);
}

TEST_CASE("recursive normalize matches the exact-arithmetic toy oracle") {
    const auto W = two_state_toy();
    const auto z = recursive_normalize(W, 1e-13);
    const double oracle = two_state_oracle();
    CHECK(z.log_z[1] == doctest::Approx(std::log(oracle)).epsilon(1e-12));
}

TEST_CASE("recursive normalize error paths") {
    const double ni = kNegInf;
    auto Wsplit = make_matrix(2, {{0.0, ni}, {ni, 0.0}}, {0, 1});
    CHECK_THROWS_AS(recursive_normalize(Wsplit), ConnectivityError);

    auto Wempty = make_matrix(2, {{0.0, ni}, {0.0, ni}}, {0, 0});
    CHECK_THROWS_AS(recursive_normalize(Wempty), ConnectivityError);

    // non-convergence carries final_delta in the message
    auto W = two_state_toy();
    CHECK_THROWS_AS(recursive_normalize(W, 1e-13, 1), ConvergenceError);
}

TEST_CASE("scale equivariance: shifting one column shifts its normalizer only") {
    auto W = two_state_toy();
    const auto base = recursive_normalize(W, 1e-12);
    const double shift = 1.37;
    auto W2 = W;
    for (std::size_t i = 0; i < W2.n; ++i) W2.at(i, 1) += shift;
    const auto shifted = recursive_normalize(W2, 1e-12);
    CHECK(shifted.log_z[1] == doctest::Approx(base.log_z[1] + shift).epsilon(1e-10));
    CHECK(shifted.log_z[0] == 0.0);
}

TEST_CASE("label invariance: permuting rows and replacing labels (counts fixed)") {
    auto W = two_state_toy();
    const auto base = recursive_normalize(W, 1e-12);

    // permute rows together with labels
    std::vector<std::size_t> perm{8, 3, 5, 0, 7, 2, 6, 1, 4};
    LogWeightMatrix Wp = W;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        for (std::size_t k = 0; k < W.m; ++k) Wp.at(i, k) = W.at(perm[i], k);
        Wp.labels[i] = W.labels[perm[i]];
    }
    const auto permuted = recursive_normalize(Wp, 1e-12);
    CHECK(permuted.log_z[1] == doctest::Approx(base.log_z[1]).epsilon(1e-12));

    // "losing the labels": any relabeling with the same counts gives the
    // same fixed point
    LogWeightMatrix Wl = W;
    Wl.labels = {1, 0, 1, 0, 0, 1, 1, 0, 1};  // still 4 zeros, 5 ones
    const auto relabeled = recursive_normalize(Wl, 1e-12);
    CHECK(relabeled.log_z[1] == doctest::Approx(base.log_z[1]).epsilon(1e-12));
}

TEST_CASE("fixed point verification and self-normalization") {
    auto W = two_state_toy();
    const auto z = recursive_normalize(W, 1e-12);
    // substituting log Z into the right side reproduces log Z
    for (std::size_t k = 0; k < W.m; ++k) {
        LogSumExp acc;
        for (std::size_t i = 0; i < W.n; ++i) {
            LogSumExp den;
            for (std::size_t s = 0; s < W.m; ++s)
                den.add(std::log(static_cast<double>(W.counts[s])) + W.at(i, s) - z.log_z[s]);
            acc.add(W.at(i, k) - den.value());
        }
        CHECK(acc.value() == doctest::Approx(z.log_z[k]).epsilon(1e-10));
    }
    // sum of the NPMLE atoms is 1
    LogSumExp atoms;
    for (std::size_t i = 0; i < W.n; ++i) {
        LogSumExp den;
        for (std::size_t s = 0; s < W.m; ++s)
            den.add(std::log(static_cast<double>(W.counts[s])) + W.at(i, s) - z.log_z[s]);
        atoms.add(-den.value());
    }
    CHECK(atoms.value() == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("pseudo mixture log density") {
    // single rung: reduces to the row entry
    auto W1 = make_matrix(1, {{-0.3}, {-0.7}}, {0, 0});
    LogNormalizers z1;
    z1.log_z = {0.0};
    z1.converged = true;
    PseudoMixture P1{&W1, z1};
    const std::vector<double> row{-0.4};
    // m=1: log(n_1/n) + row[0] - log Z_1 = row[0]
    CHECK(pseudo_mixture_logdensity(P1, row) == doctest::Approx(-0.4).epsilon(1e-12));

    // identical rungs: independent of the count split
    auto W2 = make_matrix(2, {{-0.2, -0.2}, {-0.2, -0.2}, {-0.2, -0.2}}, {0, 0, 1});
    LogNormalizers z2;
    z2.log_z = {0.0, 0.0};
    z2.converged = true;
    PseudoMixture P2{&W2, z2};
    const std::vector<double> row2{-0.2, -0.2};
    // identical rungs: the count split drops out entirely
    CHECK(pseudo_mixture_logdensity(P2, row2) == doctest::Approx(-0.2).epsilon(1e-12));

    // toy two-rung hand computation
    auto W3 = two_state_toy();
    auto z3 = recursive_normalize(W3, 1e-12);
    PseudoMixture P3{&W3, z3};
    const std::vector<double> row3{0.0, std::log(2.0)};
    const double want = std::log(4.0 / 9.0 * std::exp(0.0 - z3.log_z[0]) +
                                 5.0 / 9.0 * 2.0 * std::exp(-z3.log_z[1]));
    CHECK(pseudo_mixture_logdensity(P3, row3) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("tivis agrees with the recursive fixed point on the toy") {
    const auto W = two_state_toy();
    const auto rec = recursive_normalize(W, 1e-12);
    const auto tiv = tivis_estimate(W, LogNormalizers{}, 101, 1e-12);
    CHECK(tiv.converged);
    CHECK(tiv.log_z[1] == doctest::Approx(rec.log_z[1]).epsilon(1e-6));
}

TEST_CASE("tivis: identical rungs integrate to zero") {
    auto W = make_matrix(2, {{-0.4, -0.4}, {-0.4, -0.4}, {-0.4, -0.4}}, {0, 1, 1});
    const auto tiv = tivis_estimate(W, LogNormalizers{}, 51);
    CHECK(tiv.log_z[1] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("tivis input validation") {
    const auto W = two_state_toy();
    CHECK_THROWS_AS(tivis_estimate(W, LogNormalizers{}, 100), ContractViolation);  // even
    CHECK_THROWS_AS(tivis_estimate(W, LogNormalizers{}, 1), ContractViolation);    // < 3
    // support mismatch across adjacent rungs
    auto Wbad = make_matrix(2, {{0.0, kNegInf}, {0.0, 0.0}}, {0, 1});
    CHECK_THROWS_AS(tivis_estimate(Wbad, LogNormalizers{}, 11), ContractViolation);
}

TEST_CASE("hme and ame baselines") {
    std::vector<double> constant{std::log(4.2), std::log(4.2), std::log(4.2)};
    CHECK(hme(constant) == doctest::Approx(std::log(4.2)).epsilon(1e-13));
    CHECK(ame(constant) == doctest::Approx(std::log(4.2)).epsilon(1e-13));

    std::vector<double> two{std::log(1.0), std::log(3.0)};
    CHECK(hme(two) == doctest::Approx(std::log(1.5)).epsilon(1e-13));
    CHECK(ame(two) == doctest::Approx(std::log(2.0)).epsilon(1e-13));

    const std::vector<double> empty;
    CHECK_THROWS_AS(hme(empty), ContractViolation);
    CHECK_THROWS_AS(ame(empty), ContractViolation);
}

TEST_CASE("ame on banana prior draws approaches the quadrature answer") {
    // plain Monte Carlo oracle: n large enough for a tight MC SE
    Rng rng(77);
    const std::size_t n = 1000000;
    std::vector<double> ll(n);
    std::vector<double> th(2);
    for (std::size_t i = 0; i < n; ++i) {
        th[0] = rng.uniform(-0.5, 1.5);
        th[1] = rng.uniform(-0.5, 1.5);
        const double a = 10.0 * (0.45 - th[0]);
        const double b = 20.0 * (th[1] / 2.0 - th[0] * th[0] * th[0] * th[0]);
        ll[i] = -a * a / 4.0 - b * b;
    }
    const double est = ame(ll);
    // MC SE of the AME at this n is ~0.004; allow 3 sigma
    CHECK(std::fabs(est - (-4.15394)) < 0.015);
}
