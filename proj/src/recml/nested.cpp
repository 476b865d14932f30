#include "recml/nested.hpp"

#include <algorithm>
#include <cmath>

#include "recml/rng.hpp"

namespace recml {

namespace {
double unit_ball_log_volume(std::size_t d) {
    return 0.5 * static_cast<double>(d) * std::log(M_PI) - std::lgamma(0.5 * static_cast<double>(d) + 1.0);
}
}  // namespace

bool Ellipsoid::contains(std::span<const double> theta, double tol) const {
    Eigen::Map<const Eigen::VectorXd> x(theta.data(), center.size());
    const Eigen::VectorXd d = x - center;
    return d.dot(shape * d) <= 1.0 + tol;
}

Ellipsoid Ellipsoid::expanded(double f) const {
    Ellipsoid e = *this;
    e.shape = shape / (f * f);
    e.log_volume = log_volume + static_cast<double>(center.size()) * std::log(f);
    return e;
}

namespace {

// Khachiyan iteration with a compile-time lifted dimension, so the inner
// loop runs on fixed-size matrices; u can warm-start from a previous set.
template <int D>
Ellipsoid mvee_fixed(std::span<const double> points, double tol, int max_iter, Eigen::VectorXd* u_io) {
    constexpr int DP1 = D + 1;
    const std::size_t N = points.size() / static_cast<std::size_t>(D);
    const auto n = static_cast<Eigen::Index>(N);
    Eigen::Matrix<double, DP1, Eigen::Dynamic> Q(DP1, n);
    for (std::size_t i = 0; i < N; ++i) {
        for (int k = 0; k < D; ++k) Q(k, static_cast<Eigen::Index>(i)) = points[i * D + k];
        Q(D, static_cast<Eigen::Index>(i)) = 1.0;
    }
    Eigen::VectorXd u;
    if (u_io && u_io->size() == n && u_io->minCoeff() >= 0.0 && u_io->sum() > 0.0)
        u = *u_io / u_io->sum();
    else
        u = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(N));

    Eigen::Matrix<double, DP1, DP1> X, Xi;
    const double dd = static_cast<double>(D);
    auto max_lifted = [&](Eigen::Index* jmax) {
        X.setZero();
        for (Eigen::Index i = 0; i < n; ++i) X.noalias() += u(i) * Q.col(i) * Q.col(i).transpose();
        Xi = X.inverse();
        double mmax = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double mi = Q.col(i).dot(Xi * Q.col(i));
            if (mi > mmax) {
                mmax = mi;
                if (jmax) *jmax = i;
            }
        }
        return mmax;
    };
    for (int it = 0; it < max_iter; ++it) {
        Eigen::Index jmax = 0;
        const double mmax = max_lifted(&jmax);
        if (mmax - (dd + 1.0) < tol * (dd + 1.0)) break;
        const double step = (mmax - dd - 1.0) / ((dd + 1.0) * (mmax - 1.0));
        u *= (1.0 - step);
        u(jmax) += step;
    }
    if (u_io) *u_io = u;
    // residual duality gap of the final weights; in the lifted space every
    // point satisfies M_i = (x-c)^T S^-1 (x-c) + 1 <= (d+1)(1+gap), so
    // scaling S by 1 + gap (d+1)/d guarantees containment at any tolerance
    const double gap = std::max(0.0, max_lifted(nullptr) / (dd + 1.0) - 1.0);

    Eigen::Matrix<double, D, Eigen::Dynamic> P = Q.topRows(D);
    Ellipsoid e;
    Eigen::Matrix<double, D, 1> c = P * u;
    Eigen::Matrix<double, D, D> S =
        (1.0 + gap * (dd + 1.0) / dd) * (P * u.asDiagonal() * P.transpose() - c * c.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, D, D>> es(S);
    Eigen::Matrix<double, D, 1> sig = es.eigenvalues().cwiseMax(es.eigenvalues().maxCoeff() * 1e-300);
    // lambda = 1/(d sigma), capped so minor/major axis ratio stays >= 1e-6
    Eigen::Matrix<double, D, 1> lam = (static_cast<double>(D) * sig.array()).inverse().matrix();
    const double lam_min = lam.minCoeff();
    lam = lam.cwiseMin(lam_min * 1e12);
    e.center = c;
    e.shape = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    double logdet = 0.0;
    for (int i = 0; i < D; ++i) logdet += std::log(lam(i));
    e.log_volume = unit_ball_log_volume(static_cast<std::size_t>(D)) - 0.5 * logdet;
    return e;
}

Ellipsoid mvee_core(std::span<const double> points, std::size_t dim, double tol, int max_iter, Eigen::VectorXd* u_io) {
    if (points.size() / dim < 2) throw ContractViolation("mvee: need at least 2 points");
    switch (dim) {
        case 1: return mvee_fixed<1>(points, tol, max_iter, u_io);
        case 2: return mvee_fixed<2>(points, tol, max_iter, u_io);
        case 3: return mvee_fixed<3>(points, tol, max_iter, u_io);
        case 4: return mvee_fixed<4>(points, tol, max_iter, u_io);
        default: throw ContractViolation("mvee: dimension > 4 unsupported");
    }
}

}  // namespace

Ellipsoid mvee(std::span<const double> points, std::size_t dim, double tol) {
    return mvee_core(points, dim, tol, 200000, nullptr);
}

NSRun nested_run(const Model& model, std::size_t n_live, std::size_t steps, double expand_factor,
                 std::uint64_t seed) {
    const auto boxOpt = model.support();
    if (!boxOpt) throw ContractViolation("nested_run: uniform box prior required");
    if (steps < 1 || n_live < 2) throw ContractViolation("nested_run: need steps >= 1 and n_live >= 2");
    const Box box = *boxOpt;
    const std::size_t d = model.dimension();

    NSRun run;
    run.dim = d;
    run.n_live = n_live;
    run.steps = steps;
    run.expand_factor = expand_factor;
    run.seed = seed;
    run.box = box;

    Rng rng = Rng::stream(seed, "nested");
    std::vector<double> live(n_live * d), ll(n_live);
    for (std::size_t i = 0; i < n_live; ++i) {
        for (std::size_t k = 0; k < d; ++k) live[i * d + k] = rng.uniform(box.lower[k], box.upper[k]);
        ll[i] = model.log_likelihood({&live[i * d], d});
    }
    run.likelihood_calls = n_live;
    run.initial = live;
    run.initial_ll = ll;

    std::vector<double> prop(d);
    Eigen::VectorXd uvec(static_cast<Eigen::Index>(d));
    Eigen::VectorXd warm;  // Khachiyan weights carried across steps
    for (std::size_t step = 0; step < steps; ++step) {
        std::size_t iworst = 0;
        for (std::size_t i = 1; i < n_live; ++i)
            if (ll[i] < ll[iworst]) iworst = i;
        const double threshold = ll[iworst];

        Shell shell;
        shell.threshold = threshold;
        shell.ellipsoid = mvee_core(live, d, 1e-4, 500, &warm).expanded(expand_factor);
        const auto& ell = shell.ellipsoid;

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ell.shape);
        const Eigen::MatrixXd B =
            es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();

        std::size_t tries = 0;
        for (;;) {
            if (++tries > 1000000)
                throw SamplerStallError("nested_run: no replacement found in shell " + std::to_string(step + 1) +
                                        " after 1e6 proposals");
            // uniform in the unit ball, mapped through B
            double r2;
            do {
                r2 = 0.0;
                for (std::size_t k = 0; k < d; ++k) {
                    uvec(static_cast<Eigen::Index>(k)) = rng.uniform(-1.0, 1.0);
                    r2 += uvec(static_cast<Eigen::Index>(k)) * uvec(static_cast<Eigen::Index>(k));
                }
            } while (r2 > 1.0);
            const Eigen::VectorXd x = ell.center + B * uvec;
            for (std::size_t k = 0; k < d; ++k) prop[k] = x(static_cast<Eigen::Index>(k));
            ++run.likelihood_calls;
            const double lp = box.contains(prop) ? model.log_likelihood(prop) : kNegInf;
            if (lp > threshold) {
                shell.accepted = prop;
                shell.accepted_ll = lp;
                const Eigen::VectorXd dv = x - ell.center;
                if (dv.dot(ell.shape * dv) > 0.9801) ++run.boundary_warnings;
                break;
            }
            shell.rejected.insert(shell.rejected.end(), prop.begin(), prop.end());
            shell.rejected_ll.push_back(lp);
            ++shell.n_oh;
        }
        for (std::size_t k = 0; k < d; ++k) live[iworst * d + k] = shell.accepted[k];
        ll[iworst] = shell.accepted_ll;
        if (warm.size() == static_cast<Eigen::Index>(n_live)) {
            warm(static_cast<Eigen::Index>(iworst)) = 1.0 / static_cast<double>(n_live);
            warm /= warm.sum();
        }
        run.shells.push_back(std::move(shell));
    }
    run.live_final = live;
    run.live_final_ll = ll;
    return run;
}

double ns_evidence(const NSRun& run) {
    const double nl = static_cast<double>(run.n_live);
    LogSumExp acc;
    for (std::size_t i = 1; i <= run.shells.size(); ++i) {
        const double xa = -static_cast<double>(i - 1) / nl;
        const double xb = -static_cast<double>(i) / nl;
        const double lw = xa + std::log1p(-std::exp(xb - xa));  // log(Xa - Xb)
        const double li = run.shells[i - 1].threshold;
        if (li != kNegInf) acc.add(li + lw);
    }
    const double live_mean = log_sum_exp(run.live_final_ll) - std::log(nl);
    acc.add(live_mean - static_cast<double>(run.steps) / nl);
    return acc.value();
}

ShellRecursiveResult shell_recursive_evidence(const NSRun& run) {
    ShellRecursiveResult res;
    res.ladder.push_back(kNegInf);
    for (std::size_t i = run.n_live; i <= run.shells.size(); i += run.n_live)
        res.ladder.push_back(run.shells[i - 1].threshold);
    const std::size_t m = res.ladder.size();

    // pool: initial prior draws at rung 1; accepted draws conditioned up to
    // the smallest ladder threshold >= their own constraint
    std::vector<double> pts, lls;
    std::vector<int> labels;
    for (std::size_t i = 0; i < run.n_live; ++i) {
        pts.insert(pts.end(), run.initial.begin() + static_cast<std::ptrdiff_t>(i * run.dim),
                   run.initial.begin() + static_cast<std::ptrdiff_t>((i + 1) * run.dim));
        lls.push_back(run.initial_ll[i]);
        labels.push_back(0);
    }
    for (const auto& shell : run.shells) {
        const auto it = std::lower_bound(res.ladder.begin() + 1, res.ladder.end(), shell.threshold);
        if (it == res.ladder.end()) continue;  // constrained beyond the ladder
        if (shell.accepted_ll > *it) {
            pts.insert(pts.end(), shell.accepted.begin(), shell.accepted.end());
            lls.push_back(shell.accepted_ll);
            labels.push_back(static_cast<int>(it - res.ladder.begin()));
        }
    }

    LogWeightMatrix W;
    W.n = lls.size();
    W.m = m;
    W.labels = labels;
    W.counts.assign(m, 0);
    for (int l : labels) ++W.counts[static_cast<std::size_t>(l)];
    W.entries.assign(W.n * m, 0.0);
    for (std::size_t i = 0; i < W.n; ++i)
        for (std::size_t k = 0; k < m; ++k) W.at(i, k) = lls[i] > res.ladder[k] ? 0.0 : kNegInf;
    res.counts = W.counts;

    res.normalizers = recursive_normalize(W);
    PseudoMixture P{&W, res.normalizers};
    // reweight the normalized shell mixture to the posterior target
    LogSumExp acc;
    const double log_n = std::log(static_cast<double>(W.n));
    for (std::size_t i = 0; i < W.n; ++i) {
        const double lp = pseudo_mixture_logdensity(P, W.row(i));
        acc.add(lls[i] - lp);
    }
    res.log_z = acc.value() - log_n;
    if (m >= 2) {
        const auto cov = quasi_hessian_covariance(W, res.normalizers);
        // SE of the reweighted target, delta-method on the top-rung coordinate
        res.hessian_se = cov.se_target;
    }
    res.analytic_se_unreliable = true;
    return res;
}

InsResult ins_evidence(const NSRun& run, std::size_t bootstrap_B, std::uint64_t bootstrap_seed) {
    const std::size_t d = run.dim;
    const double log_prior = -run.box.log_volume();

    std::vector<double> pts, lls;
    std::vector<int> src;
    auto push = [&](const double* p, double ll, int s) {
        pts.insert(pts.end(), p, p + d);
        lls.push_back(ll);
        src.push_back(s);
    };
    for (std::size_t i = 0; i < run.n_live; ++i) push(&run.initial[i * d], run.initial_ll[i], 0);
    for (std::size_t k = 0; k < run.shells.size(); ++k) {
        const auto& sh = run.shells[k];
        push(sh.accepted.data(), sh.accepted_ll, static_cast<int>(k + 1));
        for (std::size_t r = 0; r < sh.rejected_ll.size(); ++r)
            push(&sh.rejected[r * d], sh.rejected_ll[r], static_cast<int>(k + 1));
    }
    const std::size_t n = lls.size();
    std::vector<std::size_t> counts(run.shells.size() + 1, 0);
    for (int s : src) ++counts[static_cast<std::size_t>(s)];

    // p(theta) = sum_k (n_k/n) I(theta in Ell_k) / V_k, with Ell_0 = the box
    const double log_n = std::log(static_cast<double>(n));
    std::vector<double> logp(n, kNegInf);
    for (std::size_t i = 0; i < n; ++i) {
        std::span<const double> th{&pts[i * d], d};
        if (run.box.contains(th))
            logp[i] = std::log(static_cast<double>(counts[0])) - log_n - run.box.log_volume();
    }
    for (std::size_t k = 0; k < run.shells.size(); ++k) {
        if (counts[k + 1] == 0) continue;
        const auto& ell = run.shells[k].ellipsoid;
        const double term = std::log(static_cast<double>(counts[k + 1])) - log_n - ell.log_volume;
        for (std::size_t i = 0; i < n; ++i)
            if (ell.contains({&pts[i * d], d})) logp[i] = log_add(logp[i], term);
    }

    std::vector<double> log_ratio(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (logp[i] == kNegInf) throw ContractViolation("ins_evidence: draw in no ellipsoid");
        const bool inbox = run.box.contains({&pts[i * d], d});
        log_ratio[i] = (inbox && lls[i] != kNegInf) ? lls[i] + log_prior - logp[i] : kNegInf;
    }

    InsResult res;
    res.n_draws = n;
    res.log_z = log_sum_exp(log_ratio) - log_n;

    // draw-level bootstrap
    std::vector<double> estimates(bootstrap_B);
    for (std::size_t b = 0; b < bootstrap_B; ++b) {
        Rng rng = Rng::stream(bootstrap_seed, "ins-bootstrap", b);
        LogSumExp acc;
        for (std::size_t i = 0; i < n; ++i) acc.add(log_ratio[rng.uniform_index(n)]);
        estimates[b] = acc.value() - log_n;
    }
    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= static_cast<double>(bootstrap_B);
    double ss = 0.0;
    for (double e : estimates) ss += (e - mean) * (e - mean);
    res.se_bootstrap = std::sqrt(ss / static_cast<double>(bootstrap_B - 1));
    return res;
}

}  // namespace recml
