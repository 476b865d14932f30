#include "recml/bridge.hpp"

#include <algorithm>
#include <cmath>

#include "recml/mixture.hpp"

namespace recml {

std::vector<double> temperature_schedule(std::size_t m, double c) {
    if (m < 2) throw ContractViolation("temperature_schedule: m must be >= 2");
    if (c <= 0.0) throw ContractViolation("temperature_schedule: c must be positive");
    std::vector<double> t(m);
    for (std::size_t j = 0; j < m; ++j)
        t[j] = std::pow(static_cast<double>(j) / static_cast<double>(m - 1), c);
    t.front() = 0.0;
    t.back() = 1.0;
    return t;
}

std::vector<std::size_t> partial_data_schedule(std::size_t n_tot, std::size_t m, double c, std::size_t r_min) {
    if (m < 2) throw ContractViolation("partial_data_schedule: m must be >= 2");
    if (r_min > n_tot) throw ContractViolation("partial_data_schedule: r_min exceeds n_tot");
    std::vector<std::size_t> r(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double frac = std::pow(static_cast<double>(j) / static_cast<double>(m - 1), c);
        r[j] = static_cast<std::size_t>(std::floor(static_cast<double>(n_tot) * frac));
        if (j >= 1 && j + 1 < m && r[j] < r_min) r[j] = r_min;
    }
    r.front() = 0;
    r.back() = n_tot;
    return r;
}

double AuxiliaryDensity::log_density(std::span<const double> theta) const {
    if (!box.contains(theta)) return kNegInf;
    const auto d = static_cast<Eigen::Index>(mu_mode.size());
    Eigen::Map<const Eigen::VectorXd> x(theta.data(), d);
    const Eigen::VectorXd dv = x - mu_mode;
    const double q = dv.dot(sigma_mode * dv);
    const double half_logdet = 0.5 * std::log(sigma_mode.determinant());
    const double dd = static_cast<double>(d);
    double lf;
    if (family == AuxFamily::truncated_normal) {
        lf = half_logdet - 0.5 * dd * std::log(2.0 * M_PI) - 0.5 * q;
    } else {
        // multivariate t, nu = 1, scale = sigma_mode^{-1}
        lf = std::lgamma(0.5 * (1.0 + dd)) - std::lgamma(0.5) - 0.5 * dd * std::log(M_PI) + half_logdet -
             0.5 * (1.0 + dd) * std::log1p(q);
    }
    return lf - log_norm_const;
}

namespace {

// Nelder-Mead on a box-constrained negative objective (clamped penalty).
struct NelderMead {
    std::function<double(std::span<const double>)> f;  // minimized
    std::size_t d;
    std::size_t max_iter;

    double eval(std::vector<double>& x) const { return f(x); }

    // returns best point and value; converged flag via last simplex spread
    bool run(std::vector<double>& x0, double scale, std::vector<double>& best, double& fbest) const {
        const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
        std::vector<std::vector<double>> pts(d + 1, x0);
        std::vector<double> fv(d + 1);
        for (std::size_t i = 0; i < d; ++i) pts[i + 1][i] += scale;
        for (std::size_t i = 0; i <= d; ++i) fv[i] = eval(pts[i]);
        for (std::size_t it = 0; it < max_iter; ++it) {
            std::vector<std::size_t> ord(d + 1);
            for (std::size_t i = 0; i <= d; ++i) ord[i] = i;
            std::sort(ord.begin(), ord.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
            if (fv[ord[d]] - fv[ord[0]] < 1e-12 * (1.0 + std::fabs(fv[ord[0]]))) {
                best = pts[ord[0]];
                fbest = fv[ord[0]];
                return true;
            }
            std::vector<double> centroid(d, 0.0);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t k = 0; k < d; ++k) centroid[k] += pts[ord[i]][k] / static_cast<double>(d);
            auto blend = [&](double w) {
                std::vector<double> p(d);
                for (std::size_t k = 0; k < d; ++k) p[k] = centroid[k] + w * (centroid[k] - pts[ord[d]][k]);
                return p;
            };
            auto xr = blend(alpha);
            const double fr = f(xr);
            if (fr < fv[ord[0]]) {
                auto xe = blend(gamma);
                const double fe = f(xe);
                if (fe < fr) {
                    pts[ord[d]] = xe;
                    fv[ord[d]] = fe;
                } else {
                    pts[ord[d]] = xr;
                    fv[ord[d]] = fr;
                }
            } else if (fr < fv[ord[d - 1]]) {
                pts[ord[d]] = xr;
                fv[ord[d]] = fr;
            } else {
                auto xc = blend(rho);
                const double fc = f(xc);
                if (fc < fv[ord[d]]) {
                    pts[ord[d]] = xc;
                    fv[ord[d]] = fc;
                } else {
                    for (std::size_t i = 1; i <= d; ++i) {
                        for (std::size_t k = 0; k < d; ++k)
                            pts[ord[i]][k] = pts[ord[0]][k] + sigma * (pts[ord[i]][k] - pts[ord[0]][k]);
                        fv[ord[i]] = eval(pts[ord[i]]);
                    }
                }
            }
        }
        return false;
    }
};

double untruncated_log_density(const AuxiliaryDensity& aux, std::span<const double> theta) {
    const auto d = static_cast<Eigen::Index>(aux.mu_mode.size());
    Eigen::Map<const Eigen::VectorXd> x(theta.data(), d);
    const Eigen::VectorXd dv = x - aux.mu_mode;
    const double q = dv.dot(aux.sigma_mode * dv);
    const double half_logdet = 0.5 * std::log(aux.sigma_mode.determinant());
    const double dd = static_cast<double>(d);
    if (aux.family == AuxFamily::truncated_normal)
        return half_logdet - 0.5 * dd * std::log(2.0 * M_PI) - 0.5 * q;
    return std::lgamma(0.5 * (1.0 + dd)) - std::lgamma(0.5) - 0.5 * dd * std::log(M_PI) + half_logdet -
           0.5 * (1.0 + dd) * std::log1p(q);
}

// Simpson quadrature of exp(logf) over the box (d <= 3).
double box_quadrature_log(const Box& box, std::size_t n_per_dim,
                          const std::function<double(std::span<const double>)>& logf) {
    const std::size_t d = box.dim();
    std::vector<std::vector<double>> grids(d), logw(d);
    for (std::size_t k = 0; k < d; ++k) {
        const double h = (box.upper[k] - box.lower[k]) / static_cast<double>(n_per_dim - 1);
        grids[k].resize(n_per_dim);
        for (std::size_t i = 0; i < n_per_dim; ++i) grids[k][i] = box.lower[k] + static_cast<double>(i) * h;
        auto w = simpson_weights(n_per_dim, h);
        logw[k].resize(n_per_dim);
        for (std::size_t i = 0; i < n_per_dim; ++i) logw[k][i] = std::log(w[i]);
    }
    LogSumExp acc;
    std::vector<double> theta(d);
    std::vector<std::size_t> idx(d, 0);
    for (;;) {
        double lw = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            theta[k] = grids[k][idx[k]];
            lw += logw[k][idx[k]];
        }
        acc.add(lw + logf(theta));
        std::size_t k = 0;
        while (k < d && ++idx[k] == n_per_dim) idx[k++] = 0;
        if (k == d) break;
    }
    return acc.value();
}

}  // namespace

AuxiliaryDensity auxiliary_from_mode(const Model& model, AuxFamily family, std::size_t max_iter) {
    const auto boxOpt = model.support();
    if (!boxOpt) throw ContractViolation("auxiliary_from_mode: bounded box support required");
    const Box box = *boxOpt;
    const std::size_t d = model.dimension();

    auto neg_log_post = [&](std::span<const double> th) {
        if (!box.contains(th)) return kInf;
        const double lp = model.log_prior(th) + model.log_likelihood(th);
        return lp == kNegInf ? kInf : -lp;
    };

    // coarse deterministic grid scan seeds the simplex starts
    const std::size_t g = d <= 2 ? 21 : 9;
    std::vector<std::pair<double, std::vector<double>>> seeds;
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> th(d);
    for (;;) {
        for (std::size_t k = 0; k < d; ++k)
            th[k] = box.lower[k] + (box.upper[k] - box.lower[k]) * (0.5 + static_cast<double>(idx[k])) /
                                       static_cast<double>(g);
        seeds.emplace_back(neg_log_post(th), th);
        std::size_t k = 0;
        while (k < d && ++idx[k] == g) idx[k++] = 0;
        if (k == d) break;
    }
    std::sort(seeds.begin(), seeds.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    seeds.resize(std::min<std::size_t>(seeds.size(), 5));

    NelderMead nm{neg_log_post, d, max_iter};
    std::vector<double> best;
    double fbest = kInf;
    bool any_converged = false;
    for (auto& [f0, s] : seeds) {
        std::vector<double> cand;
        double fcand;
        double scale = 0.05 * (box.upper[0] - box.lower[0]);
        if (nm.run(s, scale, cand, fcand)) {
            any_converged = true;
            if (fcand < fbest) {
                fbest = fcand;
                best = cand;
            }
        }
    }
    if (!any_converged) throw ConvergenceError("auxiliary_from_mode: mode search failed to converge");

    // central-difference Hessian of -log(prior x lik) at the mode
    Eigen::MatrixXd H(d, d);
    std::vector<double> h(d);
    for (std::size_t i = 0; i < d; ++i) h[i] = std::max(1e-4, 1e-4 * std::fabs(best[i]));
    auto f_at = [&](const std::vector<double>& x) { return neg_log_post(x); };
    const double f0 = f_at(best);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            std::vector<double> x = best;
            if (i == j) {
                x[i] = best[i] + h[i];
                const double fp = f_at(x);
                x[i] = best[i] - h[i];
                const double fm = f_at(x);
                H(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
            } else {
                double v = 0.0;
                x = best; x[i] += h[i]; x[j] += h[j]; v += f_at(x);
                x = best; x[i] += h[i]; x[j] -= h[j]; v -= f_at(x);
                x = best; x[i] -= h[i]; x[j] += h[j]; v -= f_at(x);
                x = best; x[i] -= h[i]; x[j] -= h[j]; v += f_at(x);
                H(i, j) = H(j, i) = v / (4.0 * h[i] * h[j]);
            }
        }
    }

    AuxiliaryDensity aux;
    aux.family = family;
    aux.mu_mode = Eigen::Map<const Eigen::VectorXd>(best.data(), static_cast<Eigen::Index>(d));
    aux.box = box;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.eigenvalues().minCoeff() <= 0.0) {
        const double eps = 1e-6 * H.trace() / static_cast<double>(d);
        H += (std::fabs(es.eigenvalues().minCoeff()) + eps) * Eigen::MatrixXd::Identity(d, d);
        aux.regularized = true;
    }
    aux.sigma_mode = H;
    const std::size_t nq = d <= 2 ? 801 : 101;
    aux.log_norm_const = 0.0;  // untruncated form first
    aux.log_norm_const =
        box_quadrature_log(box, nq, [&](std::span<const double> x) { return untruncated_log_density(aux, x); });
    return aux;
}

std::string to_string(BridgeKind kind) {
    switch (kind) {
        case BridgeKind::power_posterior: return "power_posterior";
        case BridgeKind::partial_data: return "partial_data";
        case BridgeKind::auxiliary_path: return "auxiliary_path";
        case BridgeKind::nested_shells: return "nested_shells";
    }
    return "?";
}

BridgeKind bridge_kind_from_string(const std::string& s) {
    if (s == "power_posterior") return BridgeKind::power_posterior;
    if (s == "partial_data") return BridgeKind::partial_data;
    if (s == "auxiliary_path") return BridgeKind::auxiliary_path;
    if (s == "nested_shells") return BridgeKind::nested_shells;
    throw ConfigError("unknown bridge kind: " + s);
}

BridgeSpec BridgeSpec::power(std::size_t m, double c) {
    BridgeSpec s;
    s.kind = BridgeKind::power_posterior;
    s.m = m;
    s.c = c;
    s.t = temperature_schedule(m, c);
    s.validate();
    return s;
}

BridgeSpec BridgeSpec::partial(std::size_t n_tot, std::size_t m, double c, std::size_t r_min) {
    BridgeSpec s;
    s.kind = BridgeKind::partial_data;
    s.m = m;
    s.c = c;
    s.r = partial_data_schedule(n_tot, m, c, r_min);
    s.validate();
    return s;
}

BridgeSpec BridgeSpec::auxiliary(std::size_t m, double c, AuxiliaryDensity aux) {
    BridgeSpec s;
    s.kind = BridgeKind::auxiliary_path;
    s.m = m;
    s.c = c;
    s.t = temperature_schedule(m, c);
    s.aux = std::move(aux);
    s.validate();
    return s;
}

BridgeSpec BridgeSpec::nested(std::vector<double> thresholds) {
    BridgeSpec s;
    s.kind = BridgeKind::nested_shells;
    s.m = thresholds.size();
    s.shells = std::move(thresholds);
    return s;
}

void BridgeSpec::validate() const {
    if (m < 2) throw ConfigError("bridge: m must be >= 2");
    if (kind == BridgeKind::power_posterior || kind == BridgeKind::auxiliary_path) {
        if (t.size() != m || t.front() != 0.0 || t.back() != 1.0)
            throw ConfigError("bridge: temperature ladder must run exactly from 0 to 1");
        if (!std::is_sorted(t.begin(), t.end())) throw ConfigError("bridge: temperatures must be nondecreasing");
        if (kind == BridgeKind::auxiliary_path && !aux)
            throw ConfigError("bridge: auxiliary_path needs an auxiliary density");
    }
    if (kind == BridgeKind::partial_data) {
        if (r.size() != m || r.front() != 0) throw ConfigError("bridge: subset ladder must start at r=0");
        if (!std::is_sorted(r.begin(), r.end())) throw ConfigError("bridge: subset sizes must be nondecreasing");
    }
}

LogWeightMatrix eval_weight_matrix(const DrawPool& pool, const BridgeSpec& spec, const Model& model) {
    const std::size_t n = pool.size();
    const std::size_t m = spec.m;
    LogWeightMatrix W;
    W.n = n;
    W.m = m;
    W.entries.assign(n * m, 0.0);
    W.labels = pool.labels;
    W.counts = pool.counts;

    const bool need_prior_relative =
        spec.kind == BridgeKind::power_posterior || spec.kind == BridgeKind::auxiliary_path;

    std::vector<double> ll = pool.loglik;
    if (ll.size() != n && spec.kind != BridgeKind::partial_data) {
        ll.resize(n);
        for (std::size_t i = 0; i < n; ++i) ll[i] = model.log_likelihood(pool.draw(i));
    }

    switch (spec.kind) {
        case BridgeKind::power_posterior:
        case BridgeKind::auxiliary_path: {
            for (std::size_t i = 0; i < n; ++i) {
                const auto th = pool.draw(i);
                const double lpi = model.log_prior(th);
                if (need_prior_relative && lpi == kNegInf)
                    throw ContractViolation("eval_weight_matrix: pooled draw outside prior support");
                double lh_rel = 0.0;
                if (spec.kind == BridgeKind::auxiliary_path) lh_rel = spec.aux->log_density(th) - lpi;
                for (std::size_t k = 0; k < m; ++k) {
                    const double tk = spec.t[k];
                    W.at(i, k) = (spec.kind == BridgeKind::auxiliary_path ? (1.0 - tk) * lh_rel : 0.0) + tk * ll[i];
                }
            }
            break;
        }
        case BridgeKind::partial_data: {
            // per-datum prefix sums when the model exposes them
            if (const auto* mm = dynamic_cast<const MixtureModel*>(&model)) {
                const std::size_t n_tot = mm->data_size();
                std::vector<double> ld(n_tot), prefix(n_tot + 1);
                for (std::size_t i = 0; i < n; ++i) {
                    mm->per_datum_log_density(pool.draw(i), ld);
                    prefix[0] = 0.0;
                    for (std::size_t q = 0; q < n_tot; ++q) prefix[q + 1] = prefix[q] + ld[q];
                    for (std::size_t k = 0; k < m; ++k) W.at(i, k) = prefix[spec.r[k]];
                }
            } else {
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t k = 0; k < m; ++k)
                        W.at(i, k) = model.partial_log_likelihood(spec.r[k], pool.draw(i));
            }
            break;
        }
        case BridgeKind::nested_shells: {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < m; ++k) W.at(i, k) = ll[i] > spec.shells[k] ? 0.0 : kNegInf;
            break;
        }
    }
    return W;
}

}  // namespace recml
