#include "recml/sampler.hpp"

#include <cmath>

namespace recml {

namespace {

// keep step i (1-based, post burn-in) when the retained count advances
bool keep_step(std::size_t i, double thin) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(i) * thin)) >
           static_cast<std::size_t>(std::floor(static_cast<double>(i - 1) * thin));
}

std::size_t steps_for(std::size_t wanted, double thin) {
    auto kept = [&](std::size_t post) { return static_cast<std::size_t>(std::floor(static_cast<double>(post) * thin)); };
    std::size_t post = static_cast<std::size_t>(std::ceil(static_cast<double>(wanted) / thin));
    while (kept(post) < wanted) ++post;
    return post;
}

constexpr std::size_t kAdaptWindow = 50;
constexpr double kAdaptTarget = 0.375;  // middle of the 30-45% band

}  // namespace

ChainResult rwm_chain(const std::function<double(std::span<const double>)>& log_target,
                      std::span<const double> init, const ChainConfig& cfg) {
    cfg.validate();
    if (cfg.steps < cfg.burn_in) throw ConfigError("rwm_chain: steps must cover burn_in");
    const std::size_t d = init.size();
    Rng rng(cfg.seed);

    std::vector<double> x(init.begin(), init.end());
    double lx = log_target(x);
    if (lx == kNegInf) throw ContractViolation("rwm_chain: init outside support");

    std::vector<double> scale = cfg.proposal_scale;
    if (scale.empty()) scale.assign(d, 0.25);
    if (scale.size() != d) throw ConfigError("rwm_chain: proposal_scale dimension mismatch");

    ChainResult out;
    std::vector<double> prop(d);
    std::size_t window_acc = 0, frozen_acc = 0, frozen_tries = 0;
    for (std::size_t s = 1; s <= cfg.steps; ++s) {
        for (std::size_t k = 0; k < d; ++k) prop[k] = x[k] + scale[k] * rng.normal();
        const double lp = log_target(prop);
        const bool accept = lp != kNegInf && std::log(rng.uniform01()) < lp - lx;
        if (accept) {
            x = prop;
            lx = lp;
        }
        if (s <= cfg.burn_in) {
            window_acc += accept;
            if (s % kAdaptWindow == 0) {
                const double rate = static_cast<double>(window_acc) / static_cast<double>(kAdaptWindow);
                const double f = std::exp(0.5 * (rate - kAdaptTarget));
                for (auto& sc : scale) sc *= f;
                window_acc = 0;
            }
        } else {
            frozen_acc += accept;
            ++frozen_tries;
            if (keep_step(s - cfg.burn_in, cfg.thin)) {
                out.draws.push_back(x);
                out.loglik.push_back(lx);
            }
        }
    }
    out.acceptance_rate = frozen_tries ? static_cast<double>(frozen_acc) / static_cast<double>(frozen_tries) : 0.0;
    return out;
}

DrawPool mc3_sample(const Model& model, const BridgeSpec& spec, std::size_t per_rung, const ChainConfig& cfg) {
    cfg.validate();
    if (per_rung == 0) throw ContractViolation("mc3_sample: per_rung must be positive");
    if (spec.kind != BridgeKind::power_posterior && spec.kind != BridgeKind::auxiliary_path)
        throw ContractViolation("mc3_sample: spec must be a tempered path");
    const auto boxOpt = model.support();
    if (!boxOpt) throw ContractViolation("mc3_sample: box support required");
    const Box box = *boxOpt;
    const std::size_t d = model.dimension();
    const std::size_t m = spec.m;

    // rung target: (1-t) log h + t (log pi + log L), with h = pi for power posteriors
    auto rung_logdensity = [&](std::size_t j, double ll, double lh, double lpi) {
        const double t = spec.t[j];
        const double ref = spec.kind == BridgeKind::auxiliary_path ? lh : lpi;
        return (1.0 - t) * ref + t * (lpi + ll);
    };

    Rng rng = Rng::stream(cfg.seed, "mc3");
    std::vector<std::vector<double>> x(m, std::vector<double>(d));
    std::vector<double> ll(m), lh(m), lpi(m);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < d; ++k) x[j][k] = rng.uniform(box.lower[k], box.upper[k]);
        ll[j] = model.log_likelihood(x[j]);
        lh[j] = spec.kind == BridgeKind::auxiliary_path ? spec.aux->log_density(x[j]) : 0.0;
        lpi[j] = model.log_prior(x[j]);
    }

    std::vector<std::vector<double>> scale(m);
    for (std::size_t j = 0; j < m; ++j) {
        if (!cfg.proposal_scale.empty()) {
            scale[j] = cfg.proposal_scale;
        } else {
            scale[j].resize(d);
            for (std::size_t k = 0; k < d; ++k) scale[j][k] = 0.125 * (box.upper[k] - box.lower[k]);
        }
    }

    const std::size_t post = steps_for(per_rung, cfg.thin);
    const std::size_t total = cfg.burn_in + post;
    DrawPool pool;
    pool.dim = d;
    pool.seed = cfg.seed;
    pool.thin = cfg.thin;
    std::vector<std::vector<double>> kept_draws(m);
    std::vector<std::vector<double>> kept_ll(m);

    std::vector<double> prop(d);
    std::vector<std::size_t> window_acc(m, 0);
    for (std::size_t s = 1; s <= total; ++s) {
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t k = 0; k < d; ++k) prop[k] = x[j][k] + scale[j][k] * rng.normal();
            if (box.contains(prop)) {
                const double pll = model.log_likelihood(prop);
                const double plh = spec.kind == BridgeKind::auxiliary_path ? spec.aux->log_density(prop) : 0.0;
                const double plpi = model.log_prior(prop);
                const double dlog = rung_logdensity(j, pll, plh, plpi) - rung_logdensity(j, ll[j], lh[j], lpi[j]);
                if (std::log(rng.uniform01()) < dlog) {
                    x[j] = prop;
                    ll[j] = pll;
                    lh[j] = plh;
                    lpi[j] = plpi;
                    ++window_acc[j];
                }
            }
            if (s <= cfg.burn_in && s % kAdaptWindow == 0) {
                const double rate = static_cast<double>(window_acc[j]) / static_cast<double>(kAdaptWindow);
                const double f = std::exp(0.5 * (rate - kAdaptTarget));
                for (auto& sc : scale[j]) sc *= f;
                window_acc[j] = 0;
            }
        }
        if (m > 1 && s % cfg.swap_interval == 0) {
            for (std::size_t j = 0; j + 1 < m; ++j) {
                const double dlog = rung_logdensity(j, ll[j + 1], lh[j + 1], lpi[j + 1]) +
                                    rung_logdensity(j + 1, ll[j], lh[j], lpi[j]) -
                                    rung_logdensity(j, ll[j], lh[j], lpi[j]) -
                                    rung_logdensity(j + 1, ll[j + 1], lh[j + 1], lpi[j + 1]);
                if (std::log(rng.uniform01()) < dlog) {
                    std::swap(x[j], x[j + 1]);
                    std::swap(ll[j], ll[j + 1]);
                    std::swap(lh[j], lh[j + 1]);
                    std::swap(lpi[j], lpi[j + 1]);
                }
            }
        }
        if (s > cfg.burn_in && keep_step(s - cfg.burn_in, cfg.thin)) {
            for (std::size_t j = 0; j < m; ++j) {
                if (kept_ll[j].size() >= per_rung) continue;
                kept_draws[j].insert(kept_draws[j].end(), x[j].begin(), x[j].end());
                kept_ll[j].push_back(ll[j]);
            }
        }
    }

    pool.counts.assign(m, 0);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t nj = kept_ll[j].size();
        pool.counts[j] = nj;
        pool.draws.insert(pool.draws.end(), kept_draws[j].begin(), kept_draws[j].end());
        pool.loglik.insert(pool.loglik.end(), kept_ll[j].begin(), kept_ll[j].end());
        pool.labels.insert(pool.labels.end(), nj, static_cast<int>(j));
    }
    return pool;
}

std::vector<GibbsDraw> gibbs_mixture(const MixtureModel& model, std::size_t r, std::size_t n_keep, double thin,
                                     std::size_t burn_in, std::uint64_t seed) {
    const int k = model.k();
    const auto& hyper = model.hyper();
    const auto& data = model.data();
    if (r > data.size()) throw ContractViolation("gibbs_mixture: r out of range");
    if (r != 0 && r < static_cast<std::size_t>(k))
        throw ContractViolation("gibbs_mixture: 0 < r < k is unidentifiable (need r >= k)");
    if (thin <= 0.0 || thin > 1.0) throw ConfigError("gibbs_mixture: thin must lie in (0,1]");

    Rng rng(seed);
    std::vector<double> alpha_one(k, hyper.dirichlet_e0);
    std::vector<double> phi(k), mu(k), tau(k);
    double beta = hyper.fixed_beta ? *hyper.fixed_beta : rng.gamma(hyper.beta1, hyper.beta2);
    rng.dirichlet(alpha_one, phi);
    for (int j = 0; j < k; ++j) {
        mu[j] = rng.normal(hyper.kappa, 1.0 / std::sqrt(hyper.xi));
        tau[j] = rng.gamma(hyper.alpha, beta);
    }
    std::vector<int> z(r, 0);

    std::vector<GibbsDraw> out;
    out.reserve(n_keep);
    std::vector<double> probs(k), dir_alpha(k), sum_y(k), ssq(k);
    std::vector<std::size_t> nj(k);

    const bool prior_only = r == 0;
    std::size_t s = 0;
    while (out.size() < n_keep) {
        ++s;
        if (prior_only) {
            beta = hyper.fixed_beta ? *hyper.fixed_beta : rng.gamma(hyper.beta1, hyper.beta2);
            rng.dirichlet(alpha_one, phi);
            for (int j = 0; j < k; ++j) {
                mu[j] = rng.normal(hyper.kappa, 1.0 / std::sqrt(hyper.xi));
                tau[j] = rng.gamma(hyper.alpha, beta);
            }
        } else {
            // z | phi, mu, tau
            std::fill(nj.begin(), nj.end(), 0);
            std::fill(sum_y.begin(), sum_y.end(), 0.0);
            for (std::size_t i = 0; i < r; ++i) {
                double best = kNegInf;
                for (int j = 0; j < k; ++j) {
                    const double d = data[i] - mu[j];
                    probs[j] = std::log(phi[j]) + 0.5 * std::log(tau[j]) - 0.5 * tau[j] * d * d;
                    if (probs[j] > best) best = probs[j];
                }
                for (int j = 0; j < k; ++j) probs[j] = std::exp(probs[j] - best);
                const auto zi = static_cast<int>(rng.categorical(probs));
                z[i] = zi;
                ++nj[zi];
                sum_y[zi] += data[i];
            }
            // phi | z
            for (int j = 0; j < k; ++j) dir_alpha[j] = hyper.dirichlet_e0 + static_cast<double>(nj[j]);
            rng.dirichlet(dir_alpha, phi);
            // mu_j | z, tau
            for (int j = 0; j < k; ++j) {
                const double prec = hyper.xi + static_cast<double>(nj[j]) * tau[j];
                const double mean = (hyper.xi * hyper.kappa + tau[j] * sum_y[j]) / prec;
                mu[j] = rng.normal(mean, 1.0 / std::sqrt(prec));
            }
            // tau_j | z, mu
            std::fill(ssq.begin(), ssq.end(), 0.0);
            for (std::size_t i = 0; i < r; ++i) {
                const double d = data[i] - mu[z[i]];
                ssq[z[i]] += d * d;
            }
            for (int j = 0; j < k; ++j)
                tau[j] = rng.gamma(hyper.alpha + 0.5 * static_cast<double>(nj[j]), beta + 0.5 * ssq[j]);
            // beta | tau
            if (!hyper.fixed_beta) {
                double tau_sum = 0.0;
                for (int j = 0; j < k; ++j) tau_sum += tau[j];
                beta = rng.gamma(hyper.beta1 + static_cast<double>(k) * hyper.alpha, hyper.beta2 + tau_sum);
            }
        }
        if (s > burn_in && keep_step(s - burn_in, thin)) {
            GibbsDraw draw;
            draw.theta.reserve(3 * k + 1);
            draw.theta.insert(draw.theta.end(), phi.begin(), phi.end());
            draw.theta.insert(draw.theta.end(), mu.begin(), mu.end());
            draw.theta.insert(draw.theta.end(), tau.begin(), tau.end());
            draw.theta.push_back(beta);
            draw.z = z;
            out.push_back(std::move(draw));
        }
    }
    return out;
}

DrawPool gibbs_pool(const MixtureModel& model, const BridgeSpec& spec, std::size_t per_rung, double thin,
                    std::size_t burn_in, std::uint64_t seed) {
    if (spec.kind != BridgeKind::partial_data) throw ContractViolation("gibbs_pool: partial_data bridge required");
    DrawPool pool;
    pool.dim = model.dimension();
    pool.seed = seed;
    pool.thin = thin;
    pool.counts.assign(spec.m, per_rung);
    for (std::size_t j = 0; j < spec.m; ++j) {
        auto draws = gibbs_mixture(model, spec.r[j], per_rung, thin, burn_in, derive_seed(seed, "gibbs-rung", j));
        for (auto& d : draws) {
            pool.loglik.push_back(model.log_likelihood(d.theta));
            pool.draws.insert(pool.draws.end(), d.theta.begin(), d.theta.end());
            pool.labels.push_back(static_cast<int>(j));
        }
    }
    return pool;
}

}  // namespace recml
