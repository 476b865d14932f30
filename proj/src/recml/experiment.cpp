#include "recml/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace recml {

using nlohmann::json;

namespace {

std::vector<double> apply_permutation(const std::vector<double>& data, std::uint64_t perm_seed) {
    std::vector<std::size_t> idx(data.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng rng = Rng::stream(perm_seed, "permutation");
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.uniform_index(i)]);
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = data[idx[i]];
    return out;
}

MixtureHyper hyper_from_config(const Config& cfg) {
    MixtureHyper h;
    h.kappa = cfg.get_double("model.kappa", h.kappa);
    h.xi = cfg.get_double("model.xi", h.xi);
    h.alpha = cfg.get_double("model.alpha", h.alpha);
    h.beta1 = cfg.get_double("model.beta1", h.beta1);
    h.beta2 = cfg.get_double("model.beta2", h.beta2);
    if (cfg.has("model.fixed_beta")) h.fixed_beta = cfg.get_double("model.fixed_beta");
    h.dirichlet_e0 = cfg.get_double("model.dirichlet_e0", h.dirichlet_e0);
    h.lambda = cfg.get_double("model.lambda", h.lambda);
    h.k_min = static_cast<int>(cfg.get_int("model.k_min", h.k_min));
    h.k_max = static_cast<int>(cfg.get_int("model.k_max", h.k_max));
    return h;
}

ChainConfig chain_from_config(const Config& cfg, bool gibbs) {
    ChainConfig c;
    c.burn_in = static_cast<std::size_t>(cfg.get_int("sampler.burn_in", gibbs ? 200 : 500));
    c.thin = cfg.get_double("sampler.thin", gibbs ? 0.1 : 0.25);
    c.swap_interval = static_cast<std::size_t>(cfg.get_int("sampler.swap_interval", 10));
    c.seed = cfg.get_uint64("seed", 1);
    if (cfg.has("sampler.proposal_scale")) c.proposal_scale.assign(1, cfg.get_double("sampler.proposal_scale"));
    c.validate();
    return c;
}

struct PoolEstimate {
    DrawPool pool;
    LogWeightMatrix W;
    LogNormalizers normalizers;
};

// sample + weight + normalize for the recursive/tivis estimators
PoolEstimate build_pool_estimate(const Config& cfg, const Model& model, const BridgeSpec& spec,
                                 const std::string& estimator) {
    PoolEstimate pe;
    const auto per_rung = static_cast<std::size_t>(cfg.get_int("sampler.per_rung", 250));
    if (spec.kind == BridgeKind::partial_data) {
        const auto* mix = dynamic_cast<const MixtureModel*>(&model);
        if (!mix) throw ConfigError("partial_data bridge requires the mixture model");
        ChainConfig c = chain_from_config(cfg, true);
        pe.pool = gibbs_pool(*mix, spec, per_rung, c.thin, c.burn_in, c.seed);
    } else {
        ChainConfig c = chain_from_config(cfg, false);
        if (!c.proposal_scale.empty()) c.proposal_scale.assign(model.dimension(), c.proposal_scale[0]);
        pe.pool = mc3_sample(model, spec, per_rung, c);
    }
    pe.W = eval_weight_matrix(pe.pool, spec, model);
    if (estimator == "tivis") {
        const auto qp = static_cast<std::size_t>(cfg.get_int("estimator.quad_points", 201));
        pe.normalizers = tivis_estimate(pe.W, LogNormalizers{}, qp);
    } else {
        pe.normalizers = recursive_normalize(pe.W, cfg.get_double("estimator.tol", 1e-10),
                                             static_cast<int>(cfg.get_int("estimator.max_iter", 100000)));
    }
    return pe;
}

}  // namespace

std::unique_ptr<Model> build_model(const Config& cfg) {
    const std::string kind = cfg.get_string("model.kind", "banana");
    if (kind == "banana") return std::make_unique<BananaModel>();
    if (kind == "mixture") {
        const std::string path = cfg.get_string("model.data");
        const std::string variant = cfg.get_string("model.variant", "roeder");
        auto data = load_galaxy_data(path, variant);
        const auto perm_seed = cfg.get_uint64("data.permutation_seed", cfg.get_uint64("seed", 1));
        data = apply_permutation(data, perm_seed);
        const int k = static_cast<int>(cfg.get_int("model.k", 3));
        auto hyper = hyper_from_config(cfg);
        if (k < hyper.k_min || k > hyper.k_max)
            throw ConfigError("model.k = " + std::to_string(k) + " outside [k_min, k_max]");
        return std::make_unique<MixtureModel>(std::move(data), k, hyper);
    }
    throw ConfigError("unknown model.kind: " + kind);
}

BridgeSpec build_bridge(const Config& cfg, const Model& model) {
    const std::string kind = cfg.get_string("bridge.kind", "power_posterior");
    const auto m = static_cast<std::size_t>(cfg.get_int("bridge.m", 5));
    if (m < 2) throw ConfigError("bridge.m must be >= 2");
    if (kind == "power_posterior") return BridgeSpec::power(m, cfg.get_double("bridge.c", 5.0));
    if (kind == "auxiliary_path") {
        const std::string fam = cfg.get_string("bridge.family", "truncated_normal");
        AuxFamily family;
        if (fam == "truncated_normal") family = AuxFamily::truncated_normal;
        else if (fam == "truncated_student_t_nu1") family = AuxFamily::truncated_student_t_nu1;
        else throw ConfigError("unknown bridge.family: " + fam);
        return BridgeSpec::auxiliary(m, cfg.get_double("bridge.c", 1.0), auxiliary_from_mode(model, family));
    }
    if (kind == "partial_data") {
        const auto* mix = dynamic_cast<const MixtureModel*>(&model);
        if (!mix) throw ConfigError("partial_data bridge requires the mixture model");
        const auto r_min = static_cast<std::size_t>(cfg.get_int("bridge.r_min", mix->k()));
        return BridgeSpec::partial(mix->data_size(), m, cfg.get_double("bridge.c", 2.0), r_min);
    }
    throw ConfigError("unknown bridge.kind: " + kind);
}

EstimateReport run_experiment(const Config& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    EstimateReport rep;
    rep.config = cfg;
    rep.seed = cfg.get_uint64("seed", 1);
    rep.estimator = cfg.get_string("estimator", "recursive");
    const auto model = build_model(cfg);

    if (rep.estimator == "recursive" || rep.estimator == "tivis") {
        const auto spec = build_bridge(cfg, *model);
        auto pe = build_pool_estimate(cfg, *model, spec, rep.estimator);
        rep.per_rung_log_z = pe.normalizers.log_z;
        rep.log_z = pe.normalizers.log_z.back();
        rep.diagnostics["iterations"] = pe.normalizers.iterations;
        rep.diagnostics["final_delta"] = pe.normalizers.final_delta;
        rep.diagnostics["connected"] = 1.0;
        const auto cov = quasi_hessian_covariance(pe.W, pe.normalizers);
        rep.se_hessian = cov.se_target;
        // Kong ESS of the top-rung importance ratios against the pseudo-mixture
        PseudoMixture P{&pe.W, pe.normalizers};
        std::vector<double> lr(pe.W.n);
        for (std::size_t i = 0; i < pe.W.n; ++i)
            lr[i] = pe.W.at(i, pe.W.m - 1) - pseudo_mixture_logdensity(P, pe.W.row(i));
        rep.ess = ess(lr);
        if (cfg.get_bool("uncertainty.bootstrap", false)) {
            std::vector<double> num_rel(pe.W.n);
            for (std::size_t i = 0; i < pe.W.n; ++i) num_rel[i] = pe.W.at(i, pe.W.m - 1);
            const auto B = static_cast<std::size_t>(cfg.get_int("uncertainty.bootstrap_B", 200));
            rep.se_bootstrap = bootstrap_se(pe.W, pe.normalizers, num_rel, B,
                                            derive_seed(rep.seed, "bootstrap-root")).se;
        }
    } else if (rep.estimator == "hme" || rep.estimator == "ame") {
        const auto boxOpt = model->support();
        if (!boxOpt) throw ConfigError(rep.estimator + ": box-supported model required");
        const auto n = static_cast<std::size_t>(
            cfg.get_int("sampler.n_draws", cfg.get_int("sampler.per_rung", 250) * cfg.get_int("bridge.m", 5)));
        std::vector<double> ll(n);
        if (rep.estimator == "ame") {
            Rng rng = Rng::stream(rep.seed, "ame-prior");
            std::vector<double> th(model->dimension());
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t k = 0; k < th.size(); ++k)
                    th[k] = rng.uniform(boxOpt->lower[k], boxOpt->upper[k]);
                ll[i] = model->log_likelihood(th);
            }
            rep.log_z = ame(ll);
        } else {
            ChainConfig c = chain_from_config(cfg, false);
            if (!c.proposal_scale.empty()) c.proposal_scale.assign(model->dimension(), c.proposal_scale[0]);
            c.steps = c.burn_in + static_cast<std::size_t>(std::ceil(static_cast<double>(n) / c.thin));
            Rng rng = Rng::stream(rep.seed, "hme-init");
            std::vector<double> init(model->dimension());
            for (std::size_t k = 0; k < init.size(); ++k)
                init[k] = 0.5 * (boxOpt->lower[k] + boxOpt->upper[k]) +
                          0.01 * (boxOpt->upper[k] - boxOpt->lower[k]) * rng.normal();
            auto chain = rwm_chain(
                [&](std::span<const double> th) {
                    const double lp = model->log_prior(th);
                    return lp == kNegInf ? kNegInf : lp + model->log_likelihood(th);
                },
                init, c);
            std::vector<double> lls(chain.draws.size());
            for (std::size_t i = 0; i < chain.draws.size(); ++i)
                lls[i] = model->log_likelihood(chain.draws[i]);
            lls.resize(std::min(lls.size(), n));
            rep.log_z = hme(lls);
            rep.diagnostics["acceptance"] = chain.acceptance_rate;
        }
    } else if (rep.estimator == "nested" || rep.estimator == "ins" || rep.estimator == "shell_recursive") {
        const auto n_live = static_cast<std::size_t>(cfg.get_int("nested.n_live", 125));
        const auto steps = static_cast<std::size_t>(cfg.get_int("nested.steps", 10 * n_live));
        const double expand = cfg.get_double("nested.expand", 1.5);
        const auto run = nested_run(*model, n_live, steps, expand, rep.seed);
        rep.diagnostics["overhead_mean"] =
            static_cast<double>(run.total_overhead()) / static_cast<double>(run.steps);
        rep.diagnostics["likelihood_calls"] = static_cast<double>(run.likelihood_calls);
        rep.diagnostics["boundary_warnings"] = static_cast<double>(run.boundary_warnings);
        if (rep.estimator == "nested") {
            rep.log_z = ns_evidence(run);
        } else if (rep.estimator == "ins") {
            const auto ins = ins_evidence(run, 200, derive_seed(rep.seed, "ins-bootstrap-root"));
            rep.log_z = ins.log_z;
            rep.se_bootstrap = ins.se_bootstrap;
            rep.diagnostics["pooled_draws"] = static_cast<double>(ins.n_draws);
        } else {
            const auto sr = shell_recursive_evidence(run);
            rep.log_z = sr.log_z;
            rep.se_hessian = sr.hessian_se;
            rep.analytic_se_unreliable = sr.analytic_se_unreliable;
            rep.per_rung_log_z = sr.normalizers.log_z;
            rep.diagnostics["iterations"] = sr.normalizers.iterations;
        }
    } else {
        throw ConfigError("unknown estimator: " + rep.estimator);
    }

    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

EstimateReport run_oracle(const Config& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    EstimateReport rep;
    rep.config = cfg;
    rep.seed = cfg.get_uint64("seed", 1);
    rep.estimator = "oracle";
    const auto model = build_model(cfg);
    const auto n = static_cast<std::size_t>(cfg.get_int("oracle.grid", 2001));
    rep.log_z = quadrature_evidence(*model, n);
    rep.diagnostics["grid_points_per_dim"] = static_cast<double>(n);
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

ReplicateSummary replicate_study(const Config& cfg, std::size_t R, std::uint64_t base_seed) {
    if (R < 2) throw ConfigError("replicate_study: R must be >= 2");
    Config base = cfg;
    if (!base.has("data.permutation_seed"))
        base.set("data.permutation_seed", std::to_string(base_seed));

    ReplicateSummary sum;
    sum.log_z.assign(R, 0.0);
    sum.analytic_se.assign(R, 0.0);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_msg;
    std::mutex err_mutex;

    const auto n_threads = std::max<std::size_t>(
        1, std::min<std::size_t>(static_cast<std::size_t>(cfg.get_int("threads", 2)), R));
    auto worker = [&]() {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= R || failed.load()) return;
            try {
                Config run_cfg = base;
                run_cfg.set("seed", std::to_string(derive_seed(base_seed, "replicate", r)));
                const auto rep = run_experiment(run_cfg);
                sum.log_z[r] = rep.log_z;
                sum.analytic_se[r] = rep.se_hessian.value_or(0.0);
            } catch (const std::exception& e) {
                std::scoped_lock lk(err_mutex);
                failed = true;
                error_msg = e.what();
            }
        }
    };
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (failed) throw ConvergenceError("replicate_study: replicate failed: " + error_msg);

    for (double v : sum.log_z) sum.mean += v;
    sum.mean /= static_cast<double>(R);
    double ss = 0.0;
    for (double v : sum.log_z) ss += (v - sum.mean) * (v - sum.mean);
    sum.replicate_sd = std::sqrt(ss / static_cast<double>(R - 1));
    double se_sum = 0.0;
    std::size_t se_n = 0;
    for (double v : sum.analytic_se)
        if (v > 0.0) {
            se_sum += v;
            ++se_n;
        }
    sum.mean_analytic_se = se_n ? se_sum / static_cast<double>(se_n) : 0.0;
    return sum;
}

GalaxyStudy galaxy_study(const Config& cfg, bool alt_prior) {
    Config base = cfg;
    base.set("model.kind", "mixture");
    base.set("bridge.kind", "partial_data");
    if (!base.has("bridge.m")) base.set("bridge.m", "10");
    if (!base.has("bridge.c")) base.set("bridge.c", "2");
    const bool full = base.get_bool("full", false);
    if (!base.has("sampler.per_rung")) base.set("sampler.per_rung", full ? "4000" : "400");
    const auto base_seed = base.get_uint64("seed", 1);
    if (!base.has("data.permutation_seed")) base.set("data.permutation_seed", std::to_string(base_seed));

    const MixtureHyper hyper = hyper_from_config(base);
    GalaxyStudy gs;
    gs.prior_k = truncated_poisson_pmf(hyper.lambda, hyper.k_min, hyper.k_max);
    if (base.get_bool("galaxy.uniform_prior_k", false))
        gs.prior_k.assign(gs.prior_k.size(), 1.0 / static_cast<double>(gs.prior_k.size()));

    const double alt_kappa = base.get_double("reweight.kappa", 20.8);
    const double alt_xi = base.get_double("reweight.xi", 0.048);
    gs.reweighted = alt_prior;

    for (int k = hyper.k_min; k <= hyper.k_max; ++k) {
        Config kcfg = base;
        kcfg.set("model.k", std::to_string(k));
        kcfg.set("bridge.r_min", std::to_string(k));
        kcfg.set("seed", std::to_string(derive_seed(base_seed, "galaxy-k", static_cast<std::uint64_t>(k))));
        kcfg.set("estimator", "recursive");

        const auto model = build_model(kcfg);
        const auto* mix = dynamic_cast<const MixtureModel*>(model.get());
        const auto spec = build_bridge(kcfg, *model);
        auto pe = build_pool_estimate(kcfg, *model, spec, "recursive");

        gs.ks.push_back(k);
        if (!alt_prior) {
            gs.log_z_k.push_back(pe.normalizers.log_z.back());
            gs.se_k.push_back(quasi_hessian_covariance(pe.W, pe.normalizers).se_target);
            gs.ess_k.push_back(0.0);
        } else {
            PseudoMixture P{&pe.W, pe.normalizers};
            ReweightTarget target;
            target.description = "mean-prior hyperparameters (kappa,xi) -> (" + std::to_string(alt_kappa) + "," +
                                 std::to_string(alt_xi) + ")";
            target.log_numerator = [&](std::span<const double> th, double ll) {
                const double lpi = model->log_prior(th);
                if (lpi == kNegInf) return kNegInf;
                const double delta =
                    MixtureModel::mean_prior_logdensity(mix->mu(th), alt_kappa, alt_xi) -
                    MixtureModel::mean_prior_logdensity(mix->mu(th), hyper.kappa, hyper.xi);
                return ll + lpi + delta;
            };
            const auto rw = reweight_evidence(P, pe.pool, *model, target, 200,
                                              derive_seed(base_seed, "galaxy-reweight", static_cast<std::uint64_t>(k)));
            gs.log_z_k.push_back(rw.log_z_alt);
            gs.se_k.push_back(rw.se_bootstrap);
            gs.ess_k.push_back(rw.ess);
        }
    }

    // pi(k|y) and the total evidence under the k prior
    const std::size_t nk = gs.ks.size();
    std::vector<double> lw(nk);
    for (std::size_t i = 0; i < nk; ++i) lw[i] = std::log(gs.prior_k[i]) + gs.log_z_k[i];
    gs.total_log_z = log_sum_exp(lw);
    gs.posterior_k.resize(nk);
    double se2 = 0.0;
    for (std::size_t i = 0; i < nk; ++i) {
        gs.posterior_k[i] = std::exp(lw[i] - gs.total_log_z);
        se2 += gs.posterior_k[i] * gs.posterior_k[i] * gs.se_k[i] * gs.se_k[i];
    }
    gs.total_se = std::sqrt(se2);
    gs.mode_k = gs.ks[static_cast<std::size_t>(
        std::max_element(gs.posterior_k.begin(), gs.posterior_k.end()) - gs.posterior_k.begin())];

    // 95% intervals on pi(k|y) by propagating per-k normal perturbations
    const std::size_t B = 400;
    std::vector<std::vector<double>> samples(nk, std::vector<double>(B));
    Rng rng = Rng::stream(base_seed, "galaxy-interval");
    std::vector<double> pert(nk);
    for (std::size_t b = 0; b < B; ++b) {
        double norm = kNegInf;
        for (std::size_t i = 0; i < nk; ++i) {
            pert[i] = lw[i] + gs.se_k[i] * rng.normal();
            norm = log_add(norm, pert[i]);
        }
        for (std::size_t i = 0; i < nk; ++i) samples[i][b] = std::exp(pert[i] - norm);
    }
    for (std::size_t i = 0; i < nk; ++i) {
        auto s = samples[i];
        std::sort(s.begin(), s.end());
        gs.posterior_lo95.push_back(s[static_cast<std::size_t>(0.025 * (B - 1))]);
        gs.posterior_hi95.push_back(s[static_cast<std::size_t>(0.975 * (B - 1))]);
    }
    return gs;
}

CSweepResult csweep(const Config& cfg, const std::vector<double>& c_values, std::size_t R) {
    CSweepResult res;
    const auto base_seed = cfg.get_uint64("seed", 1);
    for (double c : c_values) {
        Config ccfg = cfg;
        ccfg.set("bridge.c", std::to_string(c));
        const auto sum = replicate_study(ccfg, R, derive_seed(base_seed, "csweep", fnv1a64(std::to_string(c))));
        res.c_values.push_back(c);
        res.mean.push_back(sum.mean);
        res.replicate_sd.push_back(sum.replicate_sd);
        res.mean_analytic_se.push_back(sum.mean_analytic_se);
    }
    return res;
}

std::string EstimateReport::to_json() const {
    json j;
    j["estimator"] = estimator;
    j["log_z"] = log_z;
    if (se_hessian) j["se_hessian"] = *se_hessian;
    if (se_bootstrap) j["se_bootstrap"] = *se_bootstrap;
    if (se_replicate) j["se_replicate"] = *se_replicate;
    if (ess) j["ess"] = *ess;
    if (!per_rung_log_z.empty()) j["per_rung_log_z"] = per_rung_log_z;
    j["diagnostics"] = diagnostics;
    j["analytic_se_unreliable"] = analytic_se_unreliable;
    j["uncertainty"] = json::object();
    if (se_hessian) j["uncertainty"]["se_hessian"] = *se_hessian;
    if (se_bootstrap) j["uncertainty"]["se_bootstrap"] = *se_bootstrap;
    j["config"] = config.entries();
    j["config_hash"] = config.hash();
    j["seed"] = seed;
    j["wall_time_s"] = wall_time_s;
    return j.dump(2);
}

EstimateReport EstimateReport::from_json(const std::string& text) {
    const json j = json::parse(text);
    EstimateReport rep;
    rep.estimator = j.at("estimator").get<std::string>();
    rep.log_z = j.at("log_z").get<double>();
    if (j.contains("se_hessian")) rep.se_hessian = j["se_hessian"].get<double>();
    if (j.contains("se_bootstrap")) rep.se_bootstrap = j["se_bootstrap"].get<double>();
    if (j.contains("ess")) rep.ess = j["ess"].get<double>();
    if (j.contains("per_rung_log_z")) rep.per_rung_log_z = j["per_rung_log_z"].get<std::vector<double>>();
    rep.analytic_se_unreliable = j.value("analytic_se_unreliable", false);
    for (const auto& [k, v] : j.at("config").items()) rep.config.set(k, v.get<std::string>());
    rep.seed = j.at("seed").get<std::uint64_t>();
    rep.wall_time_s = j.value("wall_time_s", 0.0);
    if (j.contains("diagnostics"))
        for (const auto& [k, v] : j["diagnostics"].items()) rep.diagnostics[k] = v.get<double>();
    return rep;
}

std::string ReplicateSummary::to_json() const {
    json j;
    j["log_z"] = log_z;
    j["analytic_se"] = analytic_se;
    j["mean"] = mean;
    j["replicate_sd"] = replicate_sd;
    j["mean_analytic_se"] = mean_analytic_se;
    return j.dump(2);
}

std::string GalaxyStudy::to_json() const {
    json j;
    j["k"] = ks;
    j["log_z_k"] = log_z_k;
    j["se_k"] = se_k;
    j["prior_k"] = prior_k;
    j["posterior_k"] = posterior_k;
    j["posterior_lo95"] = posterior_lo95;
    j["posterior_hi95"] = posterior_hi95;
    if (reweighted) j["ess_k"] = ess_k;
    j["total_log_z"] = total_log_z;
    j["total_se"] = total_se;
    j["mode_k"] = mode_k;
    j["reweighted"] = reweighted;
    return j.dump(2);
}

std::string CSweepResult::to_json() const {
    json j;
    j["c"] = c_values;
    j["mean"] = mean;
    j["replicate_sd"] = replicate_sd;
    j["mean_analytic_se"] = mean_analytic_se;
    return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
}

void write_pool_csv(const std::string& path, const DrawPool& pool, std::size_t replicate_index) {
    std::ostringstream os;
    os << "replicate,rung,draw";
    for (std::size_t k = 0; k < pool.dim; ++k) os << ",theta" << k + 1;
    os << "\n";
    std::vector<std::size_t> per_rung_idx(pool.counts.size(), 0);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const int j = pool.labels[i];
        os << replicate_index << "," << j + 1 << "," << per_rung_idx[static_cast<std::size_t>(j)]++;
        const auto th = pool.draw(i);
        for (double x : th) os << "," << x;
        os << "\n";
    }
    write_text_file(path, os.str());
}

void write_nsrun_csv(const std::string& path, const NSRun& run) {
    std::ostringstream os;
    os << "shell,threshold,overhead";
    for (std::size_t k = 0; k < run.dim; ++k) os << ",theta" << k + 1;
    os << "\n";
    for (std::size_t s = 0; s < run.shells.size(); ++s) {
        const auto& sh = run.shells[s];
        os << s + 1 << "," << sh.threshold << "," << sh.n_oh;
        for (double x : sh.accepted) os << "," << x;
        os << "\n";
    }
    write_text_file(path, os.str());
}

}  // namespace recml
