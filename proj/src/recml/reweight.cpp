#include "recml/reweight.hpp"

#include <cmath>

namespace recml {

namespace {
// per-draw log ratios num/pi - log(p/pi), the shared core of both estimators
std::vector<double> log_ratios(const PseudoMixture& P, const DrawPool& pool, const Model& model,
                               const ReweightTarget& target, std::vector<double>* num_rel_out) {
    const auto& W = *P.W;
    const std::size_t n = W.n;
    std::vector<double> lr(n), num_rel(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto th = pool.draw(i);
        const double ll = pool.loglik.empty() ? model.log_likelihood(th) : pool.loglik[i];
        const double num = target.log_numerator(th, ll);
        const double lpi = model.log_prior(th);
        num_rel[i] = num == kNegInf ? kNegInf : num - lpi;
        lr[i] = num_rel[i] == kNegInf ? kNegInf : num_rel[i] - pseudo_mixture_logdensity(P, W.row(i));
    }
    if (num_rel_out) *num_rel_out = std::move(num_rel);
    return lr;
}
}  // namespace

ReweightResult reweight_evidence(const PseudoMixture& P, const DrawPool& pool, const Model& model,
                                 const ReweightTarget& target, std::size_t bootstrap_B,
                                 std::uint64_t bootstrap_seed) {
    if (!P.normalizers.converged) throw ContractViolation("reweight_evidence: normalizers not converged");
    std::vector<double> num_rel;
    const auto lr = log_ratios(P, pool, model, target, &num_rel);
    ReweightResult res;
    res.log_z_alt = log_sum_exp(lr) - std::log(static_cast<double>(lr.size()));
    res.ess = ess(lr);
    res.unstable = res.ess < 10.0;
    if (bootstrap_B >= 100) {
        const auto bs = bootstrap_se(*P.W, P.normalizers, num_rel, bootstrap_B, bootstrap_seed);
        res.se_bootstrap = bs.se;
    }
    return res;
}

ExpectationResult reweight_posterior_expectation(const PseudoMixture& P, const DrawPool& pool, const Model& model,
                                                 const std::function<double(std::span<const double>)>& f,
                                                 const ReweightTarget& target) {
    if (!P.normalizers.converged)
        throw ContractViolation("reweight_posterior_expectation: normalizers not converged");
    const auto lr = log_ratios(P, pool, model, target, nullptr);
    const double norm = log_sum_exp(lr);
    if (norm == kNegInf) throw ContractViolation("reweight_posterior_expectation: target has no support on pool");
    ExpectationResult res;
    for (std::size_t i = 0; i < lr.size(); ++i) {
        if (lr[i] == kNegInf) continue;
        res.value += std::exp(lr[i] - norm) * f(pool.draw(i));
    }
    res.ess = ess(lr);
    res.unstable = res.ess < 10.0;
    return res;
}

}  // namespace recml
