#pragma once

#include <functional>
#include <string>

#include "recml/estimators.hpp"
#include "recml/uncertainty.hpp"

namespace recml {

/// An alternative target for pseudo-importance sampling of the normalized
/// pool: log_numerator(theta, cached log L) returns e.g. log L + log pi_alt.
/// No new likelihood calls are needed for hyperparameter-only changes.
struct ReweightTarget {
    std::string description;
    std::function<double(std::span<const double>, double)> log_numerator;
};

struct ReweightResult {
    double log_z_alt = 0.0;
    double ess = 0.0;
    double se_bootstrap = 0.0;
    bool unstable = false;  // ESS below 10: estimate returned but flagged
};

/// Normalizing constant of the alternative target:
///   LSE_i [ log_num(theta_i) - log pi(theta_i) - log(p/pi)(theta_i) ] - log n,
/// with ESS of the same ratios and a perturb-then-resample bootstrap SE.
ReweightResult reweight_evidence(const PseudoMixture& P, const DrawPool& pool, const Model& model,
                                 const ReweightTarget& target, std::size_t bootstrap_B = 200,
                                 std::uint64_t bootstrap_seed = 1);

struct ExpectationResult {
    double value = 0.0;
    double ess = 0.0;
    bool unstable = false;
};

/// Self-normalized importance estimate of E_target[f] over the pool.
ExpectationResult reweight_posterior_expectation(const PseudoMixture& P, const DrawPool& pool, const Model& model,
                                                 const std::function<double(std::span<const double>)>& f,
                                                 const ReweightTarget& target);

}  // namespace recml
