#pragma once

#include <functional>

#include "recml/bridge.hpp"
#include "recml/mixture.hpp"
#include "recml/rng.hpp"

namespace recml {

/// Chain controls shared by the Metropolis and Gibbs machinery.
/// thin is the retention fraction in (0,1]: a post-burn-in step is kept
/// when floor(i*thin) advances, so thin=0.25 keeps every 4th sweep.
struct ChainConfig {
    std::size_t steps = 0;
    std::size_t burn_in = 500;
    double thin = 0.25;
    std::vector<double> proposal_scale;  // per dimension; empty = 1/8 box width
    std::size_t swap_interval = 10;
    std::uint64_t seed = 1;

    void validate() const {
        if (thin <= 0.0 || thin > 1.0) throw ConfigError("sampler: thin must lie in (0,1]");
    }
};

struct ChainResult {
    std::vector<std::vector<double>> draws;
    std::vector<double> loglik;   // target log-density at each kept draw
    double acceptance_rate = 0.0; // frozen phase only
};

/// Random-walk Metropolis with Gaussian steps. Proposal scales adapt
/// multiplicatively toward 30-45% acceptance during burn-in and are then
/// frozen; only frozen-phase draws are returned.
ChainResult rwm_chain(const std::function<double(std::span<const double>)>& log_target,
                      std::span<const double> init, const ChainConfig& cfg);

/// Metropolis-coupled chains across the bridging rungs with adjacent-rung
/// state swaps every swap_interval sweeps. Returns per_rung thinned draws
/// per rung, labeled; spec kind must be power_posterior or auxiliary_path.
DrawPool mc3_sample(const Model& model, const BridgeSpec& spec, std::size_t per_rung, const ChainConfig& cfg);

struct GibbsDraw {
    std::vector<double> theta;  // packed (phi, mu, tau, beta)
    std::vector<int> z;
};

/// Conjugate Gibbs sampler for the finite mixture's partial-data posterior
/// over the first r observations; r = 0 samples the prior directly.
/// Full conditionals cycle z -> phi -> mu -> tau -> beta.
std::vector<GibbsDraw> gibbs_mixture(const MixtureModel& model, std::size_t r, std::size_t n_keep, double thin,
                                     std::size_t burn_in, std::uint64_t seed);

/// Runs gibbs_mixture over every rung of a partial-data bridge and pools
/// the draws (with cached full-data log-likelihoods).
DrawPool gibbs_pool(const MixtureModel& model, const BridgeSpec& spec, std::size_t per_rung, double thin,
                    std::size_t burn_in, std::uint64_t seed);

}  // namespace recml
