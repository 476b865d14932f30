#pragma once

#include <memory>
#include <optional>

#include "recml/config.hpp"
#include "recml/mixture.hpp"
#include "recml/nested.hpp"
#include "recml/reweight.hpp"
#include "recml/sampler.hpp"

namespace recml {

/// Self-contained result of one estimation run: re-runnable from the
/// embedded config, JSON-serializable via to_json().
struct EstimateReport {
    std::string estimator;
    double log_z = 0.0;
    std::optional<double> se_hessian;
    std::optional<double> se_bootstrap;
    std::optional<double> se_replicate;
    std::optional<double> ess;
    std::vector<double> per_rung_log_z;
    std::map<std::string, double> diagnostics;
    bool analytic_se_unreliable = false;
    Config config;
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;

    std::string to_json() const;
    static EstimateReport from_json(const std::string& text);
};

/// Assembles the model named by the config (banana or mixture). Mixture
/// data are permuted once per experiment with the stream
/// (data.permutation_seed | seed, "permutation").
std::unique_ptr<Model> build_model(const Config& cfg);

/// Builds the bridging spec; auxiliary paths fit their reference density
/// against the model here.
BridgeSpec build_bridge(const Config& cfg, const Model& model);

/// One full run: sample, normalize, estimate, package. Writes nothing;
/// see write_report / write_pool_csv for the file outputs.
EstimateReport run_experiment(const Config& cfg);

/// Quadrature oracle run (banana-style models with box support).
EstimateReport run_oracle(const Config& cfg);

struct ReplicateSummary {
    std::vector<double> log_z;         // one per replicate, in index order
    std::vector<double> analytic_se;   // per replicate where defined
    double mean = 0.0;
    double replicate_sd = 0.0;         // single-run SE under repeat simulation
    double mean_analytic_se = 0.0;
    std::string to_json() const;
};

/// R independent runs with seeds derived as (base, "replicate", r); the
/// partial-data permutation stays experiment-level. Runs execute in a
/// small work pool; aggregation order is by replicate index.
ReplicateSummary replicate_study(const Config& cfg, std::size_t R, std::uint64_t base_seed);

struct GalaxyStudy {
    std::vector<int> ks;
    std::vector<double> log_z_k;
    std::vector<double> se_k;
    std::vector<double> prior_k;
    std::vector<double> posterior_k;          // pi(k|y)
    std::vector<double> posterior_lo95, posterior_hi95;
    std::vector<double> ess_k;                // reweighting ESS when reweighted
    double total_log_z = 0.0;
    double total_se = 0.0;
    int mode_k = 0;
    bool reweighted = false;
    std::string to_json() const;
};

/// The per-component evidence sweep over k with truncated-Poisson mixing;
/// pass alt_prior=true to reweight every pool to the config's
/// reweight.kappa / reweight.xi instead of re-sampling.
GalaxyStudy galaxy_study(const Config& cfg, bool alt_prior = false);

struct CSweepResult {
    std::vector<double> c_values;
    std::vector<double> mean;
    std::vector<double> replicate_sd;
    std::vector<double> mean_analytic_se;
    std::string to_json() const;
};

/// Replicate studies across schedule exponents on the configured setup.
CSweepResult csweep(const Config& cfg, const std::vector<double>& c_values, std::size_t R);

void write_text_file(const std::string& path, const std::string& content);
void write_pool_csv(const std::string& path, const DrawPool& pool, std::size_t replicate_index = 0);
void write_nsrun_csv(const std::string& path, const NSRun& run);

}  // namespace recml
