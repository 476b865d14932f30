#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "recml/model.hpp"

namespace recml {

/// Prior-focused temperature ladder t_j = ((j-1)/(m-1))^c, j = 1..m.
/// Endpoints are forced to exactly 0 and 1.
std::vector<double> temperature_schedule(std::size_t m, double c);

/// Partial-data ladder r_j = floor(n_tot ((j-1)/(m-1))^c) with interior
/// entries below r_min raised to r_min and the last entry forced to n_tot.
std::vector<std::size_t> partial_data_schedule(std::size_t n_tot, std::size_t m, double c, std::size_t r_min);

enum class AuxFamily { truncated_normal, truncated_student_t_nu1 };

/// Data-driven reference density from the posterior mode: a truncated
/// Normal or Student-t (nu=1) centered at the mode with shape equal to
/// the local curvature, renormalized over the prior box.
struct AuxiliaryDensity {
    AuxFamily family = AuxFamily::truncated_normal;
    Eigen::VectorXd mu_mode;
    Eigen::MatrixXd sigma_mode;  // curvature of -log(prior x lik) at the mode
    double log_norm_const = 0.0; // log integral of the untruncated form over the box
    Box box;
    bool regularized = false;    // curvature was not PD and got an eps*I bump

    /// Normalized log-density; -inf outside the box.
    double log_density(std::span<const double> theta) const;
};

/// Locates the posterior mode by grid-seeded Nelder-Mead, takes the
/// central-difference Hessian of -log(prior x likelihood) there, and
/// normalizes over the box by quadrature.
AuxiliaryDensity auxiliary_from_mode(const Model& model, AuxFamily family, std::size_t max_iter = 2000);

enum class BridgeKind { power_posterior, partial_data, auxiliary_path, nested_shells };

std::string to_string(BridgeKind kind);
BridgeKind bridge_kind_from_string(const std::string& s);

/// Declarative bridging sequence. Rung 1 always has a known normalizer:
/// it is the prior (power/partial) or the normalized auxiliary.
struct BridgeSpec {
    BridgeKind kind = BridgeKind::power_posterior;
    std::size_t m = 2;
    double c = 1.0;
    std::vector<double> t;            // power_posterior / auxiliary_path
    std::vector<std::size_t> r;       // partial_data
    std::optional<AuxiliaryDensity> aux;
    std::vector<double> shells;       // nested_shells log-likelihood thresholds

    static BridgeSpec power(std::size_t m, double c);
    static BridgeSpec partial(std::size_t n_tot, std::size_t m, double c, std::size_t r_min);
    static BridgeSpec auxiliary(std::size_t m, double c, AuxiliaryDensity aux);
    static BridgeSpec nested(std::vector<double> thresholds);

    void validate() const;
};

/// Pooled draws with source-rung labels. Draws are stored flattened
/// (row-major, post-thinning only); loglik caches log L per draw.
struct DrawPool {
    std::size_t dim = 0;
    std::vector<double> draws;        // n * dim
    std::vector<int> labels;          // rung index per draw, 0-based
    std::vector<std::size_t> counts;  // draws per rung
    std::vector<double> loglik;       // cached log-likelihood per draw
    std::uint64_t seed = 0;
    double thin = 1.0;

    std::size_t size() const { return labels.size(); }
    std::span<const double> draw(std::size_t i) const { return {draws.data() + i * dim, dim}; }
};

/// n x m matrix of log w_k(theta_i) = log q_k(theta_i) - log pi(theta_i),
/// with the source labels and per-rung counts riding along.
struct LogWeightMatrix {
    std::size_t n = 0, m = 0;
    std::vector<double> entries;      // row-major
    std::vector<int> labels;
    std::vector<std::size_t> counts;

    double at(std::size_t i, std::size_t k) const { return entries[i * m + k]; }
    double& at(std::size_t i, std::size_t k) { return entries[i * m + k]; }
    std::span<const double> row(std::size_t i) const { return {entries.data() + i * m, m}; }
};

/// Evaluates the prior-relative log-weight matrix of a pool under a
/// bridging spec. Every pooled draw must lie in the prior support.
LogWeightMatrix eval_weight_matrix(const DrawPool& pool, const BridgeSpec& spec, const Model& model);

}  // namespace recml
