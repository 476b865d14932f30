#pragma once

#include "recml/bridge.hpp"

namespace recml {

struct ConnectivityResult {
    bool strongly_connected = false;
    std::vector<std::vector<int>> components;  // SCC partition of the rungs
};

/// Vardi's sampled-support overlap graph: edge h -> j iff some draw
/// labeled j has finite log w_h. Strong connectivity is the condition for
/// a unique fixed point; the component partition is returned for diagnosis.
ConnectivityResult check_connectivity(const LogWeightMatrix& W);

/// Normalizing constants of the bridging rungs, anchored at log_z[0] = 0.
struct LogNormalizers {
    std::vector<double> log_z;
    int iterations = 0;
    double final_delta = 0.0;
    bool converged = false;
};

/// The recursive biased-sampling fixed point: Gauss-Seidel sweeps of
///   log Z_k <- LSE_i [ W(i,k) - LSE_s ( log n_s + W(i,s) - log Z_s ) ],
/// re-anchored on rung 1 after every sweep; stops when the largest
/// per-rung change falls below tol. Globally convergent on connected W.
LogNormalizers recursive_normalize(const LogWeightMatrix& W, double tol = 1e-10, int max_iter = 100000);

/// The imagined mixture over pooled draws with weights n_j/n and the
/// estimated normalizers.
struct PseudoMixture {
    const LogWeightMatrix* W = nullptr;
    LogNormalizers normalizers;
};

/// log of p(theta)/pi(theta) for one weight-matrix row:
/// LSE_j ( log n_j - log n + row[j] - log Z_j ).
double pseudo_mixture_logdensity(const PseudoMixture& P, std::span<const double> row);

/// Thermodynamic integration via importance sampling: per-rung log-ratio
/// integrals over the pseudo-mixture, Simpson-integrated on quad_points
/// temperatures, iterated to the same fixed point as recursive_normalize.
/// Requires adjacent rungs to share support on the pooled draws.
LogNormalizers tivis_estimate(const LogWeightMatrix& W, const LogNormalizers& init, std::size_t quad_points,
                              double tol = 1e-10, int max_iter = 10000);

/// Harmonic mean estimator over posterior draws (baseline only).
double hme(std::span<const double> log_likelihoods);

/// Prior arithmetic mean estimator over prior draws.
double ame(std::span<const double> log_likelihoods);

}  // namespace recml
