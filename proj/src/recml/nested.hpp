#pragma once

#include <Eigen/Dense>

#include "recml/estimators.hpp"
#include "recml/uncertainty.hpp"

namespace recml {

/// Interior = { theta : (theta-c)^T A (theta-c) <= 1 }.
struct Ellipsoid {
    Eigen::VectorXd center;
    Eigen::MatrixXd shape;  // A, symmetric positive definite
    double log_volume = 0.0;

    bool contains(std::span<const double> theta, double tol = 1e-12) const;
    /// Scales every axis by f (volume by f^d).
    Ellipsoid expanded(double f) const;
};

/// Minimum-volume enclosing ellipsoid by Khachiyan's iteration to relative
/// tolerance tol. Rank-deficient point sets are regularized so the minor
/// axis is at least 1e-6 of the major axis.
Ellipsoid mvee(std::span<const double> points, std::size_t dim, double tol = 1e-8);

struct Shell {
    double threshold;                 // log-likelihood of the removed point
    Ellipsoid ellipsoid;              // expanded sampling ellipsoid
    std::vector<double> accepted;     // the replacement draw
    double accepted_ll;
    std::vector<double> rejected;     // flattened rejected proposals
    std::vector<double> rejected_ll;  // -inf for out-of-box proposals
    std::size_t n_oh = 0;
};

/// One ellipse-based nested-sampling trajectory. Requires a uniform prior
/// on a box. Retains everything needed for the three evidence summations:
/// initial prior draws, per-shell rejected proposals, and the final live set.
struct NSRun {
    std::size_t dim = 0;
    std::size_t n_live = 0;
    std::size_t steps = 0;
    double expand_factor = 1.5;
    std::uint64_t seed = 0;
    Box box;
    std::vector<double> initial;      // flattened N_live prior draws
    std::vector<double> initial_ll;
    std::vector<Shell> shells;        // thresholds strictly increasing
    std::vector<double> live_final;   // flattened final live set
    std::vector<double> live_final_ll;
    std::size_t likelihood_calls = 0;
    std::size_t boundary_warnings = 0;  // accepted points within 1% of the ellipse edge

    std::size_t total_overhead() const {
        std::size_t s = 0;
        for (const auto& sh : shells) s += sh.n_oh;
        return s;
    }
};

NSRun nested_run(const Model& model, std::size_t n_live, std::size_t steps, double expand_factor,
                 std::uint64_t seed);

/// Classic nested-sampling summation with deterministic cumulants
/// X_i = exp(-i/N_live) and the mean-live-likelihood terminal term.
double ns_evidence(const NSRun& run);

struct ShellRecursiveResult {
    double log_z = 0.0;
    LogNormalizers normalizers;       // over the decimated shell ladder
    double hessian_se = 0.0;          // reported but unreliable here
    bool analytic_se_unreliable = true;
    std::vector<double> ladder;       // rung thresholds (first is -inf)
    std::vector<std::size_t> counts;
};

/// Biased sampling over indicator shells on a ladder decimated to one rung
/// per N_live accepted steps. Initial prior draws enter as rung 1; each
/// accepted draw is conditioned up to the next ladder threshold (kept only
/// if it exceeds it), which keeps the rung labels exact. The normalized
/// ladder is then reweighted to the posterior target. The biased-sampling
/// CLT does not hold for these dependent draws, so the analytic SE is
/// flagged unreliable.
ShellRecursiveResult shell_recursive_evidence(const NSRun& run);

struct InsResult {
    double log_z = 0.0;
    double se_bootstrap = 0.0;
    std::size_t n_draws = 0;
};

/// Importance nested sampling: pools every draw ever made (initial box
/// draws, accepted and rejected ellipse draws) against the exactly-known
/// ellipsoid-mixture sampling density. Out-of-box draws contribute zero
/// numerator but still count in n.
InsResult ins_evidence(const NSRun& run, std::size_t bootstrap_B = 200, std::uint64_t bootstrap_seed = 1);

}  // namespace recml
