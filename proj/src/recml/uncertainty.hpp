#pragma once

#include <Eigen/Dense>

#include "recml/estimators.hpp"

namespace recml {

enum class CovMethod { quasi_hessian, bootstrap };

/// (m-1)x(m-1) covariance of (log Z_2, ..., log Z_m) and the SE of the
/// target coordinate (log Z_m by default, or a reweighted target).
struct CovarianceEstimate {
    CovMethod method = CovMethod::quasi_hessian;
    Eigen::MatrixXd cov;
    Eigen::MatrixXd neg_hessian;  // -H of the quasi-log-likelihood at the fixed point
    double se_target = 0.0;
};

/// Asymptotic covariance from the quasi-log-likelihood at the fixed point:
/// the sandwich (-H)^-1 V (-H)^-1 with V the within-rung covariance of the
/// score contributions. The plain inverse Hessian overstates the variance
/// whenever the information identity fails (it is nonzero even for
/// constant weights); the sandwich restores the degenerate cases while
/// agreeing with it wherever the rungs are well mixed.
CovarianceEstimate quasi_hessian_covariance(const LogWeightMatrix& W, const LogNormalizers& normalizers);

struct BootstrapResult {
    double estimate = 0.0;   // point estimate of the target on the original pool
    double se = 0.0;
    double lo95 = 0.0, hi95 = 0.0;
};

/// B-replicate bootstrap of a pseudo-importance target: each replicate
/// perturbs log Z by a draw from the quasi-Hessian covariance, resamples
/// rows with replacement within each label group, and recomputes
///   LSE_i [ log_num_rel_i - log p_rel_i ] - log n.
/// log_num_rel carries the target numerator relative to the prior
/// (e.g. the cached log-likelihoods for the evidence target).
BootstrapResult bootstrap_se(const LogWeightMatrix& W, const LogNormalizers& normalizers,
                             std::span<const double> log_num_rel, std::size_t B, std::uint64_t seed);

/// Kong effective sample size 1/sum(u_i^2) of normalized importance
/// weights; invariant to adding a constant to all log weights.
double ess(std::span<const double> log_weights);

}  // namespace recml
