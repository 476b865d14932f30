#include "recml/uncertainty.hpp"

#include <algorithm>
#include <cmath>

#include "recml/rng.hpp"

namespace recml {

CovarianceEstimate quasi_hessian_covariance(const LogWeightMatrix& W, const LogNormalizers& normalizers) {
    const std::size_t n = W.n, m = W.m;
    if (!normalizers.converged) throw ContractViolation("quasi_hessian_covariance: normalizers not converged");
    if (m < 2) throw ContractViolation("quasi_hessian_covariance: need at least two rungs");
    const auto& lz = normalizers.log_z;
    std::vector<double> log_counts(m);
    for (std::size_t j = 0; j < m; ++j)
        log_counts[j] = W.counts[j] > 0 ? std::log(static_cast<double>(W.counts[j])) : kNegInf;

    // responsibilities pi_k(theta_i) for k = 2..m; -H = diag(sum pi) - sum pi pi^T
    const auto mi = static_cast<Eigen::Index>(m) - 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(mi, mi);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(mi);
    Eigen::MatrixXd Pi(static_cast<Eigen::Index>(n), mi);
    std::vector<double> pi(m);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = &W.entries[i * m];
        double best = kNegInf;
        for (std::size_t s = 0; s < m; ++s) {
            if (row[s] == kNegInf || log_counts[s] == kNegInf) continue;
            const double v = log_counts[s] + row[s] - lz[s];
            if (v > best) best = v;
        }
        double sum = 0.0;
        for (std::size_t s = 0; s < m; ++s) {
            if (row[s] == kNegInf || log_counts[s] == kNegInf) {
                pi[s] = 0.0;
                continue;
            }
            pi[s] = std::exp(log_counts[s] + row[s] - lz[s] - best);
            sum += pi[s];
        }
        for (std::size_t s = 0; s < m; ++s) pi[s] /= sum;
        for (std::size_t a = 1; a < m; ++a) {
            Pi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a) - 1) = pi[a];
            diag(a - 1) += pi[a];
            for (std::size_t b = a; b < m; ++b) A(a - 1, b - 1) += pi[a] * pi[b];
        }
    }
    Eigen::MatrixXd negH = Eigen::MatrixXd(A.selfadjointView<Eigen::Upper>());
    negH = -negH;
    negH += Eigen::MatrixXd(diag.asDiagonal());

    Eigen::LDLT<Eigen::MatrixXd> ldlt(negH);
    const double dmin = ldlt.vectorD().minCoeff();
    if (ldlt.info() != Eigen::Success || dmin <= 1e-12 * ldlt.vectorD().maxCoeff()) {
        Eigen::Index worst;
        ldlt.vectorD().minCoeff(&worst);
        throw ConnectivityError("quasi_hessian_covariance: rank-deficient Hessian near rung " +
                                std::to_string(worst + 2) + "; rung overlap too weak");
    }

    // V = sum_j n_j Var_{f_j}(pi), the fixed-design score variance, with the
    // rung expectations estimated under the fitted pseudo-mixture:
    //   E_j[phi] = sum_i phi_i exp(W(i,j) - log Z_j - D_i),
    // which depends on W and the counts only (labels carry no information
    // beyond the counts).
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(mi, mi);
    {
        std::vector<double> rw(n);
        Eigen::MatrixXd Ej2(mi, mi);
        Eigen::VectorXd Ej(mi);
        for (std::size_t j = 0; j < m; ++j) {
            if (W.counts[j] == 0) continue;
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double* row = &W.entries[i * m];
                if (row[j] == kNegInf) {
                    rw[i] = 0.0;
                    continue;
                }
                double best = kNegInf;
                for (std::size_t s = 0; s < m; ++s) {
                    if (row[s] == kNegInf || log_counts[s] == kNegInf) continue;
                    const double v = log_counts[s] + row[s] - lz[s];
                    if (v > best) best = v;
                }
                double denom = 0.0;
                for (std::size_t s = 0; s < m; ++s) {
                    if (row[s] == kNegInf || log_counts[s] == kNegInf) continue;
                    denom += std::exp(log_counts[s] + row[s] - lz[s] - best);
                }
                rw[i] = std::exp(row[j] - lz[j] - best - std::log(denom));
                total += rw[i];
            }
            if (total <= 0.0) continue;
            Ej.setZero();
            Ej2.setZero();
            for (std::size_t i = 0; i < n; ++i) {
                if (rw[i] == 0.0) continue;
                const Eigen::VectorXd p = Pi.row(static_cast<Eigen::Index>(i));
                const double w = rw[i] / total;
                Ej.noalias() += w * p;
                Ej2.noalias() += w * p * p.transpose();
            }
            V.noalias() += static_cast<double>(W.counts[j]) * (Ej2 - Ej * Ej.transpose());
        }
    }

    CovarianceEstimate est;
    est.method = CovMethod::quasi_hessian;
    est.neg_hessian = negH;
    const Eigen::MatrixXd Hinv = ldlt.solve(Eigen::MatrixXd::Identity(mi, mi));
    est.cov = Hinv * V * Hinv;
    est.se_target = std::sqrt(std::max(0.0, est.cov(mi - 1, mi - 1)));
    return est;
}

namespace {
double pseudo_target(const LogWeightMatrix& W, std::span<const std::size_t> rows, std::span<const double> lz,
                     std::span<const double> log_counts, std::span<const double> log_num_rel) {
    LogSumExp acc;
    for (std::size_t r : rows) {
        if (log_num_rel[r] == kNegInf) continue;
        const double* row = &W.entries[r * W.m];
        double best = kNegInf;
        for (std::size_t s = 0; s < W.m; ++s) {
            if (row[s] == kNegInf || log_counts[s] == kNegInf) continue;
            const double v = log_counts[s] + row[s] - lz[s];
            if (v > best) best = v;
        }
        double sum = 0.0;
        for (std::size_t s = 0; s < W.m; ++s) {
            if (row[s] == kNegInf || log_counts[s] == kNegInf) continue;
            sum += std::exp(log_counts[s] + row[s] - lz[s] - best);
        }
        acc.add(log_num_rel[r] - (best + std::log(sum)));
    }
    // with absolute counts in the denominator the two log n terms of
    // (1/n) sum num/p cancel exactly, so no correction is needed here
    return acc.value();
}
}  // namespace

BootstrapResult bootstrap_se(const LogWeightMatrix& W, const LogNormalizers& normalizers,
                             std::span<const double> log_num_rel, std::size_t B, std::uint64_t seed) {
    if (B < 100) throw ContractViolation("bootstrap_se: B must be >= 100");
    const std::size_t n = W.n, m = W.m;
    if (log_num_rel.size() != n) throw ContractViolation("bootstrap_se: target vector size mismatch");

    std::vector<double> log_counts(m);
    for (std::size_t j = 0; j < m; ++j)
        log_counts[j] = W.counts[j] > 0 ? std::log(static_cast<double>(W.counts[j])) : kNegInf;

    std::vector<std::vector<std::size_t>> groups(m);
    for (std::size_t i = 0; i < n; ++i) groups[W.labels[i]].push_back(i);

    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;

    BootstrapResult out;
    // identity: LSE_i[num - (logp_abs - log n)] - log n = LSE_i[num - logp_abs]
    out.estimate = pseudo_target(W, all, normalizers.log_z, log_counts, log_num_rel);

    Eigen::MatrixXd chol;
    {
        const auto cov = quasi_hessian_covariance(W, normalizers);
        if (cov.cov.norm() < 1e-14) {
            chol = Eigen::MatrixXd::Zero(m - 1, m - 1);  // degenerate: no perturbation
        } else {
            Eigen::LLT<Eigen::MatrixXd> llt(cov.cov);
            Eigen::MatrixXd C = cov.cov;
            double jitter = 1e-12 * cov.cov.norm();
            while (llt.info() != Eigen::Success && jitter < 1.0) {
                C += jitter * Eigen::MatrixXd::Identity(m - 1, m - 1);
                llt.compute(C);
                jitter *= 10.0;
            }
            if (llt.info() != Eigen::Success)
                throw ConnectivityError("bootstrap_se: covariance not factorizable");
            chol = llt.matrixL();
        }
    }

    std::vector<double> lz(m), estimates(B);
    std::vector<std::size_t> rows(n);
    for (std::size_t b = 0; b < B; ++b) {
        Rng rng = Rng::stream(seed, "bootstrap", b);
        Eigen::VectorXd zvec(m - 1);
        for (std::size_t k = 0; k + 1 < m; ++k) zvec(k) = rng.normal();
        const Eigen::VectorXd pert = chol * zvec;
        lz[0] = 0.0;
        for (std::size_t k = 1; k < m; ++k) lz[k] = normalizers.log_z[k] + pert(k - 1);
        std::size_t pos = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const auto& g = groups[j];
            for (std::size_t t = 0; t < g.size(); ++t) rows[pos++] = g[rng.uniform_index(g.size())];
        }
        estimates[b] = pseudo_target(W, rows, lz, log_counts, log_num_rel);
    }

    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= static_cast<double>(B);
    double ss = 0.0;
    for (double e : estimates) ss += (e - mean) * (e - mean);
    out.se = std::sqrt(ss / static_cast<double>(B - 1));
    std::vector<double> sorted = estimates;
    std::sort(sorted.begin(), sorted.end());
    out.lo95 = sorted[static_cast<std::size_t>(0.025 * static_cast<double>(B - 1))];
    out.hi95 = sorted[static_cast<std::size_t>(0.975 * static_cast<double>(B - 1))];
    return out;
}

double ess(std::span<const double> log_weights) {
    const double norm = log_sum_exp(log_weights);
    if (norm == kNegInf) throw ContractViolation("ess: all weights are zero");
    double sum_sq = 0.0;
    for (double lw : log_weights) {
        if (lw == kNegInf) continue;
        const double u = std::exp(lw - norm);
        sum_sq += u * u;
    }
    return 1.0 / sum_sq;
}

}  // namespace recml
