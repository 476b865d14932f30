#include "recml/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace recml {

ConnectivityResult check_connectivity(const LogWeightMatrix& W) {
    const int m = static_cast<int>(W.m);
    std::vector<std::vector<bool>> adj(m, std::vector<bool>(m, false));
    for (std::size_t i = 0; i < W.n; ++i) {
        const int j = W.labels[i];
        for (int h = 0; h < m; ++h)
            if (W.at(i, h) != kNegInf) adj[h][j] = true;
    }
    // Kosaraju: order by finish time on adj, then collect SCCs on the transpose.
    std::vector<int> order;
    std::vector<bool> seen(m, false);
    auto dfs1 = [&](auto&& self, int v) -> void {
        seen[v] = true;
        for (int w = 0; w < m; ++w)
            if (adj[v][w] && !seen[w]) self(self, w);
        order.push_back(v);
    };
    for (int v = 0; v < m; ++v)
        if (!seen[v]) dfs1(dfs1, v);
    ConnectivityResult res;
    std::fill(seen.begin(), seen.end(), false);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (seen[*it]) continue;
        std::vector<int> comp;
        auto dfs2 = [&](auto&& self, int v) -> void {
            seen[v] = true;
            comp.push_back(v);
            for (int w = 0; w < m; ++w)
                if (adj[w][v] && !seen[w]) self(self, w);
        };
        dfs2(dfs2, *it);
        std::sort(comp.begin(), comp.end());
        res.components.push_back(std::move(comp));
    }
    res.strongly_connected = res.components.size() == 1;
    return res;
}

namespace {
std::string describe_components(const ConnectivityResult& conn) {
    std::ostringstream os;
    for (std::size_t c = 0; c < conn.components.size(); ++c) {
        os << (c ? " | " : "") << "{";
        for (std::size_t i = 0; i < conn.components[c].size(); ++i)
            os << (i ? "," : "") << conn.components[c][i] + 1;
        os << "}";
    }
    return os.str();
}
}  // namespace

LogNormalizers recursive_normalize(const LogWeightMatrix& W, double tol, int max_iter) {
    const std::size_t n = W.n, m = W.m;
    if (n == 0 || m == 0) throw ContractViolation("recursive_normalize: empty weight matrix");
    for (std::size_t k = 0; k < m; ++k) {
        bool any = false;
        for (std::size_t i = 0; i < n && !any; ++i) any = W.at(i, k) != kNegInf;
        if (!any)
            throw ConnectivityError("recursive_normalize: rung " + std::to_string(k + 1) +
                                    " has no finite weights over the pool (unsampled rung)");
    }
    const auto conn = check_connectivity(W);
    if (!conn.strongly_connected)
        throw ConnectivityError("recursive_normalize: no unique NPMLE, overlap graph components " +
                                describe_components(conn));

    std::vector<double> log_counts(m);
    for (std::size_t j = 0; j < m; ++j)
        log_counts[j] = W.counts[j] > 0 ? std::log(static_cast<double>(W.counts[j])) : kNegInf;

    LogNormalizers out;
    out.log_z.assign(m, 0.0);
    auto& lz = out.log_z;
    std::vector<double> prev(m), denom(n);
    for (int it = 1; it <= max_iter; ++it) {
        prev = lz;
        for (std::size_t k = 0; k < m; ++k) {
            // denominators against the current normalizers (in-place sweep)
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
                    if (row[s] == kNegInf || log_counts[s] == kNegInf) continue;
                    sum += std::exp(log_counts[s] + row[s] - lz[s] - best);
                }
                denom[i] = best + std::log(sum);
            }
            LogSumExp acc;
            for (std::size_t i = 0; i < n; ++i) {
                const double w = W.at(i, k);
                if (w != kNegInf) acc.add(w - denom[i]);
            }
            lz[k] = acc.value();
        }
        const double anchor = lz[0];
        for (auto& v : lz) v -= anchor;
        double delta = 0.0;
        for (std::size_t k = 0; k < m; ++k) delta = std::max(delta, std::fabs(lz[k] - prev[k]));
        out.iterations = it;
        out.final_delta = delta;
        if (delta < tol) {
            out.converged = true;
            return out;
        }
    }
    std::ostringstream os;
    os << "recursive_normalize: fixed point not reached in " << max_iter << " sweeps (final delta " << out.final_delta
       << ")";
    throw ConvergenceError(os.str());
}

double pseudo_mixture_logdensity(const PseudoMixture& P, std::span<const double> row) {
    const auto& W = *P.W;
    const double log_n = std::log(static_cast<double>(W.n));
    LogSumExp acc;
    for (std::size_t j = 0; j < W.m; ++j) {
        if (W.counts[j] == 0 || row[j] == kNegInf) continue;
        acc.add(std::log(static_cast<double>(W.counts[j])) - log_n + row[j] - P.normalizers.log_z[j]);
    }
    return acc.value();
}

LogNormalizers tivis_estimate(const LogWeightMatrix& W, const LogNormalizers& init, std::size_t quad_points,
                              double tol, int max_iter) {
    const std::size_t n = W.n, m = W.m;
    if (quad_points < 3 || quad_points % 2 == 0)
        throw ContractViolation("tivis_estimate: quad_points must be odd and >= 3");
    // matching-support requirement across adjacent rungs, over the sample
    for (std::size_t k = 1; k < m; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const bool a = W.at(i, k - 1) != kNegInf, b = W.at(i, k) != kNegInf;
            if (a != b)
                throw ContractViolation("tivis_estimate: rungs " + std::to_string(k) + "," + std::to_string(k + 1) +
                                        " do not share support on the pooled draws");
        }
    }

    std::vector<double> log_counts(m);
    for (std::size_t j = 0; j < m; ++j)
        log_counts[j] = W.counts[j] > 0 ? std::log(static_cast<double>(W.counts[j])) : kNegInf;

    LogNormalizers out;
    out.log_z = init.log_z.empty() ? std::vector<double>(m, 0.0) : init.log_z;
    auto& lz = out.log_z;

    const auto tw = simpson_weights(quad_points, 1.0 / static_cast<double>(quad_points - 1));
    std::vector<double> logp(n), base(n), delta_col(n), prev(m);
    for (int it = 1; it <= max_iter; ++it) {
        prev = lz;
        // log p(theta_i)/pi(theta_i) under the current normalizers
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
                if (row[s] == kNegInf || log_counts[s] == kNegInf) continue;
                sum += std::exp(log_counts[s] + row[s] - lz[s] - best);
            }
            logp[i] = best + std::log(sum);  // relative to log n, constant across i: cancels in u
        }
        double cum = 0.0;
        for (std::size_t k = 1; k < m; ++k) {
            // integrate E_t[ log(q_k/q_{k-1}) ] over the geometric sub-path
            for (std::size_t i = 0; i < n; ++i) {
                base[i] = W.at(i, k - 1) == kNegInf ? kNegInf : W.at(i, k - 1) - logp[i];
                delta_col[i] = W.at(i, k) == kNegInf ? 0.0 : W.at(i, k) - W.at(i, k - 1);
            }
            double integral = 0.0;
            for (std::size_t q = 0; q < quad_points; ++q) {
                const double t = static_cast<double>(q) / static_cast<double>(quad_points - 1);
                double best = kNegInf;
                for (std::size_t i = 0; i < n; ++i) {
                    if (base[i] == kNegInf) continue;
                    const double lu = base[i] + t * delta_col[i];
                    if (lu > best) best = lu;
                }
                if (best == kNegInf)
                    throw ContractViolation("tivis_estimate: integrand vanished at t, support mismatch");
                double num = 0.0, den = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (base[i] == kNegInf) continue;
                    const double u = std::exp(base[i] + t * delta_col[i] - best);
                    num += delta_col[i] * u;
                    den += u;
                }
                integral += tw[q] * num / den;
            }
            cum += integral;
            lz[k] = cum;
        }
        double d = 0.0;
        for (std::size_t k = 0; k < m; ++k) d = std::max(d, std::fabs(lz[k] - prev[k]));
        out.iterations = it;
        out.final_delta = d;
        if (d < tol) {
            out.converged = true;
            return out;
        }
    }
    throw ConvergenceError("tivis_estimate: fixed point not reached");
}

double hme(std::span<const double> log_likelihoods) {
    if (log_likelihoods.empty()) throw ContractViolation("hme: needs at least one draw");
    LogSumExp acc;
    for (double l : log_likelihoods) acc.add(-l);
    return -acc.value() + std::log(static_cast<double>(log_likelihoods.size()));
}

double ame(std::span<const double> log_likelihoods) {
    if (log_likelihoods.empty()) throw ContractViolation("ame: needs at least one draw");
    return log_sum_exp(log_likelihoods) - std::log(static_cast<double>(log_likelihoods.size()));
}

}  // namespace recml
