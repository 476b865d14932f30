#include "recml/model.hpp"

#include <cmath>

namespace recml {

double Box::log_volume() const {
    double lv = 0.0;
    for (std::size_t i = 0; i < lower.size(); ++i) lv += std::log(upper[i] - lower[i]);
    return lv;
}

double banana_log_likelihood(std::span<const double> theta) {
    const double a = 10.0 * (0.45 - theta[0]);
    const double b = 20.0 * (theta[1] / 2.0 - theta[0] * theta[0] * theta[0] * theta[0]);
    return -a * a / 4.0 - b * b;
}

double BananaModel::log_prior(std::span<const double> theta) const {
    return support()->contains(theta) ? std::log(0.25) : kNegInf;
}

double BananaModel::log_likelihood(std::span<const double> theta) const {
    return banana_log_likelihood(theta);
}

double quadrature_evidence(const Model& model, std::size_t grid_points_per_dim) {
    const auto box = model.support();
    if (!box) throw ContractViolation("quadrature_evidence: unbounded support not integrable");
    const std::size_t d = model.dimension();
    if (d > 3) throw ContractViolation("quadrature_evidence: dimension > 3 unsupported");
    const std::size_t n = grid_points_per_dim;
    if (n < 3 || n % 2 == 0) throw ContractViolation("quadrature_evidence: grid must be odd and >= 3");

    std::vector<std::vector<double>> grids(d), logw(d);
    for (std::size_t k = 0; k < d; ++k) {
        const double h = (box->upper[k] - box->lower[k]) / static_cast<double>(n - 1);
        grids[k].resize(n);
        for (std::size_t i = 0; i < n; ++i) grids[k][i] = box->lower[k] + static_cast<double>(i) * h;
        auto w = simpson_weights(n, h);
        logw[k].resize(n);
        for (std::size_t i = 0; i < n; ++i) logw[k][i] = std::log(w[i]);
    }

    LogSumExp acc;
    std::vector<double> theta(d);
    std::vector<std::size_t> idx(d, 0);
    for (;;) {
        double lw = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            theta[k] = grids[k][idx[k]];
            lw += logw[k][idx[k]];
        }
        const double lp = model.log_prior(theta);
        if (lp != kNegInf) {
            const double ll = model.log_likelihood(theta);
            if (ll != kNegInf) acc.add(lw + lp + ll);
        }
        std::size_t k = 0;
        while (k < d && ++idx[k] == n) idx[k++] = 0;
        if (k == d) break;
    }
    return acc.value();
}

}  // namespace recml
