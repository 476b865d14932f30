#include "recml/mixture.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace recml {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836;

double log_normal_pdf(double x, double mean, double precision) {
    const double d = x - mean;
    return 0.5 * (std::log(precision) - kLogTwoPi) - 0.5 * precision * d * d;
}

double log_gamma_pdf(double x, double shape, double rate) {
    if (x <= 0.0) return kNegInf;
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}
}  // namespace

MixtureModel::MixtureModel(std::vector<double> data, int k, MixtureHyper hyper)
    : data_(std::move(data)), k_(k), hyper_(hyper) {
    if (k_ < 1) throw ContractViolation("MixtureModel: k must be >= 1");
}

double MixtureModel::log_prior(std::span<const double> theta) const {
    const auto ph = phi(theta);
    const auto m = mu(theta);
    const auto t = tau(theta);
    const double b = beta(theta);
    double sum_phi = 0.0;
    const double e0 = hyper_.dirichlet_e0;
    double lp = std::lgamma(e0 * k_) - static_cast<double>(k_) * std::lgamma(e0);  // symmetric Dirichlet
    for (int j = 0; j < k_; ++j) {
        if (ph[j] < 0.0 || t[j] <= 0.0) return kNegInf;
        sum_phi += ph[j];
        if (e0 != 1.0) lp += (e0 - 1.0) * std::log(ph[j] > 0.0 ? ph[j] : 1e-300);
        lp += log_normal_pdf(m[j], hyper_.kappa, hyper_.xi);
        lp += log_gamma_pdf(t[j], hyper_.alpha, b);
    }
    if (std::fabs(sum_phi - 1.0) > 1e-9) return kNegInf;
    if (!hyper_.fixed_beta) lp += log_gamma_pdf(b, hyper_.beta1, hyper_.beta2);
    return lp;
}

void MixtureModel::per_datum_log_density(std::span<const double> theta, std::span<double> out) const {
    const auto ph = phi(theta);
    const auto m = mu(theta);
    const auto t = tau(theta);
    double sum_phi = 0.0;
    for (int j = 0; j < k_; ++j) {
        sum_phi += ph[j];
        if (t[j] <= 0.0) throw ContractViolation("mixture likelihood: tau must be positive");
    }
    if (std::fabs(sum_phi - 1.0) > 1e-12) throw ContractViolation("mixture likelihood: phi must sum to 1");
    std::vector<double> lw(k_), half_tau(k_);
    for (int j = 0; j < k_; ++j) {
        lw[j] = (ph[j] > 0.0 ? std::log(ph[j]) : kNegInf) + 0.5 * (std::log(t[j]) - kLogTwoPi);
        half_tau[j] = 0.5 * t[j];
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        double best = kNegInf;
        for (int j = 0; j < k_; ++j) {
            const double d = data_[i] - m[j];
            const double v = lw[j] - half_tau[j] * d * d;
            if (v > best) best = v;
        }
        double s = 0.0;
        for (int j = 0; j < k_; ++j) {
            const double d = data_[i] - m[j];
            s += std::exp(lw[j] - half_tau[j] * d * d - best);
        }
        out[i] = best == kNegInf ? kNegInf : best + std::log(s);
    }
}

double MixtureModel::partial_log_likelihood(std::size_t r, std::span<const double> theta) const {
    if (r > data_.size()) throw ContractViolation("partial_log_likelihood: r out of range");
    if (r == 0) return 0.0;
    std::vector<double> ld(data_.size());
    per_datum_log_density(theta, ld);
    double s = 0.0;
    for (std::size_t i = 0; i < r; ++i) s += ld[i];
    return s;
}

double MixtureModel::mean_prior_logdensity(std::span<const double> mu, double kappa, double xi) {
    double lp = 0.0;
    for (double m : mu) lp += log_normal_pdf(m, kappa, xi);
    return lp;
}

std::vector<double> load_galaxy_data(const std::string& path, const std::string& variant) {
    std::ifstream in(path);
    if (!in) throw ConfigError("galaxy data file not found: " + path);
    std::vector<double> data;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        double v;
        if (ss >> v) data.push_back(v);
    }
    if (data.size() != 82)
        throw ConfigError("galaxy data: expected 82 velocities, got " + std::to_string(data.size()));
    if (variant == "roeder") {
        const double mean = std::accumulate(data.begin(), data.end(), 0.0) / 82.0;
        double ss = 0.0;
        for (double v : data) ss += (v - mean) * (v - mean);
        const double precision = 81.0 / ss;
        if (std::fabs(mean - 20.8) > 0.05)
            throw ConfigError("galaxy data (roeder): sample mean " + std::to_string(mean) + " outside 20.8 +- 0.05");
        if (std::fabs(precision - 0.048) > 0.002)
            throw ConfigError("galaxy data (roeder): 1/variance " + std::to_string(precision) +
                              " outside 0.048 +- 0.002");
    } else if (variant != "chib78") {
        throw ConfigError("galaxy data: unknown variant '" + variant + "' (expected roeder or chib78)");
    }
    return data;
}

std::vector<double> truncated_poisson_pmf(double lambda, int k_min, int k_max) {
    if (k_min < 0 || k_max < k_min) throw ContractViolation("truncated_poisson_pmf: bad range");
    std::vector<double> logp;
    for (int k = k_min; k <= k_max; ++k)
        logp.push_back(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
    const double norm = log_sum_exp(logp);
    std::vector<double> p;
    for (double lp : logp) p.push_back(std::exp(lp - norm));
    return p;
}

}  // namespace recml
