#pragma once

#include <optional>
#include <span>
#include <vector>

#include "recml/common.hpp"

namespace recml {

/// Axis-aligned box support.
struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dim() const { return lower.size(); }
    bool contains(std::span<const double> theta) const {
        for (std::size_t i = 0; i < lower.size(); ++i)
            if (theta[i] < lower[i] || theta[i] > upper[i]) return false;
        return true;
    }
    double log_volume() const;
};

/// A target model: prior x likelihood over a parameter space.
/// log_prior is finite on the interior of the support and -inf outside;
/// log_likelihood returns -inf (never throws) where the likelihood is zero.
/// Evaluations are pure; models are immutable after construction.
class Model {
  public:
    virtual ~Model() = default;

    virtual std::size_t dimension() const = 0;
    /// Box support, or nullopt for unbounded models.
    virtual std::optional<Box> support() const = 0;
    virtual double log_prior(std::span<const double> theta) const = 0;
    virtual double log_likelihood(std::span<const double> theta) const = 0;

    /// Likelihood restricted to the first r observations of the model's
    /// data ordering. Only meaningful for data-based models; others throw.
    virtual double partial_log_likelihood(std::size_t /*r*/, std::span<const double> /*theta*/) const {
        throw ContractViolation("partial_log_likelihood: model has no data subsets");
    }
    virtual std::size_t data_size() const { return 0; }
};

/// Two-dimensional banana-shaped test likelihood with Uniform(1/4) prior
/// on [-0.5,1.5]^2. The exact maximizer is (0.45, 2*0.45^4), where the
/// log-likelihood is 0.
class BananaModel final : public Model {
  public:
    std::size_t dimension() const override { return 2; }
    std::optional<Box> support() const override { return Box{{-0.5, -0.5}, {1.5, 1.5}}; }
    double log_prior(std::span<const double> theta) const override;
    double log_likelihood(std::span<const double> theta) const override;
};

double banana_log_likelihood(std::span<const double> theta);

/// Composite-Simpson integral of prior x likelihood over the box support.
/// Supports dimension <= 3; grid_points_per_dim must be odd and >= 3.
/// Returns the log-evidence.
double quadrature_evidence(const Model& model, std::size_t grid_points_per_dim);

}  // namespace recml
