#pragma once

#include <optional>

#include "hti/estimator.hpp"

namespace hti {

/// Adapt-then-combine diffusion with a fixed error nonlinearity
/// h(e) = alpha1 e + alpha2 tanh(e):
///   psi_i = w_i + mu_t h(d_i - u_i^T w_i) u_i,
///   w_i   = a_ii psi_i + sum_{l in N(i)} a_li (psi_l + xi_il),
/// with mu_t = mu / (t + 1)^mu_delta. Regressors, noises and theta* come from
/// the accompanying EstimatorConfig; arc noise perturbs received intermediates.
struct DiffusionConfig {
    double mu = 0.2;
    double mu_delta = 0.0;
    double alpha1 = 0.5;
    double alpha2 = 0.5;
    /// Combination matrix A (A(l, i) = a_li). Defaults to the closed-neighborhood
    /// average a_li = (A + I)_li / sum_{l in N_i} (A + I)_li.
    std::optional<Eigen::MatrixXd> weights;

    [[nodiscard]] double error_map(double e) const noexcept { return alpha1 * e + alpha2 * std::tanh(e); }
    [[nodiscard]] double step_size(long t) const noexcept {
        return mu / std::pow(static_cast<double>(t) + 1.0, mu_delta);
    }
};

[[nodiscard]] Eigen::MatrixXd closed_neighborhood_weights(const NetworkGraph& g);

/// Throws ConfigError unless weights are supported on the closed neighborhoods
/// and every column sums to one.
void validate_diffusion_weights(const NetworkGraph& g, const Eigen::MatrixXd& weights);

class DiffusionFilter {
public:
    /// Validates `dcfg`; throws ConfigError on bad weights or step parameters.
    DiffusionFilter(const EstimatorConfig& cfg, const DiffusionConfig& dcfg);

    bool step(EstimatorState& state, RandomStream& rng);

    /// Deterministic kernel for injected noise.
    void apply(long t, const StateMatrix& w, const StepNoise& noise, StateMatrix& next);

private:
    const EstimatorConfig& cfg_;
    DiffusionConfig dcfg_;
    Eigen::MatrixXd weights_;
    StepNoise noise_;
    StateMatrix adapted_;
    StateMatrix next_;
};

[[nodiscard]] EstimatorState diffusion_step(const EstimatorState& state, const EstimatorConfig& cfg,
                                            const DiffusionConfig& dcfg, RandomStream& rng);

[[nodiscard]] MseTrajectory run_diffusion(const EstimatorConfig& cfg, const DiffusionConfig& dcfg,
                                          const StateMatrix& w0, long T, long stride, RandomStream& rng);

}  // namespace hti
