#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hti/graph.hpp"
#include "hti/noise.hpp"
#include "hti/nonlinearity.hpp"
#include "hti/random.hpp"

namespace hti {

/// N x M; row i is agent i's estimate (or regressor).
using StateMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// x_i <- x_i - alpha_t ( (b/a) sum_{j in N(i)} Psi_c(x_i - x_j + xi_ij) - h_i Psi_o(z_i - h_i^T x_i) ),
/// alpha_t = a / (t + 1)^delta, z_i = h_i^T theta* + n_i.
struct EstimatorConfig {
    std::shared_ptr<const NetworkGraph> graph;
    StateMatrix regressors;  // h_i, or the mean h_bar_i in random-regressor mode
    Eigen::VectorXd theta_star;
    double gain_a = 1.0;
    double gain_b = 1.0;
    double step_delta = 1.0;
    std::vector<Nonlinearity> psi_obs{Nonlinearity::identity()};  // one shared map, or one per agent
    Nonlinearity psi_comm = Nonlinearity::identity();
    NoiseModel obs_noise = NoiseModel::zero();
    CommNoise comm_noise = NoiseModel::zero();
    /// Entrywise law of h_tilde_i^t; observations then use h_bar_i + h_tilde_i^t.
    std::optional<NoiseModel> regressor_noise;

    [[nodiscard]] int agents() const noexcept { return graph->size(); }
    [[nodiscard]] int dim() const noexcept { return static_cast<int>(theta_star.size()); }
    [[nodiscard]] const Nonlinearity& psi_obs_at(int i) const noexcept {
        return psi_obs.size() == 1 ? psi_obs.front() : psi_obs[static_cast<std::size_t>(i)];
    }
    [[nodiscard]] double step_size(long t) const noexcept {
        return gain_a / std::pow(static_cast<double>(t) + 1.0, step_delta);
    }
    [[nodiscard]] bool correlated() const noexcept { return std::holds_alternative<CorrelationSpec>(comm_noise); }

    /// Throws ParameterError on inconsistent shapes, gains outside their ranges,
    /// delta outside (0.5, 1] or lambda_min(sum h_i h_i^T) <= 1e-10.
    void validate() const;
};

/// Smallest eigenvalue of sum_i h_i h_i^T.
[[nodiscard]] double observability_margin(const StateMatrix& regressors);

/// Noise consumed by one synchronous step.
struct StepNoise {
    Eigen::VectorXd obs;    // n_i
    StateMatrix comm;       // per arc (CSR order) when independent, per agent when correlated
    StateMatrix regressor;  // h_tilde_i, empty unless random-regressor mode
};

[[nodiscard]] StepNoise make_step_noise(const EstimatorConfig& cfg);

/// Draw order: all n_i, then regressor perturbations, then communication noise.
void draw_step_noise(const EstimatorConfig& cfg, RandomStream& rng, StepNoise& noise);

/// Deterministic kernel: next = x^{t+1} given x = x^t and the step's noise.
void apply_step(const EstimatorConfig& cfg, long t, const StateMatrix& x, const StepNoise& noise, StateMatrix& next);

struct EstimatorState {
    long t = 0;
    StateMatrix x;
};

/// Reusable per-replication workspace around apply_step.
class Estimator {
public:
    explicit Estimator(const EstimatorConfig& cfg);

    /// Advances one step; returns false if the new state has a non-finite entry.
    bool step(EstimatorState& state, RandomStream& rng);
    /// Advances up to `steps` steps, stopping early on a non-finite state.
    bool advance(EstimatorState& state, long steps, RandomStream& rng);

    [[nodiscard]] const StepNoise& last_noise() const noexcept { return noise_; }

private:
    const EstimatorConfig& cfg_;
    StepNoise noise_;
    StateMatrix next_;
};

[[nodiscard]] EstimatorState step(const EstimatorState& state, const EstimatorConfig& cfg, RandomStream& rng);

struct MseTrajectory {
    std::vector<long> t;
    std::vector<double> per_sensor_mse;  // V(x^t) / N, +infinity once divergent
    bool divergent = false;
    long diverged_at = -1;

    [[nodiscard]] std::size_t size() const noexcept { return t.size(); }
    [[nodiscard]] double initial() const { return per_sensor_mse.front(); }
    [[nodiscard]] double final_value() const { return per_sensor_mse.back(); }
};

/// V(x) / N with V(x) = ||x - 1 (x) theta*||^2.
[[nodiscard]] double per_sensor_mse(const StateMatrix& x, const Eigen::VectorXd& theta_star);

/// Sample times 0, stride, 2 stride, ... and T; ceil(T / stride) + 1 entries.
[[nodiscard]] std::vector<long> record_times(long T, long stride);

[[nodiscard]] MseTrajectory run(const EstimatorConfig& cfg, const StateMatrix& x0, long T, long stride,
                                RandomStream& rng);

enum class BaselineKind { lu, consensus_only };

/// lu: both maps identity, delta = 1. consensus_only: Psi_o identity, Psi_c kept, delta = 1.
[[nodiscard]] EstimatorConfig make_baseline(const EstimatorConfig& cfg, BaselineKind kind);

}  // namespace hti
