#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hti/asymptotics.hpp"
#include "hti/diffusion.hpp"
#include "hti/estimator.hpp"

namespace hti {

enum class Method { proposed, lu, consensus_only, diffusion };

[[nodiscard]] std::string to_string(Method m);
/// Throws ParameterError for an unknown name.
[[nodiscard]] Method method_from_string(const std::string& name);

/// `base` as run by `method`: baselines are derived from it, diffusion reuses its data.
[[nodiscard]] EstimatorConfig config_for(const EstimatorConfig& base, Method method);

struct ExperimentPlan {
    EstimatorConfig base;
    StateMatrix x0;
    long replications = 1;
    long horizon = 1;
    long stride = 1;
    std::uint64_t seed = 0;
    Method method = Method::proposed;
    DiffusionConfig diffusion;
    /// Replication r uses split_seed(seed, offset + r); batches with adjacent
    /// offsets concatenate into one larger batch.
    long replication_offset = 0;

    /// Throws ParameterError.
    void validate() const;
};

/// One replication, fully determined by (plan, r).
[[nodiscard]] MseTrajectory run_replication(const ExperimentPlan& plan, const EstimatorConfig& cfg, long r);

/// All replications; OpenMP over r with one result slot per replication.
/// `jobs` <= 0 leaves the thread count to the runtime.
[[nodiscard]] std::vector<MseTrajectory> monte_carlo_runs(const ExperimentPlan& plan, int jobs = 0);
/// Reference implementation: same results, one thread, ascending r.
[[nodiscard]] std::vector<MseTrajectory> monte_carlo_runs_serial(const ExperimentPlan& plan);

struct MonteCarloSummary {
    std::vector<long> t;
    std::vector<double> mean, median, q10, q90;  // over non-divergent runs; +inf if none
    long replications = 0;
    long divergent = 0;
    [[nodiscard]] double divergence_fraction() const {
        return replications == 0 ? 0.0 : static_cast<double>(divergent) / static_cast<double>(replications);
    }
};

/// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
[[nodiscard]] double quantile(std::vector<double> v, double q);

/// Deterministic reduction; independent of completion order.
[[nodiscard]] MonteCarloSummary aggregate(const std::vector<MseTrajectory>& runs);

[[nodiscard]] MonteCarloSummary monte_carlo(const ExperimentPlan& plan, int jobs = 0);

struct SweepResult {
    std::vector<double> axis;
    std::vector<double> values;
    std::size_t argmin = 0;
    bool argmin_on_boundary = true;
    std::vector<std::size_t> local_minima;  // interior indices
    std::vector<std::size_t> local_maxima;
};

/// Argmin, boundary flag and interior extrema from sign changes of the discrete derivative.
[[nodiscard]] SweepResult analyze_curve(std::vector<double> axis, std::vector<double> values);

/// Throws ParameterError unless nonempty and strictly increasing.
void validate_grid(const std::vector<double>& grid);

[[nodiscard]] std::vector<double> log_grid(double lo, double hi, int points);
[[nodiscard]] std::vector<double> linear_grid(double lo, double hi, int points);

struct Example1Params {
    double eps = 0.1;
    double h = 1.0;
    NoiseModel obs_noise = NoiseModel::pareto_like(2.05);
};

/// Analytic sigma_B^2 over the grid (parallel over grid points).
[[nodiscard]] SweepResult sweep_B(const std::vector<double>& grid, const Example1Params& p, int jobs = 0);
[[nodiscard]] SweepResult sweep_B_serial(const std::vector<double>& grid, const Example1Params& p);

/// Monte Carlo final median per-sensor MSE with Psi_o = tanh_clip(B), other settings from `plan`.
[[nodiscard]] SweepResult sweep_B_monte_carlo(const std::vector<double>& grid, const ExperimentPlan& plan,
                                              int jobs = 0);

/// Analytic sigma_rho^2 over a grid inside (-1, 1).
[[nodiscard]] SweepResult sweep_rho(const std::vector<double>& grid, const Example2Params& p,
                                    const Eigen::VectorXd& spectrum, int jobs = 0);
[[nodiscard]] SweepResult sweep_rho_serial(const std::vector<double>& grid, const Example2Params& p,
                                           const Eigen::VectorXd& spectrum);

/// Least-squares slope of log(mse) against log(t) over points with t >= (1 - window) t_max, t > 0.
/// NaN when the window holds a non-finite or nonpositive value, or fewer than two points.
[[nodiscard]] double estimate_decay_exponent(const std::vector<long>& t, const std::vector<double>& mse,
                                             double window = 0.5);
[[nodiscard]] double estimate_decay_exponent(const MseTrajectory& traj, double window = 0.5);

struct ProbeOutcome {
    Method method;
    double divergence_fraction = 0.0;  // final > 10x initial, or non-finite
    double median_final = 0.0;
    double median_initial = 0.0;
    MonteCarloSummary summary;
};

/// Runs `plan` once per method with identical seeds.
[[nodiscard]] std::vector<ProbeOutcome> divergence_probe(const ExperimentPlan& plan, const std::vector<Method>& methods,
                                                         int jobs = 0);

}  // namespace hti
