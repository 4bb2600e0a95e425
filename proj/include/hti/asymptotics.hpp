#pragma once

#include <optional>

#include <Eigen/Dense>

#include "hti/estimator.hpp"

namespace hti {

struct SigmaMatrix {
    Eigen::MatrixXd matrix;
    double max_eigenvalue = 0.0;
    bool stable = false;  // max_eigenvalue < 0
};

/// Sigma = I/2 - (b phi_c'(0) L (x) I_M + a phi_o'(0) H^T H), with H^T H = blockdiag(h_i h_i^T).
/// Indices are agent-major: row i*M + l.
[[nodiscard]] SigmaMatrix build_sigma(const EstimatorConfig& cfg, double phi_c_prime0, double phi_o_prime0);
/// Per-agent phi_o,i'(0) for per-agent observation maps.
[[nodiscard]] SigmaMatrix build_sigma(const EstimatorConfig& cfg, double phi_c_prime0,
                                      const Eigen::VectorXd& phi_o_prime0);

/// Independent noises (K_co = 0): (b/a)^2 sigma_c^2 Diag(d_i I_M) + sigma_o^2 H^T H.
/// With `sigma_oc` the scalar shared-arc-noise model is used instead (M = 1, arc
/// noise shared across an agent's arcs): diag((b/a)^2 sigma_c^2 d_i^2 + sigma_o^2 h_i^2 - 2 (b/a) h_i d_i sigma_oc).
/// Throws ParameterError when either variance is kInfiniteVariance.
[[nodiscard]] Eigen::MatrixXd build_s0(const EstimatorConfig& cfg, double sigma_c_sq, double sigma_o_sq,
                                       std::optional<double> sigma_oc = std::nullopt);

struct AsymptoticsResult {
    Eigen::MatrixXd Sigma;
    Eigen::MatrixXd S0;
    Eigen::MatrixXd S;
    double per_agent_variance = 0.0;  // trace(S) / N
    double residual = 0.0;            // ||Sigma S + S Sigma^T + a^2 S0||_F / ||a^2 S0||_F
};

/// S = a^2 int_0^inf e^{Sigma v} S0 e^{Sigma^T v} dv for symmetric Sigma, solved in
/// Sigma's eigenbasis. `n_agents` divides the trace. Throws StabilityError unless
/// every eigenvalue of Sigma is negative.
[[nodiscard]] AsymptoticsResult asymptotic_covariance(const Eigen::MatrixXd& Sigma, const Eigen::MatrixXd& S0,
                                                      double a, int n_agents);

/// a(B) = 1 / (2 h^2 phi_o'(0)) + eps for the tanh_clip(B) observation map.
[[nodiscard]] double example1_gain(double B, double eps, double h, const NoiseModel& m);

/// sigma_B^2 = (1 + 2 h^2 phi' eps)^2 sigma_o^2 / (8 h^4 phi'^3 eps) with a = example1_gain.
[[nodiscard]] double example1_variance(double B, double eps, double h, const NoiseModel& m);

/// a^2 sigma^2 h^2 / (2 a h^2 phi' - 1). Throws StabilityError if the denominator is not positive.
[[nodiscard]] double innovation_only_variance(double a, double sigma_sq, double phi_prime, double h);

struct Example2Params {
    double a = 1.0;
    double b = 1.0;
    double h = 1.0;
    int degree = 3;
    NoiseModel obs_noise = NoiseModel::pareto_like(2.05);
    NoiseModel aux_noise = NoiseModel::pareto_like(2.05);
};

struct Example2Terms {
    double sigma_oc = 0.0;
    double phi_c_prime = 0.0;
    double phi_o_prime = 0.0;
    double variance = 0.0;
};

/// sign/sign, d-regular scalar network:
/// (b^2 sigma_c^2 d^2 + a^2 h^2 sigma_o^2 - 2 a b h d sigma_oc) / N * sum_i 1 / (2 b phi_c' lambda_i + 2 a h^2 phi_o' - 1).
/// Throws StabilityError on a nonpositive denominator.
[[nodiscard]] Example2Terms example2_variance(double rho, const Example2Params& p, const Eigen::VectorXd& spectrum);

struct RateBoundInputs {
    double G_c = 1.0;
    double G_o = 1.0;
    double x0_norm = 0.0;        // ||x^0||
    double x0_error_norm = 0.0;  // ||x^0 - 1 (x) theta*||
    double k = 0.0;
    double a = 1.0;
    double b = 1.0;
    double delta = 0.75;
    double c_o = 1.0;  // sup |Psi_o|
    double c_c = 1.0;  // sup |Psi_c|
    int max_degree = 1;
    double H_norm = 1.0;  // max_i ||h_i||
    double S_H = 1.0;     // sum_i ||h_i||^2
    double lambda_H = 1.0;
    double lambda_2 = 1.0;
    double phi_c_prime = 1.0;
    double phi_o_prime = 1.0;
    int N = 1;
    int M = 1;
    double margin = 1e-6;
};

/// Collects the network quantities of `cfg`; k defaults to lambda_H / (4 S_H sqrt(N)).
[[nodiscard]] RateBoundInputs rate_inputs(const EstimatorConfig& cfg, const StateMatrix& x0, double phi_c_prime,
                                          double phi_o_prime, double G_c = 1.0, double G_o = 1.0,
                                          std::optional<double> k = std::nullopt);

struct RateBound {
    double exponent = 0.0;  // min of the three terms minus margin
    double term_step = 0.0;         // 2 delta - 1
    double term_innovation = 0.0;
    double term_consensus = 0.0;
};

/// Throws ParameterError when lambda_H - 2 S_H sqrt(N) k <= 0 or the result leaves (0, 1).
[[nodiscard]] RateBound mse_rate_exponent(const RateBoundInputs& in);

}  // namespace hti
