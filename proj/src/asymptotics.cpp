#include "hti/asymptotics.hpp"

#include <cmath>

#include "hti/errors.hpp"
#include "hti/nonlinearity.hpp"

namespace hti {

SigmaMatrix build_sigma(const EstimatorConfig& cfg, double phi_c_prime0, const Eigen::VectorXd& phi_o_prime0) {
    const int n = cfg.agents();
    const int m = cfg.dim();
    const int nm = n * m;
    if (phi_o_prime0.size() != n) throw ParameterError("one phi_o'(0) per agent required");

    const Eigen::MatrixXd L = cfg.graph->laplacian();
    Eigen::MatrixXd sigma = 0.5 * Eigen::MatrixXd::Identity(nm, nm);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (L(i, j) == 0.0) continue;
            for (int l = 0; l < m; ++l) sigma(i * m + l, j * m + l) -= cfg.gain_b * phi_c_prime0 * L(i, j);
        }
        const Eigen::VectorXd h = cfg.regressors.row(i).transpose();
        sigma.block(i * m, i * m, m, m) -= cfg.gain_a * phi_o_prime0[i] * h * h.transpose();
    }

    SigmaMatrix out;
    out.max_eigenvalue =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sigma, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    out.stable = out.max_eigenvalue < 0.0;
    out.matrix = std::move(sigma);
    return out;
}

SigmaMatrix build_sigma(const EstimatorConfig& cfg, double phi_c_prime0, double phi_o_prime0) {
    return build_sigma(cfg, phi_c_prime0, Eigen::VectorXd::Constant(cfg.agents(), phi_o_prime0));
}

Eigen::MatrixXd build_s0(const EstimatorConfig& cfg, double sigma_c_sq, double sigma_o_sq,
                         std::optional<double> sigma_oc) {
    if (sigma_c_sq == kInfiniteVariance || sigma_o_sq == kInfiniteVariance)
        throw ParameterError("effective variance is infinite; asymptotic covariance undefined");
    const int n = cfg.agents();
    const int m = cfg.dim();
    const double ratio = cfg.gain_b / cfg.gain_a;
    Eigen::MatrixXd s0 = Eigen::MatrixXd::Zero(n * m, n * m);

    if (sigma_oc) {
        if (m != 1) throw ParameterError("scalar cross-covariance model needs M = 1");
        for (int i = 0; i < n; ++i) {
            const double d = cfg.graph->degree(i);
            const double h = cfg.regressors(i, 0);
            s0(i, i) = ratio * ratio * sigma_c_sq * d * d + sigma_o_sq * h * h - 2.0 * ratio * h * d * *sigma_oc;
        }
        return s0;
    }

    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd h = cfg.regressors.row(i).transpose();
        auto block = s0.block(i * m, i * m, m, m);
        block = sigma_o_sq * h * h.transpose();
        block.diagonal().array() += ratio * ratio * sigma_c_sq * cfg.graph->degree(i);
    }
    return s0;
}

AsymptoticsResult asymptotic_covariance(const Eigen::MatrixXd& Sigma, const Eigen::MatrixXd& S0, double a,
                                        int n_agents) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Sigma);
    const Eigen::VectorXd& lam = eig.eigenvalues();
    if (!(lam.maxCoeff() < 0.0))
        throw StabilityError("Sigma is not stable (max eigenvalue " + std::to_string(lam.maxCoeff()) + ")");

    const Eigen::MatrixXd& V = eig.eigenvectors();
    const Eigen::MatrixXd rhs = a * a * S0;
    Eigen::MatrixXd hat = V.transpose() * rhs * V;
    for (Eigen::Index i = 0; i < hat.rows(); ++i)
        for (Eigen::Index j = 0; j < hat.cols(); ++j) hat(i, j) /= -(lam[i] + lam[j]);

    AsymptoticsResult r;
    r.S = V * hat * V.transpose();
    r.S = 0.5 * (r.S + r.S.transpose());
    r.Sigma = Sigma;
    r.S0 = S0;
    r.per_agent_variance = r.S.trace() / n_agents;
    const double scale = rhs.norm();
    const double err = (Sigma * r.S + r.S * Sigma.transpose() + rhs).norm();
    r.residual = scale > 0.0 ? err / scale : err;
    return r;
}

double example1_gain(double B, double eps, double h, const NoiseModel& m) {
    const double phi_p = phi_prime_zero(Nonlinearity::tanh_clip(B), m);
    return 1.0 / (2.0 * h * h * phi_p) + eps;
}

double example1_variance(double B, double eps, double h, const NoiseModel& m) {
    if (!(eps > 0.0)) throw ParameterError("eps must be positive");
    const auto psi = Nonlinearity::tanh_clip(B);
    const double phi_p = phi_prime_zero(psi, m);
    const double s2 = effective_variance(psi, m);
    const double g = 1.0 + 2.0 * h * h * phi_p * eps;
    return g * g * s2 / (8.0 * std::pow(h, 4) * std::pow(phi_p, 3) * eps);
}

double innovation_only_variance(double a, double sigma_sq, double phi_prime, double h) {
    const double den = 2.0 * a * h * h * phi_prime - 1.0;
    if (!(den > 0.0)) throw StabilityError("a is below 1 / (2 h^2 phi'(0))");
    return a * a * sigma_sq * h * h / den;
}

Example2Terms example2_variance(double rho, const Example2Params& p, const Eigen::VectorXd& spectrum) {
    const auto sign = Nonlinearity::sign();
    const CorrelationSpec spec(rho, p.aux_noise);
    Example2Terms t;
    t.sigma_oc = cross_covariance(sign, sign, spec, p.obs_noise);
    t.phi_c_prime = phi_c_prime_zero_correlated(sign, spec, p.obs_noise);
    t.phi_o_prime = phi_prime_zero(sign, p.obs_noise);
    // sigma_o^2 = sigma_c^2 = 1 for the sign map.
    const double d = p.degree;
    const double num = p.b * p.b * d * d + p.a * p.a * p.h * p.h - 2.0 * p.a * p.b * p.h * d * t.sigma_oc;
    const auto n = spectrum.size();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double den = 2.0 * p.b * t.phi_c_prime * spectrum[i] + 2.0 * p.a * p.h * p.h * t.phi_o_prime - 1.0;
        if (!(den > 0.0)) throw StabilityError("nonpositive denominator in the spectral sum");
        sum += 1.0 / den;
    }
    t.variance = num / static_cast<double>(n) * sum;
    return t;
}

RateBoundInputs rate_inputs(const EstimatorConfig& cfg, const StateMatrix& x0, double phi_c_prime,
                            double phi_o_prime, double G_c, double G_o, std::optional<double> k) {
    RateBoundInputs in;
    in.G_c = G_c;
    in.G_o = G_o;
    in.x0_norm = x0.norm();
    in.x0_error_norm = (x0.rowwise() - cfg.theta_star.transpose()).norm();
    in.a = cfg.gain_a;
    in.b = cfg.gain_b;
    in.delta = cfg.step_delta;
    in.c_c = cfg.psi_comm.bound();
    in.c_o = 0.0;
    for (const auto& psi : cfg.psi_obs) in.c_o = std::max(in.c_o, psi.bound());
    in.max_degree = cfg.graph->max_degree();
    const Eigen::VectorXd row_norms = cfg.regressors.rowwise().norm();
    in.H_norm = row_norms.maxCoeff();
    in.S_H = row_norms.squaredNorm();
    in.lambda_H = observability_margin(cfg.regressors);
    in.lambda_2 = cfg.graph->algebraic_connectivity();
    in.phi_c_prime = phi_c_prime;
    in.phi_o_prime = phi_o_prime;
    in.N = cfg.agents();
    in.M = cfg.dim();
    in.k = k ? *k : in.lambda_H / (4.0 * in.S_H * std::sqrt(static_cast<double>(in.N)));
    return in;
}

RateBound mse_rate_exponent(const RateBoundInputs& in) {
    const double sqrtN = std::sqrt(static_cast<double>(in.N));
    const double gap = in.lambda_H - 2.0 * in.S_H * sqrtN * in.k;
    if (!(in.k > 0.0) || !(gap > 0.0)) throw ParameterError("k must satisfy 0 < k < lambda_H / (2 S_H sqrt(N))");
    if (!(in.delta > 0.5 && in.delta < 1.0)) throw ParameterError("rate bound needs delta in (0.5, 1)");
    if (!(in.G_c > 0.0 && in.G_o > 0.0)) throw ParameterError("G_c and G_o must be positive");

    const double drift = in.b * std::sqrt(static_cast<double>(in.M) * in.N) * in.max_degree * in.c_c +
                         in.a * in.H_norm * sqrtN * in.c_o;
    RateBound r;
    r.term_step = 2.0 * in.delta - 1.0;
    r.term_innovation = in.phi_o_prime * in.G_o * in.a * (1.0 - in.delta) * gap /
                        (in.H_norm * in.N * (in.x0_error_norm + drift));
    r.term_consensus = in.b * in.phi_c_prime * in.G_c * (1.0 - in.delta) * in.lambda_2 * in.k * in.k /
                       (2.0 * (in.k * in.k + 1.0) * (in.x0_norm + drift));
    r.exponent = std::min({r.term_step, r.term_innovation, r.term_consensus}) - in.margin;
    if (!(r.exponent > 0.0 && r.exponent < 1.0))
        throw ParameterError("rate exponent " + std::to_string(r.exponent) + " outside (0, 1)");
    return r;
}

}  // namespace hti
