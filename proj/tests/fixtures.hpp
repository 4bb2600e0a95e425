#pragma once

#include <memory>
#include <random>

#include "hti/asymptotics.hpp"
#include "hti/estimator.hpp"
#include "hti/graph.hpp"

namespace fixture {

inline std::shared_ptr<const hti::NetworkGraph> share(hti::NetworkGraph g) {
    return std::make_shared<const hti::NetworkGraph>(std::move(g));
}

/// M = 1, h_i = h, theta* = theta.
inline hti::EstimatorConfig scalar(hti::NetworkGraph g, hti::Nonlinearity psi_o, hti::Nonlinearity psi_c,
                                   hti::NoiseModel obs, hti::CommNoise comm, double a, double b = 1.0,
                                   double delta = 1.0, double theta = 1.0, double h = 1.0) {
    hti::EstimatorConfig cfg;
    const int n = g.size();
    cfg.graph = share(std::move(g));
    cfg.regressors = hti::StateMatrix::Constant(n, 1, h);
    cfg.theta_star = Eigen::VectorXd::Constant(1, theta);
    cfg.gain_a = a;
    cfg.gain_b = b;
    cfg.step_delta = delta;
    cfg.psi_obs = {psi_o};
    cfg.psi_comm = psi_c;
    cfg.obs_noise = obs;
    cfg.comm_noise = comm;
    return cfg;
}

/// The scalar tanh-clipped network with only observation noise and a per B.
inline hti::EstimatorConfig example1(double B, std::uint64_t graph_seed = 1, double eps = 0.1) {
    const auto m = hti::NoiseModel::pareto_like(2.05);
    return scalar(hti::build_regular(8, 3, graph_seed), hti::Nonlinearity::tanh_clip(B), hti::Nonlinearity::identity(),
                  m, hti::NoiseModel::zero(), hti::example1_gain(B, eps, 1.0, m));
}

/// N x M problem with standard normal regressors and theta* uniform on [-2, 2].
inline hti::EstimatorConfig vector_problem(hti::NetworkGraph g, int M, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    hti::EstimatorConfig cfg;
    const int n = g.size();
    cfg.graph = share(std::move(g));
    cfg.regressors.resize(n, M);
    for (Eigen::Index k = 0; k < cfg.regressors.size(); ++k) cfg.regressors.data()[k] = normal(rng);
    cfg.theta_star.resize(M);
    for (auto& v : cfg.theta_star) v = unif(rng);
    return cfg;
}

}  // namespace fixture
