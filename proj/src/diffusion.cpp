#include "hti/diffusion.hpp"

#include <limits>

#include "hti/errors.hpp"

namespace hti {

Eigen::MatrixXd closed_neighborhood_weights(const NetworkGraph& g) {
    const int n = g.size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const double w = 1.0 / (g.degree(i) + 1.0);
        a(i, i) = w;
        for (int l : g.neighbors(i)) a(l, i) = w;
    }
    return a;
}

void validate_diffusion_weights(const NetworkGraph& g, const Eigen::MatrixXd& weights) {
    const int n = g.size();
    if (weights.rows() != n || weights.cols() != n) throw ConfigError("/diffusion/weights", "must be N x N");
    const Eigen::MatrixXd support = g.adjacency() + Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) {
        double col = 0.0;
        for (int l = 0; l < n; ++l) {
            if (weights(l, i) < 0.0) throw ConfigError("/diffusion/weights", "weights must be nonnegative");
            if (weights(l, i) != 0.0 && support(l, i) == 0.0)
                throw ConfigError("/diffusion/weights", "weight outside the closed neighborhood");
            col += weights(l, i);
        }
        if (std::abs(col - 1.0) > 1e-12)
            throw ConfigError("/diffusion/weights", "column " + std::to_string(i) + " does not sum to one");
    }
}

DiffusionFilter::DiffusionFilter(const EstimatorConfig& cfg, const DiffusionConfig& dcfg)
    : cfg_(cfg), dcfg_(dcfg), noise_(make_step_noise(cfg)) {
    if (!(dcfg.mu > 0.0)) throw ConfigError("/diffusion/mu", "must be positive");
    if (!(dcfg.mu_delta >= 0.0 && dcfg.mu_delta <= 1.0)) throw ConfigError("/diffusion/mu_delta", "must lie in [0, 1]");
    weights_ = dcfg.weights ? *dcfg.weights : closed_neighborhood_weights(*cfg.graph);
    validate_diffusion_weights(*cfg.graph, weights_);
}

void DiffusionFilter::apply(long t, const StateMatrix& w, const StepNoise& noise, StateMatrix& next) {
    const NetworkGraph& g = *cfg_.graph;
    const int n = g.size();
    const double mu = dcfg_.step_size(t);
    const bool per_agent = cfg_.correlated();

    adapted_.resize(n, cfg_.dim());
    for (int i = 0; i < n; ++i) {
        const auto u = cfg_.regressors.row(i);
        double d = noise.obs[i];
        if (noise.regressor.size() != 0) {
            d += (u + noise.regressor.row(i)).dot(cfg_.theta_star);
        } else {
            d += u.dot(cfg_.theta_star);
        }
        const double e = d - u.dot(w.row(i));
        adapted_.row(i) = w.row(i) + mu * dcfg_.error_map(e) * u;
    }

    next.resize(n, cfg_.dim());
    for (int i = 0; i < n; ++i) {
        auto out = next.row(i);
        out = weights_(i, i) * adapted_.row(i);
        const auto nbrs = g.neighbors(i);
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            const int l = nbrs[k];
            const auto xi = noise.comm.row(per_agent ? i : g.arc_offset(i) + static_cast<int>(k));
            out += weights_(l, i) * (adapted_.row(l) + xi);
        }
    }
}

bool DiffusionFilter::step(EstimatorState& state, RandomStream& rng) {
    draw_step_noise(cfg_, rng, noise_);
    apply(state.t, state.x, noise_, next_);
    state.x.swap(next_);
    ++state.t;
    return state.x.allFinite();
}

EstimatorState diffusion_step(const EstimatorState& state, const EstimatorConfig& cfg, const DiffusionConfig& dcfg,
                              RandomStream& rng) {
    EstimatorState out = state;
    DiffusionFilter(cfg, dcfg).step(out, rng);
    return out;
}

MseTrajectory run_diffusion(const EstimatorConfig& cfg, const DiffusionConfig& dcfg, const StateMatrix& w0, long T,
                            long stride, RandomStream& rng) {
    MseTrajectory traj;
    traj.t = record_times(T, stride);
    traj.per_sensor_mse.assign(traj.t.size(), std::numeric_limits<double>::infinity());

    DiffusionFilter filter(cfg, dcfg);
    EstimatorState state{0, w0};
    traj.per_sensor_mse[0] = per_sensor_mse(state.x, cfg.theta_star);
    for (std::size_t k = 1; k < traj.t.size(); ++k) {
        bool finite = true;
        while (finite && state.t < traj.t[k]) finite = filter.step(state, rng);
        const double v = finite ? per_sensor_mse(state.x, cfg.theta_star) : 0.0;
        if (!finite || !std::isfinite(v)) {
            traj.divergent = true;
            traj.diverged_at = state.t;
            break;
        }
        traj.per_sensor_mse[k] = v;
    }
    return traj;
}

}  // namespace hti
