#include "hti/estimator.hpp"

#include <algorithm>
#include <limits>

#include "hti/errors.hpp"

namespace hti {

double observability_margin(const StateMatrix& regressors) {
    const Eigen::MatrixXd gram = regressors.transpose() * regressors;
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

void EstimatorConfig::validate() const {
    if (!graph) throw ParameterError("estimator config has no graph");
    const int n = agents();
    const int m = dim();
    if (m < 1) throw ParameterError("theta_star must have at least one entry");
    if (regressors.rows() != n || regressors.cols() != m)
        throw ParameterError("regressors must be N x M");
    if (!(gain_a > 0.0)) throw ParameterError("gain_a must be positive");
    if (!(gain_b > 0.0)) throw ParameterError("gain_b must be positive");
    if (!(step_delta > 0.5 && step_delta <= 1.0)) throw ParameterError("step_delta must lie in (0.5, 1]");
    if (psi_obs.size() != 1 && psi_obs.size() != static_cast<std::size_t>(n))
        throw ParameterError("psi_obs must hold one map or one per agent");
    if (!(observability_margin(regressors) > 1e-10))
        throw ParameterError("sum_i h_i h_i^T is singular (global observability fails)");
}

StepNoise make_step_noise(const EstimatorConfig& cfg) {
    const int n = cfg.agents();
    const int m = cfg.dim();
    StepNoise s;
    s.obs = Eigen::VectorXd::Zero(n);
    s.comm = StateMatrix::Zero(cfg.correlated() ? n : cfg.graph->arc_count(), m);
    if (cfg.regressor_noise) s.regressor = StateMatrix::Zero(n, m);
    return s;
}

void draw_step_noise(const EstimatorConfig& cfg, RandomStream& rng, StepNoise& noise) {
    const int n = cfg.agents();
    for (int i = 0; i < n; ++i) noise.obs[i] = cfg.obs_noise.sample(rng);
    if (cfg.regressor_noise) {
        for (Eigen::Index k = 0; k < noise.regressor.size(); ++k) noise.regressor.data()[k] = cfg.regressor_noise->sample(rng);
    }
    if (const auto* c = std::get_if<CorrelationSpec>(&cfg.comm_noise)) {
        for (int i = 0; i < n; ++i)
            for (Eigen::Index l = 0; l < noise.comm.cols(); ++l) noise.comm(i, l) = c->mix(noise.obs[i], c->aux.sample(rng));
    } else {
        const auto& m = std::get<NoiseModel>(cfg.comm_noise);
        if (m.kind() == NoiseKind::zero) {
            noise.comm.setZero();
        } else {
            for (Eigen::Index k = 0; k < noise.comm.size(); ++k) noise.comm.data()[k] = m.sample(rng);
        }
    }
}

void apply_step(const EstimatorConfig& cfg, long t, const StateMatrix& x, const StepNoise& noise, StateMatrix& next) {
    const NetworkGraph& g = *cfg.graph;
    const int n = g.size();
    const int m = cfg.dim();
    const double alpha = cfg.step_size(t);
    const double consensus_gain = alpha * cfg.gain_b / cfg.gain_a;
    const bool per_agent = cfg.correlated();
    const Nonlinearity& psi_c = cfg.psi_comm;
    next.resize(n, m);

    for (int i = 0; i < n; ++i) {
        const double* xi = x.data() + static_cast<Eigen::Index>(i) * m;
        double* out = next.data() + static_cast<Eigen::Index>(i) * m;
        std::copy(xi, xi + m, out);

        const auto nbrs = g.neighbors(i);
        const int arc0 = g.arc_offset(i);
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            const double* xj = x.data() + static_cast<Eigen::Index>(nbrs[k]) * m;
            const double* arc = noise.comm.data() + static_cast<Eigen::Index>(per_agent ? i : arc0 + static_cast<int>(k)) * m;
            for (int l = 0; l < m; ++l) out[l] -= consensus_gain * psi_c(xi[l] - xj[l] + arc[l]);
        }

        const auto hi = cfg.regressors.row(i);
        double z = noise.obs[i];
        if (noise.regressor.size() != 0) {
            z += (hi + noise.regressor.row(i)).dot(cfg.theta_star);
        } else {
            z += hi.dot(cfg.theta_star);
        }
        double fit = 0.0;
        for (int l = 0; l < m; ++l) fit += hi[l] * xi[l];
        const double step = alpha * cfg.psi_obs_at(i)(z - fit);
        for (int l = 0; l < m; ++l) out[l] += step * hi[l];
    }
}

Estimator::Estimator(const EstimatorConfig& cfg) : cfg_(cfg), noise_(make_step_noise(cfg)) {}

bool Estimator::step(EstimatorState& state, RandomStream& rng) {
    draw_step_noise(cfg_, rng, noise_);
    apply_step(cfg_, state.t, state.x, noise_, next_);
    state.x.swap(next_);
    ++state.t;
    return state.x.allFinite();
}

bool Estimator::advance(EstimatorState& state, long steps, RandomStream& rng) {
    for (long k = 0; k < steps; ++k)
        if (!step(state, rng)) return false;
    return true;
}

EstimatorState step(const EstimatorState& state, const EstimatorConfig& cfg, RandomStream& rng) {
    EstimatorState out = state;
    Estimator(cfg).step(out, rng);
    return out;
}

double per_sensor_mse(const StateMatrix& x, const Eigen::VectorXd& theta_star) {
    const auto err = x.rowwise() - theta_star.transpose();
    return err.squaredNorm() / static_cast<double>(x.rows());
}

std::vector<long> record_times(long T, long stride) {
    if (T < 1) throw ParameterError("horizon T must be at least 1");
    if (stride < 1) throw ParameterError("stride must be at least 1");
    std::vector<long> ts;
    ts.reserve(static_cast<std::size_t>((T + stride - 1) / stride + 1));
    for (long t = 0; t < T; t += stride) ts.push_back(t);
    ts.push_back(T);
    return ts;
}

MseTrajectory run(const EstimatorConfig& cfg, const StateMatrix& x0, long T, long stride, RandomStream& rng) {
    MseTrajectory traj;
    traj.t = record_times(T, stride);
    traj.per_sensor_mse.assign(traj.t.size(), std::numeric_limits<double>::infinity());

    Estimator est(cfg);
    EstimatorState state{0, x0};
    traj.per_sensor_mse[0] = per_sensor_mse(state.x, cfg.theta_star);
    for (std::size_t k = 1; k < traj.t.size(); ++k) {
        if (!est.advance(state, traj.t[k] - state.t, rng)) {
            traj.divergent = true;
            traj.diverged_at = state.t;
            break;
        }
        const double v = per_sensor_mse(state.x, cfg.theta_star);
        if (!std::isfinite(v)) {
            traj.divergent = true;
            traj.diverged_at = state.t;
            break;
        }
        traj.per_sensor_mse[k] = v;
    }
    return traj;
}

EstimatorConfig make_baseline(const EstimatorConfig& cfg, BaselineKind kind) {
    EstimatorConfig out = cfg;
    out.psi_obs = {Nonlinearity::identity()};
    if (kind == BaselineKind::lu) out.psi_comm = Nonlinearity::identity();
    out.step_delta = 1.0;
    return out;
}

}  // namespace hti
