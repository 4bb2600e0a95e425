#include "hti/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <omp.h>

#include "hti/errors.hpp"

namespace hti {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int thread_count(int jobs) { return jobs > 0 ? jobs : omp_get_max_threads(); }

}  // namespace

std::string to_string(Method m) {
    switch (m) {
    case Method::proposed: return "proposed";
    case Method::lu: return "lu";
    case Method::consensus_only: return "consensus_only";
    case Method::diffusion: return "diffusion";
    }
    return "?";
}

Method method_from_string(const std::string& name) {
    for (Method m : {Method::proposed, Method::lu, Method::consensus_only, Method::diffusion})
        if (to_string(m) == name) return m;
    throw ParameterError("unknown method '" + name + "'");
}

EstimatorConfig config_for(const EstimatorConfig& base, Method method) {
    switch (method) {
    case Method::lu: return make_baseline(base, BaselineKind::lu);
    case Method::consensus_only: return make_baseline(base, BaselineKind::consensus_only);
    default: return base;
    }
}

void ExperimentPlan::validate() const {
    base.validate();
    if (replications < 1) throw ParameterError("replications must be at least 1");
    if (horizon < 1) throw ParameterError("horizon must be at least 1");
    if (stride < 1) throw ParameterError("stride must be at least 1");
    if (replication_offset < 0) throw ParameterError("replication offset must be nonnegative");
    if (x0.rows() != base.agents() || x0.cols() != base.dim()) throw ParameterError("x0 must be N x M");
}

MseTrajectory run_replication(const ExperimentPlan& plan, const EstimatorConfig& cfg, long r) {
    RandomStream rng(split_seed(plan.seed, static_cast<std::uint64_t>(plan.replication_offset + r)));
    if (plan.method == Method::diffusion)
        return run_diffusion(cfg, plan.diffusion, plan.x0, plan.horizon, plan.stride, rng);
    return run(cfg, plan.x0, plan.horizon, plan.stride, rng);
}

std::vector<MseTrajectory> monte_carlo_runs(const ExperimentPlan& plan, int jobs) {
    plan.validate();
    const EstimatorConfig cfg = config_for(plan.base, plan.method);
    std::vector<MseTrajectory> runs(static_cast<std::size_t>(plan.replications));
    const int threads = thread_count(jobs);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long r = 0; r < plan.replications; ++r) runs[static_cast<std::size_t>(r)] = run_replication(plan, cfg, r);
    return runs;
}

std::vector<MseTrajectory> monte_carlo_runs_serial(const ExperimentPlan& plan) {
    plan.validate();
    const EstimatorConfig cfg = config_for(plan.base, plan.method);
    std::vector<MseTrajectory> runs;
    runs.reserve(static_cast<std::size_t>(plan.replications));
    for (long r = 0; r < plan.replications; ++r) runs.push_back(run_replication(plan, cfg, r));
    return runs;
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return kInf;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return frac == 0.0 ? v[lo] : v[lo] + frac * (v[hi] - v[lo]);
}

MonteCarloSummary aggregate(const std::vector<MseTrajectory>& runs) {
    MonteCarloSummary s;
    s.replications = static_cast<long>(runs.size());
    if (runs.empty()) return s;
    s.t = runs.front().t;
    for (const auto& r : runs) {
        if (r.t != s.t) throw ParameterError("trajectories recorded on different time grids");
        if (r.divergent) ++s.divergent;
    }
    const std::size_t len = s.t.size();
    s.mean.assign(len, kInf);
    s.median.assign(len, kInf);
    s.q10.assign(len, kInf);
    s.q90.assign(len, kInf);
    std::vector<double> column;
    for (std::size_t k = 0; k < len; ++k) {
        column.clear();
        for (const auto& r : runs)
            if (!r.divergent) column.push_back(r.per_sensor_mse[k]);
        if (column.empty()) continue;
        double sum = 0.0;
        for (double v : column) sum += v;
        s.mean[k] = sum / static_cast<double>(column.size());
        s.median[k] = quantile(column, 0.5);
        s.q10[k] = quantile(column, 0.1);
        s.q90[k] = quantile(column, 0.9);
    }
    return s;
}

MonteCarloSummary monte_carlo(const ExperimentPlan& plan, int jobs) { return aggregate(monte_carlo_runs(plan, jobs)); }

void validate_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw ParameterError("sweep grid is empty");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw ParameterError("sweep grid must be strictly increasing");
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (points < 1 || !(lo > 0.0) || !(hi >= lo)) throw ParameterError("log grid needs 0 < lo <= hi and points >= 1");
    if (points == 1) return {lo};
    std::vector<double> g(static_cast<std::size_t>(points));
    const double step = std::log(hi / lo) / (points - 1);
    for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = lo * std::exp(step * k);
    g.back() = hi;
    return g;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
    if (points < 1 || !(hi >= lo)) throw ParameterError("linear grid needs lo <= hi and points >= 1");
    if (points == 1) return {lo};
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k)
        g[static_cast<std::size_t>(k)] = (lo * (points - 1 - k) + hi * k) / (points - 1);
    g.front() = lo;
    g.back() = hi;
    return g;
}

SweepResult analyze_curve(std::vector<double> axis, std::vector<double> values) {
    SweepResult r;
    r.axis = std::move(axis);
    r.values = std::move(values);
    const std::size_t n = r.values.size();
    r.argmin = static_cast<std::size_t>(std::min_element(r.values.begin(), r.values.end()) - r.values.begin());
    r.argmin_on_boundary = r.argmin == 0 || r.argmin + 1 == n;
    // Flat steps carry the previous slope sign so plateaus count once.
    int prev = 0;
    std::size_t prev_at = 0;
    for (std::size_t k = 1; k < n; ++k) {
        const double diff = r.values[k] - r.values[k - 1];
        const int sgn = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
        if (sgn == 0) continue;
        if (prev > 0 && sgn < 0) r.local_maxima.push_back(prev_at);
        if (prev < 0 && sgn > 0) r.local_minima.push_back(prev_at);
        prev = sgn;
        prev_at = k;
    }
    return r;
}

SweepResult sweep_B(const std::vector<double>& grid, const Example1Params& p, int jobs) {
    validate_grid(grid);
    std::vector<double> values(grid.size());
    const int threads = thread_count(jobs);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::size_t k = 0; k < grid.size(); ++k) values[k] = example1_variance(grid[k], p.eps, p.h, p.obs_noise);
    return analyze_curve(grid, std::move(values));
}

SweepResult sweep_B_serial(const std::vector<double>& grid, const Example1Params& p) {
    validate_grid(grid);
    std::vector<double> values;
    values.reserve(grid.size());
    for (double B : grid) values.push_back(example1_variance(B, p.eps, p.h, p.obs_noise));
    return analyze_curve(grid, std::move(values));
}

SweepResult sweep_B_monte_carlo(const std::vector<double>& grid, const ExperimentPlan& plan, int jobs) {
    validate_grid(grid);
    std::vector<double> values;
    values.reserve(grid.size());
    for (double B : grid) {
        ExperimentPlan p = plan;
        p.base.psi_obs = {Nonlinearity::tanh_clip(B)};
        values.push_back(monte_carlo(p, jobs).median.back());
    }
    return analyze_curve(grid, std::move(values));
}

namespace {

void validate_rho_grid(const std::vector<double>& grid) {
    validate_grid(grid);
    if (!(grid.front() > -1.0 && grid.back() < 1.0)) throw ParameterError("rho grid must lie inside (-1, 1)");
}

}  // namespace

SweepResult sweep_rho(const std::vector<double>& grid, const Example2Params& p, const Eigen::VectorXd& spectrum,
                      int jobs) {
    validate_rho_grid(grid);
    std::vector<double> values(grid.size());
    const int threads = thread_count(jobs);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::size_t k = 0; k < grid.size(); ++k) values[k] = example2_variance(grid[k], p, spectrum).variance;
    return analyze_curve(grid, std::move(values));
}

SweepResult sweep_rho_serial(const std::vector<double>& grid, const Example2Params& p,
                             const Eigen::VectorXd& spectrum) {
    validate_rho_grid(grid);
    std::vector<double> values;
    values.reserve(grid.size());
    for (double rho : grid) values.push_back(example2_variance(rho, p, spectrum).variance);
    return analyze_curve(grid, std::move(values));
}

double estimate_decay_exponent(const std::vector<long>& t, const std::vector<double>& mse, double window) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    if (t.empty() || t.size() != mse.size() || !(window > 0.0 && window <= 1.0)) return nan;
    const double start = (1.0 - window) * static_cast<double>(t.back());
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] <= 0 || static_cast<double>(t[k]) < start) continue;
        if (!std::isfinite(mse[k]) || !(mse[k] > 0.0)) return nan;
        xs.push_back(std::log(static_cast<double>(t[k])));
        ys.push_back(std::log(mse[k]));
    }
    if (xs.size() < 2) return nan;
    // Centered sums avoid the cancellation of the one-pass normal equations.
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
    }
    return sxx > 0.0 ? sxy / sxx : nan;
}

double estimate_decay_exponent(const MseTrajectory& traj, double window) {
    if (traj.divergent) return std::numeric_limits<double>::quiet_NaN();
    return estimate_decay_exponent(traj.t, traj.per_sensor_mse, window);
}

std::vector<ProbeOutcome> divergence_probe(const ExperimentPlan& plan, const std::vector<Method>& methods, int jobs) {
    std::vector<ProbeOutcome> out;
    for (Method m : methods) {
        ExperimentPlan p = plan;
        p.method = m;
        const auto runs = monte_carlo_runs(p, jobs);
        ProbeOutcome o;
        o.method = m;
        std::vector<double> finals, initials;
        long blown = 0;
        for (const auto& r : runs) {
            finals.push_back(r.final_value());
            initials.push_back(r.initial());
            if (r.divergent || !(r.final_value() <= 10.0 * r.initial())) ++blown;
        }
        o.divergence_fraction = static_cast<double>(blown) / static_cast<double>(runs.size());
        o.median_final = quantile(finals, 0.5);
        o.median_initial = quantile(initials, 0.5);
        o.summary = aggregate(runs);
        out.push_back(std::move(o));
    }
    return out;
}

}  // namespace hti
