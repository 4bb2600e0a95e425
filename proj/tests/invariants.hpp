#pragma once

// Property checks shared by the unit suites and the acceptance runner. Each
// returns the worst observed deviation so callers choose how to report it.

#include <algorithm>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "fixtures.hpp"
#include "hti/estimator.hpp"
#include "hti/nonlinearity.hpp"
#include "oracles.hpp"

namespace invariant {

using namespace hti;

/// States x^0..x^T and the noise consumed by each step.
inline std::pair<std::vector<StateMatrix>, std::vector<StepNoise>> trace(const EstimatorConfig& cfg,
                                                                         const StateMatrix& x0, long T,
                                                                         std::uint64_t seed) {
    RandomStream rng(seed);
    std::vector<StateMatrix> xs{x0};
    std::vector<StepNoise> ns;
    StepNoise noise = make_step_noise(cfg);
    StateMatrix next;
    for (long t = 0; t < T; ++t) {
        draw_step_noise(cfg, rng, noise);
        apply_step(cfg, t, xs.back(), noise, next);
        xs.push_back(next);
        ns.push_back(noise);
    }
    return {xs, ns};
}

inline NetworkGraph relabel(const NetworkGraph& g, const std::vector<int>& pi) {
    std::vector<NetworkGraph::Edge> edges;
    for (const auto& [i, j] : g.edges()) edges.emplace_back(pi[i], pi[j]);
    return {g.size(), std::move(edges)};
}

inline int arc_index(const NetworkGraph& g, int i, int j) {
    const auto nb = g.neighbors(i);
    return g.arc_offset(i) + static_cast<int>(std::lower_bound(nb.begin(), nb.end(), j) - nb.begin());
}

/// Relabels agents by a random permutation, maps every noise draw to its new
/// agent or arc, and returns max_t,i |y_pi(i) - x_i| / (1 + |x_i|).
inline double permutation_deviation(const EstimatorConfig& cfg, std::uint64_t seed, long T = 60) {
    const int n = cfg.agents();
    const int M = cfg.dim();
    std::vector<int> pi(static_cast<std::size_t>(n));
    std::iota(pi.begin(), pi.end(), 0);
    std::shuffle(pi.begin(), pi.end(), std::mt19937_64(seed));

    EstimatorConfig perm = cfg;
    perm.graph = fixture::share(relabel(*cfg.graph, pi));
    for (int i = 0; i < n; ++i) perm.regressors.row(pi[i]) = cfg.regressors.row(i);

    StateMatrix x0(n, M), y(n, M), next;
    std::mt19937_64 rng(seed + 1);
    std::normal_distribution<double> normal(0.0, 3.0);
    for (Eigen::Index k = 0; k < x0.size(); ++k) x0.data()[k] = normal(rng);
    for (int i = 0; i < n; ++i) y.row(pi[i]) = x0.row(i);

    const auto [xs, ns] = trace(cfg, x0, T, seed + 2);
    StepNoise pn = make_step_noise(perm);
    double worst = 0.0;
    for (long t = 0; t < T; ++t) {
        const StepNoise& s = ns[static_cast<std::size_t>(t)];
        for (int i = 0; i < n; ++i) {
            pn.obs[pi[i]] = s.obs[i];
            if (cfg.correlated()) {
                pn.comm.row(pi[i]) = s.comm.row(i);
            } else {
                const auto nb = cfg.graph->neighbors(i);
                for (std::size_t k = 0; k < nb.size(); ++k)
                    pn.comm.row(arc_index(*perm.graph, pi[i], pi[nb[k]])) =
                        s.comm.row(cfg.graph->arc_offset(i) + static_cast<int>(k));
            }
        }
        apply_step(perm, t, y, pn, next);
        y.swap(next);
        const StateMatrix& x = xs[static_cast<std::size_t>(t + 1)];
        for (int i = 0; i < n; ++i) {
            const double scale = 1.0 + x.row(i).cwiseAbs().maxCoeff();
            worst = std::max(worst, (y.row(pi[i]) - x.row(i)).cwiseAbs().maxCoeff() / scale);
        }
    }
    return worst;
}

/// Negates theta*, x^0 and every noise draw; returns max |y^t + x^t| (zero when exact).
inline double odd_symmetry_deviation(const EstimatorConfig& cfg, const StateMatrix& x0, std::uint64_t seed,
                                     long T = 200) {
    auto neg = cfg;
    neg.theta_star = -cfg.theta_star;
    const auto [xs, ns] = trace(cfg, x0, T, seed);
    StateMatrix y = -x0, next;
    double worst = 0.0;
    for (long t = 0; t < T; ++t) {
        StepNoise s = ns[static_cast<std::size_t>(t)];
        s.obs = -s.obs;
        s.comm = -s.comm;
        apply_step(neg, t, y, s, next);
        y.swap(next);
        worst = std::max(worst, (y + xs[static_cast<std::size_t>(t + 1)]).cwiseAbs().maxCoeff());
    }
    return worst;
}

/// Kolmogorov-Smirnov distance of n pareto-like draws from the closed-form CDF.
inline double ks_pareto(double beta, std::uint64_t seed, int n) {
    const auto m = NoiseModel::pareto_like(beta);
    RandomStream rng(seed);
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (auto& x : xs) x = m.sample(rng);
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (int k = 0; k < n; ++k) {
        const double F = oracle::pareto_cdf(beta, xs[static_cast<std::size_t>(k)]);
        d = std::max({d, std::abs(F - static_cast<double>(k) / n), std::abs(F - static_cast<double>(k + 1) / n)});
    }
    return d;
}

inline std::vector<Nonlinearity> sample_maps() {
    return {Nonlinearity::identity(), Nonlinearity::sign(), Nonlinearity::tanh_clip(0.5),
            Nonlinearity::tanh_clip(5.0), Nonlinearity::hard_clip(1.0)};
}

inline std::vector<NoiseModel> sample_densities() {
    return {NoiseModel::pareto_like(2.05), NoiseModel::pareto_like(3.5), NoiseModel::gaussian(1.0)};
}

struct SmoothingReport {
    double oddness = 0.0;          // max |phi(-a) + phi(a)|
    double monotonicity = 0.0;     // max decrease of phi along a sorted random grid
    double finite_difference = 0.0;  // max relative gap between phi'(0) and its central difference
};

inline SmoothingReport smoothing_properties(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    SmoothingReport r;
    for (const auto& psi : sample_maps()) {
        for (const auto& m : sample_densities()) {
            for (int k = 0; k < 50; ++k) {
                const double a = unif(rng);
                r.oddness = std::max(r.oddness, std::abs(phi(psi, m, -a) + phi(psi, m, a)));
            }
            std::vector<double> grid(40);
            for (auto& a : grid) a = unif(rng);
            std::sort(grid.begin(), grid.end());
            for (std::size_t k = 1; k < grid.size(); ++k)
                r.monotonicity = std::max(r.monotonicity, phi(psi, m, grid[k - 1]) - phi(psi, m, grid[k]));
            const double h = 1e-4;
            const double fd = (phi(psi, m, h) - phi(psi, m, -h)) / (2.0 * h);
            const double exact = phi_prime_zero(psi, m);
            r.finite_difference = std::max(r.finite_difference, std::abs(fd - exact) / exact);
        }
    }
    return r;
}

/// True when phi'(0) and sigma^2 of tanh_clip(B) increase along B in {0.1, 0.5, 1, 2, 5, 10}.
inline bool clipping_monotone(const NoiseModel& m) {
    double d = 0.0, v = 0.0;
    for (double B : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        const auto s = effective_statistics(Nonlinearity::tanh_clip(B), m);
        if (!(s.phi_prime_zero > d && s.sigma_sq > v)) return false;
        d = s.phi_prime_zero;
        v = s.sigma_sq;
    }
    return true;
}

/// max |trace(L) - 2|E|| / 2|E| over the given graphs.
inline double trace_identity_deviation(const std::vector<NetworkGraph>& graphs) {
    double worst = 0.0;
    for (const auto& g : graphs) {
        const double e2 = 2.0 * static_cast<double>(g.edges().size());
        worst = std::max(worst, std::abs(g.laplacian_spectrum().sum() - e2) / e2);
    }
    return worst;
}

}  // namespace invariant
