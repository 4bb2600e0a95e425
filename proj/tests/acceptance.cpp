// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance [--jobs N] [criterion ...]
//
// With no criteria listed all seven run. Exit status is 1 if any listed
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "fixtures.hpp"
#include "hti/asymptotics.hpp"
#include "hti/config.hpp"
#include "hti/experiment.hpp"
#include "invariants.hpp"

using namespace hti;

namespace {

const std::filesystem::path kConfigs = HTI_CONFIG_DIR;

struct Verdict {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    const char* title;
    double budget_s;  // enforced wall-clock limit; 0 for none
    std::function<Verdict(int)> run;
};

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

Config load(const char* name) { return parse_config(read_json_file((kConfigs / name).string())); }

Verdict example1_optimum(int jobs) {
    const auto r = sweep_B(log_grid(0.05, 20.0, 200), Example1Params{}, jobs);
    const double b = r.axis[r.argmin];
    Verdict v;
    v.pass = !r.argmin_on_boundary && b >= 0.55 && b <= 0.75;
    v.detail = "argmin B = " + fixed(b) + (r.argmin_on_boundary ? " on the grid boundary" : " interior") +
               ", sigma_B^2 = " + fixed(r.values[r.argmin], 6) + "; need interior B in [0.55, 0.75]";
    return v;
}

Verdict example2_shape(int jobs) {
    const Config c = load("ex2_rhosweep.json");
    const auto r = sweep_rho(linear_grid(-0.99, 0.99, 199), c.sweep_rho->params, c.graph->laplacian_spectrum(), jobs);
    const bool right_end = r.argmin + 1 == r.values.size();
    bool maxima_ok = r.local_maxima.size() == 2;
    std::string where;
    for (auto k : r.local_maxima) where += (where.empty() ? "" : ", ") + fixed(r.axis[k], 3);
    if (maxima_ok) {
        maxima_ok = std::abs(r.axis[r.local_maxima[0]] + 0.88) <= 0.05 + 1e-12 &&
                    std::abs(r.axis[r.local_maxima[1]] - 0.31) <= 0.05 + 1e-12;
    }
    Verdict v;
    v.pass = right_end && maxima_ok;
    v.detail = "argmin rho = " + fixed(r.axis[r.argmin], 3) + ", interior maxima at {" + where +
               "}; need argmin 0.99 and two maxima within 0.05 of -0.88 and 0.31";
    return v;
}

Verdict lyapunov_consistency(int) {
    const Config c = load("ex1_bsweep.json");
    const auto m = c.estimator->obs_noise;
    double worst_gap = 0.0, worst_residual = 0.0;
    for (double B : {0.1, 0.3, 0.65, 1.0, 3.0, 10.0}) {
        EstimatorConfig cfg = *c.estimator;
        cfg.gain_a = example1_gain(B, 0.1, 1.0, m);
        cfg.psi_obs = {Nonlinearity::tanh_clip(B)};
        const auto s = effective_statistics(cfg.psi_obs.front(), m);
        const auto s0 = build_s0(cfg, 0.0, s.sigma_sq);
        const auto innov = asymptotic_covariance(build_sigma(cfg, 0.0, s.phi_prime_zero).matrix, s0, cfg.gain_a, 8);
        const auto full = asymptotic_covariance(build_sigma(cfg, 1.0, s.phi_prime_zero).matrix, s0, cfg.gain_a, 8);
        const double closed = example1_variance(B, 0.1, 1.0, m);
        worst_gap = std::max(worst_gap, std::abs(innov.per_agent_variance - closed) / closed);
        worst_residual = std::max({worst_residual, innov.residual, full.residual});
    }
    Verdict v;
    v.pass = worst_gap <= 1e-8 && worst_residual <= 1e-10;
    v.detail = "max relative gap to closed form " + fixed(worst_gap, 3) + " (need <= 1e-8), max residual " +
               fixed(worst_residual, 3) + " (need <= 1e-10)";
    return v;
}

Verdict baseline_divergence(int jobs) {
    const Config c = load("fig3_compare.json");
    ExperimentPlan plan = c.plan();
    plan.replications = 100;
    plan.horizon = 10000;
    const auto out = divergence_probe(plan, {Method::proposed, Method::lu, Method::consensus_only, Method::diffusion}, jobs);
    std::map<Method, ProbeOutcome> by;
    std::ostringstream d;
    for (const auto& o : out) {
        by[o.method] = o;
        d << to_string(o.method) << ": median final/initial " << fixed(o.median_final / o.median_initial, 3)
          << ", divergence " << fixed(o.divergence_fraction, 3) << "; ";
    }
    const auto fails = [&](Method m) {
        const auto& o = by.at(m);
        return o.divergence_fraction > 0.5 || o.median_final >= o.median_initial;
    };
    const bool proposed_ok = by.at(Method::proposed).median_final < 0.1 * by.at(Method::proposed).median_initial;
    Verdict v;
    v.pass = proposed_ok && fails(Method::lu) && fails(Method::consensus_only);
    d << "need proposed < 0.1 and lu, consensus_only divergent (>0.5) or ratio >= 1; diffusion reported only";
    v.detail = d.str();
    return v;
}

Verdict decay_slope(int jobs) {
    const Config c = load("fig4_rate.json");
    ExperimentPlan plan = c.plan();
    plan.replications = 100;
    plan.horizon = 100000;
    const auto s = monte_carlo(plan, jobs);
    const double slope = estimate_decay_exponent(s.t, s.median, 0.5);
    Verdict v;
    v.pass = slope <= -0.4;
    v.detail = "trailing-half slope of median MSE " + fixed(slope) + " (need <= -0.4), final median " +
               fixed(s.median.back()) + ", divergent " + std::to_string(s.divergent) + "/100";
    return v;
}

Verdict asymptotic_normality(int jobs) {
    const auto m = NoiseModel::pareto_like(4.0);
    const auto sign = Nonlinearity::sign();
    const auto cfg = fixture::scalar(build_regular(8, 3, 1), sign, sign, m, m, 1.0);
    const auto st = effective_statistics(sign, m);
    const auto theory = asymptotic_covariance(build_sigma(cfg, st.phi_prime_zero, st.phi_prime_zero).matrix,
                                              build_s0(cfg, st.sigma_sq, st.sigma_sq), cfg.gain_a, 8);

    constexpr long R = 2000;
    constexpr long T = 100000;
    const int n = cfg.agents();
    std::vector<double> err(static_cast<std::size_t>(R * n));
    std::vector<char> finite(static_cast<std::size_t>(R), 1);
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long r = 0; r < R; ++r) {
        RandomStream rng(split_seed(606, static_cast<std::uint64_t>(r)));
        Estimator est(cfg);
        EstimatorState state{0, StateMatrix::Zero(n, 1)};
        finite[static_cast<std::size_t>(r)] = est.advance(state, T, rng) ? 1 : 0;
        for (int i = 0; i < n; ++i)
            err[static_cast<std::size_t>(r * n + i)] = std::sqrt(static_cast<double>(T)) * (state.x(i, 0) - 1.0);
    }
    double avg = 0.0;
    for (int i = 0; i < n; ++i) {
        double mean = 0.0;
        for (long r = 0; r < R; ++r) mean += err[static_cast<std::size_t>(r * n + i)];
        mean /= R;
        double var = 0.0;
        for (long r = 0; r < R; ++r) {
            const double e = err[static_cast<std::size_t>(r * n + i)] - mean;
            var += e * e;
        }
        avg += var / (R - 1);
    }
    avg /= n;
    const long bad = static_cast<long>(std::count(finite.begin(), finite.end(), 0));
    const double rel = std::abs(avg - theory.per_agent_variance) / theory.per_agent_variance;
    Verdict v;
    v.pass = bad == 0 && rel <= 0.25;
    v.detail = "empirical " + fixed(avg) + " vs trace(S)/N " + fixed(theory.per_agent_variance) + ", relative gap " +
               fixed(rel, 3) + " (need <= 0.25)";
    return v;
}

Verdict invariant_suites(int) {
    std::vector<std::string> failed;
    std::ostringstream d;

    const auto sm = invariant::smoothing_properties(7);
    if (sm.oddness > 1e-9) failed.push_back("phi oddness");
    if (sm.monotonicity > 1e-9) failed.push_back("phi monotonicity");
    if (sm.finite_difference > 1e-3) failed.push_back("phi'(0) finite difference");
    d << "phi: odd " << fixed(sm.oddness, 2) << ", mono " << fixed(sm.monotonicity, 2) << ", fd "
      << fixed(sm.finite_difference, 2) << "; ";

    for (const auto& m : invariant::sample_densities())
        if (!invariant::clipping_monotone(m)) failed.push_back("monotone in B for " + m.describe());

    double ks = 0.0;
    for (double beta : {2.05, 3.0, 5.0}) ks = std::max(ks, invariant::ks_pareto(beta, 4242, 100000));
    if (ks >= 0.01) failed.push_back("KS");
    d << "KS " << fixed(ks, 3) << "; ";

    double odd = 0.0, perm = 0.0;
    for (bool correlated : {false, true}) {
        auto cfg = fixture::vector_problem(build_random_geometric(12, 0.5, 5), 2, 17);
        cfg.psi_obs = {Nonlinearity::tanh_clip(3.0)};
        cfg.psi_comm = Nonlinearity::hard_clip(1.0);
        cfg.obs_noise = NoiseModel::pareto_like(2.05);
        cfg.comm_noise = correlated ? CommNoise(CorrelationSpec(0.6, NoiseModel::pareto_like(2.05)))
                                    : CommNoise(NoiseModel::pareto_like(2.05));
        odd = std::max(odd, invariant::odd_symmetry_deviation(cfg, StateMatrix::Constant(12, 2, 0.3), 99));
        perm = std::max(perm, invariant::permutation_deviation(cfg, 31));
    }
    if (odd != 0.0) failed.push_back("odd symmetry");
    if (perm > 1e-12) failed.push_back("permutation equivariance");
    d << "odd " << fixed(odd, 2) << ", perm " << fixed(perm, 2) << "; ";

    std::vector<NetworkGraph> graphs{complete_graph(6), cycle_graph(9)};
    for (std::uint64_t s = 1; s <= 5; ++s) {
        graphs.push_back(build_regular(12, 3, s));
        graphs.push_back(build_random_geometric(40, 0.3, s));
    }
    const double tr = invariant::trace_identity_deviation(graphs);
    if (tr > 1e-12) failed.push_back("trace identity");
    d << "trace " << fixed(tr, 2);

    Verdict v;
    v.pass = failed.empty();
    if (!failed.empty()) {
        d << "; failed:";
        for (const auto& f : failed) d << " " << f;
    }
    v.detail = d.str();
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, Criterion> criteria = {
        {1, {"example-1 clipping optimum", 30.0, example1_optimum}},
        {2, {"example-2 correlation curve shape", 60.0, example2_shape}},
        {3, {"covariance solve vs closed form", 5.0, lyapunov_consistency}},
        {4, {"linear baselines diverge", 0.0, baseline_divergence}},
        {5, {"MSE decay slope", 0.0, decay_slope}},
        {6, {"asymptotic normality spot check", 0.0, asymptotic_normality}},
        {7, {"invariant suites", 60.0, invariant_suites}},
    };

    int jobs = 0;
    std::vector<int> selected;
    for (int k = 1; k < argc; ++k) {
        const std::string a = argv[k];
        if (a == "--jobs" && k + 1 < argc) {
            jobs = std::atoi(argv[++k]);
        } else if (criteria.count(std::atoi(a.c_str()))) {
            selected.push_back(std::atoi(a.c_str()));
        } else {
            std::cerr << "usage: acceptance [--jobs N] [1-7 ...]\n";
            return 2;
        }
    }
    if (selected.empty())
        for (const auto& [id, _] : criteria) selected.push_back(id);

    bool all = true;
    for (int id : selected) {
        const auto& c = criteria.at(id);
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run(jobs);
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0.0 && secs > c.budget_s) {
            v.pass = false;
            v.detail += "; over the " + fixed(c.budget_s) + " s budget";
        }
        all = all && v.pass;
        std::cout << "criterion " << id << " (" << c.title << "): " << (v.pass ? "PASS" : "FAIL") << " | "
                  << v.detail << " | " << fixed(secs, 3) << " s" << std::endl;
    }
    return all ? 0 : 1;
}
