#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hti/asymptotics.hpp"
#include "hti/config.hpp"
#include "hti/errors.hpp"
#include "hti/experiment.hpp"
#include "hti/nonlinearity.hpp"

namespace hti::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Invocation {
    std::string subcommand;
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    int jobs = -1;
    int verbosity = 0;
    bool per_replication = false;
};

class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

void write_summary_csv(const fs::path& p, const MonteCarloSummary& s) {
    std::string csv = "t,mse_mean,mse_median,mse_q10,mse_q90\n";
    for (std::size_t k = 0; k < s.t.size(); ++k)
        csv += std::to_string(s.t[k]) + "," + fmt(s.mean[k]) + "," + fmt(s.median[k]) + "," + fmt(s.q10[k]) + "," +
               fmt(s.q90[k]) + "\n";
    write_text(p, csv);
}

void write_trajectory_csv(const fs::path& p, const MseTrajectory& t) {
    std::string csv = "t,per_sensor_mse\n";
    for (std::size_t k = 0; k < t.size(); ++k) csv += std::to_string(t.t[k]) + "," + fmt(t.per_sensor_mse[k]) + "\n";
    write_text(p, csv);
}

json run_summary(const MonteCarloSummary& s, double window) {
    return {{"divergence_fraction", s.divergence_fraction()},
            {"final_median_mse", num(s.median.back())},
            {"slope", num(estimate_decay_exponent(s.t, s.median, window))}};
}

const EstimatorConfig& need_estimator(const Config& c) {
    if (!c.estimator) throw ConfigError("/estimator", "required section missing");
    return *c.estimator;
}

struct Statistics {
    double phi_o = 0, phi_c = 0, sigma_o = 0, sigma_c = 0;
    std::optional<double> sigma_oc;
};

Statistics effective_stats(const EstimatorConfig& cfg) {
    Statistics s;
    if (cfg.psi_obs.size() != 1) throw UnsupportedError("asymptotics with per-agent observation maps are not supported");
    s.phi_o = phi_prime_zero(cfg.psi_obs.front(), cfg.obs_noise);
    s.sigma_o = effective_variance(cfg.psi_obs.front(), cfg.obs_noise);
    if (const auto* c = std::get_if<CorrelationSpec>(&cfg.comm_noise)) {
        s.phi_c = phi_c_prime_zero_correlated(cfg.psi_comm, *c, cfg.obs_noise);
        s.sigma_c = 1.0;  // sign map
        s.sigma_oc = cross_covariance(cfg.psi_comm, cfg.psi_obs.front(), *c, cfg.obs_noise);
    } else {
        const auto& m = std::get<NoiseModel>(cfg.comm_noise);
        s.phi_c = phi_prime_zero(cfg.psi_comm, m);
        s.sigma_c = effective_variance(cfg.psi_comm, m);
    }
    return s;
}

int cmd_asympt(const Config& c, const fs::path& out) {
    const auto& cfg = need_estimator(c);
    const Statistics st = effective_stats(cfg);
    const double phi_c = c.asymptotics.innovation_only_sigma ? 0.0 : st.phi_c;
    const SigmaMatrix sigma = build_sigma(cfg, phi_c, st.phi_o);
    json j = {{"stable", sigma.stable},
              {"sigma_max_eigenvalue", sigma.max_eigenvalue},
              {"phi_o_prime_zero", st.phi_o},
              {"phi_c_prime_zero", st.phi_c},
              {"sigma_o_sq", num(st.sigma_o)},
              {"sigma_c_sq", num(st.sigma_c)}};
    if (st.sigma_oc) j["sigma_oc"] = *st.sigma_oc;
    if (!sigma.stable) {
        j["per_agent_variance"] = nullptr;
        j["residual"] = nullptr;
        write_json(out / "asympt.json", j);
        throw NumericalFailure("Sigma is not stable; increase gain_a");
    }
    const auto s0 = build_s0(cfg, st.sigma_c, st.sigma_o, st.sigma_oc);
    const auto r = asymptotic_covariance(sigma.matrix, s0, cfg.gain_a, cfg.agents());
    j["per_agent_variance"] = r.per_agent_variance;
    j["residual"] = r.residual;
    write_json(out / "asympt.json", j);
    return kExitOk;
}

int cmd_simulate(const Config& c, const fs::path& out, int jobs, bool per_replication) {
    const auto plan = c.plan();
    const auto runs = monte_carlo_runs(plan, jobs);
    const auto s = aggregate(runs);
    write_summary_csv(out / "mse.csv", s);
    if (per_replication)
        for (std::size_t r = 0; r < runs.size(); ++r)
            write_trajectory_csv(out / ("replication_" + std::to_string(r) + ".csv"), runs[r]);
    write_json(out / "summary.json", run_summary(s, c.experiment->window));
    return kExitOk;
}

int cmd_compare(const Config& c, const fs::path& out, int jobs) {
    const auto plan = c.plan();
    const auto outcomes = divergence_probe(plan, c.experiment->methods, jobs);
    json methods = json::object();
    for (const auto& o : outcomes) {
        write_summary_csv(out / ("mse_" + to_string(o.method) + ".csv"), o.summary);
        json m = run_summary(o.summary, c.experiment->window);
        m["divergence_fraction"] = o.divergence_fraction;
        m["final_median_mse"] = num(o.median_final);
        m["initial_median_mse"] = num(o.median_initial);
        methods[to_string(o.method)] = m;
    }
    write_json(out / "summary.json", {{"methods", methods}});
    return kExitOk;
}

int cmd_rate(const Config& c, const fs::path& out, int jobs) {
    const auto plan = c.plan();
    const auto s = monte_carlo(plan, jobs);
    write_summary_csv(out / "mse.csv", s);
    json j = run_summary(s, c.experiment->window);

    const auto& cfg = plan.base;
    json bound = nullptr;
    if (cfg.step_delta < 1.0 && cfg.psi_comm.bounded()) {
        // The bound needs phi'(0) values, hence densities; report why when unavailable.
        try {
            const Statistics st = effective_stats(cfg);
            auto in = rate_inputs(cfg, plan.x0, st.phi_c, st.phi_o, c.rate.G_c, c.rate.G_o, c.rate.k);
            in.margin = c.rate.margin;
            const auto r = mse_rate_exponent(in);
            bound = {{"exponent", r.exponent}, {"term_step", r.term_step},
                     {"term_innovation", r.term_innovation}, {"term_consensus", r.term_consensus}};
        } catch (const ParameterError& e) {
            bound = {{"error", e.what()}};
        } catch (const UnsupportedError& e) {
            bound = {{"error", e.what()}};
        }
    }
    j["rate_bound"] = bound;
    write_json(out / "summary.json", j);
    return kExitOk;
}

json sweep_summary(const SweepResult& r, const std::string& axis) {
    json maxima = json::array(), minima = json::array();
    for (auto k : r.local_maxima) maxima.push_back(r.axis[k]);
    for (auto k : r.local_minima) minima.push_back(r.axis[k]);
    return {{"argmin_" + axis, r.axis[r.argmin]},
            {"min_value", num(r.values[r.argmin])},
            {"argmin_on_boundary", r.argmin_on_boundary},
            {"local_maxima", maxima},
            {"local_minima", minima}};
}

void write_sweep_csv(const fs::path& p, const std::string& header, const SweepResult& r) {
    std::string csv = header + "\n";
    for (std::size_t k = 0; k < r.axis.size(); ++k) csv += fmt(r.axis[k]) + "," + fmt(r.values[k]) + "\n";
    write_text(p, csv);
}

int cmd_sweep_b(const Config& c, const fs::path& out, int jobs) {
    if (!c.sweep_b) throw ConfigError("/sweep_b", "required section missing");
    const auto& s = *c.sweep_b;
    const SweepResult r = s.monte_carlo ? sweep_B_monte_carlo(s.grid, c.plan(), jobs) : sweep_B(s.grid, s.params, jobs);
    write_sweep_csv(out / "sweep_b.csv", s.monte_carlo ? "B,final_median_mse" : "B,sigma_B_sq", r);
    write_json(out / "summary.json", sweep_summary(r, "B"));
    return kExitOk;
}

int cmd_sweep_rho(const Config& c, const fs::path& out, int jobs) {
    if (!c.sweep_rho) throw ConfigError("/sweep_rho", "required section missing");
    const auto& s = *c.sweep_rho;
    const SweepResult r = sweep_rho(s.grid, s.params, c.graph->laplacian_spectrum(), jobs);
    write_sweep_csv(out / "sweep_rho.csv", "rho,sigma_rho_sq", r);
    write_json(out / "summary.json", sweep_summary(r, "rho"));
    return kExitOk;
}

int dispatch(const Invocation& inv, std::ostream& err) {
    const json raw = read_json_file(inv.config_path);
    const char* env = std::getenv("HTI_SEED");
    const Config c = parse_config(raw, inv.seed, env);
    const int jobs = inv.jobs >= 0 ? inv.jobs : c.jobs;

    const fs::path out(inv.out_dir);
    fs::create_directories(out);
    write_json(out / "manifest.json", c.resolved);
    if (inv.verbosity > 0) err << "hti " << inv.subcommand << ": seed " << c.seed << ", output " << out.string() << "\n";

    if (inv.subcommand == "asympt") return cmd_asympt(c, out);
    if (inv.subcommand == "simulate") return cmd_simulate(c, out, jobs, inv.per_replication);
    if (inv.subcommand == "compare") return cmd_compare(c, out, jobs);
    if (inv.subcommand == "rate") return cmd_rate(c, out, jobs);
    if (inv.subcommand == "sweep-b") return cmd_sweep_b(c, out, jobs);
    if (inv.subcommand == "sweep-rho") return cmd_sweep_rho(c, out, jobs);
    throw ConfigError("", "unknown subcommand " + inv.subcommand);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Consensus+innovations estimation under heavy-tailed noise"};
    app.require_subcommand(1, 1);
    Invocation inv;

    const std::pair<const char*, const char*> commands[] = {
        {"simulate", "Monte Carlo MSE trajectories"},
        {"asympt", "Asymptotic covariance of the estimator"},
        {"sweep-b", "Per-agent asymptotic variance over a grid of B"},
        {"sweep-rho", "Per-agent asymptotic variance over a grid of rho"},
        {"compare", "Proposed method against baselines"},
        {"rate", "MSE decay slope and rate-exponent bound"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", inv.config_path, "Config JSON")->required();
        sub->add_option("-o,--out", inv.out_dir, "Output directory");
        sub->add_option("--seed", inv.seed, "Master seed (overrides config and HTI_SEED)");
        sub->add_option("--jobs", inv.jobs, "Worker threads (0: runtime default)")->check(CLI::NonNegativeNumber);
        sub->add_flag("-v", inv.verbosity, "Verbose progress on stderr");
        if (std::string(name) == "simulate")
            sub->add_flag("--per-replication", inv.per_replication, "Also write one CSV per replication");
        sub->callback([&inv, sub] { inv.subcommand = sub->get_name(); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        const int code = dispatch(inv, err);
        if (inv.verbosity > 0) err << "done\n";
        return code;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParameterError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const StabilityError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const UnsupportedError& e) {
        err << "unsupported: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace hti::cli
