#include "hti/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "hti/errors.hpp"

namespace hti {

using nlohmann::json;

namespace {

// Salts for sub-seeds derived from the master seed when a section omits its own.
constexpr std::uint64_t kGraphSalt = 1;
constexpr std::uint64_t kThetaSalt = 2;
constexpr std::uint64_t kRegressorSalt = 3;

void require_object(const json& j, const std::string& ptr) {
    if (!j.is_object()) throw ConfigError(ptr, "expected an object");
}

void reject_unknown(const json& j, const std::string& ptr, const std::set<std::string>& allowed) {
    for (const auto& [key, _] : j.items())
        if (!allowed.contains(key)) throw ConfigError(ptr + "/" + key, "unknown field");
}

double number(const json& j, const std::string& key, const std::string& ptr, std::optional<double> fallback = {}) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(ptr + "/" + key, "required field missing");
    }
    if (!j[key].is_number()) throw ConfigError(ptr + "/" + key, "expected a number");
    return j[key].get<double>();
}

long integer(const json& j, const std::string& key, const std::string& ptr, std::optional<long> fallback = {}) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(ptr + "/" + key, "required field missing");
    }
    if (!j[key].is_number_integer()) throw ConfigError(ptr + "/" + key, "expected an integer");
    return j[key].get<long>();
}

std::uint64_t seed_field(const json& j, const std::string& ptr, std::uint64_t fallback) {
    if (!j.contains("seed")) return fallback;
    if (!j["seed"].is_number_unsigned()) throw ConfigError(ptr + "/seed", "expected a nonnegative integer");
    return j["seed"].get<std::uint64_t>();
}

std::vector<double> number_list(const json& j, const std::string& ptr) {
    if (!j.is_array()) throw ConfigError(ptr, "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_number()) throw ConfigError(ptr + "/" + std::to_string(k), "expected a number");
        v.push_back(j[k].get<double>());
    }
    return v;
}

StateMatrix matrix_from(const json& j, const std::string& ptr, int rows, int cols) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw ConfigError(ptr, "expected " + std::to_string(rows) + " rows");
    StateMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const auto row = number_list(j[i], ptr + "/" + std::to_string(i));
        if (static_cast<int>(row.size()) != cols)
            throw ConfigError(ptr + "/" + std::to_string(i), "expected " + std::to_string(cols) + " entries");
        for (int l = 0; l < cols; ++l) m(i, l) = row[static_cast<std::size_t>(l)];
    }
    return m;
}

json matrix_to_json(const StateMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index l = 0; l < m.cols(); ++l) row.push_back(m(i, l));
        rows.push_back(row);
    }
    return rows;
}

json edges_to_json(const NetworkGraph& g) {
    json e = json::array();
    for (const auto& [i, j] : g.edges()) e.push_back({i, j});
    return e;
}

template <class F>
auto rethrow_at(const std::string& ptr, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ParameterError& e) {
        throw ConfigError(ptr, e.what());
    } catch (const GenerationError& e) {
        throw ConfigError(ptr, e.what());
    }
}

std::shared_ptr<const NetworkGraph> parse_graph(const json& j, std::uint64_t master, json& resolved) {
    const std::string ptr = "/graph";
    require_object(j, ptr);
    if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError(ptr + "/kind", "required string");
    const auto kind = j["kind"].get<std::string>();
    const int n = static_cast<int>(integer(j, "n", ptr));
    const std::uint64_t seed = seed_field(j, ptr, split_seed(master, kGraphSalt));

    std::shared_ptr<const NetworkGraph> g;
    json source = j;
    if (kind == "regular") {
        reject_unknown(j, ptr, {"kind", "n", "degree", "seed"});
        const int d = static_cast<int>(integer(j, "degree", ptr));
        g = rethrow_at(ptr, [&] { return std::make_shared<const NetworkGraph>(build_regular(n, d, seed)); });
        source["seed"] = seed;
    } else if (kind == "random_geometric") {
        reject_unknown(j, ptr, {"kind", "n", "radius", "seed", "max_attempts"});
        const double radius = number(j, "radius", ptr);
        const int attempts = static_cast<int>(integer(j, "max_attempts", ptr, 1000));
        g = rethrow_at(ptr, [&] {
            return std::make_shared<const NetworkGraph>(build_random_geometric(n, radius, seed, attempts));
        });
        source["seed"] = seed;
        source["max_attempts"] = attempts;
    } else if (kind == "complete") {
        reject_unknown(j, ptr, {"kind", "n"});
        g = rethrow_at(ptr, [&] { return std::make_shared<const NetworkGraph>(complete_graph(n)); });
    } else if (kind == "cycle") {
        reject_unknown(j, ptr, {"kind", "n"});
        g = rethrow_at(ptr, [&] { return std::make_shared<const NetworkGraph>(cycle_graph(n)); });
    } else if (kind == "explicit") {
        reject_unknown(j, ptr, {"kind", "n", "edges", "generated_from"});
        if (!j.contains("edges") || !j["edges"].is_array()) throw ConfigError(ptr + "/edges", "required array");
        std::vector<NetworkGraph::Edge> edges;
        for (std::size_t k = 0; k < j["edges"].size(); ++k) {
            const auto& e = j["edges"][k];
            const auto eptr = ptr + "/edges/" + std::to_string(k);
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
                throw ConfigError(eptr, "expected [i, j]");
            edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
        g = rethrow_at(ptr, [&] { return std::make_shared<const NetworkGraph>(n, std::move(edges)); });
        if (j.contains("generated_from")) source = j["generated_from"];
    } else {
        throw ConfigError(ptr + "/kind", "unknown graph kind '" + kind + "'");
    }
    if (!g->connected()) throw ConfigError(ptr, "graph is not connected");

    resolved = {{"kind", "explicit"}, {"n", g->size()}, {"edges", edges_to_json(*g)}};
    if (kind != "explicit" || j.contains("generated_from")) resolved["generated_from"] = source;
    return g;
}

Eigen::VectorXd parse_theta(const json& j, const std::string& ptr, int m, std::uint64_t master) {
    if (j.is_array()) {
        const auto v = number_list(j, ptr);
        if (static_cast<int>(v.size()) != m) throw ConfigError(ptr, "expected " + std::to_string(m) + " entries");
        return Eigen::Map<const Eigen::VectorXd>(v.data(), m);
    }
    if (j.is_number()) return Eigen::VectorXd::Constant(m, j.get<double>());
    require_object(j, ptr);
    reject_unknown(j, ptr, {"uniform", "seed"});
    const auto range = number_list(j.value("uniform", json()), ptr + "/uniform");
    if (range.size() != 2 || !(range[1] > range[0])) throw ConfigError(ptr + "/uniform", "expected [lo, hi] with lo < hi");
    RandomStream rng(seed_field(j, ptr, split_seed(master, kThetaSalt)));
    Eigen::VectorXd theta(m);
    for (int l = 0; l < m; ++l) theta[l] = range[0] + (range[1] - range[0]) * rng.uniform();
    return theta;
}

StateMatrix parse_regressors(const json& j, const std::string& ptr, int n, int m, std::uint64_t master) {
    if (j.is_array()) return matrix_from(j, ptr, n, m);
    require_object(j, ptr);
    if (j.contains("constant")) {
        reject_unknown(j, ptr, {"constant"});
        return StateMatrix::Constant(n, m, number(j, "constant", ptr));
    }
    reject_unknown(j, ptr, {"gaussian", "seed"});
    const double sigma = number(j, "gaussian", ptr);
    RandomStream rng(seed_field(j, ptr, split_seed(master, kRegressorSalt)));
    StateMatrix h(n, m);
    for (Eigen::Index k = 0; k < h.size(); ++k) h.data()[k] = sigma * rng.normal();
    return h;
}

StateMatrix parse_x0(const json& j, const std::string& ptr, int n, int m) {
    if (j.is_string() && j.get<std::string>() == "zero") return StateMatrix::Zero(n, m);
    if (j.is_number()) return StateMatrix::Constant(n, m, j.get<double>());
    return matrix_from(j, ptr, n, m);
}

double parse_gain_a(const json& e, const std::string& ptr, const EstimatorConfig& cfg, json& resolved) {
    const std::string gptr = ptr + "/gain_a";
    if (!e.contains("gain_a")) throw ConfigError(gptr, "required field missing");
    const auto& g = e["gain_a"];
    if (g.is_number()) {
        // A resolved manifest carries the derivation alongside the number; keep it.
        if (e.contains("gain_a_source")) resolved["gain_a_source"] = e["gain_a_source"];
        return g.get<double>();
    }
    require_object(g, gptr);
    if (!g.contains("example1")) throw ConfigError(gptr, "expected a number or {\"example1\": {...}}");
    const auto& ex = g["example1"];
    const std::string xptr = gptr + "/example1";
    require_object(ex, xptr);
    reject_unknown(ex, xptr, {"B", "eps"});
    const double B = number(ex, "B", xptr);
    const double eps = number(ex, "eps", xptr);
    const double h = cfg.regressors(0, 0);
    const double a = rethrow_at(xptr, [&] { return example1_gain(B, eps, h, cfg.obs_noise); });
    resolved["gain_a_source"] = g;
    return a;
}

EstimatorConfig parse_estimator(const json& e, std::shared_ptr<const NetworkGraph> graph, std::uint64_t master,
                                StateMatrix& x0, json& resolved) {
    const std::string ptr = "/estimator";
    require_object(e, ptr);
    reject_unknown(e, ptr, {"dim", "theta_star", "regressors", "regressor_noise", "gain_a", "gain_a_source",
                            "gain_b", "step_delta", "psi_obs", "psi_comm", "obs_noise", "comm_noise", "x0"});
    EstimatorConfig cfg;
    cfg.graph = std::move(graph);
    const int n = cfg.graph->size();
    const int m = static_cast<int>(integer(e, "dim", ptr, 1));
    if (m < 1) throw ConfigError(ptr + "/dim", "must be at least 1");

    if (!e.contains("theta_star")) throw ConfigError(ptr + "/theta_star", "required field missing");
    cfg.theta_star = parse_theta(e["theta_star"], ptr + "/theta_star", m, master);
    cfg.regressors = parse_regressors(e.value("regressors", json{{"constant", 1.0}}), ptr + "/regressors", n, m, master);
    if (e.contains("regressor_noise")) cfg.regressor_noise = noise_from_json(e["regressor_noise"], ptr + "/regressor_noise");

    cfg.obs_noise = e.contains("obs_noise") ? noise_from_json(e["obs_noise"], ptr + "/obs_noise") : NoiseModel::zero();
    cfg.comm_noise = e.contains("comm_noise") ? comm_noise_from_json(e["comm_noise"], ptr + "/comm_noise")
                                              : CommNoise{NoiseModel::zero()};

    if (e.contains("psi_obs") && e["psi_obs"].is_array()) {
        cfg.psi_obs.clear();
        for (std::size_t k = 0; k < e["psi_obs"].size(); ++k)
            cfg.psi_obs.push_back(nonlinearity_from_json(e["psi_obs"][k], ptr + "/psi_obs/" + std::to_string(k)));
        if (cfg.psi_obs.size() != static_cast<std::size_t>(n))
            throw ConfigError(ptr + "/psi_obs", "per-agent list must have N entries");
    } else {
        cfg.psi_obs = {e.contains("psi_obs") ? nonlinearity_from_json(e["psi_obs"], ptr + "/psi_obs")
                                             : Nonlinearity::identity()};
    }
    cfg.psi_comm = e.contains("psi_comm") ? nonlinearity_from_json(e["psi_comm"], ptr + "/psi_comm")
                                          : Nonlinearity::identity();

    cfg.gain_b = number(e, "gain_b", ptr, 1.0);
    cfg.step_delta = number(e, "step_delta", ptr, 1.0);
    cfg.gain_a = parse_gain_a(e, ptr, cfg, resolved);

    if (!(cfg.gain_a > 0.0)) throw ConfigError(ptr + "/gain_a", "must be positive");
    if (!(cfg.gain_b > 0.0)) throw ConfigError(ptr + "/gain_b", "must be positive");
    if (!(cfg.step_delta > 0.5 && cfg.step_delta <= 1.0)) throw ConfigError(ptr + "/step_delta", "must lie in (0.5, 1]");
    rethrow_at(ptr + "/regressors", [&] {
        cfg.validate();
        return 0;
    });

    x0 = parse_x0(e.value("x0", json("zero")), ptr + "/x0", n, m);

    resolved["dim"] = m;
    resolved["theta_star"] = std::vector<double>(cfg.theta_star.data(), cfg.theta_star.data() + m);
    resolved["regressors"] = matrix_to_json(cfg.regressors);
    if (cfg.regressor_noise) resolved["regressor_noise"] = cfg.regressor_noise->to_json();
    resolved["gain_a"] = cfg.gain_a;
    resolved["gain_b"] = cfg.gain_b;
    resolved["step_delta"] = cfg.step_delta;
    if (cfg.psi_obs.size() == 1) {
        resolved["psi_obs"] = cfg.psi_obs.front().to_json();
    } else {
        resolved["psi_obs"] = json::array();
        for (const auto& p : cfg.psi_obs) resolved["psi_obs"].push_back(p.to_json());
    }
    resolved["psi_comm"] = cfg.psi_comm.to_json();
    resolved["obs_noise"] = cfg.obs_noise.to_json();
    resolved["comm_noise"] = comm_noise_to_json(cfg.comm_noise);
    resolved["x0"] = matrix_to_json(x0);
    return cfg;
}

ExperimentSection parse_experiment(const json& j, json& resolved) {
    const std::string ptr = "/experiment";
    require_object(j, ptr);
    reject_unknown(j, ptr, {"replications", "horizon", "stride", "method", "methods", "window"});
    ExperimentSection s;
    s.replications = integer(j, "replications", ptr, s.replications);
    s.horizon = integer(j, "horizon", ptr, s.horizon);
    s.stride = integer(j, "stride", ptr, s.stride);
    s.window = number(j, "window", ptr, s.window);
    if (s.replications < 1) throw ConfigError(ptr + "/replications", "must be at least 1");
    if (s.horizon < 1) throw ConfigError(ptr + "/horizon", "must be at least 1");
    if (s.stride < 1) throw ConfigError(ptr + "/stride", "must be at least 1");
    if (!(s.window > 0.0 && s.window <= 1.0)) throw ConfigError(ptr + "/window", "must lie in (0, 1]");
    if (j.contains("method")) {
        if (!j["method"].is_string()) throw ConfigError(ptr + "/method", "expected a string");
        s.method = rethrow_at(ptr + "/method", [&] { return method_from_string(j["method"].get<std::string>()); });
    }
    if (j.contains("methods")) {
        if (!j["methods"].is_array() || j["methods"].empty()) throw ConfigError(ptr + "/methods", "expected a nonempty array");
        s.methods.clear();
        for (std::size_t k = 0; k < j["methods"].size(); ++k) {
            const auto mptr = ptr + "/methods/" + std::to_string(k);
            if (!j["methods"][k].is_string()) throw ConfigError(mptr, "expected a string");
            s.methods.push_back(rethrow_at(mptr, [&] { return method_from_string(j["methods"][k].get<std::string>()); }));
        }
    }
    resolved = {{"replications", s.replications}, {"horizon", s.horizon}, {"stride", s.stride},
                {"method", to_string(s.method)}, {"window", s.window}};
    resolved["methods"] = json::array();
    for (Method m : s.methods) resolved["methods"].push_back(to_string(m));
    return s;
}

DiffusionConfig parse_diffusion(const json& j, json& resolved) {
    const std::string ptr = "/diffusion";
    DiffusionConfig d;
    if (!j.is_null()) {
        require_object(j, ptr);
        reject_unknown(j, ptr, {"mu", "mu_delta", "alpha1", "alpha2", "nu", "epsilon"});
        d.mu = number(j, "mu", ptr, d.mu);
        d.mu_delta = number(j, "mu_delta", ptr, d.mu_delta);
        d.alpha1 = number(j, "alpha1", ptr, d.alpha1);
        d.alpha2 = number(j, "alpha2", ptr, d.alpha2);
    }
    if (!(d.mu > 0.0)) throw ConfigError(ptr + "/mu", "must be positive");
    if (!(d.mu_delta >= 0.0 && d.mu_delta <= 1.0)) throw ConfigError(ptr + "/mu_delta", "must lie in [0, 1]");
    resolved = {{"mu", d.mu}, {"mu_delta", d.mu_delta}, {"alpha1", d.alpha1}, {"alpha2", d.alpha2}};
    // Smoothing-recursion constants are accepted for compatibility and echoed unused.
    for (const char* key : {"nu", "epsilon"})
        if (j.is_object() && j.contains(key)) resolved[key] = number(j, key, ptr);
    return d;
}

std::vector<double> parse_grid(const json& j, const std::string& ptr) {
    std::vector<double> g;
    if (j.is_array()) {
        g = number_list(j, ptr);
    } else {
        require_object(j, ptr);
        const bool is_log = j.contains("log");
        const std::string key = is_log ? "log" : "linear";
        if (!j.contains(key)) throw ConfigError(ptr, "expected an array, {\"log\": ...} or {\"linear\": ...}");
        const auto& spec = j[key];
        const auto sptr = ptr + "/" + key;
        require_object(spec, sptr);
        reject_unknown(spec, sptr, {"lo", "hi", "points"});
        const double lo = number(spec, "lo", sptr);
        const double hi = number(spec, "hi", sptr);
        const int points = static_cast<int>(integer(spec, "points", sptr));
        g = rethrow_at(sptr, [&] { return is_log ? log_grid(lo, hi, points) : linear_grid(lo, hi, points); });
    }
    rethrow_at(ptr, [&] {
        validate_grid(g);
        return 0;
    });
    return g;
}

SweepBSection parse_sweep_b(const json& j, const std::optional<EstimatorConfig>& est, json& resolved) {
    const std::string ptr = "/sweep_b";
    require_object(j, ptr);
    reject_unknown(j, ptr, {"grid", "eps", "h", "obs_noise", "mode"});
    SweepBSection s;
    if (!j.contains("grid")) throw ConfigError(ptr + "/grid", "required field missing");
    s.grid = parse_grid(j["grid"], ptr + "/grid");
    s.params.eps = number(j, "eps", ptr, s.params.eps);
    if (!(s.params.eps > 0.0)) throw ConfigError(ptr + "/eps", "must be positive");
    s.params.h = number(j, "h", ptr, est ? est->regressors(0, 0) : 1.0);
    if (j.contains("obs_noise")) {
        s.params.obs_noise = noise_from_json(j["obs_noise"], ptr + "/obs_noise");
    } else if (est) {
        s.params.obs_noise = est->obs_noise;
    }
    if (!s.params.obs_noise.has_pdf()) throw ConfigError(ptr + "/obs_noise", "analytic sweep needs a noise law with a density");
    const std::string mode = j.value("mode", std::string("analytic"));
    if (mode != "analytic" && mode != "monte_carlo") throw ConfigError(ptr + "/mode", "expected analytic or monte_carlo");
    s.monte_carlo = mode == "monte_carlo";
    resolved = {{"grid", s.grid}, {"eps", s.params.eps}, {"h", s.params.h},
                {"obs_noise", s.params.obs_noise.to_json()}, {"mode", mode}};
    return s;
}

SweepRhoSection parse_sweep_rho(const json& j, const NetworkGraph* g, json& resolved) {
    const std::string ptr = "/sweep_rho";
    require_object(j, ptr);
    reject_unknown(j, ptr, {"grid", "a", "b", "h", "obs_noise", "aux_noise"});
    if (!g) throw ConfigError("/graph", "sweep_rho needs a graph section");
    if (!g->is_regular()) throw ConfigError("/graph", "sweep_rho needs a regular graph");
    SweepRhoSection s;
    if (!j.contains("grid")) throw ConfigError(ptr + "/grid", "required field missing");
    s.grid = parse_grid(j["grid"], ptr + "/grid");
    if (!(s.grid.front() > -1.0 && s.grid.back() < 1.0)) throw ConfigError(ptr + "/grid", "must lie inside (-1, 1)");
    s.params.a = number(j, "a", ptr, 1.0);
    s.params.b = number(j, "b", ptr, 1.0);
    s.params.h = number(j, "h", ptr, 1.0);
    s.params.degree = g->max_degree();
    if (j.contains("obs_noise")) s.params.obs_noise = noise_from_json(j["obs_noise"], ptr + "/obs_noise");
    if (j.contains("aux_noise")) s.params.aux_noise = noise_from_json(j["aux_noise"], ptr + "/aux_noise");
    if (!s.params.obs_noise.has_pdf()) throw ConfigError(ptr + "/obs_noise", "needs a noise law with a density");
    if (!s.params.aux_noise.has_pdf()) throw ConfigError(ptr + "/aux_noise", "needs a noise law with a density");
    resolved = {{"grid", s.grid}, {"a", s.params.a}, {"b", s.params.b}, {"h", s.params.h},
                {"obs_noise", s.params.obs_noise.to_json()}, {"aux_noise", s.params.aux_noise.to_json()}};
    return s;
}

}  // namespace

ExperimentPlan Config::plan() const {
    if (!estimator) throw ConfigError("/estimator", "required section missing");
    if (!experiment) throw ConfigError("/experiment", "required section missing");
    ExperimentPlan p;
    p.base = *estimator;
    p.x0 = x0;
    p.replications = experiment->replications;
    p.horizon = experiment->horizon;
    p.stride = experiment->stride;
    p.seed = seed;
    p.method = experiment->method;
    p.diffusion = diffusion;
    return p;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> cli, const json& j, const char* env_value) {
    if (cli) return *cli;
    if (j.is_object() && j.contains("seed")) {
        const auto& s = j["seed"];
        if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<long long>() < 0))
            throw ConfigError("/seed", "expected a nonnegative integer");
        return j["seed"].get<std::uint64_t>();
    }
    if (env_value && *env_value) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env_value, &used);
            if (used == std::char_traits<char>::length(env_value)) return v;
        } catch (const std::exception&) {
        }
        throw ConfigError("", std::string("HTI_SEED is not an unsigned integer: ") + env_value);
    }
    return kDefaultSeed;
}

Config parse_config(const json& j, std::optional<std::uint64_t> cli_seed, const char* env_seed) {
    require_object(j, "");
    reject_unknown(j, "", {"seed", "jobs", "graph", "estimator", "experiment", "diffusion", "sweep_b", "sweep_rho",
                           "asymptotics", "rate", "description"});
    Config c;
    c.seed = resolve_seed(cli_seed, j, env_seed);
    c.resolved["seed"] = c.seed;
    c.jobs = static_cast<int>(integer(j, "jobs", "", 0));
    if (c.jobs < 0) throw ConfigError("/jobs", "must be nonnegative");
    c.resolved["jobs"] = c.jobs;
    if (j.contains("description")) c.resolved["description"] = j["description"];

    if (j.contains("graph")) c.graph = parse_graph(j["graph"], c.seed, c.resolved["graph"]);
    if (j.contains("estimator")) {
        if (!c.graph) throw ConfigError("/graph", "required section missing");
        c.estimator = parse_estimator(j["estimator"], c.graph, c.seed, c.x0, c.resolved["estimator"]);
    }
    if (j.contains("experiment")) c.experiment = parse_experiment(j["experiment"], c.resolved["experiment"]);
    c.diffusion = parse_diffusion(j.value("diffusion", json()), c.resolved["diffusion"]);
    if (j.contains("sweep_b")) c.sweep_b = parse_sweep_b(j["sweep_b"], c.estimator, c.resolved["sweep_b"]);
    if (j.contains("sweep_rho")) c.sweep_rho = parse_sweep_rho(j["sweep_rho"], c.graph.get(), c.resolved["sweep_rho"]);

    if (j.contains("asymptotics")) {
        const auto& a = j["asymptotics"];
        require_object(a, "/asymptotics");
        reject_unknown(a, "/asymptotics", {"innovation_only_sigma"});
        if (a.contains("innovation_only_sigma")) {
            if (!a["innovation_only_sigma"].is_boolean())
                throw ConfigError("/asymptotics/innovation_only_sigma", "expected a boolean");
            c.asymptotics.innovation_only_sigma = a["innovation_only_sigma"].get<bool>();
        }
    }
    c.resolved["asymptotics"] = {{"innovation_only_sigma", c.asymptotics.innovation_only_sigma}};

    if (j.contains("rate")) {
        const auto& r = j["rate"];
        require_object(r, "/rate");
        reject_unknown(r, "/rate", {"G_c", "G_o", "k", "margin"});
        c.rate.G_c = number(r, "G_c", "/rate", 1.0);
        c.rate.G_o = number(r, "G_o", "/rate", 1.0);
        c.rate.margin = number(r, "margin", "/rate", 1e-6);
        if (r.contains("k")) c.rate.k = number(r, "k", "/rate");
        if (!(c.rate.G_c > 0.0)) throw ConfigError("/rate/G_c", "must be positive");
        if (!(c.rate.G_o > 0.0)) throw ConfigError("/rate/G_o", "must be positive");
        if (!(c.rate.margin >= 0.0)) throw ConfigError("/rate/margin", "must be nonnegative");
    }
    c.resolved["rate"] = {{"G_c", c.rate.G_c}, {"G_o", c.rate.G_o}, {"margin", c.rate.margin}};
    if (c.rate.k) c.resolved["rate"]["k"] = *c.rate.k;
    return c;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", "'" + path + "' is not valid JSON: " + e.what());
    }
}

}  // namespace hti
