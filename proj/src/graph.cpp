#include "hti/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <json.hpp>

#include "hti/errors.hpp"
#include "hti/random.hpp"

namespace hti {

NetworkGraph::NetworkGraph(int n_agents, std::vector<Edge> edges) : n_(n_agents) {
    if (n_agents < 1) throw ParameterError("graph needs at least one agent");
    for (auto& [i, j] : edges) {
        if (i < 0 || j < 0 || i >= n_agents || j >= n_agents)
            throw ParameterError("edge {" + std::to_string(i) + "," + std::to_string(j) + "} out of range");
        if (i == j) throw ParameterError("self-loop at agent " + std::to_string(i));
        if (i > j) std::swap(i, j);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw ParameterError("duplicate edge");
    edges_ = std::move(edges);

    std::vector<int> deg(n_, 0);
    for (const auto& [i, j] : edges_) {
        ++deg[i];
        ++deg[j];
    }
    offsets_.assign(n_ + 1, 0);
    std::partial_sum(deg.begin(), deg.end(), offsets_.begin() + 1);
    neighbors_.resize(offsets_[n_]);
    std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [i, j] : edges_) {
        neighbors_[fill[i]++] = j;
        neighbors_[fill[j]++] = i;
    }
    for (int i = 0; i < n_; ++i)
        std::sort(neighbors_.begin() + offsets_[i], neighbors_.begin() + offsets_[i + 1]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian(), Eigen::EigenvaluesOnly);
    spectrum_ = solver.eigenvalues();
}

int NetworkGraph::max_degree() const noexcept {
    int d = 0;
    for (int i = 0; i < n_; ++i) d = std::max(d, degree(i));
    return d;
}

int NetworkGraph::min_degree() const noexcept {
    int d = degree(0);
    for (int i = 1; i < n_; ++i) d = std::min(d, degree(i));
    return d;
}

Eigen::MatrixXd NetworkGraph::adjacency() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
    for (const auto& [i, j] : edges_) a(i, j) = a(j, i) = 1.0;
    return a;
}

Eigen::MatrixXd NetworkGraph::laplacian() const {
    Eigen::MatrixXd l = -adjacency();
    for (int i = 0; i < n_; ++i) l(i, i) = degree(i);
    return l;
}

bool NetworkGraph::connected() const noexcept {
    return n_ == 1 || spectrum_[1] > kConnectivityThreshold;
}

Eigen::VectorXd laplacian_spectrum(const NetworkGraph& g) { return g.laplacian_spectrum(); }

NetworkGraph build_regular(int n, int d, std::uint64_t seed) {
    if (d < 2 || d >= n) throw ParameterError("regular graph needs 2 <= d < n");
    if ((static_cast<long>(n) * d) % 2 != 0) throw ParameterError("regular graph needs n*d even");

    RandomStream rng(seed);
    std::vector<int> stubs(static_cast<std::size_t>(n) * d);
    constexpr int kMaxAttempts = 100000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        for (int i = 0; i < n; ++i)
            std::fill_n(stubs.begin() + static_cast<long>(i) * d, d, i);
        std::shuffle(stubs.begin(), stubs.end(), rng.engine());

        std::vector<NetworkGraph::Edge> edges;
        edges.reserve(stubs.size() / 2);
        bool simple = true;
        for (std::size_t k = 0; k < stubs.size(); k += 2) {
            int i = stubs[k], j = stubs[k + 1];
            if (i == j) {
                simple = false;
                break;
            }
            edges.emplace_back(std::min(i, j), std::max(i, j));
        }
        if (!simple) continue;
        std::sort(edges.begin(), edges.end());
        if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) continue;

        NetworkGraph g(n, std::move(edges));
        if (g.connected()) return g;
    }
    throw GenerationError("no connected simple " + std::to_string(d) + "-regular graph found");
}

NetworkGraph build_random_geometric(int n, double radius, std::uint64_t seed, int max_attempts) {
    if (n < 2) throw ParameterError("random geometric graph needs n >= 2");
    // Radii of sqrt(2) or more are accepted and give the complete graph.
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ParameterError("radius must be positive and finite");

    RandomStream rng(seed);
    std::vector<double> x(n), y(n);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        for (int i = 0; i < n; ++i) {
            x[i] = rng.uniform();
            y[i] = rng.uniform();
        }
        std::vector<NetworkGraph::Edge> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (std::hypot(x[i] - x[j], y[i] - y[j]) <= radius) edges.emplace_back(i, j);
        NetworkGraph g(n, std::move(edges));
        if (g.connected()) return g;
    }
    throw GenerationError("random geometric graph not connected after " + std::to_string(max_attempts) + " attempts");
}

NetworkGraph complete_graph(int n) {
    std::vector<NetworkGraph::Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    return {n, std::move(edges)};
}

NetworkGraph cycle_graph(int n) {
    if (n < 3) throw ParameterError("cycle needs n >= 3");
    std::vector<NetworkGraph::Edge> edges;
    for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return {n, std::move(edges)};
}

std::string graph_to_json(const NetworkGraph& g) {
    nlohmann::json j;
    j["n"] = g.size();
    j["edges"] = nlohmann::json::array();
    for (const auto& [a, b] : g.edges()) j["edges"].push_back({a, b});
    return j.dump();
}

NetworkGraph graph_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("", std::string("graph JSON: ") + e.what());
    }
    if (!j.contains("n") || !j["n"].is_number_integer()) throw ConfigError("/n", "required integer");
    if (!j.contains("edges") || !j["edges"].is_array()) throw ConfigError("/edges", "required array");
    std::vector<NetworkGraph::Edge> edges;
    for (std::size_t k = 0; k < j["edges"].size(); ++k) {
        const auto& e = j["edges"][k];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            throw ConfigError("/edges/" + std::to_string(k), "expected [i, j]");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return {j["n"].get<int>(), std::move(edges)};
}

}  // namespace hti
