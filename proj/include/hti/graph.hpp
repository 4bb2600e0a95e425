#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hti {

/// Static undirected simple graph on agents 0..n-1.
///
/// Immutable after construction. Adjacency is stored in CSR form with each
/// agent's neighbor list sorted ascending; arcs (i, j) are numbered by their
/// position in that layout, which is the order noise is drawn in.
class NetworkGraph {
public:
    using Edge = std::pair<int, int>;

    /// Throws ParameterError on self-loops, duplicates or out-of-range indices.
    NetworkGraph(int n_agents, std::vector<Edge> edges);

    [[nodiscard]] int size() const noexcept { return n_; }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] int degree(int i) const noexcept { return offsets_[i + 1] - offsets_[i]; }
    [[nodiscard]] int max_degree() const noexcept;
    [[nodiscard]] int min_degree() const noexcept;

    /// Sorted neighbors of agent i.
    [[nodiscard]] std::span<const int> neighbors(int i) const noexcept {
        return {neighbors_.data() + offsets_[i], neighbors_.data() + offsets_[i + 1]};
    }
    /// Index of the first outgoing arc of agent i in the arc numbering.
    [[nodiscard]] int arc_offset(int i) const noexcept { return offsets_[i]; }
    [[nodiscard]] int arc_count() const noexcept { return offsets_[n_]; }

    [[nodiscard]] Eigen::MatrixXd adjacency() const;
    [[nodiscard]] Eigen::MatrixXd laplacian() const;

    /// Eigenvalues of L, ascending. Computed once on construction.
    [[nodiscard]] const Eigen::VectorXd& laplacian_spectrum() const noexcept { return spectrum_; }
    [[nodiscard]] double algebraic_connectivity() const noexcept { return n_ > 1 ? spectrum_[1] : 0.0; }
    [[nodiscard]] bool connected() const noexcept;
    [[nodiscard]] bool is_regular() const noexcept { return min_degree() == max_degree(); }

    friend bool operator==(const NetworkGraph& a, const NetworkGraph& b) {
        return a.n_ == b.n_ && a.edges_ == b.edges_;
    }

private:
    int n_;
    std::vector<Edge> edges_;  // normalized: first < second, sorted
    std::vector<int> offsets_;
    std::vector<int> neighbors_;
    Eigen::VectorXd spectrum_;
};

inline constexpr double kConnectivityThreshold = 1e-9;

/// Random d-regular connected graph via the pairing model, rejecting
/// self-loops, multi-edges and disconnected outcomes.
[[nodiscard]] NetworkGraph build_regular(int n, int d, std::uint64_t seed);

/// Uniform points on the unit square joined when their distance is at most
/// `radius`; resampled from the same stream until connected.
[[nodiscard]] NetworkGraph build_random_geometric(int n, double radius, std::uint64_t seed, int max_attempts = 1000);

[[nodiscard]] NetworkGraph complete_graph(int n);
[[nodiscard]] NetworkGraph cycle_graph(int n);

/// Eigenvalues of the Laplacian, ascending.
[[nodiscard]] Eigen::VectorXd laplacian_spectrum(const NetworkGraph& g);

/// {"n": N, "edges": [[i, j], ...]} with 0-based indices.
[[nodiscard]] std::string graph_to_json(const NetworkGraph& g);
[[nodiscard]] NetworkGraph graph_from_json(const std::string& text);

}  // namespace hti
