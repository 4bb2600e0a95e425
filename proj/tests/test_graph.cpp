#include <doctest.h>

#include <random>

#include "hti/errors.hpp"
#include "hti/graph.hpp"
#include "invariants.hpp"

using namespace hti;

namespace {

void check_spectrum(const NetworkGraph& g, std::initializer_list<double> expected) {
    const auto& s = g.laplacian_spectrum();
    REQUIRE(s.size() == static_cast<Eigen::Index>(expected.size()));
    int k = 0;
    for (double e : expected) CHECK(s[k++] == doctest::Approx(e).epsilon(1e-12));
}

std::vector<NetworkGraph> sample_graphs() {
    std::vector<NetworkGraph> out;
    out.push_back(complete_graph(6));
    out.push_back(cycle_graph(7));
    for (std::uint64_t s = 1; s <= 4; ++s) {
        out.push_back(build_regular(12, 3, s));
        out.push_back(build_random_geometric(25, 0.4, s));
    }
    return out;
}

}  // namespace

TEST_CASE("complete graph on four agents") {
    const auto g = complete_graph(4);
    check_spectrum(g, {0.0, 4.0, 4.0, 4.0});
    CHECK(g.algebraic_connectivity() == doctest::Approx(4.0));
    CHECK(g.is_regular());
    CHECK(g.arc_count() == 12);
}

TEST_CASE("four-cycle spectrum") { check_spectrum(cycle_graph(4), {0.0, 2.0, 2.0, 4.0}); }

TEST_CASE("regular graph of order eight and degree three") {
    const auto g = build_regular(8, 3, 7);
    CHECK(g.edges().size() == 12);
    for (int i = 0; i < 8; ++i) CHECK(g.degree(i) == 3);
    CHECK(g.connected());
    CHECK(g.laplacian_spectrum().sum() == doctest::Approx(24.0));
}

TEST_CASE("regular graph with odd stub count is rejected") {
    CHECK_THROWS_AS((void)build_regular(5, 3, 1), ParameterError);
    CHECK_THROWS_AS((void)build_regular(6, 6, 1), ParameterError);
    CHECK_THROWS_AS((void)build_regular(6, 1, 1), ParameterError);
}

TEST_CASE("3-regular graph on four agents is the complete graph") {
    for (std::uint64_t s = 0; s < 5; ++s) CHECK(build_regular(4, 3, s) == complete_graph(4));
}

TEST_CASE("random geometric graph is reproducible from its seed") {
    const auto g1 = build_random_geometric(40, 0.3, 99);
    const auto g2 = build_random_geometric(40, 0.3, 99);
    CHECK(g1 == g2);
    CHECK(g1.connected());
    CHECK(g1.algebraic_connectivity() > kConnectivityThreshold);
    CHECK(build_regular(20, 4, 5) == build_regular(20, 4, 5));
}

TEST_CASE("random geometric graph with radius above the diameter of the square") {
    const auto g = build_random_geometric(2, 1.5, 3);
    REQUIRE(g.edges().size() == 1);
    CHECK(g.edges().front() == NetworkGraph::Edge{0, 1});
}

TEST_CASE("random geometric graph parameter checks") {
    CHECK_THROWS_AS((void)build_random_geometric(10, 0.0, 1), ParameterError);
    CHECK_THROWS_AS((void)build_random_geometric(10, -0.5, 1), ParameterError);
    CHECK(build_random_geometric(6, 2.0, 1) == complete_graph(6));
    CHECK_THROWS_AS((void)build_random_geometric(1, 0.5, 1), ParameterError);
    CHECK_THROWS_AS((void)build_random_geometric(60, 0.01, 1, 3), GenerationError);
}

TEST_CASE("constructor rejects malformed edge lists") {
    CHECK_THROWS_AS(NetworkGraph(3, {{0, 0}}), ParameterError);
    CHECK_THROWS_AS(NetworkGraph(3, {{0, 1}, {1, 0}}), ParameterError);
    CHECK_THROWS_AS(NetworkGraph(3, {{0, 3}}), ParameterError);
}

TEST_CASE("arc layout is sorted CSR") {
    const NetworkGraph g(4, {{2, 0}, {0, 1}, {3, 2}});
    CHECK(g.arc_count() == 6);
    int arc = 0;
    for (int i = 0; i < g.size(); ++i) {
        CHECK(g.arc_offset(i) == arc);
        const auto nb = g.neighbors(i);
        CHECK(std::is_sorted(nb.begin(), nb.end()));
        arc += static_cast<int>(nb.size());
    }
    CHECK(g.neighbors(0)[0] == 1);
    CHECK(g.neighbors(0)[1] == 2);
}

TEST_CASE("disconnected graph has zero algebraic connectivity") {
    const NetworkGraph g(4, {{0, 1}, {2, 3}});
    CHECK_FALSE(g.connected());
    CHECK(std::abs(g.algebraic_connectivity()) < kConnectivityThreshold);
}

TEST_CASE("laplacian invariants") {
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> normal;
    CHECK(invariant::trace_identity_deviation(sample_graphs()) <= 1e-12);
    for (const auto& g : sample_graphs()) {
        const Eigen::MatrixXd L = g.laplacian();
        const auto& s = g.laplacian_spectrum();
        CAPTURE(g.size());
        CHECK((L - L.transpose()).norm() == 0.0);
        CHECK((L * Eigen::VectorXd::Ones(g.size())).norm() < 1e-12);
        CHECK(std::abs(s[0]) < 1e-10);
        CHECK(s.minCoeff() > -1e-10);
        CHECK(std::is_sorted(s.data(), s.data() + s.size()));
        CHECK(s.sum() == doctest::Approx(2.0 * static_cast<double>(g.edges().size())).epsilon(1e-12));
        CHECK(g.connected() == (s[1] > kConnectivityThreshold));
        for (int rep = 0; rep < 20; ++rep) {
            Eigen::VectorXd x(g.size());
            for (auto& v : x) v = normal(rng);
            double quad = 0.0;
            for (const auto& [i, j] : g.edges()) quad += (x[i] - x[j]) * (x[i] - x[j]);
            CHECK(x.dot(L * x) == doctest::Approx(quad).epsilon(1e-12));
        }
    }
}

TEST_CASE("json round trip") {
    const auto g = build_random_geometric(15, 0.5, 4);
    CHECK(graph_from_json(graph_to_json(g)) == g);
    try {
        (void)graph_from_json(R"({"n": 3, "edges": [[0, 1], [1]]})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.pointer() == "/edges/1");
    }
    CHECK_THROWS_AS((void)graph_from_json("{"), ConfigError);
}
