#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hti/errors.hpp"
#include "hti/noise.hpp"
#include "invariants.hpp"
#include "oracles.hpp"

using namespace hti;

TEST_CASE("pareto-like density") {
    CHECK(NoiseModel::pareto_like(2.05).pdf(0.0) == doctest::Approx(0.525).epsilon(1e-14));
    CHECK(NoiseModel::pareto_like(3.0).pdf(1.0) == doctest::Approx(0.125).epsilon(1e-14));
    const auto m = NoiseModel::pareto_like(2.5);
    for (double w : {0.1, 1.0, 7.5, 300.0}) {
        CHECK(m.pdf(w) == m.pdf(-w));
        CHECK(m.pdf(w) == doctest::Approx(oracle::pareto_pdf(2.5, w)).epsilon(1e-14));
        CHECK(m.cdf(w) == doctest::Approx(oracle::pareto_cdf(2.5, w)).epsilon(1e-14));
        CHECK(m.cdf(-w) + m.cdf(w) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("noise parameter validation") {
    CHECK_THROWS_AS((void)NoiseModel::pareto_like(2.0), ParameterError);
    CHECK_THROWS_AS((void)NoiseModel::pareto_like(1.5), ParameterError);
    CHECK_THROWS_AS((void)NoiseModel::lambert_gaussian(-0.1), ParameterError);
    CHECK_THROWS_AS((void)NoiseModel::gaussian(0.0), ParameterError);
}

TEST_CASE("laws without a closed-form density") {
    CHECK_FALSE(NoiseModel::lambert_gaussian(2.0).has_pdf());
    CHECK_THROWS_AS((void)NoiseModel::lambert_gaussian(2.0).pdf(0.0), UnsupportedError);
    CHECK_THROWS_AS((void)NoiseModel::zero().pdf(0.0), UnsupportedError);
}

TEST_CASE("inverse transform of the pareto-like law") {
    CHECK(sample_pareto_like(2.05, 0.5) == 0.0);
    CHECK(sample_pareto_like(3.0, 0.75) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-14));
    CHECK(sample_pareto_like(3.0, 0.25) == doctest::Approx(1.0 - std::sqrt(2.0)).epsilon(1e-14));
    const double big = sample_pareto_like(2.05, 1.0 - 1e-12);
    CHECK(std::isfinite(big));
    CHECK(big > 1e10);
    CHECK_THROWS_AS((void)sample_pareto_like(3.0, 0.0), ParameterError);
    CHECK_THROWS_AS((void)sample_pareto_like(3.0, 1.0), ParameterError);
}

TEST_CASE("lambert-gaussian transform") {
    CHECK(sample_lambert_gaussian(0.0, 1.3) == 1.3);
    CHECK(sample_lambert_gaussian(2.0, 1.0) == doctest::Approx(std::numbers::e).epsilon(1e-14));
    CHECK(sample_lambert_gaussian(2.0, -0.7) == -sample_lambert_gaussian(2.0, 0.7));
}

TEST_CASE("correlated arc noise mixing") {
    const CorrelationSpec spec(0.6, NoiseModel::pareto_like(2.05));
    CHECK(spec.mix(1.0, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
    const CorrelationSpec near_one(1.0 - 1e-12, NoiseModel::pareto_like(2.05));
    CHECK(near_one.mix(2.5, 100.0) == doctest::Approx(2.5).epsilon(1e-4));
    CHECK_THROWS_AS(CorrelationSpec(1.0, NoiseModel::zero()), ParameterError);
    CHECK_THROWS_AS(CorrelationSpec(-1.0, NoiseModel::zero()), ParameterError);
}

TEST_CASE("arc noise with zero correlation is an independent draw") {
    const auto aux = NoiseModel::pareto_like(2.05);
    const CommNoise corr = CorrelationSpec(0.0, aux);
    const CommNoise indep = aux;
    RandomStream a(5), b(5);
    for (int k = 0; k < 100; ++k) {
        CHECK(draw_arc_noise(corr, 123.0, a) == draw_arc_noise(indep, 123.0, b));
    }
}

TEST_CASE("pareto-like samples pass Kolmogorov-Smirnov") {
    for (double beta : {2.05, 3.0, 5.0}) {
        CAPTURE(beta);
        CHECK(invariant::ks_pareto(beta, 1000 + static_cast<std::uint64_t>(beta * 100), 100000) < 0.01);
    }
}

TEST_CASE("sample second moment does not stabilize for beta near two") {
    const auto m = NoiseModel::pareto_like(2.05);
    std::vector<double> moments;
    for (std::uint64_t block = 0; block < 4; ++block) {
        RandomStream rng(split_seed(77, block));
        double s = 0.0;
        for (int k = 0; k < 1000000; ++k) {
            const double w = m.sample(rng);
            s += w * w;
        }
        moments.push_back(s / 1e6);
    }
    const auto [lo, hi] = std::minmax_element(moments.begin(), moments.end());
    CHECK(*hi / *lo > 2.0);
}

TEST_CASE("finite variance for beta above three") {
    const auto m = NoiseModel::pareto_like(5.0);
    const double analytic = 2.0 / ((5.0 - 2.0) * (5.0 - 3.0));
    CHECK(m.variance() == doctest::Approx(analytic).epsilon(1e-14));
    const double by_quadrature = oracle::pareto_abs_moment(5.0, [](double x) { return x * x; });
    CHECK(by_quadrature == doctest::Approx(analytic).epsilon(1e-10));

    RandomStream rng(2024);
    double s = 0.0;
    constexpr int n = 1000000;
    for (int k = 0; k < n; ++k) {
        const double w = m.sample(rng);
        s += w * w;
    }
    CHECK(s / n == doctest::Approx(analytic).epsilon(0.05));
}

TEST_CASE("variance classification") {
    CHECK(std::isinf(NoiseModel::pareto_like(2.05).variance()));
    CHECK(std::isinf(NoiseModel::pareto_like(3.0).variance()));
    CHECK(NoiseModel::lambert_gaussian(0.0).variance() == doctest::Approx(1.0));
    CHECK(NoiseModel::lambert_gaussian(0.25).variance() == doctest::Approx(std::pow(0.5, -1.5)));
    CHECK(std::isinf(NoiseModel::lambert_gaussian(2.0).variance()));
    CHECK(NoiseModel::gaussian(2.0).variance() == doctest::Approx(4.0));
    CHECK(NoiseModel::zero().variance() == 0.0);
}

TEST_CASE("streams with equal seeds agree") {
    const auto m = NoiseModel::lambert_gaussian(0.3);
    RandomStream a(11), b(11), c(12);
    bool differs = false;
    for (int k = 0; k < 1000; ++k) {
        const double x = m.sample(a);
        CHECK(x == m.sample(b));
        differs = differs || x != m.sample(c);
    }
    CHECK(differs);
}

TEST_CASE("noise json parsing") {
    using nlohmann::json;
    CHECK(noise_from_json(json{{"kind", "pareto_like"}, {"beta", 2.05}}, "/n") == NoiseModel::pareto_like(2.05));
    const auto c = comm_noise_from_json(json{{"rho", 0.5}, {"aux", {{"kind", "gaussian"}}}}, "/c");
    CHECK(std::get<CorrelationSpec>(c).aux == NoiseModel::gaussian(1.0));
    CHECK(comm_noise_to_json(c)["rho"] == 0.5);

    const auto pointer_of = [](const json& j) {
        try {
            (void)comm_noise_from_json(j, "/x");
        } catch (const ConfigError& e) {
            return e.pointer();
        }
        return std::string("none");
    };
    CHECK(pointer_of(json{{"kind", "pareto_like"}}) == "/x/beta");
    CHECK(pointer_of(json{{"kind", "cauchy"}}) == "/x/kind");
    CHECK(pointer_of(json{{"kind", "pareto_like"}, {"beta", 1.0}}) == "/x");
    CHECK(pointer_of(json{{"rho", 1.5}, {"aux", {{"kind", "zero"}}}}) == "/x/rho");
    CHECK(pointer_of(json{{"rho", 0.5}}) == "/x/aux");
}
