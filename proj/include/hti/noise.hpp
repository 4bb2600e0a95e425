#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "hti/random.hpp"

namespace hti {

enum class NoiseKind { pareto_like, lambert_gaussian, gaussian, zero };

/// Symmetric zero-mean scalar noise law.
///
///   pareto_like(beta):       p(w) = (beta - 1) / (2 (1 + |w|)^beta), beta > 2.
///                            Infinite variance for beta <= 3.
///   lambert_gaussian(h):     v * exp(h v^2 / 2), v standard normal; sampling only.
///   gaussian(sigma):         N(0, sigma^2).
///   zero:                    degenerate at 0 (no noise).
class NoiseModel {
public:
    [[nodiscard]] static NoiseModel pareto_like(double beta);
    [[nodiscard]] static NoiseModel lambert_gaussian(double h);
    [[nodiscard]] static NoiseModel gaussian(double sigma);
    [[nodiscard]] static NoiseModel zero() { return NoiseModel(NoiseKind::zero, 0.0); }

    [[nodiscard]] NoiseKind kind() const noexcept { return kind_; }
    /// beta, h or sigma depending on kind.
    [[nodiscard]] double parameter() const noexcept { return param_; }

    [[nodiscard]] bool has_pdf() const noexcept {
        return kind_ == NoiseKind::pareto_like || kind_ == NoiseKind::gaussian;
    }
    /// Throws UnsupportedError when has_pdf() is false.
    [[nodiscard]] double pdf(double w) const;
    [[nodiscard]] double cdf(double w) const;
    /// P(n > w).
    [[nodiscard]] double survival(double w) const;
    /// Second moment; +infinity when it diverges.
    [[nodiscard]] double variance() const noexcept;

    [[nodiscard]] double sample(RandomStream& rng) const;

    [[nodiscard]] nlohmann::json to_json() const;
    [[nodiscard]] std::string describe() const;

    friend bool operator==(const NoiseModel&, const NoiseModel&) = default;

private:
    NoiseModel(NoiseKind kind, double param) : kind_(kind), param_(param) {}

    NoiseKind kind_;
    double param_;
};

/// xi = rho * n + sqrt(1 - rho^2) * n_hat, with n the same-instant observation
/// noise of the transmitting agent and n_hat a fresh draw from `aux`.
struct CorrelationSpec {
    double rho;
    NoiseModel aux;

    /// Throws ParameterError unless |rho| < 1.
    CorrelationSpec(double rho, NoiseModel aux);

    [[nodiscard]] double mix(double n_obs, double n_hat) const noexcept;
    [[nodiscard]] nlohmann::json to_json() const;

    friend bool operator==(const CorrelationSpec&, const CorrelationSpec&) = default;
};

using CommNoise = std::variant<NoiseModel, CorrelationSpec>;

/// Inverse-CDF transform of a uniform draw u in (0, 1).
[[nodiscard]] double sample_pareto_like(double beta, double u);
[[nodiscard]] double sample_lambert_gaussian(double h, double v) noexcept;

/// One arc-noise entry. Independent mode ignores `n_obs`.
[[nodiscard]] double draw_arc_noise(const CommNoise& spec, double n_obs, RandomStream& rng);

[[nodiscard]] NoiseModel noise_from_json(const nlohmann::json& j, const std::string& pointer);
[[nodiscard]] CommNoise comm_noise_from_json(const nlohmann::json& j, const std::string& pointer);
[[nodiscard]] nlohmann::json comm_noise_to_json(const CommNoise& c);

}  // namespace hti
