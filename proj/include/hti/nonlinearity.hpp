#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "hti/noise.hpp"

namespace hti {

enum class NonlinearityKind { identity, sign, tanh_clip, hard_clip };

struct JumpPoint {
    double location;
    double size;  // Psi(nu + 0) - Psi(nu - 0)
};

/// Odd, nondecreasing map Psi applied entrywise.
class Nonlinearity {
public:
    [[nodiscard]] static Nonlinearity identity() { return {NonlinearityKind::identity, 0.0}; }
    [[nodiscard]] static Nonlinearity sign() { return {NonlinearityKind::sign, 0.0}; }
    /// B * tanh(w / B).
    [[nodiscard]] static Nonlinearity tanh_clip(double B);
    /// min(max(w, -B), B).
    [[nodiscard]] static Nonlinearity hard_clip(double B);

    [[nodiscard]] NonlinearityKind kind() const noexcept { return kind_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }

    [[nodiscard]] double operator()(double w) const noexcept {
        switch (kind_) {
        case NonlinearityKind::identity: return w;
        case NonlinearityKind::sign: return w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0);
        case NonlinearityKind::tanh_clip: return scale_ * std::tanh(w / scale_);
        case NonlinearityKind::hard_clip: return w > scale_ ? scale_ : (w < -scale_ ? -scale_ : w);
        }
        return w;
    }
    [[nodiscard]] double eval(double w) const noexcept { return (*this)(w); }

    /// Psi' away from jump points.
    [[nodiscard]] double derivative(double w) const noexcept;

    [[nodiscard]] std::vector<JumpPoint> jump_points() const;
    /// Points where Psi is continuous but Psi' is not.
    [[nodiscard]] std::vector<double> kink_points() const;

    [[nodiscard]] bool bounded() const noexcept { return kind_ != NonlinearityKind::identity; }
    /// sup |Psi|; +infinity for identity.
    [[nodiscard]] double bound() const noexcept;
    /// Radius beyond which Psi equals +-bound() exactly in double precision.
    [[nodiscard]] double saturation_radius() const noexcept;

    [[nodiscard]] nlohmann::json to_json() const;

    friend bool operator==(const Nonlinearity&, const Nonlinearity&) = default;

private:
    Nonlinearity(NonlinearityKind kind, double scale) : kind_(kind), scale_(scale) {}

    NonlinearityKind kind_;
    double scale_;
};

/// Marks a divergent second moment. Never produced by overflow.
inline constexpr double kInfiniteVariance = std::numeric_limits<double>::infinity();

struct EffectiveStatistics {
    double phi_prime_zero = 0.0;
    double sigma_sq = 0.0;  // may be kInfiniteVariance
    double sigma_oc = 0.0;

    [[nodiscard]] bool finite_variance() const noexcept { return sigma_sq != kInfiniteVariance; }
};

/// phi(a) = E[Psi(a + n)]. Throws UnsupportedError when m has no pdf.
[[nodiscard]] double phi(const Nonlinearity& psi, const NoiseModel& m, double a);

/// Jump terms size * p(nu) plus the integral of Psi' p.
[[nodiscard]] double phi_prime_zero(const Nonlinearity& psi, const NoiseModel& m);

/// E[Psi(n)^2]; kInfiniteVariance for identity Psi when the noise variance diverges.
[[nodiscard]] double effective_variance(const Nonlinearity& psi, const NoiseModel& m);

/// E[Psi_c(rho n + sqrt(1 - rho^2) n_hat) Psi_o(n)] for n ~ m_obs, n_hat ~ spec.aux.
/// Both maps must be bounded.
[[nodiscard]] double cross_covariance(const Nonlinearity& psi_c, const Nonlinearity& psi_o,
                                      const CorrelationSpec& spec, const NoiseModel& m_obs);

/// phi_c'(0) of the sign map under correlated arc noise:
/// 2 * integral of p_aux(-rho x) p_obs(sqrt(1 - rho^2) x).
[[nodiscard]] double phi_c_prime_zero_correlated(const Nonlinearity& psi_c, const CorrelationSpec& spec,
                                                 const NoiseModel& m_obs);

[[nodiscard]] EffectiveStatistics effective_statistics(const Nonlinearity& psi, const NoiseModel& m);

[[nodiscard]] Nonlinearity nonlinearity_from_json(const nlohmann::json& j, const std::string& pointer);

}  // namespace hti
