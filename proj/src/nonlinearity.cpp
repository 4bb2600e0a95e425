#include "hti/nonlinearity.hpp"

#include <algorithm>
#include <cmath>

#include "hti/errors.hpp"
#include "hti/quadrature.hpp"

namespace hti {

Nonlinearity Nonlinearity::tanh_clip(double B) {
    if (!(B > 0.0) || !std::isfinite(B)) throw ParameterError("tanh_clip needs finite B > 0");
    return {NonlinearityKind::tanh_clip, B};
}

Nonlinearity Nonlinearity::hard_clip(double B) {
    if (!(B > 0.0) || !std::isfinite(B)) throw ParameterError("hard_clip needs finite B > 0");
    return {NonlinearityKind::hard_clip, B};
}

double Nonlinearity::derivative(double w) const noexcept {
    switch (kind_) {
    case NonlinearityKind::identity: return 1.0;
    case NonlinearityKind::sign: return 0.0;
    case NonlinearityKind::tanh_clip: {
        const double t = std::tanh(w / scale_);
        return 1.0 - t * t;
    }
    case NonlinearityKind::hard_clip: return std::abs(w) < scale_ ? 1.0 : 0.0;
    }
    return 0.0;
}

std::vector<JumpPoint> Nonlinearity::jump_points() const {
    if (kind_ == NonlinearityKind::sign) return {{0.0, 2.0}};
    return {};
}

std::vector<double> Nonlinearity::kink_points() const {
    if (kind_ == NonlinearityKind::hard_clip) return {-scale_, scale_};
    return {};
}

double Nonlinearity::bound() const noexcept {
    switch (kind_) {
    case NonlinearityKind::identity: return std::numeric_limits<double>::infinity();
    case NonlinearityKind::sign: return 1.0;
    default: return scale_;
    }
}

double Nonlinearity::saturation_radius() const noexcept {
    switch (kind_) {
    case NonlinearityKind::identity: return std::numeric_limits<double>::infinity();
    case NonlinearityKind::sign: return 0.0;
    // tanh(x) rounds to 1 for x > 19.1
    case NonlinearityKind::tanh_clip: return 20.0 * scale_;
    case NonlinearityKind::hard_clip: return scale_;
    }
    return 0.0;
}

nlohmann::json Nonlinearity::to_json() const {
    switch (kind_) {
    case NonlinearityKind::identity: return {{"kind", "identity"}};
    case NonlinearityKind::sign: return {{"kind", "sign"}};
    case NonlinearityKind::tanh_clip: return {{"kind", "tanh_clip"}, {"B", scale_}};
    case NonlinearityKind::hard_clip: return {{"kind", "hard_clip"}, {"B", scale_}};
    }
    return {};
}

namespace {

// Far end of the explicitly integrated range when the integrand never saturates.
constexpr double kFarField = 1e9;

void require_pdf(const NoiseModel& m) {
    if (!m.has_pdf()) throw UnsupportedError("density required but unavailable for " + m.describe());
}

// Ascending panel boundaries on [0, W]: decades, `breaks` clipped to (0, W), W.
std::vector<double> panel_points(double W, std::vector<double> breaks) {
    std::vector<double> pts{0.0, W};
    for (double p = 1e-3; p < W; p *= 10.0) pts.push_back(p);
    for (double b : breaks)
        if (b > 0.0 && b < W) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

// integral over [0, inf) of g(w) p(w) dw, where g(w) = limit for w >= W.
double half_line(const Integrand& g, const NoiseModel& m, double W, double limit, std::vector<double> breaks,
                 const QuadratureOptions& opt = {}) {
    double tail = limit == 0.0 ? 0.0 : limit * m.survival(W);
    if (!(W > 0.0)) return tail;
    const auto pts = panel_points(W, std::move(breaks));
    const auto r = integrate_panels([&](double w) { return g(w) * m.pdf(w); }, pts, opt);
    return r.value + tail;
}

// Breakpoints of w -> Psi(u + s w) + Psi(u - s w) on w >= 0.
std::vector<double> pair_breaks(const Nonlinearity& psi, double u, double s) {
    std::vector<double> out;
    for (const auto& j : psi.jump_points()) out.push_back(std::abs(j.location - u) / s);
    for (double k : psi.kink_points()) out.push_back(std::abs(k - u) / s);
    if (psi.kind() == NonlinearityKind::tanh_clip) {
        out.push_back(std::abs(u) / s);
        out.push_back((std::abs(u) + psi.scale()) / s);
    }
    return out;
}

// E[Psi(u + s n)] by pairing w and -w.
double smoothed(const Nonlinearity& psi, const NoiseModel& m, double u, double s) {
    if (!psi.bounded()) return u;
    const double W = (std::abs(u) + psi.saturation_radius()) / s;
    return half_line([&](double w) { return psi(u + s * w) + psi(u - s * w); }, m, W, 0.0, pair_breaks(psi, u, s));
}

}  // namespace

double phi(const Nonlinearity& psi, const NoiseModel& m, double a) {
    if (m.kind() == NoiseKind::zero) return psi(a);
    require_pdf(m);
    if (!psi.bounded()) {
        // Pair sum is the constant 2a; integrate it anyway so the path is shared.
        return half_line([a](double) { return 2.0 * a; }, m, 1.0, 2.0 * a, {});
    }
    return smoothed(psi, m, a, 1.0);
}

double phi_prime_zero(const Nonlinearity& psi, const NoiseModel& m) {
    if (m.kind() == NoiseKind::zero) {
        if (!psi.jump_points().empty()) throw UnsupportedError("phi'(0) of a discontinuous map under zero noise");
        return psi.derivative(0.0);
    }
    require_pdf(m);
    double jumps = 0.0;
    for (const auto& j : psi.jump_points()) jumps += j.size * m.pdf(j.location);
    if (psi.kind() == NonlinearityKind::sign) return jumps;

    const auto twice_derivative = [&](double w) { return 2.0 * psi.derivative(w); };
    if (!psi.bounded()) return jumps + half_line(twice_derivative, m, 1.0, 2.0, {});
    return jumps + half_line(twice_derivative, m, psi.saturation_radius(), 0.0, pair_breaks(psi, 0.0, 1.0));
}

double effective_variance(const Nonlinearity& psi, const NoiseModel& m) {
    if (m.kind() == NoiseKind::zero) return 0.0;
    if (!psi.bounded()) return m.variance();
    require_pdf(m);
    const double c = psi.bound();
    return half_line([&](double w) {
        const double v = psi(w);
        return 2.0 * v * v;
    }, m, psi.saturation_radius(), 2.0 * c * c, pair_breaks(psi, 0.0, 1.0));
}

double cross_covariance(const Nonlinearity& psi_c, const Nonlinearity& psi_o, const CorrelationSpec& spec,
                        const NoiseModel& m_obs) {
    require_pdf(m_obs);
    require_pdf(spec.aux);
    if (!psi_c.bounded() || !psi_o.bounded())
        throw UnsupportedError("cross_covariance needs bounded nonlinearities");
    if (spec.rho == 0.0) return 0.0;

    const double rho = spec.rho;
    const double s = std::sqrt(1.0 - rho * rho);
    // inner(x) = E[Psi_c(rho x + s n_hat)] is odd in x, so the outer integrand is even.
    const auto outer = [&](double x) { return 2.0 * psi_o(x) * smoothed(psi_c, spec.aux, rho * x, s); };
    const double limit = 2.0 * psi_o.bound() * psi_c.bound() * (rho > 0.0 ? 1.0 : -1.0);

    std::vector<double> breaks;
    for (const auto& j : psi_o.jump_points()) breaks.push_back(std::abs(j.location));
    for (double k : psi_o.kink_points()) breaks.push_back(std::abs(k));
    QuadratureOptions opt;
    opt.abs_tol = 1e-7;
    opt.rel_tol = 1e-7;
    return half_line(outer, m_obs, kFarField, limit, std::move(breaks), opt);
}

double phi_c_prime_zero_correlated(const Nonlinearity& psi_c, const CorrelationSpec& spec, const NoiseModel& m_obs) {
    if (psi_c.kind() != NonlinearityKind::sign)
        throw UnsupportedError("correlated phi_c'(0) formula holds for the sign map only");
    require_pdf(m_obs);
    require_pdf(spec.aux);
    const double rho = spec.rho;
    const double s = std::sqrt(1.0 - rho * rho);
    const auto f = [&](double x) { return 4.0 * spec.aux.pdf(rho * x) * m_obs.pdf(s * x); };
    // Integrand is a product of two decaying densities; the remainder past kFarField is below 1e-15.
    const auto pts = panel_points(kFarField, {1.0 / s});
    return integrate_panels(f, pts).value;
}

EffectiveStatistics effective_statistics(const Nonlinearity& psi, const NoiseModel& m) {
    return {phi_prime_zero(psi, m), effective_variance(psi, m), 0.0};
}

Nonlinearity nonlinearity_from_json(const nlohmann::json& j, const std::string& pointer) {
    if (!j.is_object()) throw ConfigError(pointer, "expected a nonlinearity object");
    if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError(pointer + "/kind", "required string");
    const auto kind = j["kind"].get<std::string>();
    if (kind == "identity") return Nonlinearity::identity();
    if (kind == "sign") return Nonlinearity::sign();
    if (kind == "tanh_clip" || kind == "hard_clip") {
        if (!j.contains("B") || !j["B"].is_number()) throw ConfigError(pointer + "/B", "required number");
        const double B = j["B"].get<double>();
        try {
            return kind == "tanh_clip" ? Nonlinearity::tanh_clip(B) : Nonlinearity::hard_clip(B);
        } catch (const ParameterError& e) {
            throw ConfigError(pointer + "/B", e.what());
        }
    }
    throw ConfigError(pointer + "/kind", "unknown nonlinearity kind '" + kind + "'");
}

}  // namespace hti
