#include "hti/noise.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "hti/errors.hpp"

namespace hti {

NoiseModel NoiseModel::pareto_like(double beta) {
    if (!(beta > 2.0)) throw ParameterError("pareto_like needs beta > 2 (finite first moment)");
    return {NoiseKind::pareto_like, beta};
}

NoiseModel NoiseModel::lambert_gaussian(double h) {
    if (!(h >= 0.0)) throw ParameterError("lambert_gaussian needs h >= 0");
    return {NoiseKind::lambert_gaussian, h};
}

NoiseModel NoiseModel::gaussian(double sigma) {
    if (!(sigma > 0.0)) throw ParameterError("gaussian needs sigma > 0");
    return {NoiseKind::gaussian, sigma};
}

double NoiseModel::pdf(double w) const {
    switch (kind_) {
    case NoiseKind::pareto_like:
        return (param_ - 1.0) / (2.0 * std::pow(1.0 + std::abs(w), param_));
    case NoiseKind::gaussian: {
        const double z = w / param_;
        return std::exp(-0.5 * z * z) / (param_ * std::sqrt(2.0 * std::numbers::pi));
    }
    default:
        throw UnsupportedError("pdf not available for " + describe());
    }
}

double NoiseModel::survival(double w) const {
    switch (kind_) {
    case NoiseKind::pareto_like:
        return w >= 0.0 ? 0.5 * std::pow(1.0 + w, 1.0 - param_) : 1.0 - 0.5 * std::pow(1.0 - w, 1.0 - param_);
    case NoiseKind::gaussian:
        return 0.5 * std::erfc(w / (param_ * std::numbers::sqrt2));
    default:
        throw UnsupportedError("distribution function not available for " + describe());
    }
}

double NoiseModel::cdf(double w) const { return survival(-w); }

double NoiseModel::variance() const noexcept {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (kind_) {
    case NoiseKind::pareto_like:
        return param_ > 3.0 ? 2.0 / ((param_ - 2.0) * (param_ - 3.0)) : inf;
    case NoiseKind::lambert_gaussian:
        // E[v^2 exp(h v^2)] = (1 - 2h)^(-3/2)
        return param_ < 0.5 ? std::pow(1.0 - 2.0 * param_, -1.5) : inf;
    case NoiseKind::gaussian:
        return param_ * param_;
    case NoiseKind::zero:
        return 0.0;
    }
    return inf;
}

double NoiseModel::sample(RandomStream& rng) const {
    switch (kind_) {
    case NoiseKind::pareto_like:
        return sample_pareto_like(param_, rng.uniform());
    case NoiseKind::lambert_gaussian:
        return sample_lambert_gaussian(param_, rng.normal());
    case NoiseKind::gaussian:
        return param_ * rng.normal();
    case NoiseKind::zero:
        return 0.0;
    }
    return 0.0;
}

nlohmann::json NoiseModel::to_json() const {
    switch (kind_) {
    case NoiseKind::pareto_like:
        return {{"kind", "pareto_like"}, {"beta", param_}};
    case NoiseKind::lambert_gaussian:
        return {{"kind", "lambert_gaussian"}, {"h", param_}};
    case NoiseKind::gaussian:
        return {{"kind", "gaussian"}, {"sigma", param_}};
    case NoiseKind::zero:
        return {{"kind", "zero"}};
    }
    return {};
}

std::string NoiseModel::describe() const { return to_json().dump(); }

CorrelationSpec::CorrelationSpec(double rho_, NoiseModel aux_) : rho(rho_), aux(aux_) {
    if (!(std::abs(rho_) < 1.0)) throw ParameterError("correlation rho must satisfy |rho| < 1");
}

double CorrelationSpec::mix(double n_obs, double n_hat) const noexcept {
    return rho * n_obs + std::sqrt(1.0 - rho * rho) * n_hat;
}

nlohmann::json CorrelationSpec::to_json() const { return {{"rho", rho}, {"aux", aux.to_json()}}; }

double sample_pareto_like(double beta, double u) {
    if (!(u > 0.0 && u < 1.0)) throw ParameterError("uniform draw must lie in (0, 1)");
    const double e = -1.0 / (beta - 1.0);
    if (u > 0.5) return std::pow(2.0 * (1.0 - u), e) - 1.0;
    if (u < 0.5) return 1.0 - std::pow(2.0 * u, e);
    return 0.0;
}

double sample_lambert_gaussian(double h, double v) noexcept { return v * std::exp(0.5 * h * v * v); }

double draw_arc_noise(const CommNoise& spec, double n_obs, RandomStream& rng) {
    if (const auto* m = std::get_if<NoiseModel>(&spec)) return m->sample(rng);
    const auto& c = std::get<CorrelationSpec>(spec);
    return c.mix(n_obs, c.aux.sample(rng));
}

namespace {

double number_at(const nlohmann::json& j, const std::string& key, const std::string& pointer) {
    if (!j.contains(key)) throw ConfigError(pointer + "/" + key, "required field missing");
    if (!j[key].is_number()) throw ConfigError(pointer + "/" + key, "expected a number");
    return j[key].get<double>();
}

}  // namespace

NoiseModel noise_from_json(const nlohmann::json& j, const std::string& pointer) {
    if (!j.is_object()) throw ConfigError(pointer, "expected a noise object");
    if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError(pointer + "/kind", "required string");
    const auto kind = j["kind"].get<std::string>();
    try {
        if (kind == "pareto_like") return NoiseModel::pareto_like(number_at(j, "beta", pointer));
        if (kind == "lambert_gaussian") return NoiseModel::lambert_gaussian(number_at(j, "h", pointer));
        if (kind == "gaussian") return NoiseModel::gaussian(j.contains("sigma") ? number_at(j, "sigma", pointer) : 1.0);
        if (kind == "zero") return NoiseModel::zero();
    } catch (const ParameterError& e) {
        throw ConfigError(pointer, e.what());
    }
    throw ConfigError(pointer + "/kind", "unknown noise kind '" + kind + "'");
}

CommNoise comm_noise_from_json(const nlohmann::json& j, const std::string& pointer) {
    if (j.is_object() && j.contains("rho")) {
        if (!j.contains("aux")) throw ConfigError(pointer + "/aux", "required field missing");
        const double rho = number_at(j, "rho", pointer);
        try {
            return CorrelationSpec(rho, noise_from_json(j["aux"], pointer + "/aux"));
        } catch (const ParameterError& e) {
            throw ConfigError(pointer + "/rho", e.what());
        }
    }
    return noise_from_json(j, pointer);
}

nlohmann::json comm_noise_to_json(const CommNoise& c) {
    return std::visit([](const auto& v) { return v.to_json(); }, c);
}

}  // namespace hti
