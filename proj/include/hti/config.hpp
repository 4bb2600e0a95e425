#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hti/experiment.hpp"

namespace hti {

struct ExperimentSection {
    long replications = 100;
    long horizon = 10000;
    long stride = 10;
    Method method = Method::proposed;
    std::vector<Method> methods{Method::proposed, Method::lu, Method::consensus_only};
    double window = 0.5;  // trailing fraction for slope fits
};

struct SweepBSection {
    std::vector<double> grid;
    Example1Params params;
    bool monte_carlo = false;
};

struct SweepRhoSection {
    std::vector<double> grid;
    Example2Params params;
};

struct AsymptoticsSection {
    /// Drop the consensus term from Sigma (phi_c'(0) := 0), as in the scalar
    /// innovation-only closed form.
    bool innovation_only_sigma = false;
};

struct RateSection {
    double G_c = 1.0;
    double G_o = 1.0;
    std::optional<double> k;
    double margin = 1e-6;
};

/// Parsed and validated configuration. `resolved` has every default expanded
/// and every generated quantity (graph edges, theta*, regressors, x0) written
/// out explicitly, so loading it again reproduces the run bit-exactly.
struct Config {
    nlohmann::json resolved;
    std::uint64_t seed = 0;
    int jobs = 0;

    std::shared_ptr<const NetworkGraph> graph;
    std::optional<EstimatorConfig> estimator;
    StateMatrix x0;
    std::optional<ExperimentSection> experiment;
    DiffusionConfig diffusion;
    std::optional<SweepBSection> sweep_b;
    std::optional<SweepRhoSection> sweep_rho;
    AsymptoticsSection asymptotics;
    RateSection rate;

    [[nodiscard]] ExperimentPlan plan() const;
};

inline constexpr std::uint64_t kDefaultSeed = 20240601;

/// --seed, then the config's "seed", then HTI_SEED, then kDefaultSeed.
[[nodiscard]] std::uint64_t resolve_seed(std::optional<std::uint64_t> cli, const nlohmann::json& j,
                                         const char* env_value);

/// Throws ConfigError with the JSON pointer of the first offending field.
[[nodiscard]] Config parse_config(const nlohmann::json& j, std::optional<std::uint64_t> cli_seed = std::nullopt,
                                  const char* env_seed = nullptr);

[[nodiscard]] nlohmann::json read_json_file(const std::string& path);

}  // namespace hti
