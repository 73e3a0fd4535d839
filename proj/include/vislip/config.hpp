#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vislip/collection.hpp"
#include "vislip/control.hpp"
#include "vislip/model_select.hpp"
#include "vislip/svr.hpp"

namespace vislip {

struct ModelSelectionConfig {
    int folds = 3;
    std::size_t max_train_samples = 800;
    double test_fraction = 0.1;
};

struct StabilizationConfig {
    int trials = 10;                     // per method
    std::vector<std::string> materials;  // empty: cycle through the experiment materials
};

struct ExperimentConfig {
    std::string profile = "full";
    std::uint64_t seed = 42;
    std::vector<MaterialSpec> materials;
    int trials_per_material = 100;
    int max_attempts_factor = 20;
    std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
    CollectionSetup setup;
    std::vector<SvrParams> grid;  // empty: default grid sized to each method's feature dimension
    ModelSelectionConfig selection;
    ControllerConfig controller;
    ScoreWeights weights;
    StabilizationConfig stabilization;
    std::string output_dir = "runs/full";

    void validate() const;
    std::vector<SvrParams> grid_for(std::size_t dim) const;

    nlohmann::json to_json() const;
    /// Missing keys keep the values of `base`; unknown keys are rejected.
    static ExperimentConfig from_json(const nlohmann::json& j, const ExperimentConfig& base);
    /// FNV-1a of the canonical JSON form without output_dir, hex encoded.
    std::string hash() const;
};

/// "full": five materials x 100 trials. "demo": pla and tpu x 10 trials.
ExperimentConfig profile_config(std::string_view name);

ExperimentConfig load_config(const std::string& path, std::string_view default_profile = "full");

}  // namespace vislip
