#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "buildtime/evaluate.hpp"
#include "buildtime/models.hpp"
#include "buildtime/preprocess.hpp"

namespace buildtime {

struct Seeds {
    std::uint64_t shuffle = 1;
    std::uint64_t split = 2;
    std::uint64_t subsample = 3;
    std::uint64_t cv = 4;
    std::uint64_t model = 5;
};

struct SelectionConfig {
    std::vector<std::size_t> rfe_sizes; // empty: 1..p
    double boruta_alpha = 0.05;
    std::size_t boruta_max_iter = 100;
    RegressorSpec model{Family::RF, {}, 0};
};

struct PipelineConfig {
    std::filesystem::path data_path = "travistorrent.csv";
    std::filesystem::path output_dir = "out";
    Seeds seeds;
    double split_fraction = 0.7;
    std::size_t cv_k = 10;
    std::size_t cv_repeats = 3;
    std::size_t subsample = 10000;      // training rows used by benchmark/select/evaluate (0 = all)
    std::size_t test_subsample = 10000; // test rows scored by evaluate (0 = all)
    PlanRecipe recipe{false, true, 0.70, std::nullopt};
    bool refit_preprocess_per_fold = true;
    std::vector<RegressorSpec> roster;
    RegressorSpec train{Family::RF, {}, 0};
    SelectionConfig selection;

    [[nodiscard]] CvSpec cv() const { return CvSpec{cv_k, cv_repeats, seeds.cv}; }

    // Throws InvalidArgument on out-of-range settings.
    void validate() const;
};

// Every family with default hyperparameters.
std::vector<RegressorSpec> default_roster();
PipelineConfig default_config();

// Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& config);
PipelineConfig load_config(const std::filesystem::path& path);

// Replaces every seed with a stream derived from `master`.
void override_seeds(PipelineConfig& config, std::uint64_t master);

} // namespace buildtime
