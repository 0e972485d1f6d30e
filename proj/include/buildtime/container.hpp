#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "buildtime/dataset.hpp"
#include "buildtime/pipeline.hpp"

namespace buildtime {

// Features a prediction form asks the user for; the rest default to training
// means. Only those present in a model's schema are foregrounded.
inline constexpr std::array<std::string_view, 7> kForegroundFeatures{
    "gh_team_size",   "gh_src_churn",      "gh_test_churn", "gh_files_added",
    "gh_files_deleted", "gh_files_modified", "tr_num_jobs"};

// Hash of the ordered predictor names; clients echo it to detect a stale schema.
std::string schema_hash(const std::vector<std::string>& predictors);

// A trained pipeline plus what is needed to serve it.
struct ModelContainer {
    Pipeline pipeline;
    std::vector<double> training_means; // aligned with predictors()
    std::vector<std::string> foreground;
    nlohmann::json metadata = nlohmann::json::object();

    [[nodiscard]] const std::vector<std::string>& predictors() const noexcept
    {
        return pipeline.plan.input_columns;
    }
    [[nodiscard]] std::string schema_hash() const { return buildtime::schema_hash(predictors()); }

    [[nodiscard]] nlohmann::json to_json() const;
    static ModelContainer from_json(const nlohmann::json& j);
};

ModelContainer make_container(Pipeline pipeline, const FeatureMatrix& train,
                              nlohmann::json metadata = nlohmann::json::object());

void save_container(const std::filesystem::path& path, const ModelContainer& container);
ModelContainer load_container(const std::filesystem::path& path);

} // namespace buildtime
