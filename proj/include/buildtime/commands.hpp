#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "buildtime/config.hpp"
#include "buildtime/container.hpp"
#include "buildtime/evaluate.hpp"
#include "buildtime/predictor.hpp"

namespace buildtime {

// Files inside the output directory.
struct OutputLayout {
    std::filesystem::path dir;

    [[nodiscard]] std::filesystem::path train_matrix() const { return dir / "train.btfm"; }
    [[nodiscard]] std::filesystem::path test_matrix() const { return dir / "test.btfm"; }
    [[nodiscard]] std::filesystem::path manifest() const { return dir / "manifest.json"; }
    [[nodiscard]] std::filesystem::path model() const { return dir / "model.json"; }
};

// Loads, cleans, shuffles and splits the raw CSV; caches encoded train/test
// matrices (test imputed with training constants) and writes manifest.json.
// Returns the manifest.
nlohmann::json cmd_prepare(const PipelineConfig& config);

// Repeated CV of the roster on a training subsample. Writes benchmark.csv,
// benchmark_folds.csv and benchmark.txt.
std::vector<CvReport> cmd_benchmark(const PipelineConfig& config);

// method is "rfe" or "boruta". Writes <method>.json and <method>.csv and
// returns the JSON report.
nlohmann::json cmd_select(const PipelineConfig& config, std::string_view method);

// Fits config.train (or `family` with default hyperparameters) on the full
// training matrix and saves the container to model.json.
ModelContainer cmd_train(const PipelineConfig& config, std::optional<Family> family = std::nullopt);

// Held-out metrics on a test subsample: every roster model fitted on the
// training subsample, or only the saved container at `model` when given.
// Writes test.csv and test.txt.
std::vector<TestResult> cmd_evaluate(const PipelineConfig& config,
                                     const std::optional<std::filesystem::path>& model = std::nullopt);

// Same handler as the HTTP /predict endpoint.
HttpReply cmd_predict(const ModelContainer& container, const nlohmann::json& request);

// Blocks serving the container until the process is stopped.
void cmd_serve(const std::filesystem::path& model, const std::string& host, int port);

} // namespace buildtime
