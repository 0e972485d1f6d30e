#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "buildtime/dataset.hpp"
#include "buildtime/models.hpp"
#include "buildtime/pipeline.hpp"
#include "buildtime/preprocess.hpp"

namespace buildtime {

struct CvSpec {
    std::size_t k = 10;
    std::size_t repeats = 3;
    std::uint64_t seed = 0;

    void validate() const;
};

// Root mean squared error, in the units of the response.
double rmse(std::span<const double> y, std::span<const double> yhat);
double rmse(const Vector& y, const Vector& yhat);

// Squared Pearson correlation of y and yhat; nullopt when either has zero
// variance.
std::optional<double> r_squared(std::span<const double> y, std::span<const double> yhat);
std::optional<double> r_squared(const Vector& y, const Vector& yhat);

// 1 - SS_res / SS_tot; may be negative. Reported alongside r_squared.
std::optional<double> r_squared_traditional(const Vector& y, const Vector& yhat);

struct MetricPair {
    double rmse = 0.0;
    std::optional<double> r_squared;
    std::optional<double> r_squared_traditional;
};

MetricPair compute_metrics(const Vector& y, const Vector& yhat);

// Sample quantile by linear interpolation between order statistics
// (h = (n - 1) p). `sorted` must be ascending and non-empty.
double quantile(std::span<const double> sorted, double p);

struct SixNumberSummary {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double mean = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    std::size_t na_count = 0;
    bool all_missing = true;
};

SixNumberSummary summarize(std::span<const std::optional<double>> values);

// fold_of[r][i] is the held-out fold of row i in repeat r.
struct FoldAssignment {
    std::size_t k = 0;
    std::vector<std::vector<std::size_t>> fold_of;

    [[nodiscard]] std::size_t repeats() const noexcept { return fold_of.size(); }
    [[nodiscard]] std::size_t rows() const noexcept { return fold_of.empty() ? 0 : fold_of.front().size(); }
    [[nodiscard]] std::vector<std::size_t> held_out(std::size_t repeat, std::size_t fold) const;
    [[nodiscard]] std::vector<std::size_t> training(std::size_t repeat, std::size_t fold) const;

    bool operator==(const FoldAssignment&) const = default;
};

// Each repeat is an independent seeded partition into k folds of size
// floor(n/k) or ceil(n/k).
FoldAssignment kfold_indices(std::size_t n, const CvSpec& spec);

// Seed of the model fitted on (repeat, fold); shared by every procedure that
// fits per-fold models so their results line up.
std::uint64_t fold_model_seed(std::uint64_t model_seed, std::size_t repeat, std::size_t fold);

struct FoldResult {
    std::size_t repeat = 0;
    std::size_t fold = 0;
    std::optional<double> rmse;
    std::optional<double> r_squared;
    std::optional<double> r_squared_traditional;
    std::string error; // non-empty when the fit failed
};

struct CvReport {
    std::string algorithm;
    std::vector<FoldResult> folds;
    SixNumberSummary rmse;
    SixNumberSummary r_squared;

    [[nodiscard]] std::size_t failed_folds() const;
    // Canonical serialization: one line per fold, full precision.
    [[nodiscard]] std::string to_csv() const;
};

CvReport make_report(std::string algorithm, std::vector<FoldResult> folds);

struct FoldContext {
    std::size_t repeat;
    std::size_t fold;
    std::span<const std::size_t> training_rows;
    const Pipeline& pipeline;
};

struct CvOptions {
    // When false the plan is fitted once on every row before splitting.
    bool refit_preprocess_per_fold = true;
    // Called after each fold's pipeline is fitted (possibly concurrently).
    std::function<void(const FoldContext&)> observer;
};

CvReport cross_validate(const RegressorSpec& spec, const FeatureMatrix& data, const FoldAssignment& folds,
                        const PlanRecipe& recipe, const CvOptions& options = {});
CvReport cross_validate(const RegressorSpec& spec, const FeatureMatrix& data, const CvSpec& cv,
                        const PlanRecipe& recipe, const CvOptions& options = {});

// Paired comparison: one seeded subsample (subsample_n = 0 keeps every row)
// and one fold assignment shared by all specs.
std::vector<CvReport> benchmark(const std::vector<RegressorSpec>& specs, const FeatureMatrix& data, const CvSpec& cv,
                                std::size_t subsample_n, std::uint64_t subsample_seed, const PlanRecipe& recipe,
                                const CvOptions& options = {});

struct TestResult {
    std::string algorithm;
    MetricPair metrics;
};

struct NamedPipeline {
    std::string name;
    const Pipeline* pipeline;
};

// Metrics on a seeded subsample of the test matrix (subsample_n = 0 keeps
// every row).
std::vector<TestResult> test_evaluate(const std::vector<NamedPipeline>& models, const FeatureMatrix& test,
                                      std::size_t subsample_n, std::uint64_t seed);

} // namespace buildtime
