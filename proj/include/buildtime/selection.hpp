#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "buildtime/dataset.hpp"
#include "buildtime/evaluate.hpp"
#include "buildtime/models.hpp"

namespace buildtime {

struct RfeProfile {
    std::vector<std::size_t> sizes;
    std::vector<double> mean_rmse;
    std::vector<double> sd_rmse;
    // fold_rmse[s][j]: held-out RMSE of size sizes[s] on the j-th (repeat, fold).
    std::vector<std::vector<double>> fold_rmse;
    std::size_t best_size = 0;
    std::vector<std::string> best_features;
    // Every feature, most important first, from a fit on all rows.
    std::vector<std::string> ranking;

    [[nodiscard]] std::string to_csv() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

// Recursive feature elimination. In each fold the model is fitted once on all
// features to rank them, then refitted on the top-s features for every s in
// `sizes`. Subsets keep the original column order and the fold seed used by
// cross_validate, so sizes = {p} reproduces a plain CV of the same spec.
RfeProfile rfe(const FeatureMatrix& data, const std::vector<std::size_t>& sizes, const CvSpec& cv,
               const RegressorSpec& spec);

enum class BorutaStatus { Tentative, Confirmed, Rejected };

std::string_view to_string(BorutaStatus status);

struct BorutaVerdict {
    std::vector<std::string> names;
    std::vector<BorutaStatus> statuses;
    std::vector<std::size_t> hits;
    // importance_history[i][j]: importance of feature j in iteration i (NaN
    // once the feature has been rejected and left the fit).
    std::vector<std::vector<double>> importance_history;
    std::vector<double> shadow_max_history;
    double alpha = 0.05;
    std::size_t max_iter = 0;
    std::size_t iterations = 0;

    [[nodiscard]] std::vector<std::string> with_status(BorutaStatus status) const;
    [[nodiscard]] std::string to_csv() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

// Two-sided exact binomial test of `hits` successes in `trials` against 1/2.
double binomial_two_sided_p(std::size_t hits, std::size_t trials);

// Boruta all-relevant selection. Each iteration appends a permuted copy of
// every still-active feature, fits the model, and scores a hit for each real
// feature whose importance beats the best shadow. Rejected features leave
// later iterations; the run stops early once nothing is tentative.
BorutaVerdict boruta(const FeatureMatrix& data, double alpha, std::size_t max_iter, const RegressorSpec& spec);

} // namespace buildtime
