#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "buildtime/dataset.hpp"
#include "buildtime/types.hpp"

namespace buildtime {

// Center-and-scale with the sample standard deviation.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;    // fixed to 1 for constant columns
    std::vector<bool> constant;

    [[nodiscard]] Matrix transform(const Matrix& x) const;
    [[nodiscard]] Matrix inverse(const Matrix& z) const;
};

Standardizer fit_standardizer(const Matrix& x);

double boxcox(double x, double lambda);
double boxcox_inverse(double y, double lambda);

// Profile log-likelihood of a Box-Cox transform on strictly positive data,
// up to an additive constant.
double boxcox_log_likelihood(std::span<const double> x, double lambda);

// -2.0, -1.9, ..., 2.0 (lambda = 0 is exactly zero).
std::vector<double> default_boxcox_grid();

struct BoxCoxMap {
    std::vector<std::optional<double>> lambda; // nullopt: column skipped
    std::vector<double> log_likelihood;        // NaN for skipped columns
    std::vector<double> floor;                 // smallest fitted value per column

    [[nodiscard]] Matrix transform(const Matrix& x) const;
    [[nodiscard]] Matrix inverse(const Matrix& y) const;
};

BoxCoxMap fit_boxcox(const Matrix& x, std::span<const double> grid);
inline BoxCoxMap fit_boxcox(const Matrix& x)
{
    auto grid = default_boxcox_grid();
    return fit_boxcox(x, grid);
}

// Pearson correlation; pairs involving a constant column report 0.
Matrix correlation_matrix(const Matrix& x);

struct CorrelationDropSet {
    double cutoff = 0.70;
    std::vector<std::string> dropped_columns;
    std::vector<std::size_t> dropped_indices; // ascending
};

CorrelationDropSet find_correlated(const Matrix& x, const std::vector<std::string>& names, double cutoff);

struct PcaModel {
    Vector center;
    Matrix rotation;                    // p x p, columns are unit eigenvectors
    Vector explained_variance_fraction; // all p components, non-increasing
    Index k = 0;                        // retained components

    [[nodiscard]] Matrix transform(const Matrix& x) const; // n x k scores
    [[nodiscard]] Matrix inverse(const Matrix& scores) const;
};

PcaModel fit_pca(const Matrix& x, double variance_target = 0.95);

// Which steps a fitted plan contains. Order is fixed:
// impute -> Box-Cox -> standardize -> drop correlated -> PCA.
struct PlanRecipe {
    bool boxcox = false;
    bool standardize = true;
    std::optional<double> correlation_cutoff;
    std::optional<double> pca_target;
};

void to_json(nlohmann::json& j, const PlanRecipe& recipe);
void from_json(const nlohmann::json& j, PlanRecipe& recipe);

class PreprocessPlan {
public:
    std::vector<std::string> input_columns;
    std::vector<double> imputation; // empty: no imputation step
    std::optional<BoxCoxMap> boxcox;
    std::optional<Standardizer> standardizer;
    std::optional<CorrelationDropSet> correlation;
    std::optional<PcaModel> pca;

    [[nodiscard]] std::vector<std::string> output_columns() const;

    // `x` must be laid out in input_columns order. NaN cells are imputed.
    [[nodiscard]] Matrix apply(const Matrix& x) const;
    // Checks column names before transforming.
    [[nodiscard]] FeatureMatrix apply(const FeatureMatrix& x) const;

    [[nodiscard]] nlohmann::json to_json() const;
    static PreprocessPlan from_json(const nlohmann::json& j);
};

PreprocessPlan fit_plan(const PlanRecipe& recipe, const FeatureMatrix& x);

} // namespace buildtime
