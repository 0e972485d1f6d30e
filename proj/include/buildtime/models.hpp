#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "buildtime/dataset.hpp"
#include "buildtime/ensemble.hpp"
#include "buildtime/knn.hpp"
#include "buildtime/linear.hpp"
#include "buildtime/types.hpp"

namespace buildtime {

enum class Family { LM, GLMNET, KNN, CART, BCART, RF, SGB };

inline constexpr std::array<Family, 7> kAllFamilies{Family::LM,   Family::GLMNET, Family::KNN, Family::CART,
                                                    Family::BCART, Family::RF,     Family::SGB};

std::string_view to_string(Family family);
Family parse_family(std::string_view name);

using Hyperparameters = std::map<std::string, double>;

struct HyperparameterDef {
    std::string_view name;
    double default_value;
    double min;
    double max;
    bool integer;
};

// Accepted hyperparameters for a family with their defaults and ranges.
std::span<const HyperparameterDef> hyperparameter_schema(Family family);

struct RegressorSpec {
    Family family = Family::LM;
    Hyperparameters hyperparameters;
    std::uint64_t seed = 0;

    [[nodiscard]] std::string label() const { return std::string(to_string(family)); }
};

void to_json(nlohmann::json& j, const RegressorSpec& spec);
void from_json(const nlohmann::json& j, RegressorSpec& spec);

// Fills defaults and validates names, ranges and integrality. Throws
// InvalidArgument on unknown names or out-of-range values.
Hyperparameters resolve_hyperparameters(Family family, const Hyperparameters& given);

// A fitted model of any family. Predictions require exactly the training
// column schema.
class RegressorModel {
public:
    using Fitted = std::variant<LinearModel, KnnModel, TreeEnsemble, BoostedTrees>;

    RegressorModel(Family family, Hyperparameters hyperparameters, std::uint64_t seed,
                   std::vector<std::string> columns, Fitted fitted)
        : family_(family), hyperparameters_(std::move(hyperparameters)), seed_(seed),
          columns_(std::move(columns)), fitted_(std::move(fitted))
    {
    }

    [[nodiscard]] Family family() const noexcept { return family_; }
    [[nodiscard]] const Hyperparameters& hyperparameters() const noexcept { return hyperparameters_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] const std::vector<std::string>& columns() const noexcept { return columns_; }
    [[nodiscard]] const Fitted& fitted() const noexcept { return fitted_; }

    [[nodiscard]] Vector predict(const Matrix& x) const;
    [[nodiscard]] Vector predict(const FeatureMatrix& x) const;

    // Impurity-based importance for tree families, aligned with columns().
    [[nodiscard]] std::optional<std::vector<double>> importance() const;

    [[nodiscard]] nlohmann::json to_json() const;
    static RegressorModel from_json(const nlohmann::json& j);

private:
    Family family_;
    Hyperparameters hyperparameters_;
    std::uint64_t seed_;
    std::vector<std::string> columns_;
    Fitted fitted_;
};

RegressorModel fit_model(const RegressorSpec& spec, const Matrix& x, const Vector& y,
                         const std::vector<std::string>& columns);

inline RegressorModel fit_model(const RegressorSpec& spec, const FeatureMatrix& data)
{
    return fit_model(spec, data.values, data.response, data.column_names);
}

} // namespace buildtime
