#pragma once

#include "buildtime/dataset.hpp"
#include "buildtime/models.hpp"
#include "buildtime/preprocess.hpp"

namespace buildtime {

// A fitted preprocessing plan followed by a model trained on its output.
struct Pipeline {
    PreprocessPlan plan;
    RegressorModel model;

    // `raw` is laid out in plan.input_columns order.
    [[nodiscard]] Vector predict(const Matrix& raw) const { return model.predict(plan.apply(raw)); }
    [[nodiscard]] Vector predict(const FeatureMatrix& raw) const { return model.predict(plan.apply(raw)); }
};

Pipeline fit_pipeline(const RegressorSpec& spec, const PlanRecipe& recipe, const FeatureMatrix& train);

} // namespace buildtime
