#include "buildtime/pipeline.hpp"

namespace buildtime {

Pipeline fit_pipeline(const RegressorSpec& spec, const PlanRecipe& recipe, const FeatureMatrix& train)
{
    PreprocessPlan plan = fit_plan(recipe, train);
    const FeatureMatrix transformed = plan.apply(train);
    RegressorModel model = fit_model(spec, transformed);
    return Pipeline{std::move(plan), std::move(model)};
}

} // namespace buildtime
