#include "buildtime/container.hpp"

#include <algorithm>
#include <fstream>

#include "buildtime/error.hpp"
#include "buildtime/hash.hpp"

namespace buildtime {

namespace {

constexpr std::string_view kFormat = "buildtime-model";
constexpr int kVersion = 1;

} // namespace

std::string schema_hash(const std::vector<std::string>& predictors)
{
    Fnv1a h;
    for (const auto& name : predictors) {
        h.update(name);
    }
    return to_hex(h.digest());
}

nlohmann::json ModelContainer::to_json() const
{
    return {{"format", kFormat},
            {"version", kVersion},
            {"schema_hash", schema_hash()},
            {"predictors", predictors()},
            {"training_means", training_means},
            {"foreground", foreground},
            {"metadata", metadata},
            {"plan", pipeline.plan.to_json()},
            {"model", pipeline.model.to_json()}};
}

ModelContainer ModelContainer::from_json(const nlohmann::json& j)
{
    if (j.value("format", std::string{}) != kFormat) {
        throw SchemaError("not a model container");
    }
    if (j.value("version", 0) != kVersion) {
        throw SchemaError("unsupported model container version " + j.value("version", nlohmann::json()).dump());
    }
    ModelContainer c{Pipeline{PreprocessPlan::from_json(j.at("plan")), RegressorModel::from_json(j.at("model"))},
                     j.at("training_means").get<std::vector<double>>(),
                     j.at("foreground").get<std::vector<std::string>>(),
                     j.value("metadata", nlohmann::json::object())};
    if (j.at("predictors").get<std::vector<std::string>>() != c.predictors()) {
        throw SchemaError("container predictor list disagrees with its preprocessing plan");
    }
    if (c.training_means.size() != c.predictors().size()) {
        throw SchemaError("container has " + std::to_string(c.training_means.size()) + " training means for " +
                          std::to_string(c.predictors().size()) + " predictors");
    }
    if (j.at("schema_hash").get<std::string>() != c.schema_hash()) {
        throw SchemaError("container schema hash does not match its predictors");
    }
    return c;
}

ModelContainer make_container(Pipeline pipeline, const FeatureMatrix& train, nlohmann::json metadata)
{
    if (train.column_names != pipeline.plan.input_columns) {
        throw SchemaError("training matrix columns differ from the pipeline's inputs");
    }
    std::vector<double> means(static_cast<std::size_t>(train.cols()));
    for (Index j = 0; j < train.cols(); ++j) {
        means[static_cast<std::size_t>(j)] = train.values.col(j).mean();
    }
    std::vector<std::string> foreground;
    for (auto name : kForegroundFeatures) {
        if (std::find(train.column_names.begin(), train.column_names.end(), name) != train.column_names.end()) {
            foreground.emplace_back(name);
        }
    }
    return ModelContainer{std::move(pipeline), std::move(means), std::move(foreground), std::move(metadata)};
}

void save_container(const std::filesystem::path& path, const ModelContainer& container)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << container.to_json().dump() << '\n';
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

ModelContainer load_container(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    try {
        return ModelContainer::from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

} // namespace buildtime
