#include "buildtime/config.hpp"

#include <fstream>
#include <set>

#include "buildtime/error.hpp"
#include "buildtime/rng.hpp"

namespace buildtime {

void PipelineConfig::validate() const
{
    if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
        throw InvalidArgument("split_fraction must lie in (0, 1)");
    }
    cv().validate();
    if (roster.empty()) {
        throw InvalidArgument("the roster is empty");
    }
    for (const auto& spec : roster) {
        resolve_hyperparameters(spec.family, spec.hyperparameters);
    }
    resolve_hyperparameters(train.family, train.hyperparameters);
    resolve_hyperparameters(selection.model.family, selection.model.hyperparameters);
    if (!(selection.boruta_alpha > 0.0 && selection.boruta_alpha < 1.0)) {
        throw InvalidArgument("selection.boruta_alpha must lie in (0, 1)");
    }
    if (recipe.correlation_cutoff && !(*recipe.correlation_cutoff > 0.0 && *recipe.correlation_cutoff < 1.0)) {
        throw InvalidArgument("correlation cutoff must lie in (0, 1)");
    }
    if (recipe.pca_target && !(*recipe.pca_target > 0.0 && *recipe.pca_target <= 1.0)) {
        throw InvalidArgument("pca target must lie in (0, 1]");
    }
}

std::vector<RegressorSpec> default_roster()
{
    std::vector<RegressorSpec> roster;
    for (Family f : kAllFamilies) {
        roster.push_back(RegressorSpec{f, {}, 0});
    }
    return roster;
}

PipelineConfig default_config()
{
    PipelineConfig c;
    c.roster = default_roster();
    return c;
}

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where)
{
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw InvalidArgument("unknown config key '" + where + key + "'");
        }
    }
}

} // namespace

PipelineConfig config_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) {
        throw InvalidArgument("config must be a JSON object");
    }
    reject_unknown(j,
                   {"data", "output_dir", "seeds", "split_fraction", "cv", "subsample", "test_subsample", "preprocess",
                    "refit_preprocess_per_fold", "roster", "train", "selection"},
                   "");
    PipelineConfig c = default_config();
    try {
        c.data_path = j.value("data", c.data_path.string());
        c.output_dir = j.value("output_dir", c.output_dir.string());
        if (auto s = j.find("seeds"); s != j.end()) {
            reject_unknown(*s, {"shuffle", "split", "subsample", "cv", "model"}, "seeds.");
            c.seeds.shuffle = s->value("shuffle", c.seeds.shuffle);
            c.seeds.split = s->value("split", c.seeds.split);
            c.seeds.subsample = s->value("subsample", c.seeds.subsample);
            c.seeds.cv = s->value("cv", c.seeds.cv);
            c.seeds.model = s->value("model", c.seeds.model);
        }
        c.split_fraction = j.value("split_fraction", c.split_fraction);
        if (auto cv = j.find("cv"); cv != j.end()) {
            reject_unknown(*cv, {"k", "repeats"}, "cv.");
            c.cv_k = cv->value("k", c.cv_k);
            c.cv_repeats = cv->value("repeats", c.cv_repeats);
        }
        c.subsample = j.value("subsample", c.subsample);
        c.test_subsample = j.value("test_subsample", c.test_subsample);
        if (auto p = j.find("preprocess"); p != j.end()) {
            c.recipe = p->get<PlanRecipe>();
        }
        c.refit_preprocess_per_fold = j.value("refit_preprocess_per_fold", c.refit_preprocess_per_fold);
        if (auto r = j.find("roster"); r != j.end()) {
            c.roster = r->get<std::vector<RegressorSpec>>();
        }
        if (auto t = j.find("train"); t != j.end()) {
            c.train = t->get<RegressorSpec>();
        }
        if (auto s = j.find("selection"); s != j.end()) {
            reject_unknown(*s, {"rfe_sizes", "boruta_alpha", "boruta_max_iter", "model"}, "selection.");
            c.selection.rfe_sizes = s->value("rfe_sizes", c.selection.rfe_sizes);
            c.selection.boruta_alpha = s->value("boruta_alpha", c.selection.boruta_alpha);
            c.selection.boruta_max_iter = s->value("boruta_max_iter", c.selection.boruta_max_iter);
            if (auto m = s->find("model"); m != s->end()) {
                c.selection.model = m->get<RegressorSpec>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

nlohmann::json config_to_json(const PipelineConfig& c)
{
    return {{"data", c.data_path.string()},
            {"output_dir", c.output_dir.string()},
            {"seeds",
             {{"shuffle", c.seeds.shuffle},
              {"split", c.seeds.split},
              {"subsample", c.seeds.subsample},
              {"cv", c.seeds.cv},
              {"model", c.seeds.model}}},
            {"split_fraction", c.split_fraction},
            {"cv", {{"k", c.cv_k}, {"repeats", c.cv_repeats}}},
            {"subsample", c.subsample},
            {"test_subsample", c.test_subsample},
            {"preprocess", c.recipe},
            {"refit_preprocess_per_fold", c.refit_preprocess_per_fold},
            {"roster", c.roster},
            {"train", c.train},
            {"selection",
             {{"rfe_sizes", c.selection.rfe_sizes},
              {"boruta_alpha", c.selection.boruta_alpha},
              {"boruta_max_iter", c.selection.boruta_max_iter},
              {"model", c.selection.model}}}};
}

PipelineConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config " + path.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

void override_seeds(PipelineConfig& config, std::uint64_t master)
{
    config.seeds.shuffle = derive_seed(master, {1});
    config.seeds.split = derive_seed(master, {2});
    config.seeds.subsample = derive_seed(master, {3});
    config.seeds.cv = derive_seed(master, {4});
    config.seeds.model = derive_seed(master, {5});
}

} // namespace buildtime
