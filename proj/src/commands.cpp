#include "buildtime/commands.hpp"

#include <fstream>
#include <iostream>
#include <memory>

#include "buildtime/error.hpp"
#include "buildtime/hash.hpp"
#include "buildtime/report.hpp"
#include "buildtime/rng.hpp"
#include "buildtime/selection.hpp"
#include "buildtime/server.hpp"

namespace buildtime {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

OutputLayout prepare_output(const PipelineConfig& config)
{
    std::filesystem::create_directories(config.output_dir);
    return OutputLayout{config.output_dir};
}

FeatureMatrix load_cached(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path)) {
        throw IoError(path.string() + " not found; run 'prepare' first");
    }
    return load_matrix(path);
}

FeatureMatrix sample_rows(const FeatureMatrix& m, std::size_t n, std::uint64_t seed)
{
    if (n == 0 || n >= static_cast<std::size_t>(m.rows())) {
        return m;
    }
    return subsample(m, n, seed);
}

RegressorSpec seeded(RegressorSpec spec, const PipelineConfig& config)
{
    if (spec.seed == 0) {
        spec.seed = config.seeds.model;
    }
    return spec;
}

} // namespace

nlohmann::json cmd_prepare(const PipelineConfig& config)
{
    config.validate();
    if (!std::filesystem::exists(config.data_path)) {
        throw IoError("data file " + config.data_path.string() + " does not exist");
    }
    const RawTable raw = load_csv(config.data_path);
    const CleanResult cleaned = clean(raw);
    const RawTable shuffled = shuffle(cleaned.table, config.seeds.shuffle);
    const SplitIndices parts = split(shuffled, config.split_fraction, config.seeds.split);

    FeatureMatrix train = encode(select_rows(shuffled, parts.train_rows));
    FeatureMatrix test = encode(select_rows(shuffled, parts.test_rows), kPredictors, &train.imputation);
    train.provenance["source"] = config.data_path.string();
    train.provenance["part"] = "train";
    test.provenance["source"] = config.data_path.string();
    test.provenance["part"] = "test";

    const OutputLayout out = prepare_output(config);
    save_matrix(out.train_matrix(), train);
    save_matrix(out.test_matrix(), test);

    nlohmann::json manifest = {
        {"source", config.data_path.string()},
        {"source_rows", raw.size()},
        {"dropped_na_response", cleaned.dropped_count},
        {"invalid_response", cleaned.invalid_count},
        {"clean_rows", cleaned.table.size()},
        {"train_rows", parts.train_rows.size()},
        {"test_rows", parts.test_rows.size()},
        {"split_fraction", config.split_fraction},
        {"seeds", {{"shuffle", config.seeds.shuffle}, {"split", config.seeds.split}}},
        {"predictors", train.column_names},
        {"schema_hash", schema_hash(train.column_names)},
        {"imputation", train.imputation},
        {"unknown_columns", raw.unknown_columns},
        {"missing_columns", raw.missing_columns},
        {"train_fingerprint", to_hex(fingerprint(train))},
        {"test_fingerprint", to_hex(fingerprint(test))},
    };
    Fnv1a h;
    h.update(manifest.dump());
    manifest["manifest_hash"] = to_hex(h.digest());
    write_text(out.manifest(), manifest.dump(2) + "\n");
    return manifest;
}

std::vector<CvReport> cmd_benchmark(const PipelineConfig& config)
{
    config.validate();
    const OutputLayout out = prepare_output(config);
    const FeatureMatrix train = load_cached(out.train_matrix());
    std::vector<RegressorSpec> roster;
    for (const auto& spec : config.roster) {
        roster.push_back(seeded(spec, config));
    }
    const std::size_t n =
        config.subsample == 0 ? 0 : std::min<std::size_t>(config.subsample, static_cast<std::size_t>(train.rows()));
    CvOptions options;
    options.refit_preprocess_per_fold = config.refit_preprocess_per_fold;
    auto reports = benchmark(roster, train, config.cv(), n, config.seeds.subsample, config.recipe, options);
    write_text(out.dir / "benchmark.csv", benchmark_csv(reports));
    write_text(out.dir / "benchmark_folds.csv", fold_csv(reports));
    write_text(out.dir / "benchmark.txt", render_benchmark_table(reports));
    return reports;
}

nlohmann::json cmd_select(const PipelineConfig& config, std::string_view method)
{
    config.validate();
    if (method != "rfe" && method != "boruta") {
        throw InvalidArgument("unknown selection method '" + std::string(method) + "' (expected rfe or boruta)");
    }
    const OutputLayout out = prepare_output(config);
    const FeatureMatrix sample = sample_rows(load_cached(out.train_matrix()), config.subsample, config.seeds.subsample);
    // Selection runs on the configured preprocessing output, e.g. after
    // correlation pruning.
    const PreprocessPlan plan = fit_plan(config.recipe, sample);
    const FeatureMatrix data = plan.apply(sample);
    const RegressorSpec spec = seeded(config.selection.model, config);

    nlohmann::json report;
    std::string csv;
    if (method == "rfe") {
        std::vector<std::size_t> sizes = config.selection.rfe_sizes;
        if (sizes.empty()) {
            for (std::size_t s = 1; s <= static_cast<std::size_t>(data.cols()); ++s) {
                sizes.push_back(s);
            }
        }
        const RfeProfile profile = rfe(data, sizes, config.cv(), spec);
        report = profile.to_json();
        csv = profile.to_csv();
    } else {
        const BorutaVerdict verdict =
            boruta(data, config.selection.boruta_alpha, config.selection.boruta_max_iter, spec);
        report = verdict.to_json();
        csv = verdict.to_csv();
    }
    report["model"] = spec;
    report["rows"] = data.rows();
    write_text(out.dir / (std::string(method) + ".json"), report.dump(2) + "\n");
    write_text(out.dir / (std::string(method) + ".csv"), csv);
    return report;
}

ModelContainer cmd_train(const PipelineConfig& config, std::optional<Family> family)
{
    config.validate();
    const OutputLayout out = prepare_output(config);
    const FeatureMatrix train = load_cached(out.train_matrix());
    RegressorSpec spec = family ? RegressorSpec{*family, {}, 0} : config.train;
    spec = seeded(spec, config);
    Pipeline pipeline = fit_pipeline(spec, config.recipe, train);
    nlohmann::json metadata = {{"spec", spec},
                               {"recipe", config.recipe},
                               {"train_rows", train.rows()},
                               {"train_fingerprint", to_hex(fingerprint(train))}};
    ModelContainer container = make_container(std::move(pipeline), train, std::move(metadata));
    save_container(out.model(), container);
    return container;
}

std::vector<TestResult> cmd_evaluate(const PipelineConfig& config, const std::optional<std::filesystem::path>& model)
{
    config.validate();
    const OutputLayout out = prepare_output(config);
    const FeatureMatrix test = load_cached(out.test_matrix());
    const std::size_t n_test =
        config.test_subsample == 0 ? 0
                                   : std::min<std::size_t>(config.test_subsample, static_cast<std::size_t>(test.rows()));
    const std::uint64_t test_seed = derive_seed(config.seeds.subsample, {1});

    std::vector<TestResult> results;
    if (model) {
        const ModelContainer container = load_container(*model);
        results = test_evaluate({NamedPipeline{std::string(to_string(container.pipeline.model.family())),
                                               &container.pipeline}},
                                test, n_test, test_seed);
    } else {
        const FeatureMatrix train =
            sample_rows(load_cached(out.train_matrix()), config.subsample, config.seeds.subsample);
        std::vector<Pipeline> fitted;
        fitted.reserve(config.roster.size());
        for (const auto& spec : config.roster) {
            fitted.push_back(fit_pipeline(seeded(spec, config), config.recipe, train));
        }
        std::vector<NamedPipeline> named;
        for (std::size_t i = 0; i < fitted.size(); ++i) {
            named.push_back(NamedPipeline{config.roster[i].label(), &fitted[i]});
        }
        results = test_evaluate(named, test, n_test, test_seed);
    }
    write_text(out.dir / "test.csv", test_csv(results));
    write_text(out.dir / "test.txt", render_test_table(results));
    return results;
}

HttpReply cmd_predict(const ModelContainer& container, const nlohmann::json& request)
{
    return handle_predict(container, request.dump());
}

void cmd_serve(const std::filesystem::path& model, const std::string& host, int port)
{
    auto container = std::make_shared<const ModelContainer>(load_container(model));
    PredictionServer server(container);
    std::cerr << "serving " << to_string(container->pipeline.model.family()) << " model (schema "
              << container->schema_hash() << ") on " << host << ":" << port << "\n";
    if (!server.listen(host, port)) {
        throw IoError("cannot listen on " + host + ":" + std::to_string(port));
    }
}

} // namespace buildtime
