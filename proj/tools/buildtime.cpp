#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "buildtime/commands.hpp"
#include "buildtime/error.hpp"
#include "buildtime/report.hpp"

namespace {

using namespace buildtime;

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kData = 3 };

nlohmann::json request_from_assignments(const std::vector<std::string>& assignments)
{
    nlohmann::json features = nlohmann::json::object();
    for (const auto& a : assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw InvalidArgument("expected name=value, got '" + a + "'");
        }
        const std::string name = a.substr(0, eq);
        const std::string text = a.substr(eq + 1);
        // Non-numbers pass through as strings so the shared handler rejects them.
        nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
        features[name] = value.is_number() ? value : nlohmann::json(text);
    }
    return {{"features", features}};
}

nlohmann::json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(path + ": " + e.what());
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Build-time prediction toolkit for TravisTorrent build records"};
    app.require_subcommand(1);
    app.fallthrough(); // global options may follow the subcommand

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    app.add_option("--config", config_path, "Pipeline config (JSON)")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Master seed replacing every configured seed");
    app.add_option("--out", out_dir, "Output directory");

    auto* show = app.add_subcommand("config", "Print the effective configuration");

    auto* prepare = app.add_subcommand("prepare", "Clean, split and cache the raw CSV");
    std::string data_path;
    prepare->add_option("--data", data_path, "TravisTorrent CSV (overrides the config)");

    auto* bench = app.add_subcommand("benchmark", "Repeated cross-validation of the model roster");

    auto* select = app.add_subcommand("select", "Wrapper feature selection");
    std::string method;
    select->add_option("method", method, "rfe or boruta")->required()->check(CLI::IsMember({"rfe", "boruta"}));

    auto* train = app.add_subcommand("train", "Fit a model on the full training set and save it");
    std::string family_name;
    train->add_option("--family", family_name, "Model family (default: config 'train')");

    auto* evaluate = app.add_subcommand("evaluate", "Held-out test metrics");
    std::string eval_model;
    evaluate->add_option("--model", eval_model, "Evaluate only this saved model")->check(CLI::ExistingFile);

    auto* predict = app.add_subcommand("predict", "Predict one build's duration");
    std::string predict_model;
    std::string request_file;
    std::vector<std::string> assignments;
    predict->add_option("--model", predict_model, "Saved model")->required()->check(CLI::ExistingFile);
    predict->add_option("--request", request_file, "Request JSON file")->check(CLI::ExistingFile);
    predict->add_option("--set", assignments, "Feature value as name=value (repeatable)");

    auto* serve = app.add_subcommand("serve", "HTTP prediction service");
    std::string serve_model;
    std::string host = "127.0.0.1";
    int port = 8080;
    serve->add_option("--model", serve_model, "Saved model")->required()->check(CLI::ExistingFile);
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and --version exit 0; every other parse failure is a usage error.
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        PipelineConfig config = config_path.empty() ? default_config() : load_config(config_path);
        if (seed) {
            override_seeds(config, *seed);
        }
        if (!out_dir.empty()) {
            config.output_dir = out_dir;
        }

        if (*show) {
            std::cout << config_to_json(config).dump(2) << "\n";
        } else if (*prepare) {
            if (!data_path.empty()) {
                config.data_path = data_path;
            }
            const auto manifest = cmd_prepare(config);
            std::cout << "train rows: " << with_thousands(manifest["train_rows"].get<double>())
                      << "\ntest rows: " << with_thousands(manifest["test_rows"].get<double>())
                      << "\ndropped (NA response): " << manifest["dropped_na_response"].get<std::size_t>()
                      << "\ninvalid response: " << manifest["invalid_response"].get<std::size_t>()
                      << "\nmanifest hash: " << manifest["manifest_hash"].get<std::string>() << "\n";
        } else if (*bench) {
            std::cout << render_benchmark_table(cmd_benchmark(config));
        } else if (*select) {
            const auto report = cmd_select(config, method);
            if (method == "rfe") {
                std::cout << "best size: " << report["best_size"] << "\nfeatures: " << report["best_features"].dump()
                          << "\n";
            } else {
                std::cout << "status: " << report["status"].dump(2) << "\n";
            }
        } else if (*train) {
            std::optional<Family> family;
            if (!family_name.empty()) {
                family = parse_family(family_name);
            }
            const auto container = cmd_train(config, family);
            std::cout << "saved " << to_string(container.pipeline.model.family()) << " model to "
                      << OutputLayout{config.output_dir}.model().string() << " (schema "
                      << container.schema_hash() << ")\n";
        } else if (*evaluate) {
            std::optional<std::filesystem::path> model;
            if (!eval_model.empty()) {
                model = eval_model;
            }
            std::cout << render_test_table(cmd_evaluate(config, model));
        } else if (*predict) {
            const nlohmann::json request =
                request_file.empty() ? request_from_assignments(assignments) : read_json_file(request_file);
            const auto reply = cmd_predict(load_container(predict_model), request);
            if (reply.status != 200) {
                std::cerr << "error: " << nlohmann::json::parse(reply.body).at("error").get<std::string>() << "\n";
                return kUsage;
            }
            std::cout << reply.body << "\n";
        } else if (*serve) {
            cmd_serve(serve_model, host, port);
        }
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kData;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kData;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}
