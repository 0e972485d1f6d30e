#include "buildtime/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "buildtime/error.hpp"

namespace buildtime {

namespace {

class SchemaMismatch : public Error {
public:
    using Error::Error;
};

HttpReply error_reply(int status, const std::string& message)
{
    return {status, nlohmann::json{{"error", message}}.dump()};
}

} // namespace

PredictionRequest parse_request(const nlohmann::json& body)
{
    if (!body.is_object()) {
        throw InvalidArgument("request body must be a JSON object");
    }
    PredictionRequest request;
    if (auto it = body.find("schema_hash"); it != body.end() && !it->is_null()) {
        if (!it->is_string()) {
            throw InvalidArgument("schema_hash must be a string");
        }
        request.schema_hash = it->get<std::string>();
    }
    const auto features = body.find("features");
    if (features == body.end()) {
        return request;
    }
    if (!features->is_object()) {
        throw InvalidArgument("'features' must be an object of name: number pairs");
    }
    for (const auto& [name, value] : features->items()) {
        if (!value.is_number()) {
            throw InvalidArgument("feature '" + name + "' has non-numeric value " + value.dump());
        }
        const double v = value.get<double>();
        if (!std::isfinite(v)) {
            throw InvalidArgument("feature '" + name + "' is not finite");
        }
        request.features[name] = v;
    }
    return request;
}

Vector resolve_features(const ModelContainer& container, const PredictionRequest& request)
{
    const auto& names = container.predictors();
    Vector row(static_cast<Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
        row(static_cast<Index>(j)) = container.training_means[j];
    }
    for (const auto& [name, value] : request.features) {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
            std::string valid;
            for (const auto& n : names) {
                valid += (valid.empty() ? "" : ", ") + n;
            }
            throw InvalidArgument("unknown feature '" + name + "'; valid names: " + valid);
        }
        row(static_cast<Index>(it - names.begin())) = value;
    }
    return row;
}

Prediction predict(const ModelContainer& container, const PredictionRequest& request)
{
    if (request.schema_hash && *request.schema_hash != container.schema_hash()) {
        throw SchemaMismatch("schema hash " + *request.schema_hash + " does not match model schema " +
                             container.schema_hash());
    }
    const Vector row = resolve_features(container, request);
    const Matrix x = row.transpose();
    const double seconds = container.pipeline.predict(x)(0);
    return {seconds, render_duration(seconds)};
}

std::string render_duration(double seconds)
{
    if (!std::isfinite(seconds)) {
        return "NA";
    }
    const long long total = std::llround(std::fabs(seconds));
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%lld:%02lld:%02lld", seconds < 0 && total > 0 ? "-" : "", total / 3600,
                  (total / 60) % 60, total % 60);
    return buf;
}

HttpReply handle_predict(const ModelContainer& container, std::string_view body)
{
    try {
        const auto request = parse_request(nlohmann::json::parse(body));
        const Prediction p = predict(container, request);
        return {200, nlohmann::json{{"predicted_seconds", p.seconds},
                                    {"rendered", p.rendered},
                                    {"schema_hash", container.schema_hash()}}
                         .dump()};
    } catch (const nlohmann::json::exception& e) {
        return error_reply(400, std::string("malformed JSON: ") + e.what());
    } catch (const SchemaMismatch& e) {
        return error_reply(409, e.what());
    } catch (const InvalidArgument& e) {
        return error_reply(400, e.what());
    } catch (const std::exception& e) {
        return error_reply(500, e.what());
    }
}

HttpReply handle_schema(const ModelContainer& container)
{
    nlohmann::json means = nlohmann::json::object();
    for (std::size_t j = 0; j < container.predictors().size(); ++j) {
        means[container.predictors()[j]] = container.training_means[j];
    }
    return {200, nlohmann::json{{"schema_hash", container.schema_hash()},
                                {"features", container.predictors()},
                                {"training_means", means},
                                {"foreground", container.foreground},
                                {"model", to_string(container.pipeline.model.family())}}
                     .dump()};
}

HttpReply handle_health(const ModelContainer& container)
{
    return {200, nlohmann::json{{"status", "ok"}, {"schema_hash", container.schema_hash()}}.dump()};
}

} // namespace buildtime
