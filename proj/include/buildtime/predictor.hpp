#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "buildtime/container.hpp"

namespace buildtime {

// Wire format: {"features": {name: number, ...}, "schema_hash": "..."}.
// The hash is optional; when given it must match the model's.
struct PredictionRequest {
    std::map<std::string, double> features;
    std::optional<std::string> schema_hash;
};

PredictionRequest parse_request(const nlohmann::json& body);

struct Prediction {
    double seconds;
    std::string rendered;
};

// Full predictor vector: supplied values, training means elsewhere. Throws
// InvalidArgument listing the valid names if a feature is unknown.
Vector resolve_features(const ModelContainer& container, const PredictionRequest& request);

Prediction predict(const ModelContainer& container, const PredictionRequest& request);

// Seconds as h:mm:ss, rounded to the nearest second.
std::string render_duration(double seconds);

struct HttpReply {
    int status;
    std::string body; // JSON
};

// The request handlers shared by the predict command and the HTTP service.
HttpReply handle_predict(const ModelContainer& container, std::string_view body);
HttpReply handle_schema(const ModelContainer& container);
HttpReply handle_health(const ModelContainer& container);

} // namespace buildtime
