#pragma once

#include <memory>
#include <string>

#include "buildtime/container.hpp"

namespace buildtime {

// HTTP front end over the shared prediction handlers:
//   GET /health, GET /schema, POST /predict.
// Every response carries an X-Schema-Hash header. The container is shared
// read-only between request threads.
class PredictionServer {
public:
    explicit PredictionServer(std::shared_ptr<const ModelContainer> container);
    ~PredictionServer();
    PredictionServer(const PredictionServer&) = delete;
    PredictionServer& operator=(const PredictionServer&) = delete;

    // Blocks until stop() is called. Returns false if the address cannot be bound.
    bool listen(const std::string& host, int port);

    // Binds to an ephemeral port and returns it (negative on failure); serve
    // with listen_after_bind().
    int bind_to_any_port(const std::string& host);
    bool listen_after_bind();

    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace buildtime
