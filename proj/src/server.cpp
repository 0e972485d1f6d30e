#include "buildtime/server.hpp"

#include <httplib.h>

#include "buildtime/predictor.hpp"

namespace buildtime {

struct PredictionServer::Impl {
    std::shared_ptr<const ModelContainer> container;
    std::string hash;
    httplib::Server server;

    void reply(httplib::Response& res, const HttpReply& r) const
    {
        res.status = r.status;
        res.set_header("X-Schema-Hash", hash);
        res.set_content(r.body, "application/json");
    }
};

PredictionServer::PredictionServer(std::shared_ptr<const ModelContainer> container)
    : impl_(std::make_unique<Impl>())
{
    impl_->container = std::move(container);
    impl_->hash = impl_->container->schema_hash();
    Impl* self = impl_.get();

    self->server.Get("/health", [self](const httplib::Request&, httplib::Response& res) {
        self->reply(res, handle_health(*self->container));
    });
    self->server.Get("/schema", [self](const httplib::Request&, httplib::Response& res) {
        self->reply(res, handle_schema(*self->container));
    });
    self->server.Post("/predict", [self](const httplib::Request& req, httplib::Response& res) {
        self->reply(res, handle_predict(*self->container, req.body));
    });
    // Unmatched routes and handler exceptions still get a JSON body and the hash header.
    self->server.set_error_handler([self](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) {
            self->reply(res, HttpReply{res.status, nlohmann::json{{"error", httplib::status_message(res.status)}}.dump()});
        }
    });
    self->server.set_exception_handler([self](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        self->reply(res, HttpReply{500, nlohmann::json{{"error", message}}.dump()});
    });
}

PredictionServer::~PredictionServer()
{
    impl_->server.stop();
}

bool PredictionServer::listen(const std::string& host, int port)
{
    return impl_->server.listen(host, port);
}

int PredictionServer::bind_to_any_port(const std::string& host)
{
    return impl_->server.bind_to_any_port(host);
}

bool PredictionServer::listen_after_bind()
{
    return impl_->server.listen_after_bind();
}

void PredictionServer::stop()
{
    impl_->server.stop();
}

void PredictionServer::wait_until_ready() const
{
    impl_->server.wait_until_ready();
}

} // namespace buildtime
