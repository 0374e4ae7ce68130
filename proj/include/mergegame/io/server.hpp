#pragma once

// Single-session HTTP/JSON bridge. Requests are serialized by one mutex.

#include <mutex>
#include <string>

#include <httplib.h>

#include "mergegame/io/documents.hpp"
#include "mergegame/io/session.hpp"

namespace mergegame::io {

class DebugServer {
public:
    explicit DebugServer(Instance instance) : session_(std::move(instance)) { install(); }

    /// Blocks until stop(). Returns false when the port cannot be bound.
    bool listen(const std::string& host, int port) { return server_.listen(host, port); }

    /// Binds an ephemeral port and returns it (or -1), without serving yet.
    int bind_any(const std::string& host = "127.0.0.1") { return server_.bind_to_any_port(host); }
    bool listen_after_bind() { return server_.listen_after_bind(); }

    void stop() { server_.stop(); }
    bool running() const { return server_.is_running(); }
    void wait_until_ready() const { server_.wait_until_ready(); }

    GameSession& session() { return session_; }

private:
    static void reply(httplib::Response& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    static void fail(httplib::Response& res, int status, const std::string& message) {
        reply(res, status, {{"error", message}});
    }

    void install() {
        server_.Get("/api/instance", [this](const httplib::Request&, httplib::Response& res) {
            std::lock_guard lock(mu_);
            reply(res, 200, instance_to_json(session_.instance()));
        });
        server_.Get("/api/state", [this](const httplib::Request&, httplib::Response& res) {
            std::lock_guard lock(mu_);
            reply(res, 200, session_.state_json());
        });
        server_.Post("/api/move", [this](const httplib::Request& req, httplib::Response& res) {
            json body = json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.is_object() || !body.contains("dir") || !body["dir"].is_string() ||
                body["dir"].get<std::string>().size() != 1) {
                fail(res, 400, "expected {\"dir\": \"L|R|U|D\"}");
                return;
            }
            Direction d;
            try {
                d = direction_from_char(body["dir"].get<std::string>()[0]);
            } catch (const Error&) {
                fail(res, 400, "unknown direction");
                return;
            }
            std::lock_guard lock(mu_);
            switch (session_.move(d)) {
            case GameSession::MoveResult::Ok: reply(res, 200, session_.state_json()); break;
            case GameSession::MoveResult::Illegal: fail(res, 409, "move changes nothing"); break;
            case GameSession::MoveResult::NotPlaying: fail(res, 410, "game is " + session_.status()); break;
            }
        });
        server_.Post("/api/undo", [this](const httplib::Request&, httplib::Response& res) {
            std::lock_guard lock(mu_);
            if (!session_.undo()) {
                fail(res, 409, "nothing to undo");
                return;
            }
            reply(res, 200, session_.state_json());
        });
        server_.Post("/api/reset", [this](const httplib::Request&, httplib::Response& res) {
            std::lock_guard lock(mu_);
            session_.reset();
            reply(res, 200, session_.state_json());
        });
        server_.Get("/api/trace", [this](const httplib::Request&, httplib::Response& res) {
            std::lock_guard lock(mu_);
            reply(res, 200, trace_to_json(session_.trace()));
        });
    }

    GameSession session_;
    std::mutex mu_;
    httplib::Server server_;
};

} // namespace mergegame::io
