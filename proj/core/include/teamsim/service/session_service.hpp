#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "teamsim/engine/session.hpp"

namespace teamsim::service {

// Carries the HTTP status and JSON body a transport should answer with.
class ServiceError : public std::runtime_error {
public:
    ServiceError(int status, nlohmann::json body);
    int status() const { return status_; }
    const nlohmann::json& body() const { return body_; }

private:
    int status_;
    nlohmann::json body_;
};

struct ServiceOptions {
    std::filesystem::path scenario_dir = "scenarios";
    std::filesystem::path log_dir = "logs";
    int default_tick_ms = 0;
    int snapshot_every = 10;  // ticks between periodic snapshot frames
};

struct SessionHandle {
    std::string session_id;
    std::string created_at;
    engine::SessionStatus status = engine::SessionStatus::running;
    int tick_interval_ms = 0;
};

nlohmann::json to_json(const SessionHandle& h);

// Receives serialized frames for one stream subscriber, in order.
using FrameSink = std::function<void(const std::string& frame)>;

// Transport-agnostic session service. Every operation on a session runs
// under that session's lock; frames reach subscribers in the order they were
// produced. Sinks are called with the lock held and must not call back in.
class SessionService {
public:
    explicit SessionService(ServiceOptions options = {});
    ~SessionService();

    SessionService(const SessionService&) = delete;
    SessionService& operator=(const SessionService&) = delete;

    // Throws ServiceError 400 (bad body, lint failure with findings) or 404
    // (unknown scenario name).
    SessionHandle create_session(const nlohmann::json& body);

    SessionHandle handle(const std::string& id) const;      // 404
    nlohmann::ordered_json snapshot(const std::string& id) const;  // 404
    std::string log(const std::string& id) const;           // 404, JSON lines

    // 202-style acknowledgment {accepted, queued, replaced}. Throws 400 for
    // malformed actions, 404 for unknown ids, 409 once finished. Rejections
    // by the engine show up as events on the stream.
    nlohmann::json post_action(const std::string& id, const nlohmann::json& body);

    // Advances up to `ticks` ticks (stops early on finish). Throws 404, 409.
    void step(const std::string& id, int ticks);

    // Registers a sink and sends it a snapshot frame. Returns a token for
    // unsubscribe. Throws 404.
    std::uint64_t subscribe(const std::string& id, FrameSink sink);
    void unsubscribe(const std::string& id, std::uint64_t token);

    // Handles one client frame (action or step). Replies meant only for the
    // sender (error frames) are returned; everything else is broadcast.
    std::vector<std::string> handle_client_frame(const std::string& id, const std::string& text);

    nlohmann::json pattern_presets() const;
    nlohmann::json scenario_presets() const;

    std::vector<std::string> session_ids() const;
    const ServiceOptions& options() const { return options_; }

private:
    struct Entry {
        Entry(SessionHandle h, engine::Session s) : handle(std::move(h)), session(std::move(s)) {}

        mutable std::mutex mu;
        SessionHandle handle;
        engine::Session session;
        std::map<std::uint64_t, FrameSink> sinks;
        bool log_written = false;
    };

    std::shared_ptr<Entry> find(const std::string& id) const;
    void broadcast(Entry& e, const std::string& frame);
    void publish_events(Entry& e, const std::vector<engine::SimEvent>& events);
    void step_locked(Entry& e, int ticks);
    void persist_if_finished(Entry& e);
    world::Scenario resolve_scenario(const nlohmann::json& body, std::uint64_t seed) const;

    ServiceOptions options_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::uint64_t next_token_ = 1;
};

std::string make_session_id();

}  // namespace teamsim::service
