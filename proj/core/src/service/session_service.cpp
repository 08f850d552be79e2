#include "teamsim/service/session_service.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <random>

#include "teamsim/harness/experiment.hpp"
#include "teamsim/tdp/errors.hpp"
#include "teamsim/tdp/lint.hpp"
#include "teamsim/tdp/machine.hpp"
#include "teamsim/tdp/parser.hpp"
#include "teamsim/tdp/presets.hpp"
#include "teamsim/world/generator.hpp"
#include "teamsim/world/scenario_io.hpp"

namespace teamsim::service {
namespace {

using nlohmann::json;
using oj = nlohmann::ordered_json;

[[noreturn]] void fail(int status, const std::string& message, json extra = json::object()) {
    extra["error"] = message;
    throw ServiceError(status, std::move(extra));
}

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

tdp::Pattern pattern_from_body(const json& body) {
    if (!body.contains("pattern") || !body.at("pattern").is_string()) {
        fail(400, "'pattern' must be a preset name or DSL text");
    }
    const auto text = body.at("pattern").get<std::string>();
    try {
        if (tdp::preset_source(text)) return tdp::load_preset(text);
        if (text.find('{') == std::string::npos) fail(400, "unknown preset pattern '" + text + "'");
        return tdp::parse_pattern(text);
    } catch (const tdp::SyntaxError& e) {
        fail(400, "pattern does not parse", {{"line", e.line()}, {"col", e.col()}, {"message", e.what()}});
    } catch (const tdp::PatternError& e) {
        fail(400, "pattern does not parse", {{"message", e.what()}});
    }
}

std::string frame(const oj& j) { return j.dump(); }

std::string error_frame(const std::string& message) { return frame({{"type", "error"}, {"message", message}}); }

std::string snapshot_frame(const engine::Session& s) {
    oj j;
    j["type"] = "snapshot";
    j["snapshot"] = s.snapshot();
    return frame(j);
}

}  // namespace

ServiceError::ServiceError(int status, nlohmann::json body)
    : std::runtime_error(body.value("error", std::string("service error"))), status_(status), body_(std::move(body)) {}

nlohmann::json to_json(const SessionHandle& h) {
    return {{"session_id", h.session_id},
            {"status", std::string(engine::to_string(h.status))},
            {"created_at", h.created_at},
            {"tick_interval_ms", h.tick_interval_ms}};
}

std::string make_session_id() {
    static std::mutex mu;
    static std::mt19937_64 gen{std::random_device{}()};
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;
    {
        std::lock_guard lock(mu);
        hi = gen();
        lo = gen();
    }
    hi = (hi & 0xFFFFFFFFFFFF0FFFULL) | 0x0000000000004000ULL;  // version 4
    lo = (lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;  // RFC 4122 variant
    char buf[40];
    std::snprintf(buf, sizeof buf, "%08x-%04x-%04x-%04x-%012llx", static_cast<unsigned>(hi >> 32),
                  static_cast<unsigned>((hi >> 16) & 0xFFFF), static_cast<unsigned>(hi & 0xFFFF),
                  static_cast<unsigned>(lo >> 48), static_cast<unsigned long long>(lo & 0xFFFFFFFFFFFFULL));
    return buf;
}

SessionService::SessionService(ServiceOptions options) : options_(std::move(options)) {}

SessionService::~SessionService() = default;

world::Scenario SessionService::resolve_scenario(const json& body, std::uint64_t seed) const {
    if (!body.contains("scenario") || body.at("scenario").is_null()) return world::generate_scenario({}, seed);
    const auto& s = body.at("scenario");
    try {
        if (s.is_string()) {
            const auto name = s.get<std::string>();
            const bool plain = !name.empty() && name.find('/') == std::string::npos && name.find("..") == std::string::npos;
            const auto path = options_.scenario_dir / (name + ".json");
            if (!plain || !std::filesystem::is_regular_file(path)) fail(404, "unknown scenario '" + name + "'");
            return world::load_scenario(path);
        }
        if (s.is_object()) {
            if (s.contains("hypotheses")) return world::scenario_from_json(s);
            return world::generate_scenario(world::scenario_config_from_json(s), seed);
        }
    } catch (const world::InvalidConfig& e) {
        fail(400, std::string("invalid scenario: ") + e.what());
    }
    fail(400, "'scenario' must be a name or an object");
}

SessionHandle SessionService::create_session(const json& body) {
    if (!body.is_object()) fail(400, "request body must be a JSON object");
    auto pattern = pattern_from_body(body);

    std::optional<std::uint64_t> seed;
    if (body.contains("seed")) {
        const auto& sj = body.at("seed");
        if (!sj.is_number_unsigned() && !(sj.is_number_integer() && sj.get<std::int64_t>() >= 0)) fail(400, "'seed' must be a non-negative integer");
        seed = body.at("seed").get<std::uint64_t>();
    }
    int tick_ms = options_.default_tick_ms;
    if (body.contains("tick_interval_ms")) {
        if (!body.at("tick_interval_ms").is_number_integer() || body.at("tick_interval_ms").get<int>() < 0) {
            fail(400, "'tick_interval_ms' must be a non-negative integer");
        }
        tick_ms = body.at("tick_interval_ms").get<int>();
    }
    engine::SessionConfig config;
    config.live_mode = true;
    config.seed = seed;
    if (body.contains("max_ticks")) {
        if (!body.at("max_ticks").is_number_integer()) fail(400, "'max_ticks' must be an integer");
        config.max_ticks = body.at("max_ticks").get<int>();
    }

    auto scenario = resolve_scenario(body, seed.value_or(1));

    engine::Bindings overrides;
    try {
        overrides = engine::bindings_from_json(body.contains("bindings") ? body.at("bindings") : json());
    } catch (const std::exception& e) {
        fail(400, std::string("invalid bindings: ") + e.what());
    }
    const bool has_live = std::any_of(overrides.begin(), overrides.end(), [](const auto& kv) {
        return std::holds_alternative<engine::LiveHuman>(kv.second);
    });
    if (!has_live) {
        const auto it = std::find_if(pattern.actors.begin(), pattern.actors.end(), [&](const auto& a) {
            return a.actor_class == tdp::ActorClass::human && !overrides.contains(a.id);
        });
        if (it == pattern.actors.end()) fail(400, "pattern has no human actor to bind to the live analyst");
        overrides.emplace(it->id, engine::LiveHuman{});
    }
    auto bindings = engine::default_bindings(pattern, overrides);

    std::optional<engine::Session> session;
    try {
        session.emplace(engine::Session::create(std::move(scenario), std::move(pattern), std::move(bindings), config));
    } catch (const tdp::LintFailure& e) {
        fail(400, "pattern fails lint", {{"findings", tdp::to_json(e.report())}});
    } catch (const std::invalid_argument& e) {
        fail(400, e.what());
    }

    SessionHandle h;
    h.created_at = now_iso8601();
    h.tick_interval_ms = tick_ms;
    h.status = session->status();
    std::lock_guard lock(mu_);
    do {
        h.session_id = make_session_id();
    } while (sessions_.contains(h.session_id));
    sessions_.emplace(h.session_id, std::make_shared<Entry>(h, std::move(*session)));
    return h;
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) fail(404, "unknown session '" + id + "'");
    return it->second;
}

SessionHandle SessionService::handle(const std::string& id) const {
    auto e = find(id);
    std::lock_guard lock(e->mu);
    return e->handle;
}

nlohmann::ordered_json SessionService::snapshot(const std::string& id) const {
    auto e = find(id);
    std::lock_guard lock(e->mu);
    return e->session.snapshot();
}

std::string SessionService::log(const std::string& id) const {
    auto e = find(id);
    std::lock_guard lock(e->mu);
    return engine::serialize_log(e->session.log());
}

void SessionService::broadcast(Entry& e, const std::string& f) {
    for (auto& [token, sink] : e.sinks) sink(f);
}

void SessionService::publish_events(Entry& e, const std::vector<engine::SimEvent>& events) {
    if (events.empty()) return;
    oj j;
    j["type"] = "events";
    j["tick"] = e.session.tick();
    auto& arr = j["events"] = oj::array();
    bool state_changed = false;
    for (const auto& ev : events) {
        arr.push_back(engine::to_json(ev));
        if (ev.kind == "state_change") state_changed = true;
    }
    broadcast(e, frame(j));
    const bool periodic = events.front().kind == "tick" && e.session.tick() % options_.snapshot_every == 0;
    if (state_changed || periodic || e.session.finished()) broadcast(e, snapshot_frame(e.session));
}

void SessionService::persist_if_finished(Entry& e) {
    if (!e.session.finished() || e.log_written) return;
    e.handle.status = engine::SessionStatus::finished;
    e.log_written = true;
    std::error_code ec;
    std::filesystem::create_directories(options_.log_dir, ec);
    std::ofstream f(options_.log_dir / (e.handle.session_id + ".jsonl"), std::ios::binary | std::ios::trunc);
    f << engine::serialize_log(e.session.log());
}

void SessionService::step_locked(Entry& e, int ticks) {
    if (e.session.finished()) fail(409, "session has finished");
    for (int i = 0; i < ticks && !e.session.finished(); ++i) {
        publish_events(e, e.session.step());
    }
    persist_if_finished(e);
}

void SessionService::step(const std::string& id, int ticks) {
    auto e = find(id);
    std::lock_guard lock(e->mu);
    step_locked(*e, ticks);
}

nlohmann::json SessionService::post_action(const std::string& id, const json& body) {
    auto e = find(id);
    agents::Action action;
    try {
        action = agents::action_from_json(body);
    } catch (const agents::MalformedAction& ex) {
        fail(400, ex.what());
    }
    std::lock_guard lock(e->mu);
    if (e->session.finished()) fail(409, "session has finished");
    engine::SubmitResult r;
    try {
        r = e->session.submit_human_action(std::move(action));
    } catch (const std::invalid_argument& ex) {
        fail(400, ex.what());
    }
    publish_events(*e, r.events);
    return {{"accepted", true}, {"queued", r.queued}, {"replaced", r.replaced}};
}

std::uint64_t SessionService::subscribe(const std::string& id, FrameSink sink) {
    auto e = find(id);
    std::lock_guard lock(e->mu);
    std::uint64_t token = 0;
    {
        std::lock_guard g(mu_);
        token = next_token_++;
    }
    sink(snapshot_frame(e->session));
    e->sinks.emplace(token, std::move(sink));
    return token;
}

void SessionService::unsubscribe(const std::string& id, std::uint64_t token) {
    std::shared_ptr<Entry> e;
    {
        std::lock_guard lock(mu_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) return;
        e = it->second;
    }
    std::lock_guard lock(e->mu);
    e->sinks.erase(token);
}

std::vector<std::string> SessionService::handle_client_frame(const std::string& id, const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error&) {
        return {error_frame("frame is not valid JSON")};
    }
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
        return {error_frame("frame needs a string 'type'")};
    }
    const auto type = j.at("type").get<std::string>();
    try {
        if (type == "action") {
            json body = j.contains("action") ? j.at("action") : j;
            if (body.is_object()) body.erase("type");
            post_action(id, body);
            return {};
        }
        if (type == "step") {
            int ticks = 1;
            if (j.contains("ticks")) {
                if (!j.at("ticks").is_number_integer() || j.at("ticks").get<int>() < 1) {
                    return {error_frame("'ticks' must be a positive integer")};
                }
                ticks = j.at("ticks").get<int>();
            }
            auto e = find(id);
            std::lock_guard lock(e->mu);
            if (e->handle.tick_interval_ms > 0) return {error_frame("session is driven by its tick timer")};
            step_locked(*e, ticks);
            return {};
        }
    } catch (const ServiceError& ex) {
        return {error_frame(ex.what())};
    }
    return {error_frame("unknown frame type '" + type + "'")};
}

nlohmann::json SessionService::pattern_presets() const {
    json out = json::array();
    for (const auto& p : tdp::presets()) {
        const auto pattern = tdp::load_preset(p.name);
        json states = json::array();
        for (const auto& s : pattern.states) states.push_back({{"name", s.name}, {"is_handover", s.is_handover}});
        json actors = json::array();
        for (const auto& a : pattern.actors) {
            actors.push_back({{"id", a.id}, {"class", std::string(tdp::to_string(a.actor_class))}});
        }
        out.push_back({{"name", std::string(p.name)},
                       {"source", std::string(p.source)},
                       {"initial", pattern.initial()},
                       {"actors", actors},
                       {"states", states}});
    }
    return out;
}

nlohmann::json SessionService::scenario_presets() const {
    json out = json::array();
    std::error_code ec;
    if (!std::filesystem::is_directory(options_.scenario_dir, ec)) return out;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(options_.scenario_dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        try {
            const auto s = world::load_scenario(path);
            json hyps = json::array();
            for (const auto& h : s.hypotheses) hyps.push_back({{"id", h.id}, {"label", h.label}});
            out.push_back({{"name", path.stem().string()},
                           {"description", s.description},
                           {"hypotheses", hyps},
                           {"sources", s.sources.size()}});
        } catch (const std::exception&) {
            // Unreadable files are simply not offered.
        }
    }
    return out;
}

std::vector<std::string> SessionService::session_ids() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> ids;
    for (const auto& [id, e] : sessions_) ids.push_back(id);
    return ids;
}

}  // namespace teamsim::service
