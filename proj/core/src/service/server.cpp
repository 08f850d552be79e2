#include "teamsim/service/server.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <deque>
#include <map>
#include <optional>
#include <regex>

namespace teamsim::service {
namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

struct Shared {
    explicit Shared(ServiceOptions o) : service(std::move(o)) {}

    SessionService service;
    net::io_context ioc{1};
    std::map<std::string, std::shared_ptr<net::steady_timer>> timers;

    void start_timer(const std::string& id) {
        if (timers.contains(id)) return;
        SessionHandle h;
        try {
            h = service.handle(id);
        } catch (const ServiceError&) {
            return;
        }
        if (h.tick_interval_ms <= 0 || h.status == engine::SessionStatus::finished) return;
        auto timer = std::make_shared<net::steady_timer>(ioc);
        timers.emplace(id, timer);
        arm(id, timer, std::chrono::milliseconds(h.tick_interval_ms));
    }

    void arm(const std::string& id, std::shared_ptr<net::steady_timer> timer, std::chrono::milliseconds every) {
        timer->expires_after(every);
        timer->async_wait([this, id, timer, every](beast::error_code ec) {
            if (ec) return;
            try {
                service.step(id, 1);
                if (service.handle(id).status == engine::SessionStatus::running) return arm(id, timer, every);
            } catch (const ServiceError&) {
            }
            timers.erase(id);
        });
    }
};

const std::regex kSessionPath(R"(^/sessions/([^/]+)/(snapshot|actions|log|stream|step)$)");

Response text_response(const Request& req, http::status status, std::string body,
                       std::string_view content_type = "application/json") {
    Response res{status, req.version()};
    res.set(http::field::content_type, std::string(content_type));
    res.set(http::field::access_control_allow_origin, "*");
    res.keep_alive(req.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
}

Response json_response(const Request& req, http::status status, const nlohmann::json& body) {
    return text_response(req, status, body.dump());
}

Response error_response(const Request& req, http::status status, const std::string& message) {
    return json_response(req, status, {{"error", message}});
}

std::optional<nlohmann::json> parse_body(const Request& req) {
    try {
        return nlohmann::json::parse(req.body().empty() ? std::string("{}") : req.body());
    } catch (const nlohmann::json::parse_error&) {
        return std::nullopt;
    }
}

Response handle_request(Shared& sh, const Request& req) {
    std::string path(req.target());
    if (auto q = path.find('?'); q != std::string::npos) path.resize(q);
    const auto method = req.method();

    if (method == http::verb::options) {
        Response res{http::status::no_content, req.version()};
        res.set(http::field::access_control_allow_origin, "*");
        res.set(http::field::access_control_allow_methods, "GET, POST, OPTIONS");
        res.set(http::field::access_control_allow_headers, "Content-Type");
        res.keep_alive(req.keep_alive());
        res.prepare_payload();
        return res;
    }

    try {
        if (path == "/sessions") {
            if (method == http::verb::get) {
                auto ids = nlohmann::json::array();
                for (const auto& id : sh.service.session_ids()) ids.push_back(to_json(sh.service.handle(id)));
                return json_response(req, http::status::ok, ids);
            }
            if (method != http::verb::post) return error_response(req, http::status::method_not_allowed, "use POST");
            auto body = parse_body(req);
            if (!body) return error_response(req, http::status::bad_request, "body is not valid JSON");
            auto h = sh.service.create_session(*body);
            return json_response(req, http::status::created,
                                 {{"session_id", h.session_id}, {"status", std::string(engine::to_string(h.status))},
                                  {"created_at", h.created_at}});
        }
        if (path == "/presets/patterns" && method == http::verb::get) {
            return json_response(req, http::status::ok, sh.service.pattern_presets());
        }
        if (path == "/presets/scenarios" && method == http::verb::get) {
            return json_response(req, http::status::ok, sh.service.scenario_presets());
        }

        std::smatch m;
        if (std::regex_match(path, m, kSessionPath)) {
            const std::string id = m[1];
            const std::string what = m[2];
            if (what == "snapshot" && method == http::verb::get) {
                return text_response(req, http::status::ok, sh.service.snapshot(id).dump());
            }
            if (what == "log" && method == http::verb::get) {
                return text_response(req, http::status::ok, sh.service.log(id), "application/x-ndjson");
            }
            if (what == "actions" && method == http::verb::post) {
                auto body = parse_body(req);
                if (!body) return error_response(req, http::status::bad_request, "body is not valid JSON");
                return json_response(req, http::status::accepted, sh.service.post_action(id, *body));
            }
            if (what == "step" && method == http::verb::post) {
                auto body = parse_body(req);
                if (!body || !body->is_object()) {
                    return error_response(req, http::status::bad_request, "body is not a JSON object");
                }
                const auto ticks = body->value("ticks", 1);
                if (ticks < 1) return error_response(req, http::status::bad_request, "'ticks' must be positive");
                sh.service.step(id, ticks);
                const auto h = sh.service.handle(id);
                return json_response(req, http::status::ok,
                                     {{"session_id", id},
                                      {"status", std::string(engine::to_string(h.status))},
                                      {"tick", sh.service.snapshot(id).at("tick")}});
            }
            if (what == "stream") return error_response(req, http::status::upgrade_required, "WebSocket only");
            return error_response(req, http::status::method_not_allowed, "method not allowed");
        }
    } catch (const ServiceError& e) {
        return json_response(req, static_cast<http::status>(e.status()), e.body());
    } catch (const nlohmann::json::exception& e) {
        return error_response(req, http::status::bad_request, e.what());
    } catch (const std::exception& e) {
        return error_response(req, http::status::internal_server_error, e.what());
    }
    return error_response(req, http::status::not_found, "no route for " + path);
}

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
    WsSession(tcp::socket&& socket, Shared& sh, std::string id) : ws_(std::move(socket)), sh_(sh), id_(std::move(id)) {}

    ~WsSession() {
        if (token_) sh_.service.unsubscribe(id_, *token_);
    }

    void run(Request req) {
        beast::get_lowest_layer(ws_).expires_never();
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
    }

private:
    void on_accept(beast::error_code ec) {
        if (ec) return;
        ws_.text(true);
        try {
            std::weak_ptr<WsSession> weak = weak_from_this();
            auto ex = ws_.get_executor();
            token_ = sh_.service.subscribe(id_, [weak, ex](const std::string& f) {
                net::post(ex, [weak, f] {
                    if (auto self = weak.lock()) self->send(f);
                });
            });
        } catch (const ServiceError& e) {
            send(nlohmann::json{{"type", "error"}, {"message", e.what()}}.dump());
            closing_ = true;
            return;
        }
        sh_.start_timer(id_);
        do_read();
    }

    void do_read() {
        ws_.async_read(buf_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
    }

    void on_read(beast::error_code ec) {
        if (ec) return;
        const std::string text = beast::buffers_to_string(buf_.data());
        buf_.consume(buf_.size());
        for (auto& reply : sh_.service.handle_client_frame(id_, text)) send(std::move(reply));
        do_read();
    }

    void send(std::string f) {
        queue_.push_back(std::move(f));
        if (queue_.size() == 1) do_write();
    }

    void do_write() {
        ws_.async_write(net::buffer(queue_.front()),
                        [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_write(ec); });
    }

    void on_write(beast::error_code ec) {
        if (ec) return;
        queue_.pop_front();
        if (!queue_.empty()) return do_write();
        if (closing_) {
            ws_.async_close(websocket::close_code::policy_error, [self = shared_from_this()](beast::error_code) {});
        }
    }

    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buf_;
    Shared& sh_;
    std::string id_;
    std::optional<std::uint64_t> token_;
    std::deque<std::string> queue_;
    bool closing_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(tcp::socket&& socket, Shared& sh) : stream_(std::move(socket)), sh_(sh) {}

    void run() { do_read(); }

private:
    void do_read() {
        parser_.emplace();
        parser_->body_limit(1 << 20);
        stream_.expires_after(std::chrono::seconds(60));
        http::async_read(stream_, buf_, *parser_,
                         [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
    }

    void on_read(beast::error_code ec) {
        if (ec == http::error::end_of_stream) {
            stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
            return;
        }
        if (ec) return;
        Request req = parser_->release();
        if (websocket::is_upgrade(req)) {
            std::smatch m;
            std::string path(req.target());
            if (std::regex_match(path, m, kSessionPath) && m[2] == "stream") {
                std::make_shared<WsSession>(stream_.release_socket(), sh_, m[1].str())->run(std::move(req));
                return;
            }
            return write(error_response(req, http::status::not_found, "no stream at " + path));
        }
        write(handle_request(sh_, req));
    }

    void write(Response res) {
        auto sp = std::make_shared<Response>(std::move(res));
        const bool keep_alive = sp->keep_alive();
        http::async_write(stream_, *sp, [self = shared_from_this(), sp, keep_alive](beast::error_code ec, std::size_t) {
            if (ec) return;
            if (!keep_alive) {
                self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
                return;
            }
            self->do_read();
        });
    }

    beast::tcp_stream stream_;
    beast::flat_buffer buf_;
    std::optional<http::request_parser<http::string_body>> parser_;
    Shared& sh_;
};

class Listener : public std::enable_shared_from_this<Listener> {
public:
    Listener(Shared& sh, tcp::endpoint endpoint) : sh_(sh), acceptor_(sh.ioc) {
        acceptor_.open(endpoint.protocol());
        acceptor_.set_option(net::socket_base::reuse_address(true));
        acceptor_.bind(endpoint);
        acceptor_.listen(net::socket_base::max_listen_connections);
    }

    unsigned short port() const { return acceptor_.local_endpoint().port(); }

    void run() { do_accept(); }
    void close() {
        beast::error_code ec;
        acceptor_.close(ec);
    }

private:
    void do_accept() {
        acceptor_.async_accept([self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
            if (ec == net::error::operation_aborted) return;
            if (!ec) std::make_shared<HttpSession>(std::move(socket), self->sh_)->run();
            self->do_accept();
        });
    }

    Shared& sh_;
    tcp::acceptor acceptor_;
};

}  // namespace

struct Server::Impl {
    explicit Impl(ServerOptions o)
        : options(std::move(o)), shared(ServiceOptions{options.scenario_dir, options.log_dir, options.default_tick_ms}) {}

    ServerOptions options;
    Shared shared;
    std::shared_ptr<Listener> listener;
    std::thread thread;
    unsigned short port = 0;
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() { stop(); }

unsigned short Server::start() {
    if (impl_->thread.joinable()) return impl_->port;
    const auto address = net::ip::make_address(impl_->options.address);
    impl_->listener = std::make_shared<Listener>(impl_->shared, tcp::endpoint{address, impl_->options.port});
    impl_->port = impl_->listener->port();
    impl_->listener->run();
    impl_->thread = std::thread([this] { impl_->shared.ioc.run(); });
    return impl_->port;
}

void Server::stop() {
    if (!impl_ || !impl_->thread.joinable()) return;
    net::post(impl_->shared.ioc, [this] {
        impl_->listener->close();
        for (auto& [id, timer] : impl_->shared.timers) timer->cancel();
        impl_->shared.ioc.stop();
    });
    impl_->thread.join();
}

unsigned short Server::port() const { return impl_->port; }

SessionService& Server::service() { return impl_->shared.service; }

int serve(const ServerOptions& options, std::ostream& out) {
    Server server(options);
    const auto port = server.start();
    out << "teamsim service listening on http://" << options.address << ":" << port << std::endl;
    net::io_context signals_ioc;
    net::signal_set signals(signals_ioc, SIGINT, SIGTERM);
    signals.async_wait([](beast::error_code, int) {});
    signals_ioc.run();
    server.stop();
    out << "teamsim service stopped" << std::endl;
    return 0;
}

}  // namespace teamsim::service
