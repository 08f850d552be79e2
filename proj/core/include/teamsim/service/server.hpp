#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <ostream>
#include <string>
#include <thread>

#include "teamsim/service/session_service.hpp"

namespace teamsim::service {

struct ServerOptions {
    std::string address = "127.0.0.1";
    unsigned short port = 8080;  // 0 binds an ephemeral port
    std::filesystem::path scenario_dir = "scenarios";
    std::filesystem::path log_dir = "logs";
    int default_tick_ms = 0;
};

// HTTP + WebSocket front end over a SessionService, run by one I/O thread.
// Timer-driven sessions start ticking when their first stream client
// connects.
class Server {
public:
    explicit Server(ServerOptions options);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    // Binds and starts the I/O thread. Returns the bound port.
    unsigned short start();
    void stop();

    unsigned short port() const;
    SessionService& service();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Blocks serving until SIGINT/SIGTERM. Returns a process exit code.
int serve(const ServerOptions& options, std::ostream& out);

}  // namespace teamsim::service
