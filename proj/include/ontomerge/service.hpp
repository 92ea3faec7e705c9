#pragma once
// HTTP session service. Endpoints and payloads are described in
// docs/http-api.md.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ontomerge::service {

struct ServiceConfig {
    /// When set, every session is stored there as its sources plus a merge
    /// script, and sessions found there are replayed at startup.
    std::optional<std::filesystem::path> data_dir;
};

class Server {
public:
    explicit Server(ServiceConfig config = {});
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds to a free port and returns it, or -1.
    int bind_any_port(const std::string& host = "127.0.0.1");
    bool bind(const std::string& host, int port);
    /// Serves until stop() is called. Requires a successful bind.
    bool run();
    void stop();
    /// Blocks until a concurrent run() is accepting connections.
    void wait_until_ready() const;
    bool running() const;
    std::size_t session_count() const;
    /// Messages from sessions that could not be restored at startup.
    const std::vector<std::string>& restore_errors() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace ontomerge::service
