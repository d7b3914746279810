#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "oranval/common/error.hpp"
#include "oranval/orchestrator/orchestrator.hpp"

namespace httplib {
class Server;
}

namespace oranval {

// 404 unknown resources, 409 illegal state transitions, 400 schema
// violations, 500 everything else.
int http_status(ErrorKind kind);

// {"error": {"code", "message", "field"?}}
nlohmann::json error_body(const std::exception& e);

struct GatewayOptions {
  // Static bearer token; when empty every request is accepted.
  std::string token;
  std::size_t idempotency_capacity = 1024;
};

struct GatewayRoutes;

// HTTP API under /api/v1. Mutations accept an Idempotency-Key header: a
// repeated key with the same body replays the first response, with a
// different body it is rejected with 422.
class Gateway {
 public:
  Gateway(Orchestrator& orchestrator, GatewayOptions options = {});
  ~Gateway();

  void install(httplib::Server& server);
  // Blocks until stop() is called. Returns false if the socket cannot be bound.
  bool listen(const std::string& host, int port);
  // Binds to an ephemeral port and serves on a background thread; returns the port.
  int start_background(const std::string& host = "127.0.0.1");
  void stop();

  static nlohmann::json openapi();

 private:
  struct Replay {
    std::string body_hash;
    int status = 0;
    std::string body;
    std::string content_type;
  };
  struct IdemSlot {
    std::mutex mu;
    std::optional<Replay> replay;
  };
  std::shared_ptr<IdemSlot> idem_slot(const std::string& key);

  friend struct GatewayRoutes;

  Orchestrator& orch_;
  GatewayOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::unique_ptr<std::thread> thread_;
  // Route handlers refer back to these; one per installed server.
  std::vector<std::shared_ptr<GatewayRoutes>> routes_;

  std::mutex idem_mu_;
  std::map<std::string, std::shared_ptr<IdemSlot>> idem_;
  std::deque<std::string> idem_order_;
};

}  // namespace oranval
