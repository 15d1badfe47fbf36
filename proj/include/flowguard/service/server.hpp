#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>

#include "flowguard/service/pipeline.hpp"

namespace httplib {
class Server;
}

namespace flowguard::service {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::size_t max_body_bytes = 1 << 20;
  // Used for {tx_hash} requests that do not name an endpoint.
  std::optional<std::string> rpc_endpoint;
  RpcOptions rpc;
};

// POST /classify with {"fixture": {...}} or {"tx_hash": "0x..", "rpc": url};
// GET /health. Errors come back as {"error": {"phase", "kind", "message"}}.
class Server {
 public:
  Server(std::shared_ptr<const Classifier> classifier, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds the socket and returns the bound port. Throws NetworkError.
  int bind();
  // Serves until stop(); requires bind().
  void run();
  void stop();
  // Blocks until the listener is accepting.
  void wait_until_ready() const;

 private:
  std::shared_ptr<const Classifier> classifier_;
  ServerOptions options_;
  std::unique_ptr<httplib::Server> http_;
};

// HTTP status for an error kind raised by the pipeline.
int status_for_kind(const std::string& kind);

}  // namespace flowguard::service
