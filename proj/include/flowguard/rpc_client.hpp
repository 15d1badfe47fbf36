#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>

#include "flowguard/txparse.hpp"

namespace flowguard {

struct RpcOptions {
  std::chrono::milliseconds timeout{10000};
  // Overrides the chain derived from eth_chainId.
  std::optional<Chain> chain;
};

// Minimal EVM JSON-RPC client for replaying historical transactions:
// debug_traceTransaction with the call tracer plus eth_getTransactionReceipt.
// Thread-safe; each call opens its own connection.
class RpcClient {
 public:
  explicit RpcClient(std::string endpoint, RpcOptions options = {});

  // Throws NetworkError (transport), NotFound (unknown hash) or
  // UnsupportedNode (tracing unavailable, unknown chain id).
  RawTransaction fetch_transaction(const Word32& tx_hash) const;

 private:
  std::string scheme_host_port_;
  std::string path_;
  RpcOptions options_;
};

RawTransaction fetch_transaction(const std::string& endpoint, const Word32& tx_hash, RpcOptions options = {});

}  // namespace flowguard
