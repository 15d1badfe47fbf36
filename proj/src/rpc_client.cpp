#include "flowguard/rpc_client.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>

#include <httplib.h>
#include <json.hpp>

#include "flowguard/errors.hpp"

namespace flowguard {

using nlohmann::json;

namespace {

constexpr int kMethodNotFound = -32601;

bool contains_ci(std::string haystack, std::string_view needle) {
  std::transform(haystack.begin(), haystack.end(), haystack.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return haystack.find(needle) != std::string::npos;
}

Address frame_address(const json& frame, const char* key) {
  auto it = frame.find(key);
  if (it == frame.end() || !it->is_string()) throw UnsupportedNode(std::string("call frame without '") + key + "'");
  auto a = Address::from_hex(it->get<std::string>());
  if (!a) throw UnsupportedNode(std::string("call frame has malformed '") + key + "'");
  return *a;
}

// Depth-first pre-order, matching execution order. Reverted frames and
// their subtrees moved no value and are skipped.
void flatten_frames(const json& frame, std::uint32_t depth, std::vector<CallTrace>& out) {
  if (frame.contains("error")) return;
  CallTrace t;
  t.kind = call_kind_from_string(frame.value("type", std::string("CALL")));
  t.caller = frame_address(frame, "from");
  t.callee = frame_address(frame, "to");
  t.depth = depth;
  if (auto it = frame.find("value"); it != frame.end() && it->is_string()) {
    if (parse_u256_hex(it->get<std::string>(), t.value) != U256ParseStatus::ok)
      throw UnsupportedNode("call frame has malformed 'value'");
  }
  out.push_back(t);
  if (auto it = frame.find("calls"); it != frame.end() && it->is_array())
    for (const auto& child : *it) flatten_frames(child, depth + 1, out);
}

}  // namespace

RpcClient::RpcClient(std::string endpoint, RpcOptions options) : options_(options) {
  const auto scheme_end = endpoint.find("://");
  const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = endpoint.find('/', host_start);
  if (path_start == std::string::npos) {
    scheme_host_port_ = endpoint;
    path_ = "/";
  } else {
    scheme_host_port_ = endpoint.substr(0, path_start);
    path_ = endpoint.substr(path_start);
  }
}

RawTransaction RpcClient::fetch_transaction(const Word32& tx_hash) const {
  httplib::Client client(scheme_host_port_);
  if (!client.is_valid()) throw NetworkError("invalid endpoint '" + scheme_host_port_ + "'");
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());

  static std::atomic<std::uint64_t> next_id{1};

  // Returns the "result" member; the raw error object is handed to
  // `on_error` which must throw.
  auto call = [&](const std::string& method, json params, auto&& on_error) -> json {
    const json request = {{"jsonrpc", "2.0"}, {"id", next_id++}, {"method", method}, {"params", std::move(params)}};
    auto res = client.Post(path_, request.dump(), "application/json");
    if (!res) throw NetworkError(method + ": " + httplib::to_string(res.error()));
    if (res->status != 200) throw NetworkError(method + ": HTTP status " + std::to_string(res->status));
    json body;
    try {
      body = json::parse(res->body);
    } catch (const json::parse_error&) {
      throw UnsupportedNode(method + ": response is not JSON");
    }
    if (auto it = body.find("error"); it != body.end() && !it->is_null()) on_error(*it);
    auto it = body.find("result");
    if (it == body.end()) throw UnsupportedNode(method + ": response has neither result nor error");
    return *it;
  };

  auto generic_error = [](const std::string& method) {
    return [method](const json& err) {
      const auto message = err.value("message", std::string("unknown error"));
      if (err.value("code", 0) == kMethodNotFound) throw UnsupportedNode(method + ": " + message);
      if (contains_ci(message, "not found")) throw NotFound(method + ": " + message);
      throw UnsupportedNode(method + ": " + message);
    };
  };

  RawTransaction tx;
  tx.tx_hash = tx_hash;

  if (options_.chain) {
    tx.chain = *options_.chain;
  } else {
    const json id = call("eth_chainId", json::array(), generic_error("eth_chainId"));
    const auto text = id.is_string() ? id.get<std::string>() : std::string{};
    if (text == "0x1")
      tx.chain = Chain::ethereum;
    else if (text == "0x38")
      tx.chain = Chain::bsc;
    else
      throw UnsupportedNode("unsupported chain id '" + text + "'");
  }

  const json receipt = call("eth_getTransactionReceipt", json::array({tx_hash.hex()}),
                            generic_error("eth_getTransactionReceipt"));
  if (receipt.is_null()) throw NotFound("transaction " + tx_hash.hex() + " not found");

  const json trace = call("debug_traceTransaction", json::array({tx_hash.hex(), {{"tracer", "callTracer"}}}),
                          generic_error("debug_traceTransaction"));
  if (!trace.is_object()) throw UnsupportedNode("debug_traceTransaction: expected a call frame object");
  flatten_frames(trace, 0, tx.traces);

  if (auto logs = receipt.find("logs"); logs != receipt.end() && logs->is_array()) {
    // Round-trip each log through the fixture schema so both paths share
    // one validator.
    json fixture = {{"tx_hash", tx_hash.hex()},
                    {"chain", std::string(to_string(tx.chain))},
                    {"call_traces", json::array()},
                    {"event_logs", json::array()}};
    for (const auto& l : *logs)
      fixture["event_logs"].push_back(
          {{"address", l.value("address", "")}, {"topics", l.value("topics", json::array())}, {"data", l.value("data", "0x")}});
    try {
      tx.logs = parse_fixture(fixture.dump()).logs;
    } catch (const Error& e) {
      throw UnsupportedNode(std::string("eth_getTransactionReceipt: malformed log: ") + e.what());
    }
  }
  return tx;
}

RawTransaction fetch_transaction(const std::string& endpoint, const Word32& tx_hash, RpcOptions options) {
  return RpcClient(endpoint, options).fetch_transaction(tx_hash);
}

}  // namespace flowguard
