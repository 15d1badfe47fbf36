#include "flowguard/service/server.hpp"

#include <httplib.h>
#include <json.hpp>

#include "flowguard/errors.hpp"

namespace flowguard::service {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

void send_error(httplib::Response& res, int status, const std::string& phase, const std::string& kind,
                const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", {{"phase", phase}, {"kind", kind}, {"message", message}}}}.dump(), kJson);
}

}  // namespace

int status_for_kind(const std::string& kind) {
  if (kind == "ParseError" || kind == "SchemaError" || kind == "RangeError" || kind == "MalformedEvent" ||
      kind == "InputError")
    return 400;
  if (kind == "NotFound") return 404;
  if (kind == "NetworkError" || kind == "UnsupportedNode") return 502;
  return 500;
}

Server::Server(std::shared_ptr<const Classifier> classifier, ServerOptions options)
    : classifier_(std::move(classifier)), options_(std::move(options)), http_(std::make_unique<httplib::Server>()) {
  http_->set_payload_max_length(options_.max_body_bytes);

  http_->Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(classifier_->identity_json(), kJson);
  });

  http_->Post("/classify", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& e) {
      send_error(res, 400, "parse", "ParseError", e.what());
      return;
    }
    try {
      ClassifyResponse r;
      if (body.is_object() && body.contains("fixture")) {
        if (!body["fixture"].is_object()) throw PhaseError("parse", "SchemaError", "fixture must be an object");
        r = classifier_->classify_fixture(body["fixture"].dump());
      } else if (body.is_object() && body.contains("tx_hash")) {
        if (!body["tx_hash"].is_string()) throw PhaseError("parse", "SchemaError", "tx_hash must be a string");
        std::optional<std::string> rpc = options_.rpc_endpoint;
        if (body.contains("rpc")) {
          if (!body["rpc"].is_string()) throw PhaseError("parse", "SchemaError", "rpc must be a string");
          rpc = body["rpc"].get<std::string>();
        }
        if (!rpc) throw PhaseError("parse", "InputError", "no rpc endpoint given and none configured");
        r = classifier_->classify_remote(*rpc, body["tx_hash"].get<std::string>(), options_.rpc);
      } else {
        throw PhaseError("parse", "SchemaError", "expected {\"fixture\": {...}} or {\"tx_hash\": ..., \"rpc\": ...}");
      }
      res.set_content(response_to_json(r), kJson);
    } catch (const PhaseError& e) {
      send_error(res, status_for_kind(e.kind()), e.phase(), e.kind(), e.message());
    }
  });

  // Statuses produced by the transport layer (oversized body, unknown route).
  http_->set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    const std::string kind = res.status == 413 ? "PayloadTooLarge" : res.status == 404 ? "NotFound" : "HttpError";
    send_error(res, res.status, "request", kind, httplib::status_message(res.status));
    return httplib::Server::HandlerResponse::Handled;
  });
}

Server::~Server() { stop(); }

int Server::bind() {
  int port = options_.port;
  if (port == 0) {
    port = http_->bind_to_any_port(options_.host);
    if (port < 0) throw NetworkError("cannot bind " + options_.host);
  } else if (!http_->bind_to_port(options_.host, port)) {
    throw NetworkError("cannot bind " + options_.host + ":" + std::to_string(port));
  }
  return port;
}

void Server::run() { http_->listen_after_bind(); }

void Server::stop() {
  if (http_) http_->stop();
}

void Server::wait_until_ready() const { http_->wait_until_ready(); }

}  // namespace flowguard::service
