#include "flowguard/txparse.hpp"

#include <algorithm>

#include <json.hpp>

#include "flowguard/errors.hpp"

namespace flowguard {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) throw SchemaError(path + "." + key, "required field missing");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw SchemaError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

Address require_address(const json& obj, const char* key, const std::string& path) {
  const auto text = require_string(obj, key, path);
  auto a = Address::from_hex(text);
  if (!a) throw SchemaError(path + "." + key, "expected 0x-prefixed 20-byte hex address");
  return *a;
}

U256 require_amount(const json& obj, const char* key, const std::string& path) {
  const auto text = require_string(obj, key, path);
  U256 v;
  switch (parse_u256_hex(text, v)) {
    case U256ParseStatus::ok:
      return v;
    case U256ParseStatus::overflow:
      throw RangeError(path + "." + key + ": value exceeds 2^256-1");
    case U256ParseStatus::malformed:
      break;
  }
  throw SchemaError(path + "." + key, "expected 0x-prefixed hex quantity");
}

std::optional<std::uint64_t> optional_position(const json& obj, const std::string& path) {
  auto it = obj.find("position");
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_unsigned()) throw SchemaError(path + ".position", "expected a non-negative integer");
  return it->get<std::uint64_t>();
}

const json& require_array(const json& obj, const char* key) {
  const json& v = require(obj, key, "$");
  if (!v.is_array()) throw SchemaError(std::string("$.") + key, "expected an array");
  return v;
}

CallTrace parse_trace(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  CallTrace t;
  t.caller = require_address(j, "from", path);
  t.callee = require_address(j, "to", path);
  t.value = require_amount(j, "value", path);
  const json& depth = require(j, "depth", path);
  if (!depth.is_number_unsigned()) throw SchemaError(path + ".depth", "expected a non-negative integer");
  t.depth = depth.get<std::uint32_t>();
  t.kind = call_kind_from_string(require_string(j, "call_kind", path));
  t.position = optional_position(j, path);
  return t;
}

EventLog parse_log(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  EventLog log;
  log.emitter = require_address(j, "address", path);
  const json& topics = require(j, "topics", path);
  if (!topics.is_array()) throw SchemaError(path + ".topics", "expected an array");
  if (topics.size() > 4) throw SchemaError(path + ".topics", "at most 4 topics allowed");
  for (std::size_t i = 0; i < topics.size(); ++i) {
    const auto tpath = path + ".topics[" + std::to_string(i) + "]";
    if (!topics[i].is_string()) throw SchemaError(tpath, "expected a string");
    auto w = Word32::from_hex(topics[i].get<std::string>());
    if (!w) throw SchemaError(tpath, "expected 0x-prefixed 32-byte hex word");
    log.topics.push_back(*w);
  }
  auto data = bytes_from_hex(require_string(j, "data", path));
  if (!data) throw SchemaError(path + ".data", "expected 0x-prefixed hex bytes");
  log.data = std::move(*data);
  log.position = optional_position(j, path);
  return log;
}

}  // namespace

std::string_view to_string(CallKind k) {
  switch (k) {
    case CallKind::CALL: return "CALL";
    case CallKind::DELEGATECALL: return "DELEGATECALL";
    case CallKind::STATICCALL: return "STATICCALL";
    case CallKind::CREATE: return "CREATE";
    case CallKind::OTHER: return "OTHER";
  }
  return "OTHER";
}

CallKind call_kind_from_string(std::string_view s) {
  std::string up(s);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (up == "CALL") return CallKind::CALL;
  if (up == "DELEGATECALL") return CallKind::DELEGATECALL;
  if (up == "STATICCALL") return CallKind::STATICCALL;
  if (up == "CREATE" || up == "CREATE2") return CallKind::CREATE;
  return CallKind::OTHER;
}

const Word32& transfer_signature() {
  static const Word32 sig = *Word32::from_hex(kTransferSigHex);
  return sig;
}

RawTransaction parse_fixture(std::string_view raw) {
  json doc;
  try {
    doc = json::parse(raw.begin(), raw.end());
  } catch (const json::parse_error& e) {
    throw ParseError("malformed fixture document", e.byte);
  }
  if (!doc.is_object()) throw SchemaError("$", "top-level value must be an object");

  RawTransaction tx;
  auto hash = Word32::from_hex(require_string(doc, "tx_hash", "$"));
  if (!hash) throw SchemaError("$.tx_hash", "expected 0x-prefixed 32-byte hex hash");
  tx.tx_hash = *hash;

  auto chain = chain_from_string(require_string(doc, "chain", "$"));
  if (!chain) throw SchemaError("$.chain", "expected \"ethereum\" or \"bsc\"");
  tx.chain = *chain;

  const json& traces = require_array(doc, "call_traces");
  tx.traces.reserve(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i)
    tx.traces.push_back(parse_trace(traces[i], "$.call_traces[" + std::to_string(i) + "]"));

  const json& logs = require_array(doc, "event_logs");
  tx.logs.reserve(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i)
    tx.logs.push_back(parse_log(logs[i], "$.event_logs[" + std::to_string(i) + "]"));

  if (auto it = doc.find("label"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_integer() || (it->get<int>() != 0 && it->get<int>() != 1))
      throw SchemaError("$.label", "expected 0 or 1");
    tx.label = it->get<int>();
  }
  return tx;
}

std::string serialize_fixture(const RawTransaction& tx) {
  json doc;
  doc["tx_hash"] = tx.tx_hash.hex();
  doc["chain"] = std::string(to_string(tx.chain));
  doc["call_traces"] = json::array();
  for (const auto& t : tx.traces) {
    json jt = {{"from", t.caller.hex()},
               {"to", t.callee.hex()},
               {"value", u256_to_hex(t.value)},
               {"depth", t.depth},
               {"call_kind", std::string(to_string(t.kind))}};
    if (t.position) jt["position"] = *t.position;
    doc["call_traces"].push_back(std::move(jt));
  }
  doc["event_logs"] = json::array();
  for (const auto& l : tx.logs) {
    json topics = json::array();
    for (const auto& w : l.topics) topics.push_back(w.hex());
    json jl = {{"address", l.emitter.hex()}, {"topics", std::move(topics)}, {"data", to_hex(l.data)}};
    if (l.position) jl["position"] = *l.position;
    doc["event_logs"].push_back(std::move(jl));
  }
  if (tx.label) doc["label"] = *tx.label;
  return doc.dump();
}

std::optional<Transfer> decode_transfer_event(const EventLog& log) {
  if (log.topics.empty() || log.topics[0] != transfer_signature()) return std::nullopt;
  if (log.topics.size() < 3)
    throw MalformedEvent("Transfer event with " + std::to_string(log.topics.size()) + " topics, expected 3");
  if (log.data.size() != 32)
    throw MalformedEvent("Transfer event data is " + std::to_string(log.data.size()) + " bytes, expected 32");

  auto topic_address = [](const Word32& w, const char* which) {
    for (std::size_t i = 0; i < 12; ++i)
      if (w.bytes[i] != 0) throw MalformedEvent(std::string("Transfer ") + which + " topic is not a padded address");
    Address a;
    std::copy(w.bytes.begin() + 12, w.bytes.end(), a.bytes.begin());
    return a;
  };

  Transfer t;
  t.sender = topic_address(log.topics[1], "from");
  t.receiver = topic_address(log.topics[2], "to");
  t.asset = AssetId::token(log.emitter);
  Word32 amount;
  std::copy(log.data.begin(), log.data.end(), amount.bytes.begin());
  t.amount = word_to_u256(amount);
  return t;
}

TransferExtraction extract_transfers_detailed(const RawTransaction& tx) {
  struct Slot {
    std::uint64_t order;
    Transfer transfer;
  };
  std::vector<Slot> slots;

  const bool global_order =
      std::all_of(tx.traces.begin(), tx.traces.end(), [](const CallTrace& t) { return t.position.has_value(); }) &&
      std::all_of(tx.logs.begin(), tx.logs.end(), [](const EventLog& l) { return l.position.has_value(); });

  for (std::size_t i = 0; i < tx.traces.size(); ++i) {
    const auto& t = tx.traces[i];
    if (t.value == 0) continue;
    if (t.kind != CallKind::CALL && t.kind != CallKind::CREATE) continue;
    slots.push_back({global_order ? *t.position : i, Transfer{t.caller, t.callee, AssetId::native(), t.value}});
  }

  TransferExtraction out;
  for (std::size_t i = 0; i < tx.logs.size(); ++i) {
    const auto& l = tx.logs[i];
    try {
      auto t = decode_transfer_event(l);
      if (!t || t->amount == 0) continue;
      slots.push_back({global_order ? *l.position : tx.traces.size() + i, std::move(*t)});
    } catch (const MalformedEvent& e) {
      out.malformed_events.push_back({i, e.what()});
    }
  }

  std::stable_sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) { return a.order < b.order; });
  out.transfers.reserve(slots.size());
  for (auto& s : slots) out.transfers.push_back(std::move(s.transfer));
  return out;
}

std::vector<Transfer> extract_transfers(const RawTransaction& tx) {
  return extract_transfers_detailed(tx).transfers;
}

}  // namespace flowguard
