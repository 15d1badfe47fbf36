#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flowguard/types.hpp"

namespace flowguard {

enum class CallKind { CALL, DELEGATECALL, STATICCALL, CREATE, OTHER };
std::string_view to_string(CallKind k);
// Maps tracer type names onto CallKind. CREATE2 is a CREATE; CALLCODE,
// SELFDESTRUCT and unknown names are OTHER.
CallKind call_kind_from_string(std::string_view s);

struct CallTrace {
  Address caller;
  Address callee;
  U256 value = 0;
  std::uint32_t depth = 0;
  CallKind kind = CallKind::CALL;
  // Global execution position shared with logs, when the source provides it.
  std::optional<std::uint64_t> position;

  bool operator==(const CallTrace&) const = default;
};

struct EventLog {
  Address emitter;
  std::vector<Word32> topics;
  Bytes data;
  std::optional<std::uint64_t> position;

  bool operator==(const EventLog&) const = default;
};

struct RawTransaction {
  Word32 tx_hash;
  Chain chain = Chain::ethereum;
  std::vector<CallTrace> traces;
  std::vector<EventLog> logs;
  std::optional<int> label;

  bool operator==(const RawTransaction&) const = default;
};

struct Transfer {
  Address sender;
  Address receiver;
  AssetId asset;
  U256 amount = 0;

  bool operator==(const Transfer&) const = default;
};

// keccak256("Transfer(address,address,uint256)")
inline constexpr std::string_view kTransferSigHex =
    "0xddf252ad1be2c89b69c2b068fc378daa952ba7f163c4a11628f55a4df523b3ef";
const Word32& transfer_signature();

// Decodes a fixture document. Throws ParseError (malformed JSON, with byte
// offset), SchemaError (missing or mistyped field) or RangeError (amount
// above 2^256-1).
RawTransaction parse_fixture(std::string_view raw);
// Inverse of parse_fixture; output reparses to an equal RawTransaction.
std::string serialize_fixture(const RawTransaction& tx);

// Returns nullopt when topics[0] is not the Transfer signature. Throws
// MalformedEvent when it is but the payload does not have the
// (indexed from, indexed to, uint256 value) shape.
std::optional<Transfer> decode_transfer_event(const EventLog& log);

struct Diagnostic {
  std::size_t log_index;
  std::string message;
};

struct TransferExtraction {
  std::vector<Transfer> transfers;
  std::vector<Diagnostic> malformed_events;
};

// Native transfers from value-bearing CALL/CREATE traces and ERC20 transfers
// from Transfer logs. Zero amounts are dropped. Records keep their source
// order: merged by position when every record has one, traces-then-logs
// otherwise.
TransferExtraction extract_transfers_detailed(const RawTransaction& tx);
std::vector<Transfer> extract_transfers(const RawTransaction& tx);

}  // namespace flowguard
