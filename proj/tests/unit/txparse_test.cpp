#include <catch2/catch_amalgamated.hpp>

#include "flowguard/errors.hpp"
#include "flowguard/txparse.hpp"
#include "helpers.hpp"
#include "keccak.hpp"

using namespace flowguard;
using namespace flowguard::testing;

namespace {

std::string minimal_doc(const std::string& traces, const std::string& logs) {
  return R"({"tx_hash":"0x)" + std::string(64, 'a') + R"(","chain":"ethereum","call_traces":)" + traces +
         R"(,"event_logs":)" + logs + "}";
}

EventLog transfer_log(const Address& token, const Address& from, const Address& to, const U256& v) {
  const auto w = pad_u256(v);
  return {token, {transfer_signature(), pad_address(from), pad_address(to)}, Bytes(w.bytes.begin(), w.bytes.end()),
          std::nullopt};
}

}  // namespace

TEST_CASE("keccak oracle matches published vectors") {
  CHECK(to_hex(keccak256("")) == "0xc5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470");
  CHECK(to_hex(keccak256("abc")) == "0x4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45");
  CHECK(to_hex(keccak256("The quick brown fox jumps over the lazy dog")) ==
        "0x4d741b6f1eb29cb2a9b9911c82f56fa8d73b04959d3d9d222895df6c0b28aa15");
  // Padding at and across the 136-byte block boundary.
  CHECK(to_hex(keccak256(std::string(135, 'a'))) ==
        "0x34367dc248bbd832f4e3e69dfaac2f92638bd0bbd18f2912ba4ef454919cf446");
  CHECK(to_hex(keccak256(std::string(136, 'a'))) ==
        "0xa6c4d403279fe3e0af03729caada8374b5ca54d8065329a3ebcaeb4b60aa386e");
  CHECK(to_hex(keccak256(std::string(200, 'a'))) ==
        "0x96ea54061def936c4be90b518992fdc6f12f535068a256229aca54267b4d084d");
}

TEST_CASE("transfer signature is keccak of the event prototype") {
  const auto digest = keccak256("Transfer(address,address,uint256)");
  CHECK(to_hex(digest) == std::string(kTransferSigHex));
  CHECK(transfer_signature().hex() == std::string(kTransferSigHex));
}

TEST_CASE("worked example fixture parses into the seven transfers in order") {
  const auto tx = parse_fixture(read_text(data_path("worked_example.json")));
  CHECK(tx.traces.size() == 4);
  CHECK(tx.logs.size() == 3);
  CHECK(tx.label == 1);
  CHECK(extract_transfers(tx) == worked_example_transfers());
}

TEST_CASE("fixture serialization round trips") {
  const auto tx = parse_fixture(read_text(data_path("worked_example.json")));
  CHECK(parse_fixture(serialize_fixture(tx)) == tx);
}

TEST_CASE("without positions traces come before logs") {
  auto tx = parse_fixture(read_text(data_path("worked_example.json")));
  for (auto& t : tx.traces) t.position.reset();
  const auto got = extract_transfers(tx);
  const auto ref = worked_example_transfers();
  REQUIRE(got.size() == 7);
  const std::vector<Transfer> expected = {ref[0], ref[1], ref[5], ref[6], ref[2], ref[3], ref[4]};
  CHECK(got == expected);
}

TEST_CASE("native value moves only through CALL and CREATE with nonzero value") {
  RawTransaction tx;
  const auto a = addr_tail(1), b = addr_tail(2);
  tx.traces = {{a, b, 5, 0, CallKind::CALL, {}},
               {a, b, 6, 1, CallKind::DELEGATECALL, {}},
               {a, b, 7, 1, CallKind::STATICCALL, {}},
               {a, b, 0, 1, CallKind::CALL, {}},
               {a, b, 8, 1, CallKind::CREATE, {}},
               {a, b, 9, 1, CallKind::OTHER, {}}};
  const auto t = extract_transfers(tx);
  REQUIRE(t.size() == 2);
  CHECK(t[0].amount == 5);
  CHECK(t[1].amount == 8);
  CHECK(t[0].asset.is_native());
}

TEST_CASE("call kinds map tracer names") {
  CHECK(call_kind_from_string("CREATE2") == CallKind::CREATE);
  CHECK(call_kind_from_string("call") == CallKind::CALL);
  CHECK(call_kind_from_string("SELFDESTRUCT") == CallKind::OTHER);
}

TEST_CASE("transfer event decoding") {
  const auto token = addr_tail(0x70), from = addr_tail(1), to = addr_tail(2);
  SECTION("well formed") {
    const auto t = decode_transfer_event(transfer_log(token, from, to, 42));
    REQUIRE(t);
    CHECK(t->sender == from);
    CHECK(t->receiver == to);
    CHECK(t->asset == AssetId::token(token));
    CHECK(t->amount == 42);
  }
  SECTION("other events are ignored") {
    auto log = transfer_log(token, from, to, 42);
    log.topics[0].bytes[0] ^= 1;
    CHECK_FALSE(decode_transfer_event(log));
    log.topics.clear();
    CHECK_FALSE(decode_transfer_event(log));
  }
  SECTION("indexed value (ERC721 shape) is malformed") {
    auto log = transfer_log(token, from, to, 42);
    log.topics.push_back(pad_u256(7));
    log.data.clear();
    CHECK_THROWS_AS(decode_transfer_event(log), MalformedEvent);
  }
  SECTION("short data is malformed") {
    auto log = transfer_log(token, from, to, 42);
    log.data.pop_back();
    CHECK_THROWS_AS(decode_transfer_event(log), MalformedEvent);
  }
  SECTION("dirty address padding is malformed") {
    auto log = transfer_log(token, from, to, 42);
    log.topics[1].bytes[0] = 1;
    CHECK_THROWS_AS(decode_transfer_event(log), MalformedEvent);
  }
}

TEST_CASE("malformed events are skipped with a diagnostic") {
  RawTransaction tx;
  auto bad = transfer_log(addr_tail(0x70), addr_tail(1), addr_tail(2), 5);
  bad.data.resize(3);
  tx.logs = {bad, transfer_log(addr_tail(0x70), addr_tail(1), addr_tail(2), 9)};
  const auto ex = extract_transfers_detailed(tx);
  REQUIRE(ex.transfers.size() == 1);
  CHECK(ex.transfers[0].amount == 9);
  REQUIRE(ex.malformed_events.size() == 1);
  CHECK(ex.malformed_events[0].log_index == 0);
}

TEST_CASE("zero-amount token transfers are dropped") {
  RawTransaction tx;
  tx.logs = {transfer_log(addr_tail(0x70), addr_tail(1), addr_tail(2), 0)};
  CHECK(extract_transfers(tx).empty());
}

TEST_CASE("parse errors report offsets and schema paths") {
  SECTION("bad json") {
    try {
      parse_fixture("{\"tx_hash\": ");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.offset() > 0);
    }
  }
  SECTION("missing field") {
    try {
      parse_fixture(minimal_doc(R"([{"from":"0x)" + std::string(40, '1') + R"(","value":"0x1","depth":0,"call_kind":"CALL"}])",
                                "[]"));
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.field() == "$.call_traces[0].to");
    }
  }
  SECTION("mistyped field") {
    CHECK_THROWS_AS(parse_fixture(minimal_doc("{}", "[]")), SchemaError);
  }
  SECTION("amount overflow") {
    const std::string big = "0x1" + std::string(64, '0');
    CHECK_THROWS_AS(parse_fixture(minimal_doc(R"([{"from":"0x)" + std::string(40, '1') + R"(","to":"0x)" +
                                                  std::string(40, '2') + R"(","value":")" + big +
                                                  R"(","depth":0,"call_kind":"CALL"}])",
                                              "[]")),
                    RangeError);
  }
  SECTION("empty transaction is valid") {
    const auto tx = parse_fixture(minimal_doc("[]", "[]"));
    CHECK(extract_transfers(tx).empty());
  }
}
