#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace flowguard {

using Bytes = std::vector<std::uint8_t>;

// Unsigned 256-bit integer, wrap-around arithmetic. Token and native amounts
// stay in this type end-to-end; only normalized ratios become doubles.
using U256 = boost::multiprecision::uint256_t;

// Fixed-size byte identifier rendered as lowercase 0x-hex.
template <std::size_t N>
struct FixedBytes {
  std::array<std::uint8_t, N> bytes{};

  static constexpr std::size_t size() noexcept { return N; }
  std::string hex() const;

  // Accepts "0x" + exactly 2N hex digits, either case. nullopt otherwise.
  static std::optional<FixedBytes> from_hex(std::string_view text);

  auto operator<=>(const FixedBytes&) const = default;
};

// 20-byte account identifier; canonical text form is lowercase 0x-hex.
struct Address : FixedBytes<20> {
  static std::optional<Address> from_hex(std::string_view text);
  auto operator<=>(const Address&) const = default;
};

// 32-byte word: transaction hashes and log topics.
struct Word32 : FixedBytes<32> {
  static std::optional<Word32> from_hex(std::string_view text);
  auto operator<=>(const Word32&) const = default;
};

// Left-pads an address into a topic word, the layout of indexed address
// parameters.
Word32 pad_address(const Address& a);
// Big-endian 32-byte encoding of an amount.
Word32 pad_u256(const U256& v);
U256 word_to_u256(const Word32& w);

enum class Chain { ethereum, bsc };
std::string_view to_string(Chain c);
std::optional<Chain> chain_from_string(std::string_view s);

// Native | Token(contract). Ordered native-first, then by contract address.
class AssetId {
 public:
  AssetId() = default;  // native
  static AssetId native() { return AssetId{}; }
  static AssetId token(const Address& contract) {
    AssetId a;
    a.contract_ = contract;
    return a;
  }

  bool is_native() const noexcept { return !contract_.has_value(); }
  const Address& contract() const { return contract_.value(); }

  // "native" or the contract address.
  std::string to_string() const;
  static std::optional<AssetId> parse(std::string_view text);

  auto operator<=>(const AssetId&) const = default;

 private:
  std::optional<Address> contract_;
};

// ---- hex / integer helpers ----

std::string to_hex(std::span<const std::uint8_t> bytes);
// "0x"-prefixed hex of arbitrary even length. nullopt on bad input.
std::optional<Bytes> bytes_from_hex(std::string_view text);

enum class U256ParseStatus { ok, malformed, overflow };
// Accepts "0x"-prefixed hex ("0x" alone is zero). Leading zeros are ignored
// when checking the 256-bit bound.
U256ParseStatus parse_u256_hex(std::string_view text, U256& out);
U256ParseStatus parse_u256_dec(std::string_view text, U256& out);
std::string u256_to_hex(const U256& v);  // minimal "0x.." form, "0x0" for zero
std::string u256_to_dec(const U256& v);

// Round-to-nearest-even conversion of the full integer.
double u256_to_double(const U256& v);

}  // namespace flowguard

template <>
struct std::hash<flowguard::Address> {
  std::size_t operator()(const flowguard::Address& a) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto b : a.bytes) h = (h ^ b) * 1099511628211ull;
    return static_cast<std::size_t>(h);
  }
};
