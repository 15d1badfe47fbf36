#include "flowguard/types.hpp"

#include <cmath>

namespace flowguard {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

bool has_hex_prefix(std::string_view s) {
  return s.size() >= 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X');
}

constexpr char kDigits[] = "0123456789abcdef";

}  // namespace

std::string to_hex(std::span<const std::uint8_t> bytes) {
  std::string out = "0x";
  out.reserve(2 + 2 * bytes.size());
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

std::optional<Bytes> bytes_from_hex(std::string_view text) {
  if (!has_hex_prefix(text)) return std::nullopt;
  text.remove_prefix(2);
  if (text.size() % 2 != 0) return std::nullopt;
  Bytes out(text.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = hex_value(text[2 * i]);
    const int lo = hex_value(text[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

template <std::size_t N>
std::string FixedBytes<N>::hex() const {
  return to_hex(bytes);
}

template <std::size_t N>
std::optional<FixedBytes<N>> FixedBytes<N>::from_hex(std::string_view text) {
  if (text.size() != 2 + 2 * N) return std::nullopt;
  auto raw = bytes_from_hex(text);
  if (!raw) return std::nullopt;
  FixedBytes<N> out;
  std::copy(raw->begin(), raw->end(), out.bytes.begin());
  return out;
}

template struct FixedBytes<20>;
template struct FixedBytes<32>;

std::optional<Address> Address::from_hex(std::string_view text) {
  auto fb = FixedBytes<20>::from_hex(text);
  if (!fb) return std::nullopt;
  Address a;
  a.bytes = fb->bytes;
  return a;
}

std::optional<Word32> Word32::from_hex(std::string_view text) {
  auto fb = FixedBytes<32>::from_hex(text);
  if (!fb) return std::nullopt;
  Word32 w;
  w.bytes = fb->bytes;
  return w;
}

Word32 pad_address(const Address& a) {
  Word32 w;
  std::copy(a.bytes.begin(), a.bytes.end(), w.bytes.begin() + 12);
  return w;
}

Word32 pad_u256(const U256& v) {
  Word32 w;
  U256 x = v;
  for (int i = 31; i >= 0; --i) {
    w.bytes[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(x & 0xff);
    x >>= 8;
  }
  return w;
}

U256 word_to_u256(const Word32& w) {
  U256 v = 0;
  for (auto b : w.bytes) v = (v << 8) | b;
  return v;
}

std::string_view to_string(Chain c) {
  return c == Chain::bsc ? "bsc" : "ethereum";
}

std::optional<Chain> chain_from_string(std::string_view s) {
  if (s == "ethereum") return Chain::ethereum;
  if (s == "bsc") return Chain::bsc;
  return std::nullopt;
}

std::string AssetId::to_string() const {
  return is_native() ? std::string("native") : contract_->hex();
}

std::optional<AssetId> AssetId::parse(std::string_view text) {
  if (text == "native") return AssetId::native();
  std::string lowered(text);
  auto addr = Address::from_hex(lowered);
  if (!addr) return std::nullopt;
  return AssetId::token(*addr);
}

U256ParseStatus parse_u256_hex(std::string_view text, U256& out) {
  if (!has_hex_prefix(text)) return U256ParseStatus::malformed;
  text.remove_prefix(2);
  for (char c : text)
    if (hex_value(c) < 0) return U256ParseStatus::malformed;
  while (!text.empty() && text.front() == '0') text.remove_prefix(1);
  if (text.size() > 64) return U256ParseStatus::overflow;
  U256 v = 0;
  for (char c : text) v = (v << 4) | static_cast<unsigned>(hex_value(c));
  out = v;
  return U256ParseStatus::ok;
}

U256ParseStatus parse_u256_dec(std::string_view text, U256& out) {
  if (text.empty()) return U256ParseStatus::malformed;
  for (char c : text)
    if (c < '0' || c > '9') return U256ParseStatus::malformed;
  using boost::multiprecision::cpp_int;
  const cpp_int wide(std::string{text});
  if (wide > cpp_int(std::numeric_limits<U256>::max())) return U256ParseStatus::overflow;
  out = static_cast<U256>(wide);
  return U256ParseStatus::ok;
}

std::string u256_to_hex(const U256& v) {
  if (v == 0) return "0x0";
  std::string digits;
  U256 x = v;
  while (x != 0) {
    digits.push_back(kDigits[static_cast<unsigned>(x & 0x0f)]);
    x >>= 4;
  }
  return "0x" + std::string(digits.rbegin(), digits.rend());
}

std::string u256_to_dec(const U256& v) { return v.str(); }

double u256_to_double(const U256& v) {
  if (v == 0) return 0.0;
  const unsigned top = boost::multiprecision::msb(v);
  if (top < 64) return static_cast<double>(static_cast<std::uint64_t>(v));
  // Keep the 64 leading bits and fold everything below into a sticky bit.
  // 64 > 53 + 2 bits, so the hardware rounding of the folded value equals
  // round-to-nearest-even of the full integer.
  const unsigned shift = top - 63;
  std::uint64_t head = static_cast<std::uint64_t>(v >> shift);
  const U256 rest = v & ((U256(1) << shift) - 1);
  if (rest != 0) head |= 1u;
  return std::ldexp(static_cast<double>(head), static_cast<int>(shift));
}

}  // namespace flowguard
