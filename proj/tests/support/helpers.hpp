#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "flowguard/txparse.hpp"

namespace flowguard::testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(FLOWGUARD_TEST_DATA) / name;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Address addr_tail(std::uint8_t last) {
  Address a;
  a.bytes.back() = last;
  return a;
}

// The seven transfers of the worked example, in execution order:
// EOA1 -> CA1 -> CA2 (ether), CA2 -> CA1 -> EOA2 -> CA3 (USDT),
// CA3 -> EOA2 -> EOA1 (ether).
inline std::vector<Transfer> worked_example_transfers() {
  const Address eoa1 = addr_tail(0xe1), eoa2 = addr_tail(0xe2);
  const Address ca1 = addr_tail(0xc1), ca2 = addr_tail(0xc2), ca3 = addr_tail(0xc3);
  const auto usdt = AssetId::token(*Address::from_hex("0xdac17f958d2ee523a2206206994597c13d831ec7"));
  const auto eth = AssetId::native();
  const U256 e17("100000000000000000"), e17_11("110000000000000000"), usd(120000000);
  return {{eoa1, ca1, eth, e17},  {ca1, ca2, eth, e17},    {ca2, ca1, usdt, usd},   {ca1, eoa2, usdt, usd},
          {eoa2, ca3, usdt, usd}, {ca3, eoa2, eth, e17_11}, {eoa2, eoa1, eth, e17_11}};
}

// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("flowguard-" + tag + "-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace flowguard::testing
