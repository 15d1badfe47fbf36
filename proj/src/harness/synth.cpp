#include "flowguard/harness/synth.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "flowguard/errors.hpp"
#include "flowguard/features.hpp"
#include "flowguard/rng.hpp"

namespace flowguard::harness {

namespace {

// Amounts are k/1000 of one unit of 18-decimal value.
const U256 kUnit = U256(1'000'000'000'000'000'000ull) / 1000;

struct Sketch {
  std::vector<Address> nodes;
  std::vector<Transfer> transfers;
  AccountDb db;

  void add(std::size_t from, std::size_t to, const AssetId& asset, std::uint64_t k) {
    transfers.push_back({nodes[from], nodes[to], asset, kUnit * k});
  }
};

Sketch base_loop(SplitMix64& rng, std::size_t n) {
  Sketch s;
  for (std::size_t i = 0; i < n; ++i) s.nodes.push_back(random_address(rng));
  return s;
}

// EOA 1/2, transparent contract 3/10, opaque contract 1/5; independent of
// the class.
void random_types(SplitMix64& rng, Sketch& s) {
  for (const auto& a : s.nodes) {
    const double u = rng.uniform();
    if (u < 0.5) continue;
    s.db.insert(a, u < 0.8);
  }
}

AssetId random_asset(SplitMix64& rng) {
  return rng.uniform() < 0.5 ? AssetId::native() : AssetId::token(random_address(rng));
}

Sketch profit_cycle(SplitMix64& rng, std::size_t n, bool positive) {
  Sketch s = base_loop(rng, n);
  random_types(rng, s);
  const AssetId asset = random_asset(rng);
  const std::size_t gainer = rng.between(0, n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t to = (i + 1) % n;
    std::uint64_t k;
    if (!positive)
      k = rng.between(800, 1000);
    else if (to == gainer)
      k = 1000;
    else
      k = rng.between(50, 150);
    s.add(i, to, asset, k);
  }
  return s;
}

Sketch frequency_burst(SplitMix64& rng, std::size_t n, bool positive) {
  Sketch s = base_loop(rng, n);
  random_types(rng, s);
  const AssetId asset = random_asset(rng);
  for (std::size_t i = 0; i < n; ++i) s.add(i, (i + 1) % n, asset, rng.between(500, 1000));
  if (positive) {
    const std::size_t a = rng.between(0, n - 1);
    const std::size_t b = (a + 1) % n;
    const auto trips = rng.between(2, 4);
    for (std::uint64_t t = 0; t < trips; ++t) {
      const auto k = rng.between(100, 400);
      s.add(a, b, asset, k);
      s.add(b, a, asset, k);
    }
  }
  return s;
}

Sketch diversity_spread(SplitMix64& rng, std::size_t n, bool positive) {
  Sketch s = base_loop(rng, n);
  random_types(rng, s);
  const AssetId asset = random_asset(rng);
  for (std::size_t i = 0; i < n; ++i) s.add(i, (i + 1) % n, asset, rng.between(500, 1000));
  const std::size_t hub = rng.between(0, n - 1);
  const auto trips = rng.between(2, 4);
  for (std::uint64_t t = 0; t < trips; ++t) {
    std::size_t peer = rng.between(0, n - 2);
    if (peer >= hub) ++peer;
    const auto k = rng.between(100, 400);
    const AssetId leg = positive ? AssetId::token(random_address(rng)) : asset;
    s.add(hub, peer, leg, k);
    s.add(peer, hub, leg, k);
  }
  return s;
}

Sketch structure_only(SplitMix64& rng, std::size_t n, bool positive) {
  Sketch s = base_loop(rng, n);
  const auto marked = rng.between(2, n / 2);

  std::vector<bool> is_marked;
  if (positive) {
    is_marked.assign(n, false);
    std::fill(is_marked.begin(), is_marked.begin() + static_cast<std::ptrdiff_t>(marked), true);
  } else {
    // Drop each mark into a distinct gap after an unmarked account, so no
    // two marks touch, even across the wrap-around.
    std::vector<bool> gap(n - marked, false);
    std::fill(gap.begin(), gap.begin() + static_cast<std::ptrdiff_t>(marked), true);
    rng.shuffle(gap);
    for (bool g : gap) {
      is_marked.push_back(false);
      if (g) is_marked.push_back(true);
    }
  }
  std::rotate(is_marked.begin(), is_marked.begin() + static_cast<std::ptrdiff_t>(rng.between(0, n - 1)),
              is_marked.end());
  for (std::size_t i = 0; i < n; ++i)
    if (is_marked[i]) s.db.insert(s.nodes[i], false);

  const AssetId asset = random_asset(rng);
  const auto k = rng.between(500, 1000);
  for (std::size_t i = 0; i < n; ++i) s.add(i, (i + 1) % n, asset, k);
  return s;
}

std::size_t min_nodes_for(SynthFamily f) { return f == SynthFamily::structure_only ? 4 : 3; }

}  // namespace

Address random_address(SplitMix64& rng) {
  Address a;
  for (std::size_t i = 0; i < a.bytes.size(); i += 8) {
    const auto x = rng.next();
    for (std::size_t j = 0; j < 8 && i + j < a.bytes.size(); ++j)
      a.bytes[i + j] = static_cast<std::uint8_t>(x >> (8 * j));
  }
  return a;
}

std::string_view to_string(SynthFamily f) {
  switch (f) {
    case SynthFamily::profit_cycle: return "profit_cycle";
    case SynthFamily::frequency_burst: return "frequency_burst";
    case SynthFamily::diversity_spread: return "diversity_spread";
    case SynthFamily::structure_only: return "structure_only";
  }
  return "profit_cycle";
}

SynthFamily synth_family_from_string(std::string_view s) {
  for (auto f : {SynthFamily::profit_cycle, SynthFamily::frequency_burst, SynthFamily::diversity_spread,
                 SynthFamily::structure_only})
    if (to_string(f) == s) return f;
  throw ConfigError("unknown synthetic family '" + std::string(s) + "'");
}

void SynthConfig::validate() const {
  if (positives < 1 || negatives < 1) throw ConfigError("synthetic dataset needs at least one graph per class");
  if (min_nodes > max_nodes) throw ConfigError(fmt::format("empty node range [{}, {}]", min_nodes, max_nodes));
  if (static_cast<std::size_t>(min_nodes) < min_nodes_for(family))
    throw ConfigError(fmt::format("{} needs at least {} nodes", to_string(family), min_nodes_for(family)));
}

Dataset synth_dataset(const SynthConfig& config) {
  config.validate();
  SplitMix64 rng(config.seed);
  Dataset out;
  out.reserve(static_cast<std::size_t>(config.positives + config.negatives));

  for (int cls : {1, 0}) {
    const int count = cls == 1 ? config.positives : config.negatives;
    for (int i = 0; i < count; ++i) {
      const auto n = static_cast<std::size_t>(rng.between(static_cast<std::uint64_t>(config.min_nodes),
                                                          static_cast<std::uint64_t>(config.max_nodes)));
      Sketch s;
      switch (config.family) {
        case SynthFamily::profit_cycle: s = profit_cycle(rng, n, cls == 1); break;
        case SynthFamily::frequency_burst: s = frequency_burst(rng, n, cls == 1); break;
        case SynthFamily::diversity_spread: s = diversity_spread(rng, n, cls == 1); break;
        case SynthFamily::structure_only: s = structure_only(rng, n, cls == 1); break;
      }
      LabeledGraph lg;
      lg.id = fmt::format("{}-{}-{:05d}", to_string(config.family), cls == 1 ? "pos" : "neg", i);
      lg.graph = assemble_features(construct_graph(s.transfers), s.db);
      lg.graph.label = cls;
      out.push_back(std::move(lg));
    }
  }
  return out;
}

RandomTransaction random_transaction(SplitMix64& rng, std::size_t nodes, std::size_t extra_transfers) {
  if (nodes < 2) throw ConfigError("a transaction needs at least two accounts");
  RandomTransaction out;
  auto& tx = out.tx;
  for (auto& b : tx.tx_hash.bytes) b = static_cast<std::uint8_t>(rng.next());

  std::vector<Address> accounts;
  for (std::size_t i = 0; i < nodes; ++i) accounts.push_back(random_address(rng));
  for (const auto& a : accounts)
    if (rng.uniform() < 0.5) out.accounts.insert(a, rng.uniform() < 0.6);
  const Address tokens[] = {random_address(rng), random_address(rng), random_address(rng)};

  auto emit = [&](std::size_t from, std::size_t to) {
    const U256 amount = kUnit * rng.between(1, 5000);
    const auto pick = rng.between(0, 3);
    if (pick == 3) {
      tx.traces.push_back({accounts[from], accounts[to], amount, 1, CallKind::CALL, std::nullopt});
    } else {
      const auto word = pad_u256(amount);
      tx.logs.push_back({tokens[pick],
                         {transfer_signature(), pad_address(accounts[from]), pad_address(accounts[to])},
                         Bytes(word.bytes.begin(), word.bytes.end()),
                         std::nullopt});
    }
  };
  for (std::size_t i = 1; i < nodes; ++i) {
    const auto j = static_cast<std::size_t>(rng.between(0, i - 1));
    if (rng.uniform() < 0.5) emit(i, j);
    else emit(j, i);
  }
  for (std::size_t e = 0; e < extra_transfers; ++e) {
    const auto a = static_cast<std::size_t>(rng.between(0, nodes - 1));
    auto b = static_cast<std::size_t>(rng.between(0, nodes - 2));
    if (b >= a) ++b;
    emit(a, b);
  }
  return out;
}

}  // namespace flowguard::harness
