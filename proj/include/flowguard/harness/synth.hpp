#pragma once

#include <cstdint>
#include <string_view>

#include "flowguard/features.hpp"
#include "flowguard/harness/dataset.hpp"
#include "flowguard/rng.hpp"
#include "flowguard/txparse.hpp"

namespace flowguard::harness {

// Where the class difference is planted. Every family draws both classes
// from one base shape (a closed transfer loop over n accounts) so that the
// planted family carries the signal and the others are identically
// distributed across classes.
enum class SynthFamily {
  // Positive: one account receives the largest transfer of the loop and
  // forwards a small fraction (profit near +1). Negative: each hop forwards
  // roughly what it received (profits near 0).
  profit_cycle,
  // Positive: one adjacent pair repeats round trips, raising its transfer
  // counts. Round trips net to zero, so profits are unchanged.
  frequency_burst,
  // Both classes add hub round trips; positives use a distinct token per
  // trip, so the hub touches many assets. Profits and counts match.
  diversity_spread,
  // Same feature rows in both classes (equal amounts, fixed number of
  // opaque contracts); positives place the contracts contiguously, negatives
  // never adjacent. Only message passing can tell them apart.
  structure_only,
};

std::string_view to_string(SynthFamily f);
SynthFamily synth_family_from_string(std::string_view s);  // throws ConfigError

struct SynthConfig {
  SynthFamily family = SynthFamily::profit_cycle;
  int positives = 100;
  int negatives = 100;
  int min_nodes = 4;
  int max_nodes = 8;
  std::uint64_t seed = 7;

  // Throws ConfigError on empty or impossible ranges.
  void validate() const;
};

// Featurized, labeled graphs: positives first, then negatives, each built
// from transfers through construct_graph and assemble_features.
Dataset synth_dataset(const SynthConfig& config);

Address random_address(SplitMix64& rng);

// A connected random transaction touching exactly `nodes` accounts:
// nodes - 1 tree transfers plus `extra_transfers` random ones, mixing native
// value calls with Transfer logs of three tokens. Roughly half the accounts
// are registered as contracts in `accounts`.
struct RandomTransaction {
  RawTransaction tx;
  AccountDb accounts;
};
RandomTransaction random_transaction(SplitMix64& rng, std::size_t nodes, std::size_t extra_transfers);

}  // namespace flowguard::harness
