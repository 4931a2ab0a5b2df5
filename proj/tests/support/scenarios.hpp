#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "core/simnet.hpp"
#include "core/topology.hpp"
#include "core/transport.hpp"

namespace radar::testing {

using Rng = std::mt19937_64;

inline const Ipv4 kMonitor{192, 168, 0, 1};

/// 10.x.y.z numbered from 1.
Ipv4 addr(std::uint32_t i);

struct Scenario {
  sim::Topology topology;
  std::vector<Ipv4> destinations;
  std::map<Ipv4, int> distance;  // true hop distance at time 0
};

std::shared_ptr<SimTransport> open_sim(const sim::Topology& topology, double send_interval = 0.005);

/// monitor -> r1 -> ... -> r(n-1) -> d; d at distance n.
Scenario chain(int length);

/// monitor -> hub -> leaf_i; the k leaves are the destinations.
Scenario star(int k);

/// Random rooted tree below the monitor. Node i > 0 hangs under a uniformly
/// chosen earlier node of depth < max_depth. Destinations are drawn from the
/// leaves first. `silent` is the chance that a non-destination node never answers.
Scenario random_tree(Rng& rng, int nodes, int destinations, int max_depth = 16, double silent = 0.0);

/// Layered graph with several parents per node and per-destination balancers
/// choosing among them; routing is stable per destination but paths toward
/// different destinations cross.
Scenario per_destination_dag(Rng& rng, int layers, int width, int destinations);

struct RawTreeParams {
  int pool = 20;          // distinct router addresses to draw from
  int destinations = 8;
  int max_ttl = 12;
  double star = 0.15;     // chance a hop is a star
  double share = 0.5;     // chance a hop copies another destination's hop at that ttl
  double loop = 0.1;      // chance a hop repeats an address already on its path
  double reach = 0.7;     // chance the path ends at its destination
};

/// Random raw tree: random routes replayed through the tracetree stopping rule.
RawTraceTree random_raw_tree(Rng& rng, const RawTreeParams& params);

/// Random records with no stopping rule at all (chains of arbitrary ttl sets).
RawTraceTree random_record_soup(Rng& rng, const RawTreeParams& params);

/// A filtered tree over (a subset of) `pool`, with some stars, rooted at the monitor.
FilteredTree random_filtered_tree(Rng& rng, const std::vector<Ipv4>& pool, double star = 0.1);

/// Rounds of random trees; the first `reference` rounds draw from a smaller
/// pool so that the later ones have new addresses.
RadarDataset random_dataset(Rng& rng, int addresses, int reference, int observation);

/// Random round block for format tests: records, times on a millisecond grid.
RoundRecord random_round(Rng& rng, long index, int max_ttl = 30);

}  // namespace radar::testing
