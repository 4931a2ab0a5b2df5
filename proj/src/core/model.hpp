#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core/hop.hpp"

namespace radar {

inline constexpr int kDefaultMaxTtl = 30;
inline constexpr int kMaxTtlLimit = 64;

/// A node of the (hop, ttl) tree. IP nodes are identified by (address, ttl);
/// star nodes additionally carry `star_key` so that two timeouts at the same
/// ttl on different chains stay distinct. For stars produced by a measurement
/// the key is the probed destination.
struct TtlNode {
  Hop hop;
  int ttl = 0;
  std::uint32_t star_key = 0;

  static TtlNode ip(Ipv4 address, int ttl) { return {Hop{address}, ttl, 0}; }
  static TtlNode star(int ttl, std::uint32_t key) { return {Hop::star(), ttl, key}; }

  bool operator==(const TtlNode&) const = default;
  std::strong_ordering operator<=>(const TtlNode& other) const {
    if (auto c = ttl <=> other.ttl; c != 0) return c;
    if (auto c = hop <=> other.hop; c != 0) return c;
    return star_key <=> other.star_key;
  }
};

/// One emitted probe and its outcome: `source ttl destination`.
struct ProbeRecord {
  Hop source;
  int ttl = 0;
  Ipv4 destination;

  bool operator==(const ProbeRecord&) const = default;
};

using TtlEdge = std::pair<TtlNode, TtlNode>;

struct RawTraceTree {
  std::vector<ProbeRecord> records;   // emission order
  std::vector<TtlNode> nodes;         // sorted, unique
  std::vector<TtlEdge> edges;         // sorted, unique; first.ttl + 1 == second.ttl
  std::map<Ipv4, TtlNode> terminals;  // destination -> highest-ttl node of its chain

  bool operator==(const RawTraceTree&) const = default;
};

/// Node identity of a record as it appears in the raw tree.
TtlNode node_of(const ProbeRecord& record);

/// Rebuilds nodes, edges and terminals from records: every destination's
/// records are ordered by ttl and consecutive ttls are linked. Chains that
/// stopped at an already-seen (hop, ttl) attach through the shared node.
RawTraceTree build_raw_tree(std::vector<ProbeRecord> records);

/// Order used for filtered-tree vertex labels: IPs numerically, then stars,
/// stars compared by the label of the parent they hang from (`*@<parent>`).
std::strong_ordering compare_labels(std::string_view a, std::string_view b);

struct TreeNode {
  Hop hop;
  std::string label;  // dotted quad, or `*@<parent label>` for stars
  int parent = -1;    // index into FilteredTree::nodes, -1 for the root

  bool operator==(const TreeNode&) const = default;
};

/// Rooted tree over hops. Nodes are stored in BFS discovery order with the
/// root (the monitor) first.
struct FilteredTree {
  std::vector<TreeNode> nodes;
  std::map<Ipv4, int> terminals;  // destination -> node index
  bool degenerate = false;

  static FilteredTree root_only(Ipv4 monitor);

  std::size_t edge_count() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  const TreeNode& root() const { return nodes.front(); }

  /// Addresses observed in the round: non-star nodes other than the root, sorted.
  std::vector<Ipv4> addresses() const;
  /// Tree edges whose endpoints are both addresses (root included), parent first, sorted.
  std::vector<std::pair<Ipv4, Ipv4>> address_edges() const;
  std::vector<int> depths() const;

  bool operator==(const FilteredTree&) const = default;
};

/// Re-encodes a filtered tree as a raw tree, each node at its depth.
RawTraceTree to_raw(const FilteredTree& tree);

/// Tracetree-style records that rebuild `tree` through the filter: for each
/// destination, its path from the terminal back toward the root, stopping
/// after an address already emitted at the same depth.
std::vector<ProbeRecord> records_from_tree(const FilteredTree& tree);

struct RoundMeta {
  long index = 0;
  double start_time = 0.0;
  double end_time = 0.0;
  bool incomplete = false;

  bool operator==(const RoundMeta&) const = default;
};

struct RoundRecord {
  long index = 0;
  double start_time = 0.0;
  double end_time = 0.0;
  long probes_sent = 0;
  bool incomplete = false;
  FilteredTree tree;
  std::optional<RawTraceTree> raw;

  RoundMeta meta() const { return {index, start_time, end_time, incomplete}; }
};

struct RadarDataset {
  std::string monitor_id;
  Ipv4 monitor;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<Ipv4> destinations;
  std::vector<RoundRecord> rounds;

  /// The configured destination list, or, when none was recorded, every
  /// destination appearing in any round.
  std::vector<Ipv4> destination_list() const;
  const RoundRecord* find_round(long index) const;
};

}  // namespace radar
