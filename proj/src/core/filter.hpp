#pragma once

#include <string>

#include "core/model.hpp"

namespace radar {

struct FilterReport {
  long merged_ip_nodes = 0;  // (ip, ttl) nodes folded into an already present address
  long loops_removed = 0;
  long stars_pruned = 0;
  long stars_merged = 0;
  long leaves_pruned = 0;

  bool operator==(const FilterReport&) const = default;
};

struct FilterResult {
  FilteredTree tree;
  FilterReport report;
};

/// Reduces a (hop, ttl) tree to a tree over addresses rooted at `monitor`:
///  1. merge nodes sharing an address,
///  2. drop self-loops,
///  3. drop successor-less stars (stars that end a destination's chain stay),
///  4. merge the star successors of each node into one star,
///  5. BFS from the monitor, IP neighbours in numeric order before stars,
///  6. drop leaves that do not end any destination's chain.
/// When nothing is reachable from the monitor the result is the bare root
/// with `degenerate` set.
FilterResult filter_tree(const RawTraceTree& raw, Ipv4 monitor);

std::string to_dot(const FilteredTree& tree, const std::string& name = "tracetree");
std::string to_dot(const RawTraceTree& raw, Ipv4 monitor, const std::string& name = "raw");

}  // namespace radar
