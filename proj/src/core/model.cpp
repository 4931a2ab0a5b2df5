#include "core/model.hpp"

#include <algorithm>
#include <set>

namespace radar {

TtlNode node_of(const ProbeRecord& record) {
  if (record.source.is_star()) return TtlNode::star(record.ttl, record.destination.value());
  return TtlNode::ip(record.source.address(), record.ttl);
}

RawTraceTree build_raw_tree(std::vector<ProbeRecord> records) {
  RawTraceTree raw;
  std::set<TtlNode> nodes;
  std::set<TtlEdge> edges;
  // destination -> ttl -> node; a repeated (destination, ttl) keeps its first record.
  std::map<Ipv4, std::map<int, TtlNode>> chains;
  for (const auto& record : records) {
    TtlNode node = node_of(record);
    nodes.insert(node);
    chains[record.destination].emplace(record.ttl, node);
  }
  for (const auto& [destination, chain] : chains) {
    const TtlNode* below = nullptr;
    int below_ttl = 0;
    for (const auto& [ttl, node] : chain) {
      if (below != nullptr && below_ttl + 1 == ttl) edges.emplace(*below, node);
      below = &node;
      below_ttl = ttl;
    }
    raw.terminals.emplace(destination, chain.rbegin()->second);
  }
  raw.records = std::move(records);
  raw.nodes.assign(nodes.begin(), nodes.end());
  raw.edges.assign(edges.begin(), edges.end());
  return raw;
}

std::strong_ordering compare_labels(std::string_view a, std::string_view b) {
  bool a_star = a.starts_with('*');
  bool b_star = b.starts_with('*');
  if (a_star != b_star) return a_star ? std::strong_ordering::greater : std::strong_ordering::less;
  if (a_star) {
    auto parent = [](std::string_view s) { return s.size() > 2 ? s.substr(2) : std::string_view{}; };
    return compare_labels(parent(a), parent(b));
  }
  auto ia = Ipv4::parse(a);
  auto ib = Ipv4::parse(b);
  if (ia && ib) return *ia <=> *ib;
  // Unparseable labels only arise from hand-built trees; fall back to text order.
  return a.compare(b) <=> 0;
}

FilteredTree FilteredTree::root_only(Ipv4 monitor) {
  FilteredTree tree;
  tree.nodes.push_back({Hop{monitor}, monitor.str(), -1});
  tree.degenerate = true;
  return tree;
}

std::vector<Ipv4> FilteredTree::addresses() const {
  std::vector<Ipv4> out;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (nodes[i].hop.is_ip()) out.push_back(nodes[i].hop.address());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::pair<Ipv4, Ipv4>> FilteredTree::address_edges() const {
  std::vector<std::pair<Ipv4, Ipv4>> out;
  for (const auto& node : nodes) {
    if (node.parent < 0 || node.hop.is_star()) continue;
    const auto& parent = nodes[static_cast<std::size_t>(node.parent)];
    if (parent.hop.is_star()) continue;
    out.emplace_back(parent.hop.address(), node.hop.address());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> FilteredTree::depths() const {
  std::vector<int> depth(nodes.size(), 0);
  // BFS order guarantees parents precede children.
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    depth[i] = depth[static_cast<std::size_t>(nodes[i].parent)] + 1;
  }
  return depth;
}

RawTraceTree to_raw(const FilteredTree& tree) {
  RawTraceTree raw;
  auto depth = tree.depths();
  std::vector<TtlNode> as_node(tree.nodes.size());
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    const auto& n = tree.nodes[i];
    as_node[i] = n.hop.is_star() ? TtlNode::star(depth[i], static_cast<std::uint32_t>(i))
                                 : TtlNode::ip(n.hop.address(), depth[i]);
    raw.nodes.push_back(as_node[i]);
    if (n.parent > 0) raw.edges.emplace_back(as_node[static_cast<std::size_t>(n.parent)], as_node[i]);
  }
  for (const auto& [destination, index] : tree.terminals) {
    if (index > 0) raw.terminals.emplace(destination, as_node[static_cast<std::size_t>(index)]);
  }
  std::sort(raw.nodes.begin(), raw.nodes.end());
  std::sort(raw.edges.begin(), raw.edges.end());
  return raw;
}

std::vector<ProbeRecord> records_from_tree(const FilteredTree& tree) {
  std::vector<ProbeRecord> records;
  std::vector<bool> emitted(tree.nodes.size(), false);
  auto depth = tree.depths();
  for (const auto& [destination, terminal] : tree.terminals) {
    for (int at = terminal; at > 0; at = tree.nodes[static_cast<std::size_t>(at)].parent) {
      auto i = static_cast<std::size_t>(at);
      records.push_back({tree.nodes[i].hop, depth[i], destination});
      if (tree.nodes[i].hop.is_ip()) {
        if (emitted[i]) break;
        emitted[i] = true;
      }
    }
  }
  return records;
}

std::vector<Ipv4> RadarDataset::destination_list() const {
  if (!destinations.empty()) return destinations;
  std::set<Ipv4> seen;
  for (const auto& round : rounds) {
    for (const auto& [destination, node] : round.tree.terminals) seen.insert(destination);
    if (round.raw) {
      for (const auto& record : round.raw->records) seen.insert(record.destination);
    }
  }
  return {seen.begin(), seen.end()};
}

const RoundRecord* RadarDataset::find_round(long index) const {
  auto it = std::lower_bound(rounds.begin(), rounds.end(), index,
                             [](const RoundRecord& r, long i) { return r.index < i; });
  if (it == rounds.end() || it->index != index) return nullptr;
  return &*it;
}

}  // namespace radar
