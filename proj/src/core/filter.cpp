#include "core/filter.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace radar {
namespace {

// Mutable directed graph over merged nodes. Node 0 is the monitor.
struct Graph {
  std::vector<Hop> hop;
  std::vector<bool> alive;
  std::vector<std::set<int>> out;
  std::vector<std::set<int>> in;
  std::vector<int> merged_into;  // -1 unless folded into another star

  int add(Hop h) {
    hop.push_back(h);
    alive.push_back(true);
    out.emplace_back();
    in.emplace_back();
    merged_into.push_back(-1);
    return static_cast<int>(hop.size()) - 1;
  }
  void link(int from, int to) {
    out[from].insert(to);
    in[to].insert(from);
  }
  void unlink(int from, int to) {
    out[from].erase(to);
    in[to].erase(from);
  }
  void remove(int v) {
    for (int p : std::vector<int>(in[v].begin(), in[v].end())) unlink(p, v);
    for (int c : std::vector<int>(out[v].begin(), out[v].end())) unlink(v, c);
    alive[v] = false;
  }
  int resolve(int v) const {
    while (merged_into[v] >= 0) v = merged_into[v];
    return v;
  }
  std::size_t size() const { return hop.size(); }
};

struct Staged {
  Graph g;
  std::map<Ipv4, int> terminal;  // destination -> node id (before resolve)
};

// Stage 1: one node per address; stars stay one node per (ttl, key).
Staged merge_addresses(const RawTraceTree& raw, Ipv4 monitor, FilterReport& report) {
  Staged s;
  std::map<Ipv4, int> by_address;
  std::map<TtlNode, int> id_of;
  by_address.emplace(monitor, s.g.add(Hop{monitor}));
  for (const auto& node : raw.nodes) {
    if (node.hop.is_star()) {
      id_of.emplace(node, s.g.add(node.hop));
      continue;
    }
    auto [it, inserted] = by_address.try_emplace(node.hop.address(), -1);
    if (inserted) {
      it->second = s.g.add(node.hop);
    } else {
      ++report.merged_ip_nodes;
    }
    id_of.emplace(node, it->second);
  }
  auto lookup = [&](const TtlNode& n) {
    auto it = id_of.find(n);
    return it == id_of.end() ? -1 : it->second;
  };
  for (const auto& node : raw.nodes) {
    if (node.ttl == 1) s.g.link(0, id_of.at(node));
  }
  for (const auto& [from, to] : raw.edges) {
    int a = lookup(from);
    int b = lookup(to);
    if (a >= 0 && b >= 0) s.g.link(a, b);
  }
  for (const auto& [destination, node] : raw.terminals) {
    int id = lookup(node);
    if (id >= 0) s.terminal.emplace(destination, id);
  }
  return s;
}

// Stage 2.
void remove_loops(Graph& g, FilterReport& report) {
  for (std::size_t v = 0; v < g.size(); ++v) {
    int id = static_cast<int>(v);
    if (g.out[v].contains(id)) {
      g.unlink(id, id);
      ++report.loops_removed;
    }
  }
}

std::set<int> terminal_ids(const Staged& s) {
  std::set<int> ids;
  for (const auto& [destination, id] : s.terminal) ids.insert(s.g.resolve(id));
  return ids;
}

// Stage 3.
void prune_dangling_stars(Staged& s, FilterReport& report) {
  Graph& g = s.g;
  auto protected_ids = terminal_ids(s);
  auto prunable = [&](int v) {
    return g.alive[v] && g.hop[v].is_star() && g.out[v].empty() && !protected_ids.contains(v);
  };
  std::deque<int> work;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (prunable(static_cast<int>(v))) work.push_back(static_cast<int>(v));
  }
  while (!work.empty()) {
    int v = work.front();
    work.pop_front();
    if (!prunable(v)) continue;
    std::vector<int> parents(g.in[v].begin(), g.in[v].end());
    g.remove(v);
    ++report.stars_pruned;
    for (int p : parents) {
      if (prunable(p)) work.push_back(p);
    }
  }
}

void merge_star(Graph& g, int from, int into, FilterReport& report) {
  for (int p : std::vector<int>(g.in[from].begin(), g.in[from].end())) {
    g.unlink(p, from);
    g.link(p == from ? into : p, into);
  }
  for (int c : std::vector<int>(g.out[from].begin(), g.out[from].end())) {
    g.unlink(from, c);
    g.link(into, c == from ? into : c);
  }
  g.alive[from] = false;
  g.merged_into[from] = into;
  if (g.out[into].contains(into)) {
    g.unlink(into, into);
    ++report.loops_removed;
  }
}

// Stage 4. Merging can give a star new parents, so repeat until stable.
void merge_sibling_stars(Graph& g, FilterReport& report) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (!g.alive[v]) continue;
      std::vector<int> stars;
      for (int c : g.out[v]) {
        if (g.hop[c].is_star()) stars.push_back(c);
      }
      if (stars.size() < 2) continue;
      for (std::size_t i = 1; i < stars.size(); ++i) {
        merge_star(g, stars[i], stars[0], report);
        ++report.stars_merged;
      }
      changed = true;
    }
  }
}

// Stage 5: returns BFS order and parent of every reached node.
std::pair<std::vector<int>, std::vector<int>> bfs(const Graph& g) {
  std::vector<int> parent(g.size(), -2);
  std::vector<int> order;
  std::deque<int> queue{0};
  parent[0] = -1;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    order.push_back(v);
    std::vector<int> next(g.out[v].begin(), g.out[v].end());
    std::stable_sort(next.begin(), next.end(), [&](int a, int b) { return g.hop[a] < g.hop[b]; });
    for (int c : next) {
      if (parent[c] != -2) continue;
      parent[c] = v;
      queue.push_back(c);
    }
  }
  return {order, parent};
}

}  // namespace

FilterResult filter_tree(const RawTraceTree& raw, Ipv4 monitor) {
  FilterResult result;
  FilterReport& report = result.report;
  Staged s = merge_addresses(raw, monitor, report);
  remove_loops(s.g, report);
  prune_dangling_stars(s, report);
  merge_sibling_stars(s.g, report);

  auto [order, parent] = bfs(s.g);
  auto terminals = terminal_ids(s);

  // Stage 6 on the BFS tree.
  std::vector<int> children(s.g.size(), 0);
  std::vector<bool> kept(s.g.size(), false);
  for (int v : order) {
    kept[v] = true;
    if (parent[v] >= 0) ++children[parent[v]];
  }
  std::deque<int> leaves;
  for (int v : order) {
    if (v != 0 && children[v] == 0 && !terminals.contains(v)) leaves.push_back(v);
  }
  while (!leaves.empty()) {
    int v = leaves.front();
    leaves.pop_front();
    kept[v] = false;
    ++report.leaves_pruned;
    int p = parent[v];
    if (--children[p] == 0 && p != 0 && !terminals.contains(p)) leaves.push_back(p);
  }

  FilteredTree& tree = result.tree;
  std::vector<int> index(s.g.size(), -1);
  for (int v : order) {
    if (!kept[v]) continue;
    index[v] = static_cast<int>(tree.nodes.size());
    TreeNode node;
    node.hop = s.g.hop[v];
    node.parent = parent[v] >= 0 ? index[parent[v]] : -1;
    node.label = node.hop.is_star() ? "*@" + tree.nodes[node.parent].label : node.hop.str();
    tree.nodes.push_back(std::move(node));
  }
  for (const auto& [destination, id] : s.terminal) {
    int at = index[s.g.resolve(id)];
    if (at > 0) tree.terminals.emplace(destination, at);
  }
  tree.degenerate = tree.nodes.size() == 1;
  return result;
}

std::string to_dot(const FilteredTree& tree, const std::string& name) {
  std::set<int> terminal;
  for (const auto& [destination, index] : tree.terminals) terminal.insert(index);
  std::ostringstream out;
  out << "digraph \"" << name << "\" {\n";
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& n = tree.nodes[i];
    out << "  n" << i << " [label=\"" << (n.hop.is_star() ? "*" : n.label) << "\"";
    if (i == 0) out << ", shape=box";
    if (terminal.contains(static_cast<int>(i))) out << ", peripheries=2";
    out << "];\n";
  }
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    out << "  n" << tree.nodes[i].parent << " -> n" << i << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string to_dot(const RawTraceTree& raw, Ipv4 monitor, const std::string& name) {
  auto id = [](const TtlNode& n) {
    std::string s = "\"" + n.hop.str() + "@" + std::to_string(n.ttl);
    if (n.hop.is_star()) s += "#" + Ipv4{n.star_key}.str();
    return s + "\"";
  };
  std::ostringstream out;
  out << "digraph \"" << name << "\" {\n";
  out << "  root [label=\"" << monitor.str() << "\", shape=box];\n";
  for (const auto& n : raw.nodes) {
    out << "  " << id(n) << " [label=\"" << n.hop.str() << " (" << n.ttl << ")\"];\n";
    if (n.ttl == 1) out << "  root -> " << id(n) << ";\n";
  }
  for (const auto& [from, to] : raw.edges) out << "  " << id(from) << " -> " << id(to) << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace radar
