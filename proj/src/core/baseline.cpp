#include "core/baseline.hpp"

#include <algorithm>
#include <deque>

#include "core/error.hpp"

namespace radar {

void TracerouteConfig::validate() const {
  if (max_ttl < 1 || max_ttl > kMaxTtlLimit) throw InvalidArgument("max_ttl must lie in [1, 64]");
  if (!(timeout > 0.0)) throw InvalidArgument("timeout must be > 0");
  if (inter_probe_delay < 0.0) throw InvalidArgument("inter-probe delay must be >= 0");
}

namespace {

class TracerouteHandler final : public ProbeHandler {
 public:
  TracerouteHandler(int max_ttl, std::vector<ProbeRecord>& records) : max_ttl_(max_ttl), records_(records) {}

  void on_answer(const ProbeTarget& target, const TransportReply& reply, ProbeQueue& to_probe) override {
    records_.push_back({Hop{reply.source}, target.ttl, target.destination});
    if (reply.kind == ReplyKind::TimeExceeded) advance(target, to_probe);
  }
  void on_timeout(const ProbeTarget& target, ProbeQueue& to_probe) override {
    records_.push_back({Hop::star(), target.ttl, target.destination});
    advance(target, to_probe);
  }

 private:
  void advance(const ProbeTarget& target, ProbeQueue& to_probe) const {
    if (target.ttl < max_ttl_) to_probe.push_back({target.destination, target.ttl + 1});
  }

  int max_ttl_;
  std::vector<ProbeRecord>& records_;
};

std::map<Ipv4, Route> group_routes(const std::vector<ProbeRecord>& records) {
  std::map<Ipv4, Route> routes;
  for (const auto& r : records) {
    auto& route = routes[r.destination];
    route.destination = r.destination;
    route.hops.push_back({r.source, r.ttl});
  }
  for (auto& [d, route] : routes) {
    std::stable_sort(route.hops.begin(), route.hops.end(),
                     [](const RouteHop& a, const RouteHop& b) { return a.ttl < b.ttl; });
    // Keep the first record of a repeated ttl, as the raw tree does.
    route.hops.erase(std::unique(route.hops.begin(), route.hops.end(),
                                 [](const RouteHop& a, const RouteHop& b) { return a.ttl == b.ttl; }),
                     route.hops.end());
  }
  return routes;
}

}  // namespace

TracerouteResult traceroute_round(const std::vector<Ipv4>& destinations, Transport& transport,
                                  const TracerouteConfig& config) {
  config.validate();
  if (destinations.empty()) throw InvalidArgument("traceroute needs at least one destination");
  std::set<Ipv4> distinct(destinations.begin(), destinations.end());
  if (distinct.size() != destinations.size()) throw InvalidArgument("destination list has duplicates");

  TracerouteResult result;
  TracerouteHandler handler(config.max_ttl, result.records);
  ProbeQueue queue;
  for (Ipv4 d : destinations) queue.push_back({d, 1});
  ProbeLoopConfig loop{config.timeout, config.inter_probe_delay, config.send_strategy, config.receive_strategy};
  result.stats = run_probe_loop(transport, loop, std::move(queue), handler);
  result.packet_count = static_cast<long>(result.stats.probes_sent);
  result.incomplete = result.stats.incomplete;
  result.routes = traceroute_routes(result.records);
  return result;
}

std::map<Ipv4, Route> traceroute_routes(const std::vector<ProbeRecord>& records) {
  auto routes = group_routes(records);
  for (auto& [d, route] : routes) route.anchored = !route.hops.empty() && route.hops.front().ttl == 1;
  return routes;
}

std::map<Ipv4, Route> tracetree_routes(const std::vector<ProbeRecord>& records) {
  std::set<Ipv4> first_hops;
  std::set<Ipv4> anchored;
  for (const auto& r : records) {
    if (r.ttl == 1 && r.source.is_ip() && first_hops.insert(r.source.address()).second) {
      anchored.insert(r.destination);
    }
  }
  auto routes = group_routes(records);
  for (auto& [d, route] : routes) route.anchored = anchored.contains(d);
  return routes;
}

RawTraceTree simulate_tracetree_from_traceroute(const std::map<Ipv4, Route>& routes) {
  std::map<Ipv4, std::map<int, Hop>> at;
  std::deque<std::pair<Ipv4, int>> queue;
  for (const auto& [d, route] : routes) {
    if (route.hops.empty()) continue;
    for (const auto& h : route.hops) at[d][h.ttl] = h.hop;
    queue.emplace_back(d, route.hops.back().ttl);
  }
  std::set<std::pair<Ipv4, int>> seen;
  std::vector<ProbeRecord> records;
  while (!queue.empty()) {
    auto [d, ttl] = queue.front();
    queue.pop_front();
    auto it = at[d].find(ttl);
    Hop hop = it == at[d].end() ? Hop::star() : it->second;
    records.push_back({hop, ttl, d});
    bool go_on = hop.is_star() || seen.emplace(hop.address(), ttl).second;
    if (go_on && ttl > 1) queue.emplace_back(d, ttl - 1);
  }
  return build_raw_tree(std::move(records));
}

std::map<Link, long> link_loads(const std::map<Ipv4, Route>& routes, Ipv4 monitor) {
  std::map<Link, long> loads;
  for (const auto& [d, route] : routes) {
    const auto& hops = route.hops;
    if (route.anchored && !hops.empty() && hops.front().ttl == 1 && hops.front().hop.is_ip()) {
      ++loads[{monitor, hops.front().hop.address()}];
    }
    for (std::size_t i = 1; i < hops.size(); ++i) {
      const auto& a = hops[i - 1];
      const auto& b = hops[i];
      if (b.ttl != a.ttl + 1 || a.hop.is_star() || b.hop.is_star()) continue;
      ++loads[{a.hop.address(), b.hop.address()}];
    }
  }
  return loads;
}

Histogram link_load_distribution(const std::map<Ipv4, Route>& routes, Ipv4 monitor) {
  Histogram histogram;
  for (const auto& [link, load] : link_loads(routes, monitor)) ++histogram[load];
  return histogram;
}

RadarDataset simulate_destination_subset(const RadarDataset& dataset, const std::vector<Ipv4>& subset) {
  auto known = dataset.destination_list();
  std::set<Ipv4> known_set(known.begin(), known.end());
  std::set<Ipv4> keep(subset.begin(), subset.end());
  for (Ipv4 d : keep) {
    if (!known_set.contains(d)) throw InvalidArgument("destination " + d.str() + " is not in the dataset");
  }

  RadarDataset out;
  out.monitor_id = dataset.monitor_id;
  out.monitor = dataset.monitor;
  out.parameters = dataset.parameters;
  out.parameters.emplace_back("subset_of", std::to_string(known.size()));
  for (Ipv4 d : known) {
    if (keep.contains(d)) out.destinations.push_back(d);
  }

  for (const auto& round : dataset.rounds) {
    const FilteredTree& tree = round.tree;
    std::vector<bool> on_path(tree.nodes.size(), false);
    if (!tree.nodes.empty()) on_path[0] = true;
    for (const auto& [d, index] : tree.terminals) {
      if (!keep.contains(d)) continue;
      for (int at = index; at >= 0 && !on_path[static_cast<std::size_t>(at)];
           at = tree.nodes[static_cast<std::size_t>(at)].parent) {
        on_path[static_cast<std::size_t>(at)] = true;
      }
    }
    RoundRecord r;
    r.index = round.index;
    r.start_time = round.start_time;
    r.end_time = round.end_time;
    r.incomplete = round.incomplete;
    std::vector<int> remap(tree.nodes.size(), -1);
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      if (!on_path[i]) continue;
      remap[i] = static_cast<int>(r.tree.nodes.size());
      TreeNode node = tree.nodes[i];
      if (node.parent >= 0) node.parent = remap[static_cast<std::size_t>(node.parent)];
      r.tree.nodes.push_back(std::move(node));
    }
    for (const auto& [d, index] : tree.terminals) {
      if (keep.contains(d)) r.tree.terminals.emplace(d, remap[static_cast<std::size_t>(index)]);
    }
    r.tree.degenerate = r.tree.nodes.size() <= 1;
    if (round.raw) {
      r.probes_sent = static_cast<long>(std::count_if(round.raw->records.begin(), round.raw->records.end(),
                                                      [&](const ProbeRecord& p) { return keep.contains(p.destination); }));
    } else {
      r.probes_sent = static_cast<long>(records_from_tree(r.tree).size());
    }
    out.rounds.push_back(std::move(r));
  }
  return out;
}

std::set<Ipv4> record_addresses(const std::vector<ProbeRecord>& records, Ipv4 monitor) {
  std::set<Ipv4> out;
  for (const auto& r : records) {
    if (r.source.is_ip() && r.source.address() != monitor) out.insert(r.source.address());
  }
  return out;
}

std::vector<CurvePoint> cumulative_discovery_curve(const std::vector<RoundObservation>& rounds) {
  std::vector<CurvePoint> curve;
  std::set<Ipv4> seen;
  long packets = 0;
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    seen.insert(rounds[i].addresses.begin(), rounds[i].addresses.end());
    packets += rounds[i].packets;
    curve.push_back({static_cast<long>(i + 1), packets, static_cast<long>(seen.size())});
  }
  return curve;
}

std::vector<RoundObservation> dataset_observations(const RadarDataset& dataset) {
  std::vector<RoundObservation> out;
  for (const auto& round : dataset.rounds) {
    auto addresses = round.tree.addresses();
    out.push_back({{addresses.begin(), addresses.end()}, round.probes_sent});
  }
  return out;
}

long distinct_after_packets(const std::vector<CurvePoint>& curve, long packets) {
  long value = 0;
  for (const auto& p : curve) {
    if (p.packets > packets) break;
    value = p.distinct_addresses;
  }
  return value;
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  CsvTable table({"rounds", "packets", "distinct_addresses"});
  for (const auto& p : curve) table.row(p.rounds, p.packets, p.distinct_addresses);
  return table.str();
}

TracerouteComparison compare_traceroute_rounds(const RadarDataset& traceroute_rounds) {
  std::vector<RoundObservation> tr, tt;
  TracerouteComparison out;
  for (const auto& round : traceroute_rounds.rounds) {
    if (!round.raw) throw InvalidArgument("round " + std::to_string(round.index) + " has no raw records");
    const auto& records = round.raw->records;
    auto routes = traceroute_routes(records);
    auto simulated = simulate_tracetree_from_traceroute(routes);
    tr.push_back({record_addresses(records, traceroute_rounds.monitor), static_cast<long>(records.size())});
    tt.push_back({record_addresses(simulated.records, traceroute_rounds.monitor),
                  static_cast<long>(simulated.records.size())});
    for (const auto& [load, n] : link_load_distribution(routes, traceroute_rounds.monitor)) {
      out.traceroute_loads[load] += n;
    }
    for (const auto& [load, n] : link_load_distribution(tracetree_routes(simulated.records), traceroute_rounds.monitor)) {
      out.tracetree_loads[load] += n;
    }
  }
  out.traceroute = cumulative_discovery_curve(tr);
  out.tracetree = cumulative_discovery_curve(tt);
  return out;
}

std::string comparison_curves_csv(const TracerouteComparison& c) {
  CsvTable table({"rounds", "traceroute_packets", "traceroute_addresses", "tracetree_packets", "tracetree_addresses"});
  for (std::size_t i = 0; i < c.traceroute.size(); ++i) {
    table.row(c.traceroute[i].rounds, c.traceroute[i].packets, c.traceroute[i].distinct_addresses,
              c.tracetree[i].packets, c.tracetree[i].distinct_addresses);
  }
  return table.str();
}

std::string comparison_loads_csv(const TracerouteComparison& c) {
  std::set<long> loads;
  for (const auto& [load, n] : c.traceroute_loads) loads.insert(load);
  for (const auto& [load, n] : c.tracetree_loads) loads.insert(load);
  auto get = [](const Histogram& h, long k) {
    auto it = h.find(k);
    return it == h.end() ? 0L : it->second;
  };
  CsvTable table({"load", "traceroute_links", "tracetree_links"});
  for (long load : loads) table.row(load, get(c.traceroute_loads, load), get(c.tracetree_loads, load));
  return table.str();
}

}  // namespace radar
