#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "core/csv.hpp"
#include "core/model.hpp"
#include "core/probe_loop.hpp"
#include "core/transport.hpp"

namespace radar {

struct TracerouteConfig {
  int max_ttl = kDefaultMaxTtl;
  double timeout = 2.0;
  double inter_probe_delay = 0.005;
  Strategy send_strategy = Strategy::OnePerLoop;
  Strategy receive_strategy = Strategy::OnePerLoop;

  void validate() const;
};

struct RouteHop {
  Hop hop;
  int ttl = 0;
  bool operator==(const RouteHop&) const = default;
};

/// The hops one destination's probes revealed, by increasing ttl.
/// `anchored` says the monitor -> first hop link belongs to this route for
/// load counting.
struct Route {
  Ipv4 destination;
  std::vector<RouteHop> hops;
  bool anchored = true;

  bool operator==(const Route&) const = default;
};

struct TracerouteResult {
  std::map<Ipv4, Route> routes;
  std::vector<ProbeRecord> records;  // emission order
  long packet_count = 0;
  ProbeLoopStats stats;
  bool incomplete = false;
};

/// Classic forward traceroute toward every destination, all destinations
/// sharing one probe loop: ttl 1 upward until an echo reply, an unreachable
/// or max_ttl. One probe per (destination, ttl).
TracerouteResult traceroute_round(const std::vector<Ipv4>& destinations, Transport& transport,
                                  const TracerouteConfig& config);

/// Routes of a forward traceroute round: every route is anchored.
std::map<Ipv4, Route> traceroute_routes(const std::vector<ProbeRecord>& records);

/// Routes of a tracetree round. A chain is anchored only when its ttl-1
/// record is the first sighting of that hop, so a link is never charged to a
/// chain that merely stopped on it.
std::map<Ipv4, Route> tracetree_routes(const std::vector<ProbeRecord>& records);

/// Replays the tracetree stopping rule over observed routes: each destination
/// starts at the last ttl of its route, queued FIFO.
RawTraceTree simulate_tracetree_from_traceroute(const std::map<Ipv4, Route>& routes);

using Link = std::pair<Ipv4, Ipv4>;

/// How many times each directed address link was traversed by the routes.
/// Links touching a star are not counted.
std::map<Link, long> link_loads(const std::map<Ipv4, Route>& routes, Ipv4 monitor);
/// load -> number of links with that load.
Histogram link_load_distribution(const std::map<Ipv4, Route>& routes, Ipv4 monitor);

/// Keeps, in every round, only the nodes lying on a path from the monitor to
/// a destination of `subset`. Raw trees are dropped; probes_sent becomes the
/// number of probes toward subset destinations. Unknown destinations raise
/// InvalidArgument.
RadarDataset simulate_destination_subset(const RadarDataset& dataset, const std::vector<Ipv4>& subset);

/// Addresses (never stars, never the monitor) revealed by a set of records.
std::set<Ipv4> record_addresses(const std::vector<ProbeRecord>& records, Ipv4 monitor);

struct RoundObservation {
  std::set<Ipv4> addresses;
  long packets = 0;
};

struct CurvePoint {
  long rounds = 0;            // rounds so far
  long packets = 0;           // packets so far
  long distinct_addresses = 0;
  bool operator==(const CurvePoint&) const = default;
};

/// Cumulative distinct-address curve; one point per round.
std::vector<CurvePoint> cumulative_discovery_curve(const std::vector<RoundObservation>& rounds);
std::vector<RoundObservation> dataset_observations(const RadarDataset& dataset);

/// Value of a cumulative curve after `packets` packets (step function, 0 before the first point).
long distinct_after_packets(const std::vector<CurvePoint>& curve, long packets);

std::string curve_csv(const std::vector<CurvePoint>& curve);

/// Traceroute rounds set against the tracetree simulated from each of them.
struct TracerouteComparison {
  std::vector<CurvePoint> traceroute;
  std::vector<CurvePoint> tracetree;
  Histogram traceroute_loads;  // summed over rounds
  Histogram tracetree_loads;
};

/// Every round must carry its raw records.
TracerouteComparison compare_traceroute_rounds(const RadarDataset& traceroute_rounds);
std::string comparison_curves_csv(const TracerouteComparison& comparison);
std::string comparison_loads_csv(const TracerouteComparison& comparison);

}  // namespace radar
