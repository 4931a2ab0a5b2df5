#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "core/hop.hpp"

namespace radar::sim {

struct Responsive {
  bool operator==(const Responsive&) const = default;
};
struct Silent {
  bool operator==(const Silent&) const = default;
};
/// Token bucket: `burst` replies available at once, refilled continuously at
/// `rate` replies per second.
struct RateLimited {
  double rate = 1.0;
  int burst = 1;
  bool operator==(const RateLimited&) const = default;
};
using ResponsePolicy = std::variant<Responsive, Silent, RateLimited>;

struct PerDestination {
  std::map<Ipv4, std::string> next_hop;
};
/// Round-robin over `cycle`, advancing once per packet traversing the node.
struct PerPacket {
  std::vector<std::string> cycle;
};
using BalancerPolicy = std::variant<PerDestination, PerPacket>;

struct NodeSpec {
  std::string id;
  Ipv4 address;
  ResponsePolicy policy = Responsive{};
  double reply_delay = 0.0;  // extra seconds added to replies sent by this node
};

struct LinkSpec {
  std::string from;
  std::string to;
};

/// Replaces `from -> old_to` by `from -> new_to`; either side may be absent to
/// express a plain removal or addition.
struct RewireLink {
  std::string from;
  std::optional<std::string> old_to;
  std::optional<std::string> new_to;
};
struct AddIsland {
  std::optional<std::string> attach_to;  // adds attach_to -> nodes.front()
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;  // may reference island and existing nodes
};
struct RemoveNode {
  std::string node;
};
struct ChangePolicy {
  std::string node;
  ResponsePolicy policy;
};
using EventAction = std::variant<RewireLink, AddIsland, RemoveNode, ChangePolicy>;

struct ScheduledEvent {
  double at_time = 0.0;
  EventAction action;
};

struct Topology {
  std::string monitor;
  double hop_latency = 0.010;  // one-way, per hop
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;
  std::map<std::string, BalancerPolicy> balancers;
  std::vector<ScheduledEvent> events;  // kept sorted by time, stable
};

/// Checks every structural invariant; throws ValidationError naming the
/// offending element. Sorts events by time (stable).
void validate(Topology& topology);

/// Parses the JSON topology document and validates it.
Topology load_topology(std::string_view json_text);
Topology load_topology_file(const std::string& path);

/// Serializes back to the JSON schema accepted by load_topology.
std::string topology_to_json(const Topology& topology);

/// Fluent construction for programmatic scenarios.
class TopologyBuilder {
 public:
  explicit TopologyBuilder(std::string monitor_id, Ipv4 monitor_address);

  TopologyBuilder& node(std::string id, Ipv4 address, ResponsePolicy policy = Responsive{});
  TopologyBuilder& reply_delay(const std::string& id, double seconds);
  TopologyBuilder& link(std::string from, std::string to);
  TopologyBuilder& per_destination(std::string node, std::map<Ipv4, std::string> next_hop);
  TopologyBuilder& per_packet(std::string node, std::vector<std::string> cycle);
  TopologyBuilder& hop_latency(double seconds);
  TopologyBuilder& event(double at_time, EventAction action);

  Topology build();  // validates
  Topology& raw() { return topology_; }

 private:
  Topology topology_;
};

}  // namespace radar::sim
