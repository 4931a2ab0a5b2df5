#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/topology.hpp"

namespace radar::sim {

enum class ReplyKind { TimeExceeded, EchoReply, Silence, Unreachable };

const char* to_string(ReplyKind kind);

struct SimReply {
  ReplyKind kind = ReplyKind::Silence;
  Ipv4 source;       // answering node; for Unreachable, the node where the path dead-ends
  int hops = 0;      // hops travelled before the outcome
  double rtt = 0.0;  // round-trip delay of the reply, meaningful for replies only

  bool operator==(const SimReply&) const = default;
};

/// Ground-truth network: an immutable Topology plus the mutable simulation
/// state (live links after events, per-packet balancer counters, token
/// buckets). Not thread-safe; one owner drives it.
class SimNetwork {
 public:
  explicit SimNetwork(Topology topology);

  const Topology& topology() const { return topology_; }
  Ipv4 monitor_address() const;

  /// Applies every scheduled event with at_time <= up_to_time not yet applied,
  /// in schedule order. Times must be non-decreasing across calls.
  void apply_events(double up_to_time);
  std::size_t events_applied() const { return next_event_; }

  /// Forwards one TTL-limited probe from the monitor toward `destination`.
  SimReply route_probe(Ipv4 destination, int ttl, double at_time);

  /// Current routing path (addresses, monitor excluded, destination last),
  /// computed on a copy of the balancer counters so the state is unchanged.
  /// Empty when the destination is unreachable.
  std::vector<Ipv4> current_path(Ipv4 destination) const;
  std::optional<int> current_distance(Ipv4 destination) const;

  bool has_address(Ipv4 address) const { return by_address_.contains(address); }
  std::size_t live_node_count() const;

 private:
  static constexpr std::uint16_t kUnreachable = 0xffff;

  struct NodeState {
    std::string id;
    Ipv4 address;
    ResponsePolicy policy;
    double reply_delay = 0.0;
    bool alive = true;
    std::vector<int> out;
    std::vector<int> in;
    double tokens = 0.0;
    double bucket_time = 0.0;
  };

  int add_node(const NodeSpec& spec);
  int require_live(const std::string& id, const std::string& where) const;
  void add_link(int from, int to);
  void remove_link(int from, int to, const std::string& where);
  void set_policy(NodeState& node, const ResponsePolicy& policy);
  void apply(const EventAction& action, double at_time);

  const std::vector<std::uint16_t>& distances_to(int target) const;
  int next_hop(int at, int target, const std::vector<std::uint16_t>& dist,
               std::unordered_map<int, std::uint64_t>& counters) const;
  bool take_token(NodeState& node, double at_time);

  Topology topology_;
  std::vector<NodeState> nodes_;
  std::unordered_map<std::string, int> by_id_;
  std::unordered_map<Ipv4, int> by_address_;
  std::unordered_map<int, BalancerPolicy> balancers_;
  std::unordered_map<int, std::uint64_t> counters_;  // per-packet balancer traversals
  int monitor_ = 0;
  std::size_t next_event_ = 0;
  double last_event_time_ = 0.0;
  mutable std::unordered_map<int, std::vector<std::uint16_t>> distance_cache_;
};

}  // namespace radar::sim
