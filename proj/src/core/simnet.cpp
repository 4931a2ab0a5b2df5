#include "core/simnet.hpp"

#include <algorithm>
#include <deque>

#include "core/error.hpp"

namespace radar::sim {

const char* to_string(ReplyKind kind) {
  switch (kind) {
    case ReplyKind::TimeExceeded: return "time-exceeded";
    case ReplyKind::EchoReply: return "echo-reply";
    case ReplyKind::Silence: return "silence";
    case ReplyKind::Unreachable: return "unreachable";
  }
  return "?";
}

SimNetwork::SimNetwork(Topology topology) : topology_(std::move(topology)) {
  validate(topology_);
  for (const auto& spec : topology_.nodes) add_node(spec);
  monitor_ = by_id_.at(topology_.monitor);
  for (const auto& link : topology_.links) add_link(by_id_.at(link.from), by_id_.at(link.to));
  for (const auto& [id, policy] : topology_.balancers) balancers_.emplace(by_id_.at(id), policy);
}

Ipv4 SimNetwork::monitor_address() const { return nodes_[static_cast<std::size_t>(monitor_)].address; }

std::size_t SimNetwork::live_node_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const NodeState& n) { return n.alive; }));
}

int SimNetwork::add_node(const NodeSpec& spec) {
  if (by_address_.contains(spec.address)) {
    throw ScenarioError("address " + spec.address.str() + " of node '" + spec.id + "' is already in use");
  }
  int index = static_cast<int>(nodes_.size());
  NodeState node;
  node.id = spec.id;
  node.address = spec.address;
  node.reply_delay = spec.reply_delay;
  set_policy(node, spec.policy);
  nodes_.push_back(std::move(node));
  by_id_[spec.id] = index;
  by_address_[spec.address] = index;
  return index;
}

int SimNetwork::require_live(const std::string& id, const std::string& where) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw ScenarioError(where + ": unknown node '" + id + "'");
  if (!nodes_[static_cast<std::size_t>(it->second)].alive) {
    throw ScenarioError(where + ": node '" + id + "' has been removed");
  }
  return it->second;
}

void SimNetwork::add_link(int from, int to) {
  auto& out = nodes_[static_cast<std::size_t>(from)].out;
  if (std::find(out.begin(), out.end(), to) != out.end()) return;
  out.push_back(to);
  nodes_[static_cast<std::size_t>(to)].in.push_back(from);
  distance_cache_.clear();
}

void SimNetwork::remove_link(int from, int to, const std::string& where) {
  auto& out = nodes_[static_cast<std::size_t>(from)].out;
  auto it = std::find(out.begin(), out.end(), to);
  if (it == out.end()) {
    throw ScenarioError(where + ": no link " + nodes_[static_cast<std::size_t>(from)].id + "->" +
                        nodes_[static_cast<std::size_t>(to)].id);
  }
  out.erase(it);
  auto& in = nodes_[static_cast<std::size_t>(to)].in;
  in.erase(std::find(in.begin(), in.end(), from));
  distance_cache_.clear();
}

void SimNetwork::set_policy(NodeState& node, const ResponsePolicy& policy) {
  node.policy = policy;
  if (const auto* rl = std::get_if<RateLimited>(&policy)) {
    node.tokens = rl->burst;
    node.bucket_time = 0.0;
  }
}

void SimNetwork::apply(const EventAction& action, double at_time) {
  std::string where = "event at " + std::to_string(at_time);
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, RewireLink>) {
          int from = require_live(a.from, where);
          if (a.old_to) remove_link(from, require_live(*a.old_to, where), where);
          if (a.new_to) add_link(from, require_live(*a.new_to, where));
        } else if constexpr (std::is_same_v<T, AddIsland>) {
          std::optional<int> attach;
          if (a.attach_to) attach = require_live(*a.attach_to, where);
          int first = -1;
          for (const auto& spec : a.nodes) {
            if (by_id_.contains(spec.id)) throw ScenarioError(where + ": node id '" + spec.id + "' already used");
            int idx = add_node(spec);
            if (first < 0) first = idx;
          }
          if (attach) add_link(*attach, first);
          for (const auto& l : a.links) add_link(require_live(l.from, where), require_live(l.to, where));
        } else if constexpr (std::is_same_v<T, RemoveNode>) {
          int idx = require_live(a.node, where);
          auto& node = nodes_[static_cast<std::size_t>(idx)];
          for (int to : std::vector<int>(node.out)) remove_link(idx, to, where);
          for (int from : std::vector<int>(node.in)) remove_link(from, idx, where);
          node.alive = false;
          by_address_.erase(node.address);
          distance_cache_.clear();
        } else {
          set_policy(nodes_[static_cast<std::size_t>(require_live(a.node, where))], a.policy);
        }
      },
      action);
}

void SimNetwork::apply_events(double up_to_time) {
  if (up_to_time < last_event_time_) return;
  last_event_time_ = up_to_time;
  while (next_event_ < topology_.events.size() && topology_.events[next_event_].at_time <= up_to_time) {
    const auto& ev = topology_.events[next_event_];
    ++next_event_;
    apply(ev.action, ev.at_time);
  }
}

const std::vector<std::uint16_t>& SimNetwork::distances_to(int target) const {
  auto it = distance_cache_.find(target);
  if (it != distance_cache_.end()) return it->second;
  std::vector<std::uint16_t> dist(nodes_.size(), kUnreachable);
  std::deque<int> queue;
  dist[static_cast<std::size_t>(target)] = 0;
  queue.push_back(target);
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int p : nodes_[static_cast<std::size_t>(u)].in) {
      if (dist[static_cast<std::size_t>(p)] == kUnreachable) {
        dist[static_cast<std::size_t>(p)] = static_cast<std::uint16_t>(dist[static_cast<std::size_t>(u)] + 1);
        queue.push_back(p);
      }
    }
  }
  return distance_cache_.emplace(target, std::move(dist)).first->second;
}

int SimNetwork::next_hop(int at, int target, const std::vector<std::uint16_t>& dist,
                         std::unordered_map<int, std::uint64_t>& counters) const {
  const auto& node = nodes_[static_cast<std::size_t>(at)];
  auto is_neighbor = [&](int w) { return std::find(node.out.begin(), node.out.end(), w) != node.out.end(); };

  if (auto b = balancers_.find(at); b != balancers_.end()) {
    if (const auto* pd = std::get_if<PerDestination>(&b->second)) {
      auto choice = pd->next_hop.find(nodes_[static_cast<std::size_t>(target)].address);
      if (choice != pd->next_hop.end()) {
        auto id = by_id_.find(choice->second);
        if (id != by_id_.end() && nodes_[static_cast<std::size_t>(id->second)].alive && is_neighbor(id->second)) {
          return id->second;
        }
      }
    } else {
      const auto& cycle = std::get<PerPacket>(b->second).cycle;
      std::vector<int> candidates;
      for (const auto& next : cycle) {
        auto id = by_id_.find(next);
        if (id == by_id_.end()) continue;
        int w = id->second;
        if (nodes_[static_cast<std::size_t>(w)].alive && is_neighbor(w) &&
            dist[static_cast<std::size_t>(w)] != kUnreachable) {
          candidates.push_back(w);
        }
      }
      std::uint64_t turn = counters[at]++;
      if (!candidates.empty()) return candidates[turn % candidates.size()];
    }
  }

  auto here = dist[static_cast<std::size_t>(at)];
  if (here == kUnreachable || here == 0) return -1;
  for (int w : node.out) {
    if (dist[static_cast<std::size_t>(w)] + 1 == here) return w;
  }
  return -1;
}

bool SimNetwork::take_token(NodeState& node, double at_time) {
  const auto& rl = std::get<RateLimited>(node.policy);
  if (at_time > node.bucket_time) {
    node.tokens = std::min<double>(rl.burst, node.tokens + rl.rate * (at_time - node.bucket_time));
    node.bucket_time = at_time;
  }
  if (node.tokens >= 1.0) {
    node.tokens -= 1.0;
    return true;
  }
  return false;
}

SimReply SimNetwork::route_probe(Ipv4 destination, int ttl, double at_time) {
  if (ttl < 1) throw InvalidArgument("ttl must be >= 1");
  auto target_it = by_address_.find(destination);
  if (target_it == by_address_.end()) return {ReplyKind::Unreachable, monitor_address(), 0, 0.0};
  int target = target_it->second;
  const auto& dist = distances_to(target);

  auto respond = [&](int at, ReplyKind kind, int hops) -> SimReply {
    auto& node = nodes_[static_cast<std::size_t>(at)];
    bool answers = std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Responsive>) return true;
          else if constexpr (std::is_same_v<T, Silent>) return false;
          else return take_token(node, at_time);
        },
        node.policy);
    if (!answers) return {ReplyKind::Silence, node.address, hops, 0.0};
    return {kind, node.address, hops, 2.0 * hops * topology_.hop_latency + node.reply_delay};
  };

  int at = monitor_;
  for (int hop = 1; hop <= ttl; ++hop) {
    int next = next_hop(at, target, dist, counters_);
    if (next < 0) return {ReplyKind::Unreachable, nodes_[static_cast<std::size_t>(at)].address, hop - 1, 0.0};
    at = next;
    if (at == target) return respond(at, ReplyKind::EchoReply, hop);
    if (hop == ttl) return respond(at, ReplyKind::TimeExceeded, hop);
  }
  return {ReplyKind::Unreachable, nodes_[static_cast<std::size_t>(at)].address, ttl, 0.0};
}

std::vector<Ipv4> SimNetwork::current_path(Ipv4 destination) const {
  auto target_it = by_address_.find(destination);
  if (target_it == by_address_.end()) return {};
  int target = target_it->second;
  const auto& dist = distances_to(target);
  auto counters = counters_;
  std::vector<Ipv4> path;
  int at = monitor_;
  for (int hop = 1; hop <= kUnreachable; ++hop) {
    int next = next_hop(at, target, dist, counters);
    if (next < 0) return {};
    at = next;
    path.push_back(nodes_[static_cast<std::size_t>(at)].address);
    if (at == target) return path;
    if (path.size() > nodes_.size()) return {};  // forwarding loop
  }
  return {};
}

std::optional<int> SimNetwork::current_distance(Ipv4 destination) const {
  auto path = current_path(destination);
  if (path.empty()) return std::nullopt;
  return static_cast<int>(path.size());
}

}  // namespace radar::sim
