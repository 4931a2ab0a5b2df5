#include "core/topology.hpp"

#include <algorithm>
#include <set>

#include "core/error.hpp"
#include "core/round_log.hpp"
#include "json.hpp"

namespace radar::sim {

using nlohmann::json;

namespace {

void check_policy(const std::string& where, const ResponsePolicy& policy) {
  if (const auto* rl = std::get_if<RateLimited>(&policy)) {
    if (!(rl->rate > 0.0)) throw ValidationError(where + ": rate-limited policy needs rate > 0");
    if (rl->burst < 1) throw ValidationError(where + ": rate-limited policy needs burst >= 1");
  }
}

Ipv4 parse_address(const std::string& where, const std::string& text) {
  auto ip = Ipv4::parse(text);
  if (!ip) throw ValidationError(where + ": invalid address '" + text + "'");
  return *ip;
}

ResponsePolicy policy_from_json(const std::string& where, const json& j) {
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "responsive") return Responsive{};
    if (s == "silent") return Silent{};
    throw ValidationError(where + ": unknown policy '" + s + "'");
  }
  if (j.is_object()) {
    const json& body = j.contains("rate_limited") ? j.at("rate_limited") : j;
    RateLimited rl;
    rl.rate = body.at("rate").get<double>();
    rl.burst = body.value("burst", 1);
    return rl;
  }
  throw ValidationError(where + ": policy must be a string or an object");
}

json policy_to_json(const ResponsePolicy& policy) {
  if (std::holds_alternative<Responsive>(policy)) return "responsive";
  if (std::holds_alternative<Silent>(policy)) return "silent";
  const auto& rl = std::get<RateLimited>(policy);
  return json{{"rate_limited", {{"rate", rl.rate}, {"burst", rl.burst}}}};
}

NodeSpec node_from_json(const json& j) {
  NodeSpec node;
  node.id = j.at("id").get<std::string>();
  std::string where = "node '" + node.id + "'";
  node.address = parse_address(where, j.at("address").get<std::string>());
  if (j.contains("policy")) node.policy = policy_from_json(where, j.at("policy"));
  node.reply_delay = j.value("delay", 0.0);
  return node;
}

json node_to_json(const NodeSpec& node) {
  json j{{"id", node.id}, {"address", node.address.str()}};
  if (!std::holds_alternative<Responsive>(node.policy)) j["policy"] = policy_to_json(node.policy);
  if (node.reply_delay != 0.0) j["delay"] = node.reply_delay;
  return j;
}

LinkSpec link_from_json(const json& j) {
  if (j.is_array()) {
    if (j.size() != 2) throw ValidationError("link must have exactly two endpoints");
    return {j[0].get<std::string>(), j[1].get<std::string>()};
  }
  return {j.at("from").get<std::string>(), j.at("to").get<std::string>()};
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

ScheduledEvent event_from_json(const json& j) {
  ScheduledEvent ev;
  ev.at_time = j.at("at").get<double>();
  if (j.contains("rewire")) {
    const auto& b = j.at("rewire");
    ev.action = RewireLink{b.at("from").get<std::string>(), optional_string(b, "old"), optional_string(b, "new")};
  } else if (j.contains("add_island")) {
    const auto& b = j.at("add_island");
    AddIsland island;
    island.attach_to = optional_string(b, "attach_to");
    for (const auto& n : b.value("nodes", json::array())) island.nodes.push_back(node_from_json(n));
    for (const auto& l : b.value("links", json::array())) island.links.push_back(link_from_json(l));
    ev.action = std::move(island);
  } else if (j.contains("remove_node")) {
    ev.action = RemoveNode{j.at("remove_node").get<std::string>()};
  } else if (j.contains("set_policy")) {
    const auto& b = j.at("set_policy");
    auto node = b.at("node").get<std::string>();
    ev.action = ChangePolicy{node, policy_from_json("event on '" + node + "'", b.at("policy"))};
  } else {
    throw ValidationError("event at " + std::to_string(ev.at_time) + " has no known action");
  }
  return ev;
}

json event_to_json(const ScheduledEvent& ev) {
  json j{{"at", ev.at_time}};
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, RewireLink>) {
          json b{{"from", a.from}};
          if (a.old_to) b["old"] = *a.old_to;
          if (a.new_to) b["new"] = *a.new_to;
          j["rewire"] = b;
        } else if constexpr (std::is_same_v<T, AddIsland>) {
          json b{{"nodes", json::array()}, {"links", json::array()}};
          if (a.attach_to) b["attach_to"] = *a.attach_to;
          for (const auto& n : a.nodes) b["nodes"].push_back(node_to_json(n));
          for (const auto& l : a.links) b["links"].push_back(json::array({l.from, l.to}));
          j["add_island"] = b;
        } else if constexpr (std::is_same_v<T, RemoveNode>) {
          j["remove_node"] = a.node;
        } else {
          j["set_policy"] = {{"node", a.node}, {"policy", policy_to_json(a.policy)}};
        }
      },
      ev.action);
  return j;
}

}  // namespace

void validate(Topology& topology) {
  if (!(topology.hop_latency >= 0.0)) throw ValidationError("hop_latency must be >= 0");
  std::map<std::string, std::size_t> ids;
  std::set<Ipv4> addresses;
  for (std::size_t i = 0; i < topology.nodes.size(); ++i) {
    const auto& node = topology.nodes[i];
    std::string where = "node '" + node.id + "'";
    if (node.id.empty()) throw ValidationError("node #" + std::to_string(i) + " has an empty id");
    if (!ids.emplace(node.id, i).second) throw ValidationError("duplicate node id '" + node.id + "'");
    if (!addresses.insert(node.address).second) {
      throw ValidationError("duplicate address " + node.address.str() + " at " + where);
    }
    check_policy(where, node.policy);
    if (node.reply_delay < 0.0) throw ValidationError(where + ": negative reply delay");
  }
  if (!ids.contains(topology.monitor)) throw ValidationError("monitor '" + topology.monitor + "' is not a node");

  std::map<std::string, std::set<std::string>> out;
  for (const auto& link : topology.links) {
    std::string where = "link " + link.from + "->" + link.to;
    if (!ids.contains(link.from)) throw ValidationError(where + ": dangling endpoint '" + link.from + "'");
    if (!ids.contains(link.to)) throw ValidationError(where + ": dangling endpoint '" + link.to + "'");
    if (link.from == link.to) throw ValidationError(where + ": self loop");
    out[link.from].insert(link.to);
  }

  for (const auto& [node, policy] : topology.balancers) {
    std::string where = "balancer at '" + node + "'";
    if (!ids.contains(node)) throw ValidationError(where + ": unknown node");
    auto check_next = [&](const std::string& next) {
      if (!out[node].contains(next)) {
        throw ValidationError(where + ": next hop '" + next + "' is not a neighbor");
      }
    };
    if (const auto* pd = std::get_if<PerDestination>(&policy)) {
      for (const auto& [dest, next] : pd->next_hop) check_next(next);
    } else {
      const auto& pp = std::get<PerPacket>(policy);
      if (pp.cycle.empty()) throw ValidationError(where + ": empty per-packet cycle");
      for (const auto& next : pp.cycle) check_next(next);
    }
  }

  std::stable_sort(topology.events.begin(), topology.events.end(),
                   [](const ScheduledEvent& a, const ScheduledEvent& b) { return a.at_time < b.at_time; });
  // Static view of which ids can exist at each point of the schedule.
  std::set<std::string> known;
  for (const auto& [id, idx] : ids) known.insert(id);
  auto need = [&](const std::string& id, const std::string& where) {
    if (!known.contains(id)) throw ValidationError(where + ": unknown node '" + id + "'");
  };
  for (const auto& ev : topology.events) {
    std::string where = "event at " + std::to_string(ev.at_time);
    if (!(ev.at_time >= 0.0)) throw ValidationError(where + ": time must be >= 0");
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, RewireLink>) {
            need(a.from, where);
            if (a.old_to) need(*a.old_to, where);
            if (a.new_to) need(*a.new_to, where);
            if (!a.old_to && !a.new_to) throw ValidationError(where + ": rewire without endpoints");
          } else if constexpr (std::is_same_v<T, AddIsland>) {
            if (a.nodes.empty()) throw ValidationError(where + ": empty island");
            for (const auto& n : a.nodes) {
              if (known.contains(n.id)) throw ValidationError(where + ": island node id '" + n.id + "' already used");
              check_policy(where + " node '" + n.id + "'", n.policy);
              known.insert(n.id);
            }
            if (a.attach_to) need(*a.attach_to, where);
            for (const auto& l : a.links) {
              need(l.from, where);
              need(l.to, where);
            }
          } else if constexpr (std::is_same_v<T, RemoveNode>) {
            need(a.node, where);
            if (a.node == topology.monitor) throw ValidationError(where + ": the monitor cannot be removed");
          } else {
            need(a.node, where);
            check_policy(where, a.policy);
          }
        },
        ev.action);
  }
}

Topology load_topology(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed topology document: ") + e.what());
  }
  Topology topology;
  try {
    topology.monitor = doc.at("monitor").get<std::string>();
    topology.hop_latency = doc.value("hop_latency", 0.010);
    for (const auto& n : doc.at("nodes")) topology.nodes.push_back(node_from_json(n));
    for (const auto& l : doc.value("links", json::array())) topology.links.push_back(link_from_json(l));
    for (const auto& b : doc.value("balancers", json::array())) {
      auto node = b.at("node").get<std::string>();
      if (b.contains("per_destination")) {
        PerDestination pd;
        for (const auto& [dest, next] : b.at("per_destination").items()) {
          pd.next_hop[parse_address("balancer at '" + node + "'", dest)] = next.get<std::string>();
        }
        topology.balancers[node] = std::move(pd);
      } else if (b.contains("per_packet")) {
        topology.balancers[node] = PerPacket{b.at("per_packet").get<std::vector<std::string>>()};
      } else {
        throw ValidationError("balancer at '" + node + "' has no policy");
      }
    }
    for (const auto& e : doc.value("events", json::array())) topology.events.push_back(event_from_json(e));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("topology schema error: ") + e.what());
  }
  validate(topology);
  return topology;
}

Topology load_topology_file(const std::string& path) { return load_topology(read_text_file(path)); }

std::string topology_to_json(const Topology& topology) {
  json doc{{"monitor", topology.monitor}, {"hop_latency", topology.hop_latency}};
  doc["nodes"] = json::array();
  for (const auto& n : topology.nodes) doc["nodes"].push_back(node_to_json(n));
  doc["links"] = json::array();
  for (const auto& l : topology.links) doc["links"].push_back(json::array({l.from, l.to}));
  doc["balancers"] = json::array();
  for (const auto& [node, policy] : topology.balancers) {
    json b{{"node", node}};
    if (const auto* pd = std::get_if<PerDestination>(&policy)) {
      json m = json::object();
      for (const auto& [dest, next] : pd->next_hop) m[dest.str()] = next;
      b["per_destination"] = m;
    } else {
      b["per_packet"] = std::get<PerPacket>(policy).cycle;
    }
    doc["balancers"].push_back(b);
  }
  doc["events"] = json::array();
  for (const auto& ev : topology.events) doc["events"].push_back(event_to_json(ev));
  return doc.dump(2);
}

TopologyBuilder::TopologyBuilder(std::string monitor_id, Ipv4 monitor_address) {
  topology_.monitor = monitor_id;
  topology_.nodes.push_back({std::move(monitor_id), monitor_address, Responsive{}, 0.0});
}

TopologyBuilder& TopologyBuilder::node(std::string id, Ipv4 address, ResponsePolicy policy) {
  topology_.nodes.push_back({std::move(id), address, policy, 0.0});
  return *this;
}

TopologyBuilder& TopologyBuilder::reply_delay(const std::string& id, double seconds) {
  for (auto& n : topology_.nodes) {
    if (n.id == id) n.reply_delay = seconds;
  }
  return *this;
}

TopologyBuilder& TopologyBuilder::link(std::string from, std::string to) {
  topology_.links.push_back({std::move(from), std::move(to)});
  return *this;
}

TopologyBuilder& TopologyBuilder::per_destination(std::string node, std::map<Ipv4, std::string> next_hop) {
  topology_.balancers[std::move(node)] = PerDestination{std::move(next_hop)};
  return *this;
}

TopologyBuilder& TopologyBuilder::per_packet(std::string node, std::vector<std::string> cycle) {
  topology_.balancers[std::move(node)] = PerPacket{std::move(cycle)};
  return *this;
}

TopologyBuilder& TopologyBuilder::hop_latency(double seconds) {
  topology_.hop_latency = seconds;
  return *this;
}

TopologyBuilder& TopologyBuilder::event(double at_time, EventAction action) {
  topology_.events.push_back({at_time, std::move(action)});
  return *this;
}

Topology TopologyBuilder::build() {
  Topology out = topology_;
  validate(out);
  return out;
}

}  // namespace radar::sim
