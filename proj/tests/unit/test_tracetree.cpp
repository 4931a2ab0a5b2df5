#include "doctest.h"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "core/error.hpp"
#include "core/simnet.hpp"
#include "core/tracetree.hpp"
#include "support/scenarios.hpp"

using namespace radar;
using testing::addr;

namespace {

std::vector<DestinationTask> exact_tasks(const testing::Scenario& s) {
  std::vector<DestinationTask> tasks;
  for (Ipv4 d : s.destinations) tasks.push_back({d, s.distance.at(d)});
  return tasks;
}

using Key = std::pair<Hop, int>;

// Expected (hop, ttl) multiset on a tree topology probed at exact distances.
// Chains merge at the first answering node they reach; a silent node lets
// every chain through as a star.
std::multiset<Key> tree_oracle(const testing::Scenario& s) {
  std::map<std::string, std::vector<std::string>> children;
  std::map<std::string, const sim::NodeSpec*> spec;
  for (const auto& n : s.topology.nodes) spec[n.id] = &n;
  for (const auto& l : s.topology.links) children[l.from].push_back(l.to);
  std::set<Ipv4> destinations(s.destinations.begin(), s.destinations.end());
  std::multiset<Key> out;

  // Returns how many chains leave `id` toward its parent.
  std::function<int(const std::string&, int)> visit = [&](const std::string& id, int depth) {
    int arrivals = 0;
    for (const auto& c : children[id]) arrivals += visit(c, depth + 1);
    const auto& node = *spec[id];
    if (destinations.contains(node.address)) ++arrivals;
    bool silent = std::holds_alternative<sim::Silent>(node.policy);
    for (int i = 0; i < arrivals; ++i) out.insert({silent ? Hop::star() : Hop{node.address}, depth});
    if (arrivals == 0) return 0;
    return silent ? arrivals : 1;
  };
  for (const auto& c : children[s.topology.monitor]) visit(c, 1);
  return out;
}

std::multiset<Key> record_keys(const std::vector<ProbeRecord>& records) {
  std::multiset<Key> out;
  for (const auto& r : records) out.insert({r.source, r.ttl});
  return out;
}

}  // namespace

TEST_CASE("exact distance on a chain walks back to ttl 1") {
  auto s = testing::chain(5);
  auto t = testing::open_sim(s.topology);
  std::vector<ProbeRecord> streamed;
  auto r = tracetree(exact_tasks(s), *t, {}, [&](const ProbeRecord& rec) { streamed.push_back(rec); });
  CHECK(r.stats.probes_sent == 5);
  REQUIRE(r.raw.records.size() == 5);
  CHECK(streamed == r.raw.records);
  CHECK(r.observed_distances.at(addr(5)) == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(r.raw.records[static_cast<std::size_t>(i)].ttl == 5 - i);
    CHECK(r.raw.records[static_cast<std::size_t>(i)].source == Hop{addr(static_cast<std::uint32_t>(5 - i))});
  }
  CHECK(r.raw.edges.size() == 4);
  CHECK_FALSE(r.incomplete);
}

TEST_CASE("over-estimated distance costs the extra echoes") {
  auto s = testing::chain(5);
  auto t = testing::open_sim(s.topology);
  auto r = tracetree({{addr(5), 8}}, *t, {});
  CHECK(r.stats.probes_sent == 8);
  CHECK(r.observed_distances.at(addr(5)) == 5);
  CHECK(r.raw.terminals.at(addr(5)) == TtlNode::ip(addr(5), 8));
}

TEST_CASE("under-estimated distance restarts from the restart ttl") {
  auto s = testing::chain(5);
  SUBCASE("with restart") {
    auto t = testing::open_sim(s.topology);
    TracetreeConfig config;
    config.restart_ttl = 30;
    auto r = tracetree({{addr(5), 3}}, *t, config);
    CHECK(r.stats.restarts == 1);
    CHECK(r.observed_distances.at(addr(5)) == 5);
    // 3 backward probes, then 30 down to 4; (d, 3) is already issued.
    CHECK(r.stats.probes_sent == 3 + 27);
    CHECK(r.stats.duplicates_dropped == 1);
    std::set<Ipv4> seen;
    for (const auto& rec : r.raw.records) seen.insert(rec.source.address());
    CHECK(seen.size() == 5);
  }
  SUBCASE("without restart the destination stays unseen") {
    auto t = testing::open_sim(s.topology);
    auto r = tracetree({{addr(5), 3}}, *t, {});
    CHECK(r.stats.restarts == 0);
    CHECK_FALSE(r.observed_distances.at(addr(5)).has_value());
    CHECK(r.stats.probes_sent == 3);
  }
}

TEST_CASE("silent hops become stars and do not stop the chain") {
  sim::TopologyBuilder b("m", testing::kMonitor);
  b.node("a", addr(1)).node("s", addr(2), sim::Silent{}).node("d1", addr(3)).node("d2", addr(4));
  b.link("m", "a").link("a", "s").link("s", "d1").link("s", "d2");
  auto t = testing::open_sim(b.build());
  auto r = tracetree({{addr(3), 3}, {addr(4), 3}}, *t, {});
  int stars = 0;
  for (const auto& rec : r.raw.records) stars += rec.source.is_star();
  CHECK(stars == 2);  // one per chain
  // Both chains pass the star; the second one stops at a.
  CHECK(r.stats.probes_sent == 6);
  CHECK(r.raw.nodes.size() == 5);  // d1, d2, two star nodes, a
}

TEST_CASE("tree topologies match the merge oracle") {
  testing::Rng rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    auto s = testing::random_tree(rng, 150, 40, 10, trial % 2 ? 0.15 : 0.0);
    auto t = testing::open_sim(s.topology);
    auto r = tracetree(exact_tasks(s), *t, {});
    auto expected = tree_oracle(s);
    CHECK(record_keys(r.raw.records) == expected);
    CHECK(r.stats.probes_sent == static_cast<long>(expected.size()));
    for (Ipv4 d : s.destinations) CHECK(r.observed_distances.at(d) == s.distance.at(d));
  }
}

TEST_CASE("send and receive strategies leave the (source, ttl) multiset unchanged") {
  testing::Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = testing::random_tree(rng, 120, 30, 9, 0.1);
    std::optional<std::multiset<Key>> reference;
    for (auto send : {Strategy::OnePerLoop, Strategy::Greedy}) {
      for (auto receive : {Strategy::OnePerLoop, Strategy::Greedy}) {
        auto t = testing::open_sim(s.topology);
        TracetreeConfig config;
        config.send_strategy = send;
        config.receive_strategy = receive;
        auto keys = record_keys(tracetree(exact_tasks(s), *t, config).raw.records);
        if (!reference) reference = keys;
        CHECK(keys == *reference);
      }
    }
  }
}

TEST_CASE("every probe yields exactly one record") {
  testing::Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = testing::per_destination_dag(rng, 7, 6, 15);
    auto t = testing::open_sim(s.topology);
    TracetreeConfig config;
    config.restart_ttl = 30;
    std::vector<DestinationTask> tasks;
    std::uniform_int_distribution<int> guess(1, 30);
    for (Ipv4 d : s.destinations) tasks.push_back({d, guess(rng)});
    auto r = tracetree(tasks, *t, config);
    CHECK(r.stats.probes_sent == static_cast<long>(r.raw.records.size()));
    for (Ipv4 d : s.destinations) CHECK(r.observed_distances.at(d) == s.distance.at(d));
  }
}

TEST_CASE("repeated runs are identical") {
  testing::Rng rng(24);
  auto s = testing::random_tree(rng, 300, 60, 12, 0.1);
  auto a = testing::open_sim(s.topology);
  auto b = testing::open_sim(s.topology);
  auto ra = tracetree(exact_tasks(s), *a, {});
  auto rb = tracetree(exact_tasks(s), *b, {});
  CHECK(ra.raw == rb.raw);
  CHECK(ra.stats.end_time == rb.stats.end_time);
}

TEST_CASE("bad task lists and configurations are refused") {
  auto t = testing::open_sim(testing::chain(3).topology);
  CHECK_THROWS_AS(tracetree({}, *t, {}), InvalidArgument);
  CHECK_THROWS_AS(tracetree({{addr(3), 3}, {addr(3), 2}}, *t, {}), InvalidArgument);
  CHECK_THROWS_AS(tracetree({{addr(3), 0}}, *t, {}), InvalidArgument);
  CHECK_THROWS_AS(tracetree({{addr(3), 31}}, *t, {}), InvalidArgument);
  TracetreeConfig config;
  config.max_ttl = 65;
  CHECK_THROWS_AS(tracetree({{addr(3), 3}}, *t, config), InvalidArgument);
  config = {};
  config.restart_ttl = 31;
  CHECK_THROWS_AS(tracetree({{addr(3), 3}}, *t, config), InvalidArgument);
  config = {};
  config.timeout = -1;
  CHECK_THROWS_AS(tracetree({{addr(3), 3}}, *t, config), InvalidArgument);
}
