#include "doctest.h"

#include <atomic>

#include "core/error.hpp"
#include "core/radar.hpp"
#include "support/scenarios.hpp"

using namespace radar;
using testing::addr;

TEST_CASE("distance cache holds one distance per destination") {
  DistanceCache c;
  CHECK_FALSE(c.get(addr(1)).has_value());
  c.set(addr(1), 7);
  CHECK(c.get(addr(1)) == 7);
  c.set(addr(1), 9);
  CHECK(c.get(addr(1)) == 9);
  CHECK(c.size() == 1);
  CHECK_THROWS_AS(c.set(addr(2), 0), RangeError);
  CHECK_THROWS_AS(c.set(addr(2), 65), RangeError);
  c.evict(addr(1));
  CHECK(c.size() == 0);
}

TEST_CASE("round tasks use cached distances and the default otherwise") {
  DistanceCache c;
  c.set(addr(1), 4);
  c.set(addr(2), 40);
  auto tasks = next_round_tasks(c, {addr(1), addr(2), addr(3)}, 30);
  REQUIRE(tasks.size() == 3);
  CHECK(tasks[0].assumed_distance == 4);
  CHECK(tasks[1].assumed_distance == 30);  // never above the default
  CHECK(tasks[2].assumed_distance == 30);
}

TEST_CASE("unseen destinations are evicted") {
  DistanceCache c;
  c.set(addr(1), 4);
  c.set(addr(2), 5);
  auto next = update_cache(c, {{addr(1), std::nullopt}, {addr(2), 6}, {addr(3), 2}});
  CHECK_FALSE(next.get(addr(1)).has_value());
  CHECK(next.get(addr(2)) == 6);
  CHECK(next.get(addr(3)) == 2);
}

TEST_CASE("rounds start on the inter-round grid and reuse distances") {
  auto s = testing::chain(3);
  auto t = testing::open_sim(s.topology);
  RadarConfig config;
  config.destinations = s.destinations;
  config.rounds = 3;
  std::vector<long> streamed;
  auto ds = run_radar(config, *t, [&](const RoundRecord& r) {
    CHECK(r.raw.has_value());
    streamed.push_back(r.index);
  });
  REQUIRE(ds.rounds.size() == 3);
  CHECK(streamed == std::vector<long>{0, 1, 2});
  CHECK(ds.rounds[0].probes_sent == 30);  // from the default distance down
  CHECK(ds.rounds[1].probes_sent == 3);
  CHECK(ds.rounds[2].probes_sent == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(ds.rounds[i].start_time == doctest::Approx(600.0 * static_cast<double>(i)));
    CHECK(ds.rounds[i].tree.addresses().size() == 3);
  }
  CHECK(ds.monitor == testing::kMonitor);
  CHECK(ds.destinations == s.destinations);
}

TEST_CASE("a longer route is picked up within the round and cached for the next") {
  sim::TopologyBuilder b("m", testing::kMonitor);
  b.node("r1", addr(1)).node("r2", addr(2)).node("x1", addr(3)).node("x2", addr(4)).node("d", addr(9));
  b.link("m", "r1").link("r1", "r2").link("r2", "d").link("r2", "x1").link("x1", "x2").link("x2", "d");
  b.event(900, sim::RewireLink{"r2", std::string("d"), std::nullopt});       // 3 -> 5 hops
  b.event(2100, sim::RewireLink{"r2", std::nullopt, std::string("d")});      // 5 -> 3 hops
  auto t = testing::open_sim(b.build());
  RadarConfig config;
  config.destinations = {addr(9)};
  config.rounds = 6;
  auto ds = run_radar(config, *t);
  REQUIRE(ds.rounds.size() == 6);

  // Round 2 assumed 3 hops and met x1 there; the restart still reaches d.
  const auto& under = ds.rounds[2].tree;
  CHECK(under.terminals.contains(addr(9)));
  auto edges = under.address_edges();
  CHECK(std::find(edges.begin(), edges.end(), std::pair{addr(4), addr(9)}) != edges.end());
  CHECK(ds.rounds[3].probes_sent == 5);

  // Round 4 assumed 5 and pays two extra echoes; round 5 is exact again.
  CHECK(ds.rounds[4].probes_sent == 5);
  CHECK(ds.rounds[4].tree.terminals.contains(addr(9)));
  CHECK(ds.rounds[5].probes_sent == 3);
}

TEST_CASE("without restart an under-estimated destination is lost for one round") {
  sim::TopologyBuilder b("m", testing::kMonitor);
  b.node("r1", addr(1)).node("x1", addr(3)).node("x2", addr(4)).node("d", addr(9));
  b.link("m", "r1").link("r1", "d").link("r1", "x1").link("x1", "x2").link("x2", "d");
  b.event(300, sim::RewireLink{"r1", std::string("d"), std::nullopt});
  auto t = testing::open_sim(b.build());
  RadarConfig config;
  config.destinations = {addr(9)};
  config.rounds = 3;
  config.restart_within_round = false;
  auto ds = run_radar(config, *t);
  const auto& lost = ds.rounds[1].tree;
  bool reached = lost.terminals.contains(addr(9)) &&
                 lost.nodes[static_cast<std::size_t>(lost.terminals.at(addr(9)))].hop == Hop{addr(9)};
  CHECK_FALSE(reached);
  CHECK(ds.rounds[2].tree.terminals.contains(addr(9)));
  CHECK(ds.rounds[2].probes_sent == 30);  // evicted, back to the default
}

TEST_CASE("cancellation stops between rounds") {
  auto s = testing::chain(2);
  auto t = testing::open_sim(s.topology);
  std::atomic<bool> stop{false};
  RadarConfig config;
  config.destinations = s.destinations;
  config.cancel = &stop;
  auto ds = run_radar(config, *t, [&](const RoundRecord& r) {
    if (r.index == 4) stop = true;
  });
  CHECK(ds.rounds.size() == 5);
}

TEST_CASE("raw trees may be dropped from the returned dataset") {
  auto s = testing::chain(2);
  auto t = testing::open_sim(s.topology);
  RadarConfig config;
  config.destinations = s.destinations;
  config.rounds = 2;
  config.retain_raw = false;
  auto ds = run_radar(config, *t);
  CHECK_FALSE(ds.rounds[0].raw.has_value());
}

TEST_CASE("invalid radar configurations are refused") {
  auto t = testing::open_sim(testing::chain(2).topology);
  RadarConfig config;
  CHECK_THROWS_AS(run_radar(config, *t), InvalidArgument);  // no destinations
  config.destinations = {addr(2), addr(2)};
  CHECK_THROWS_AS(run_radar(config, *t), InvalidArgument);
  config.destinations = {addr(2)};
  config.default_distance = 20;
  CHECK_THROWS_AS(run_radar(config, *t), InvalidArgument);
  config.default_distance = 30;
  config.inter_round_delay = -1;
  CHECK_THROWS_AS(run_radar(config, *t), InvalidArgument);
}

TEST_CASE("destination lists allow comments and reject junk") {
  auto list = parse_destinations("# header\n10.0.0.1\n\n  10.0.0.2  # trailing\n");
  CHECK(list == std::vector<Ipv4>{Ipv4{10, 0, 0, 1}, Ipv4{10, 0, 0, 2}});
  try {
    parse_destinations("10.0.0.1\nnope\n");
    FAIL("accepted junk");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_destinations("10.0.0.1\n10.0.0.1\n"), ParseError);
  CHECK(load_destinations_file(std::string(RADAR_TEST_DATA) + "/small.destinations").size() == 3);
}

TEST_CASE("parameters describe the configuration") {
  RadarConfig config;
  auto p = radar_parameters(config);
  CHECK(p.front() == std::pair<std::string, std::string>{"max_ttl", "30"});
  CHECK(std::find(p.begin(), p.end(), std::pair<std::string, std::string>{"inter_round_delay", "600"}) != p.end());
}
