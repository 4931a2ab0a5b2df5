#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "core/analytics.hpp"
#include "core/error.hpp"
#include "core/filter.hpp"
#include "support/scenarios.hpp"

using namespace radar;
using testing::addr;
using testing::kMonitor;

namespace {

// A round whose tree is a set of monitor-rooted chains of addresses.
RoundRecord round_of(long index, const std::vector<std::vector<std::uint32_t>>& chains) {
  std::vector<ProbeRecord> records;
  for (const auto& chain : chains) {
    Ipv4 d = addr(chain.back());
    for (std::size_t i = 0; i < chain.size(); ++i) {
      records.push_back({Hop{addr(chain[i])}, static_cast<int>(i + 1), d});
    }
  }
  RoundRecord r;
  r.index = index;
  r.tree = filter_tree(build_raw_tree(records), kMonitor).tree;
  r.probes_sent = static_cast<long>(records.size());
  return r;
}

RadarDataset dataset_of(std::vector<RoundRecord> rounds) {
  RadarDataset ds;
  ds.monitor = kMonitor;
  ds.rounds = std::move(rounds);
  return ds;
}

Series series_of(const std::vector<long>& values) {
  Series s;
  for (std::size_t i = 0; i < values.size(); ++i) s.push_back({static_cast<long>(i), values[i]});
  return s;
}

// Reachability closure over new addresses, no union-find.
std::vector<std::set<Ipv4>> closure_components(const RadarDataset& ds, RoundRange ref, RoundRange obs) {
  std::set<Ipv4> old;
  std::vector<Ipv4> fresh;
  for (const auto& r : ds.rounds) {
    if (ref.contains(r.index)) {
      for (Ipv4 a : r.tree.addresses()) old.insert(a);
    }
  }
  for (const auto& r : ds.rounds) {
    if (!obs.contains(r.index)) continue;
    for (Ipv4 a : r.tree.addresses()) {
      if (!old.contains(a) && std::find(fresh.begin(), fresh.end(), a) == fresh.end()) fresh.push_back(a);
    }
  }
  std::size_t n = fresh.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) reach[i][i] = true;
  auto index = [&](Ipv4 a) { return static_cast<std::size_t>(std::find(fresh.begin(), fresh.end(), a) - fresh.begin()); };
  for (const auto& r : ds.rounds) {
    if (!obs.contains(r.index)) continue;
    for (const auto& [a, b] : r.tree.address_edges()) {
      auto i = index(a), j = index(b);
      if (i < n && j < n) reach[i][j] = reach[j][i] = true;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
      }
    }
  }
  std::set<std::set<Ipv4>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    std::set<Ipv4> g;
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j]) g.insert(fresh[j]);
    }
    groups.insert(g);
  }
  return {groups.begin(), groups.end()};
}

}  // namespace

TEST_CASE("round ranges are half-open a:b") {
  auto r = RoundRange::parse("3:7");
  CHECK(r == RoundRange{3, 7});
  CHECK(r.contains(3));
  CHECK(r.contains(6));
  CHECK_FALSE(r.contains(7));
  for (const char* bad : {"", "3", "3:", ":7", "7:3", "3:3", "-1:4", "a:b", "3:7x"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(RoundRange::parse(bad), InvalidArgument);
  }
}

TEST_CASE("per-round counts exclude the monitor and stars") {
  auto ds = dataset_of({round_of(0, {{1, 2, 3}}), round_of(1, {{1, 2}, {1, 4}})});
  ds.rounds.push_back(RoundRecord{});
  ds.rounds.back().index = 2;
  ds.rounds.back().tree = filter_tree(build_raw_tree({{Hop::star(), 1, addr(9)}}), kMonitor).tree;
  CHECK(per_round_ip_count(ds) == Series{{0, 3}, {1, 3}, {2, 0}});
}

TEST_CASE("windows match brute-force unions") {
  testing::Rng rng(51);
  for (int trial = 0; trial < 30; ++trial) {
    auto ds = testing::random_dataset(rng, 30, 10, 15);
    for (int w : {1, 2, 3, 7, 10}) {
      auto sliding = windowed_ip_count(ds, w, WindowMode::Sliding);
      REQUIRE(sliding.size() == ds.rounds.size() - static_cast<std::size_t>(w) + 1);
      for (std::size_t i = 0; i < sliding.size(); ++i) {
        std::set<Ipv4> u;
        for (std::size_t j = i; j < i + static_cast<std::size_t>(w); ++j) {
          for (Ipv4 a : ds.rounds[j].tree.addresses()) u.insert(a);
        }
        CHECK(sliding[i].value == static_cast<long>(u.size()));
        CHECK(sliding[i].round == ds.rounds[i + static_cast<std::size_t>(w) - 1].index);
      }
      auto blocked = windowed_ip_count(ds, w, WindowMode::Blocked);
      REQUIRE(blocked.size() == ds.rounds.size() / static_cast<std::size_t>(w));
      for (std::size_t b = 0; b < blocked.size(); ++b) {
        std::set<Ipv4> u;
        for (std::size_t j = b * static_cast<std::size_t>(w); j < (b + 1) * static_cast<std::size_t>(w); ++j) {
          for (Ipv4 a : ds.rounds[j].tree.addresses()) u.insert(a);
        }
        CHECK(blocked[b].value == static_cast<long>(u.size()));
      }
    }
  }
  CHECK_THROWS_AS(windowed_ip_count(RadarDataset{}, 0), InvalidArgument);
}

TEST_CASE("median and MAD thresholds") {
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK_THROWS_AS(median({}), InvalidArgument);

  // median 10, deviations {0,0,1,1,1,1,2,2,2,40}: MAD 1, threshold 5
  auto s = series_of({10, 10, 9, 11, 9, 11, 8, 12, 8, 50});
  auto up = detect_peaks(s, Direction::Up, 5.0);
  CHECK(up.median == 10.0);
  CHECK(up.mad == 1.0);
  CHECK(up.rounds == std::vector<long>{9});
  CHECK_FALSE(up.degenerate);
  CHECK(detect_peaks(s, Direction::Down, 5.0).rounds.empty());
  // A deviation equal to the threshold is not a peak.
  CHECK(detect_peaks(series_of({10, 10, 9, 11, 9, 11, 8, 12, 8, 15}), Direction::Up, 5.0).rounds.empty());
}

TEST_CASE("a flat series flags any deviation in the requested direction") {
  auto s = series_of({7, 7, 7, 7, 7, 7, 0, 7, 7, 8, 7});
  auto down = detect_peaks(s, Direction::Down);
  CHECK(down.degenerate);
  CHECK(down.rounds == std::vector<long>{6});
  CHECK(detect_peaks(s, Direction::Up).rounds == std::vector<long>{9});
  CHECK(detect_peaks(series_of({5, 5, 5, 5, 5, 5, 5, 5, 5, 5}), Direction::Up).rounds.empty());
}

TEST_CASE("a drop to 400 from a steady 1000 is flagged down") {
  std::vector<long> v(12, 1000);
  v[7] = 400;
  CHECK(detect_peaks(series_of(v), Direction::Down).rounds == std::vector<long>{7});
  CHECK(detect_peaks(series_of(v), Direction::Up).rounds.empty());
}

TEST_CASE("1050 stays within the noise of a noisy 1000 baseline") {
  // median 1005, MAD 10: the threshold at k = 5 is 50, above the 45 deviation
  auto s = series_of({990, 1010, 990, 1010, 990, 1010, 1050, 990, 1010, 990, 1010, 1000});
  auto up = detect_peaks(s, Direction::Up, 5.0);
  CHECK(up.median == 1005.0);
  CHECK(up.mad == 10.0);
  CHECK(up.rounds.empty());
  // On a perfectly flat baseline there is no noise scale and any rise counts.
  std::vector<long> flat(12, 1000);
  flat[6] = 1050;
  auto strict = detect_peaks(series_of(flat), Direction::Up, 5.0);
  CHECK(strict.degenerate);
  CHECK(strict.rounds == std::vector<long>{6});
}

TEST_CASE("peak detection refuses short series and bad sensitivity") {
  CHECK_THROWS_AS(detect_peaks(series_of({1, 2, 3}), Direction::Up), InvalidArgument);
  CHECK_THROWS_AS(detect_peaks(series_of({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}), Direction::Up, 0.0), InvalidArgument);
}

TEST_CASE("value histogram bins") {
  auto s = series_of({0, 1, 4, 5, 9, 10, -1, -5, -6});
  CHECK(value_distribution(s, 1).size() == 9);
  CHECK(value_distribution(s, 5) == Histogram{{-10, 1}, {-5, 2}, {0, 3}, {5, 2}, {10, 1}});
  CHECK_THROWS_AS(value_distribution(s, 0), InvalidArgument);
}

TEST_CASE("new addresses and their components") {
  // Reference rounds see 1-2-3. Round 2 adds 4 below 3 and, separately,
  // 6 below 1 with 7 under it in round 3. Node 5 appears under 2.
  auto ds = dataset_of({
      round_of(0, {{1, 2, 3}}),
      round_of(1, {{1, 2, 3}}),
      round_of(2, {{1, 2, 3, 4}, {1, 6}}),
      round_of(3, {{1, 2, 5}, {1, 6, 7}}),
  });
  RoundRange ref{0, 2}, obs{2, 4};
  CHECK(new_addresses(ds, ref, obs) == std::set<Ipv4>{addr(4), addr(5), addr(6), addr(7)});
  auto comps = new_address_components(ds, ref, obs);
  REQUIRE(comps.size() == 3);
  CHECK(comps[0].addresses == std::set<Ipv4>{addr(4)});
  CHECK(comps[1].addresses == std::set<Ipv4>{addr(6), addr(7)});
  CHECK(comps[1].first_round == 2);
  CHECK(comps[1].last_round == 3);
  CHECK(discovery_time(comps[1]) == 2);
  CHECK(comps[2].addresses == std::set<Ipv4>{addr(5)});
  CHECK(discovery_time(comps[2]) == 1);
  CHECK(component_size_distribution(comps) == Histogram{{1, 2}, {2, 1}});

  CHECK(components_csv(comps).find("1,2,2,3,2,10.0.0.6 10.0.0.7\n") != std::string::npos);
  auto dot = components_dot(ds, obs, comps);
  CHECK(dot.find("\"10.0.0.7\" [style=filled") != std::string::npos);
  CHECK(dot.find("\"10.0.0.1\";") != std::string::npos);  // old neighbour drawn plain

  CHECK_THROWS_AS(new_address_components(ds, {5, 6}, {6, 7}), InvalidArgument);
  CHECK_THROWS_AS(new_address_components(ds, {0, 3}, {2, 4}), InvalidArgument);
}

TEST_CASE("components match a reachability closure on random datasets") {
  testing::Rng rng(52);
  for (int trial = 0; trial < 200; ++trial) {
    auto ds = testing::random_dataset(rng, 5 + trial % 46, 4, 4);
    RoundRange ref{0, 4}, obs{4, 8};
    auto comps = new_address_components(ds, ref, obs);
    std::set<std::set<Ipv4>> got;
    std::size_t total = 0;
    for (const auto& c : comps) {
      got.insert(c.addresses);
      total += c.size();
    }
    auto expected = closure_components(ds, ref, obs);
    CHECK(got == std::set<std::set<Ipv4>>(expected.begin(), expected.end()));
    CHECK(total == new_addresses(ds, ref, obs).size());
  }
}

TEST_CASE("event graph flags edges absent from the window before") {
  std::vector<RoundRecord> rounds;
  for (long i = 0; i < 5; ++i) rounds.push_back(round_of(i, {{1, 2, 3}, {1, 4}}));
  rounds.push_back(round_of(5, {{1, 4, 3}}));  // 3 moved below 4
  auto ds = dataset_of(rounds);
  auto g = event_graph(ds, 5, 5);
  auto flagged = g.flagged();
  REQUIRE(flagged.size() == 1);
  CHECK(flagged[0] == EventEdge{addr(4), addr(3), true});
  CHECK(g.edges.size() == 5);  // m-1, 1-2, 2-3, 1-4, 4-3
  CHECK(g.nodes.contains(kMonitor));
  auto dot = event_graph_dot(g);
  CHECK(dot.find("\"10.0.0.4\" -> \"10.0.0.3\" [color=black, penwidth=3];") != std::string::npos);

  CHECK_THROWS_AS(event_graph(ds, 5, 0), InvalidArgument);
  CHECK_THROWS_AS(event_graph(ds, 5, 6), InvalidArgument);
  CHECK_THROWS_AS(event_graph(ds, 9, 2), InvalidArgument);
}

TEST_CASE("spearman with average ranks") {
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman({1, 2, 2, 3}, {1, 2, 3, 4}) == doctest::Approx(4.5 / std::sqrt(22.5)));
  CHECK(spearman({1, 1, 1}, {1, 2, 3}) == 0.0);
  CHECK_THROWS_AS(spearman({1}, {1}), InvalidArgument);
  CHECK_THROWS_AS(spearman({1, 2}, {1}), InvalidArgument);

  std::vector<NewAddressComponent> comps{
      {{addr(1)}, 0, 0}, {{addr(2), addr(3)}, 1, 2}, {{addr(4), addr(5), addr(6)}, 0, 4}};
  auto c = size_vs_discovery_correlation(comps);
  CHECK(c.pairs == std::vector<std::pair<long, long>>{{1, 1}, {2, 2}, {3, 5}});
  CHECK(c.spearman == doctest::Approx(1.0));
  CHECK(correlation_csv(c) == "size,discovery_time\n1,1\n2,2\n3,5\n# spearman 1\n");
  CHECK_THROWS_AS(size_vs_discovery_correlation({comps[0]}), InvalidArgument);
}

TEST_CASE("csv helpers") {
  CHECK(series_csv(series_of({4, 5}), "addresses") == "round,addresses\n0,4\n1,5\n");
  auto s = series_of({7, 7, 7, 7, 7, 7, 0, 7, 7, 7});
  CHECK(peaks_csv(s, detect_peaks(s, Direction::Down)).find("6,0,1\n") != std::string::npos);
}
