#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <string>

#include "radar/radar.h"

namespace {

const std::string kData = RADAR_TEST_DATA;

// Takes ownership of a string returned by the library.
std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  radar_string_free(s);
  return out;
}

struct Fixture {
  radar_topology* topology = nullptr;
  radar_transport* transport = nullptr;
  radar_destinations* destinations = nullptr;

  Fixture() {
    REQUIRE(radar_topology_load_file((kData + "/small.json").c_str(), &topology) == RADAR_OK);
    REQUIRE(radar_transport_open_sim(topology, 0.005, &transport) == RADAR_OK);
    REQUIRE(radar_destinations_load_file((kData + "/small.destinations").c_str(), &destinations) == RADAR_OK);
  }
  ~Fixture() {
    radar_destinations_free(destinations);
    radar_transport_free(transport);
    radar_topology_free(topology);
  }
};

}  // namespace

TEST_CASE("status names and error messages") {
  CHECK(std::string(radar_status_name(RADAR_OK)) == "ok");
  CHECK(std::string(radar_status_name(RADAR_ERR_PARSE)) == "parse error");
  radar_topology* t = nullptr;
  CHECK(radar_topology_load_json("{", &t) == RADAR_ERR_VALIDATION);
  CHECK(t == nullptr);
  CHECK(std::string(radar_last_error()).size() > 0);
  CHECK(radar_topology_load_file("/nonexistent.json", &t) == RADAR_ERR_IO);
  CHECK(radar_topology_load_json(R"({"monitor":"x","nodes":[]})", &t) == RADAR_ERR_VALIDATION);
}

TEST_CASE("NULL arguments are refused, NULL handles freed quietly") {
  CHECK(radar_topology_load_file(nullptr, nullptr) == RADAR_ERR_INVALID_ARGUMENT);
  CHECK(radar_dataset_parse(nullptr, nullptr) == RADAR_ERR_INVALID_ARGUMENT);
  char* out = nullptr;
  CHECK(radar_analyze_counts(nullptr, &out) == RADAR_ERR_INVALID_ARGUMENT);
  CHECK(radar_transport_open_sim(nullptr, 0.005, nullptr) == RADAR_ERR_INVALID_ARGUMENT);
  CHECK(radar_destinations_count(nullptr) == 0);
  CHECK(radar_dataset_round_count(nullptr) == 0);
  radar_topology_free(nullptr);
  radar_transport_free(nullptr);
  radar_destinations_free(nullptr);
  radar_dataset_free(nullptr);
  radar_string_free(nullptr);
}

TEST_CASE("destination lists") {
  radar_destinations* d = nullptr;
  REQUIRE(radar_destinations_parse("10.0.0.1\n10.0.0.2\n", &d) == RADAR_OK);
  CHECK(radar_destinations_count(d) == 2);
  radar_destinations_free(d);
  CHECK(radar_destinations_parse("10.0.0.1\nbad\n", &d) == RADAR_ERR_PARSE);
  CHECK(std::string(radar_last_error()).find("2") != std::string::npos);
}

TEST_CASE("one tracetree round over the fixture") {
  Fixture f;
  radar_measure_options o;
  radar_measure_options_init(&o);
  CHECK(o.max_ttl == 30);
  CHECK(o.rounds == 1);
  char* text = nullptr;
  REQUIRE(radar_tracetree_once(f.transport, f.destinations, &o, &text) == RADAR_OK);
  auto s = take(text);
  radar_dataset* ds = nullptr;
  REQUIRE(radar_dataset_parse(s.c_str(), &ds) == RADAR_OK);
  CHECK(radar_dataset_round_count(ds) == 1);
  size_t n = 0;
  REQUIRE(radar_dataset_round_addresses(ds, 0, &n) == RADAR_OK);
  CHECK(n == 6);  // the silent router shows as a star
  CHECK(radar_dataset_round_addresses(ds, 1, &n) == RADAR_ERR_RANGE);
  radar_dataset_free(ds);
}

TEST_CASE("periodic rounds, streamed to disk and returned") {
  Fixture f;
  radar_measure_options o;
  radar_measure_options_init(&o);
  o.rounds = 3;
  auto path = (std::filesystem::temp_directory_path() / "radar_capi_run.txt").string();
  radar_dataset* ds = nullptr;
  REQUIRE(radar_run(f.transport, f.destinations, &o, path.c_str(), &ds) == RADAR_OK);
  CHECK(radar_dataset_round_count(ds) == 3);
  double now = 0;
  REQUIRE(radar_transport_now(f.transport, &now) == RADAR_OK);
  CHECK(now >= 1200.0);

  radar_dataset* loaded = nullptr;
  REQUIRE(radar_dataset_load_file(path.c_str(), &loaded) == RADAR_OK);
  char* a = nullptr;
  char* b = nullptr;
  REQUIRE(radar_dataset_serialize(ds, &a) == RADAR_OK);
  REQUIRE(radar_dataset_serialize(loaded, &b) == RADAR_OK);
  CHECK(take(a) == take(b));

  char* counts = nullptr;
  REQUIRE(radar_analyze_counts(loaded, &counts) == RADAR_OK);
  CHECK(take(counts) == "round,addresses\n0,6\n1,6\n2,6\n");
  char* window = nullptr;
  REQUIRE(radar_analyze_window(loaded, 2, 0, &window) == RADAR_OK);
  CHECK(take(window).find("1,6\n2,6\n") != std::string::npos);
  char* peaks = nullptr;
  CHECK(radar_analyze_peaks(loaded, radar_series_spec{0, 0}, 1, 5.0, &peaks) == RADAR_ERR_INVALID_ARGUMENT);
  CHECK(peaks == nullptr);

  radar_destinations* subset = nullptr;
  REQUIRE(radar_destinations_parse("10.1.0.1\n", &subset) == RADAR_OK);
  radar_dataset* reduced = nullptr;
  REQUIRE(radar_dataset_subset(loaded, subset, &reduced) == RADAR_OK);
  size_t n = 0;
  REQUIRE(radar_dataset_round_addresses(reduced, 0, &n) == RADAR_OK);
  CHECK(n == 4);
  radar_dataset_free(reduced);
  radar_destinations_free(subset);

  radar_dataset_free(loaded);
  radar_dataset_free(ds);
  std::filesystem::remove(path);
}

TEST_CASE("simulation helpers") {
  Fixture f;
  char* path = nullptr;
  REQUIRE(radar_simulate_path(f.topology, "10.2.0.1", 0.0, &path) == RADAR_OK);
  CHECK(take(path) == "10.0.0.1\n10.0.1.1\n10.0.3.1\n10.2.0.1\n");
  char* probes = nullptr;
  REQUIRE(radar_simulate_probes(f.topology, "10.1.0.1 1\n10.2.0.1 3 0.5\n10.1.0.1 4\n", &probes) == RADAR_OK);
  auto lines = take(probes);
  CHECK(lines.find("0.000 10.1.0.1 1 time-exceeded 10.0.0.1 1 0.020000\n") == 0);
  CHECK(lines.find("0.500 10.2.0.1 3 silence * 3 0.000000\n") != std::string::npos);
  CHECK(lines.find("10.1.0.1 4 echo-reply 10.1.0.1 4 0.080000") != std::string::npos);
  CHECK(radar_simulate_probes(f.topology, "10.1.0.1 0\n", &probes) == RADAR_ERR_RANGE);
  CHECK(radar_simulate_probes(f.topology, "nope 1\n", &probes) == RADAR_ERR_PARSE);
}

TEST_CASE("analyses over a parsed dataset") {
  std::string text = "#monitor m 192.168.0.1\n";
  for (int r = 0; r < 12; ++r) {
    char head[64];
    std::snprintf(head, sizeof head, "#round %d %d.000 %d.000\n", r, r * 600, r * 600 + 1);
    text += head;
    text += "10.0.0.1 1 10.0.0.2\n10.0.0.2 2 10.0.0.2\n";
    if (r >= 10) text += "10.0.0.1 1 10.0.0.3\n10.0.0.3 2 10.0.0.3\n";
    text += "#end\n";
  }
  radar_dataset* ds = nullptr;
  REQUIRE(radar_dataset_parse(text.c_str(), &ds) == RADAR_OK);
  char* out = nullptr;
  REQUIRE(radar_analyze_peaks(ds, radar_series_spec{0, 0}, 1, 5.0, &out) == RADAR_OK);
  CHECK(take(out).find("10,3,1\n11,3,1\n") != std::string::npos);
  REQUIRE(radar_analyze_distribution(ds, radar_series_spec{0, 0}, 1, &out) == RADAR_OK);
  CHECK(take(out).find("2,10\n3,2\n") != std::string::npos);
  REQUIRE(radar_analyze_components(ds, "0:10", "10:12", 0, &out) == RADAR_OK);
  CHECK(take(out).find("0,1,10,10,1,10.0.0.3\n") != std::string::npos);
  REQUIRE(radar_analyze_components(ds, "0:10", "10:12", 1, &out) == RADAR_OK);
  CHECK(take(out).rfind("graph", 0) == 0);
  REQUIRE(radar_analyze_component_sizes(ds, "0:10", "10:12", &out) == RADAR_OK);
  CHECK(take(out).find("1,1\n") != std::string::npos);
  REQUIRE(radar_analyze_event_graph(ds, 10, 10, 1, &out) == RADAR_OK);
  CHECK(take(out).find("\"10.0.0.1\" -> \"10.0.0.3\" [color=black, penwidth=3];") != std::string::npos);
  CHECK(radar_analyze_components(ds, "0-10", "10:12", 0, &out) == RADAR_ERR_INVALID_ARGUMENT);
  CHECK(radar_analyze_correlate(ds, "0:10", "10:12", &out) == RADAR_ERR_INVALID_ARGUMENT);  // one component
  CHECK(radar_compare(ds, "loads", &out) == RADAR_OK);
  radar_string_free(out);
  CHECK(radar_compare(ds, "bogus", &out) == RADAR_ERR_INVALID_ARGUMENT);
  radar_dataset_free(ds);
}
