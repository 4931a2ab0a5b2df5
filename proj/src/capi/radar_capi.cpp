#include "radar/radar.h"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <utility>

#include "core/analytics.hpp"
#include "core/baseline.hpp"
#include "core/dataset.hpp"
#include "core/error.hpp"
#include "core/icmp.hpp"
#include "core/radar.hpp"
#include "core/round_log.hpp"
#include "core/simnet.hpp"
#include "core/tracetree.hpp"
#include "core/transport.hpp"

struct radar_topology {
  radar::sim::Topology topology;
};

struct radar_transport {
  std::unique_ptr<radar::Transport> transport;
};

struct radar_destinations {
  std::vector<radar::Ipv4> list;
};

struct radar_dataset {
  radar::RadarDataset dataset;
};

namespace {

thread_local std::string g_last_error;
std::atomic<bool> g_stop{false};
static_assert(std::atomic<bool>::is_always_lock_free, "stop flag must be usable from a signal handler");

radar_status status_of(radar::ErrorKind kind) {
  switch (kind) {
    case radar::ErrorKind::InvalidArgument: return RADAR_ERR_INVALID_ARGUMENT;
    case radar::ErrorKind::Parse: return RADAR_ERR_PARSE;
    case radar::ErrorKind::Range: return RADAR_ERR_RANGE;
    case radar::ErrorKind::Validation: return RADAR_ERR_VALIDATION;
    case radar::ErrorKind::Scenario: return RADAR_ERR_SCENARIO;
    case radar::ErrorKind::Transport: return RADAR_ERR_TRANSPORT;
    case radar::ErrorKind::Io: return RADAR_ERR_IO;
  }
  return RADAR_ERR_INTERNAL;
}

template <typename F>
radar_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return RADAR_OK;
  } catch (const radar::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown failure";
  }
  return RADAR_ERR_INTERNAL;
}

template <typename T>
T& need(T* p, const char* what) {
  if (!p) throw radar::InvalidArgument(std::string(what) + " is NULL");
  return *p;
}

std::string need(const char* p, const char* what) {
  if (!p) throw radar::InvalidArgument(std::string(what) + " is NULL");
  return p;
}

void need_out(const void* p) {
  if (!p) throw radar::InvalidArgument("output pointer is NULL");
}

char* to_c_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

radar_measure_options defaults() {
  radar_measure_options o;
  radar_measure_options_init(&o);
  return o;
}

radar::TracetreeConfig tracetree_config(const radar_measure_options& o) {
  radar::TracetreeConfig c;
  c.max_ttl = o.max_ttl;
  c.timeout = o.timeout;
  c.inter_probe_delay = o.inter_probe_delay;
  c.send_strategy = o.greedy_send ? radar::Strategy::Greedy : radar::Strategy::OnePerLoop;
  c.receive_strategy = o.greedy_receive ? radar::Strategy::Greedy : radar::Strategy::OnePerLoop;
  return c;
}

radar::RadarConfig radar_config(const radar_measure_options& o, const radar_destinations& d) {
  radar::RadarConfig c;
  c.destinations = d.list;
  c.tracetree = tracetree_config(o);
  c.default_distance = o.max_ttl;
  c.inter_round_delay = o.inter_round_delay;
  if (o.rounds >= 0) c.rounds = o.rounds;
  c.restart_within_round = o.restart_within_round != 0;
  c.monitor_id = o.monitor_id && *o.monitor_id ? o.monitor_id : "monitor";
  return c;
}

radar::Series series_of(const radar::RadarDataset& ds, radar_series_spec spec) {
  if (spec.window < 0) throw radar::InvalidArgument("window must be >= 0");
  if (spec.window == 0) return radar::per_round_ip_count(ds);
  return radar::windowed_ip_count(ds, spec.window, spec.blocked ? radar::WindowMode::Blocked : radar::WindowMode::Sliding);
}

radar::RoundRange range_of(const char* text, const char* what) {
  if (!text) throw radar::InvalidArgument(std::string(what) + " range is NULL");
  return radar::RoundRange::parse(text);
}

std::string format_fixed(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

extern "C" {

const char* radar_last_error(void) { return g_last_error.c_str(); }

const char* radar_status_name(radar_status status) {
  switch (status) {
    case RADAR_OK: return "ok";
    case RADAR_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RADAR_ERR_PARSE: return "parse error";
    case RADAR_ERR_RANGE: return "range error";
    case RADAR_ERR_VALIDATION: return "validation error";
    case RADAR_ERR_SCENARIO: return "scenario error";
    case RADAR_ERR_TRANSPORT: return "transport error";
    case RADAR_ERR_IO: return "i/o error";
    case RADAR_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void radar_string_free(char* text) { std::free(text); }

void radar_request_stop(void) { g_stop.store(true); }

radar_status radar_topology_load_file(const char* path, radar_topology** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    auto topo = radar::sim::load_topology_file(need(path, "path"));
    *out = new radar_topology{std::move(topo)};
  });
}

radar_status radar_topology_load_json(const char* json, radar_topology** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    auto topo = radar::sim::load_topology(need(json, "json"));
    *out = new radar_topology{std::move(topo)};
  });
}

void radar_topology_free(radar_topology* topology) { delete topology; }

radar_status radar_transport_open_sim(const radar_topology* topology, double send_interval, radar_transport** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    const auto& t = need(topology, "topology");
    if (!(send_interval >= 0.0)) throw radar::InvalidArgument("send interval must be >= 0");
    auto network = std::make_shared<radar::sim::SimNetwork>(t.topology);
    radar::SimTransportOptions options;
    options.send_interval = send_interval;
    *out = new radar_transport{std::make_unique<radar::SimTransport>(std::move(network), options)};
  });
}

radar_status radar_transport_open_icmp(double send_interval, radar_transport** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    if (!(send_interval >= 0.0)) throw radar::InvalidArgument("send interval must be >= 0");
    *out = new radar_transport{std::make_unique<radar::icmp::IcmpTransport>(send_interval)};
  });
}

radar_status radar_transport_now(const radar_transport* transport, double* out) {
  return guarded([&] {
    need_out(out);
    *out = need(transport, "transport").transport->now();
  });
}

void radar_transport_free(radar_transport* transport) {
  if (transport && transport->transport) transport->transport->close();
  delete transport;
}

radar_status radar_destinations_load_file(const char* path, radar_destinations** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    auto list = radar::load_destinations_file(need(path, "path"));
    *out = new radar_destinations{std::move(list)};
  });
}

radar_status radar_destinations_parse(const char* text, radar_destinations** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    auto list = radar::parse_destinations(need(text, "text"));
    *out = new radar_destinations{std::move(list)};
  });
}

size_t radar_destinations_count(const radar_destinations* destinations) {
  return destinations ? destinations->list.size() : 0;
}

void radar_destinations_free(radar_destinations* destinations) { delete destinations; }

void radar_measure_options_init(radar_measure_options* options) {
  if (!options) return;
  options->max_ttl = radar::kDefaultMaxTtl;
  options->timeout = 2.0;
  options->inter_probe_delay = 0.005;
  options->greedy_send = 0;
  options->greedy_receive = 0;
  options->rounds = 1;
  options->inter_round_delay = 600.0;
  options->restart_within_round = 1;
  options->monitor_id = "monitor";
}

radar_status radar_run(radar_transport* transport, const radar_destinations* destinations,
                       const radar_measure_options* options, const char* out_path, radar_dataset** dataset) {
  return guarded([&] {
    if (dataset) *dataset = nullptr;
    auto& t = *need(transport, "transport").transport;
    const auto& o = options ? *options : defaults();
    auto config = radar_config(o, need(destinations, "destinations"));
    config.validate();
    config.retain_raw = dataset != nullptr;
    g_stop.store(false);
    config.cancel = &g_stop;

    std::optional<radar::DatasetWriter> writer;
    if (out_path) {
      radar::RadarDataset header;
      header.monitor_id = config.monitor_id;
      header.monitor = t.monitor_address();
      header.parameters = radar::radar_parameters(config);
      header.destinations = config.destinations;
      writer.emplace(out_path, header);
    }
    auto result = radar::run_radar(config, t, [&](const radar::RoundRecord& round) {
      if (writer) writer->append(round);
    });
    if (writer) writer->close();
    if (dataset) *dataset = new radar_dataset{std::move(result)};
  });
}

radar_status radar_tracetree_once(radar_transport* transport, const radar_destinations* destinations,
                                  const radar_measure_options* options, char** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    auto& t = *need(transport, "transport").transport;
    auto o = options ? *options : defaults();
    o.rounds = 1;
    auto config = radar_config(o, need(destinations, "destinations"));
    config.retain_raw = true;
    auto dataset = radar::run_radar(config, t);
    *out = to_c_string(radar::serialize_dataset(dataset));
  });
}

radar_status radar_traceroute_once(radar_transport* transport, const radar_destinations* destinations,
                                   const radar_measure_options* options, char** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    auto& t = *need(transport, "transport").transport;
    const auto& o = options ? *options : defaults();
    const auto& d = need(destinations, "destinations");
    if (o.rounds < 1) throw radar::InvalidArgument("traceroute needs a positive round count");
    if (!(o.inter_round_delay >= 0.0)) throw radar::InvalidArgument("inter-round delay must be >= 0");
    radar::TracerouteConfig config;
    config.max_ttl = o.max_ttl;
    config.timeout = o.timeout;
    config.inter_probe_delay = o.inter_probe_delay;
    config.send_strategy = o.greedy_send ? radar::Strategy::Greedy : radar::Strategy::OnePerLoop;
    config.receive_strategy = o.greedy_receive ? radar::Strategy::Greedy : radar::Strategy::OnePerLoop;

    radar::RadarDataset dataset;
    dataset.monitor_id = o.monitor_id && *o.monitor_id ? o.monitor_id : "monitor";
    dataset.monitor = t.monitor_address();
    dataset.destinations = d.list;
    dataset.parameters = {{"method", "traceroute"},
                          {"max_ttl", std::to_string(config.max_ttl)},
                          {"timeout", radar::format_number(config.timeout)},
                          {"inter_round_delay", radar::format_number(o.inter_round_delay)}};
    for (long r = 0; r < o.rounds; ++r) {
      double start = t.now();
      auto result = radar::traceroute_round(d.list, t, config);
      radar::RoundRecord round;
      round.index = r;
      round.start_time = start;
      round.end_time = t.now();
      round.probes_sent = result.packet_count;
      round.incomplete = result.incomplete;
      round.raw = radar::build_raw_tree(std::move(result.records));
      round.tree = radar::filter_tree(*round.raw, dataset.monitor).tree;
      dataset.rounds.push_back(std::move(round));
      if (r + 1 < o.rounds) t.sleep_until(start + o.inter_round_delay);
    }
    *out = to_c_string(radar::serialize_dataset(dataset));
  });
}

radar_status radar_simulate_probes(const radar_topology* topology, const char* probes, char** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    radar::sim::SimNetwork network(need(topology, "topology").topology);
    const std::string input = need(probes, "probes");
    std::string_view text = input;
    std::string result;
    double time = 0.0;
    std::size_t line_no = 0;
    while (!text.empty()) {
      auto nl = text.find('\n');
      std::string line(text.substr(0, nl));
      text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      char dest[64] = {0};
      int ttl = 0;
      double at = time;
      int fields = std::sscanf(line.c_str(), "%63s %d %lf", dest, &ttl, &at);
      if (fields <= 0) continue;
      auto ip = radar::Ipv4::parse(dest);
      if (!ip || fields < 2) throw radar::ParseError(line_no, "expected '<destination> <ttl> [<time>]'");
      if (ttl < 1 || ttl > radar::kMaxTtlLimit) throw radar::RangeError("ttl outside [1, 64] on line " + std::to_string(line_no));
      if (at < time) throw radar::InvalidArgument("probe times must not decrease (line " + std::to_string(line_no) + ")");
      time = at;
      network.apply_events(time);
      auto reply = network.route_probe(*ip, ttl, time);
      bool answered = reply.kind == radar::sim::ReplyKind::TimeExceeded || reply.kind == radar::sim::ReplyKind::EchoReply;
      result += radar::format_time(time) + " " + ip->str() + " " + std::to_string(ttl) + " " +
                radar::sim::to_string(reply.kind) + " " + (answered ? reply.source.str() : std::string("*")) + " " +
                std::to_string(reply.hops) + " " + format_fixed(answered ? reply.rtt : 0.0, "%.6f") + "\n";
    }
    *out = to_c_string(result);
  });
}

radar_status radar_simulate_path(const radar_topology* topology, const char* destination, double at_time, char** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    auto ip = radar::Ipv4::parse(need(destination, "destination"));
    if (!ip) throw radar::InvalidArgument("not an IPv4 address");
    radar::sim::SimNetwork network(need(topology, "topology").topology);
    network.apply_events(at_time);
    std::string result;
    for (auto hop : network.current_path(*ip)) result += hop.str() + "\n";
    *out = to_c_string(result);
  });
}

radar_status radar_dataset_load_file(const char* path, radar_dataset** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    auto ds = radar::load_dataset_file(need(path, "path"));
    *out = new radar_dataset{std::move(ds)};
  });
}

radar_status radar_dataset_parse(const char* text, radar_dataset** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    auto ds = radar::parse_dataset(need(text, "text"));
    *out = new radar_dataset{std::move(ds)};
  });
}

radar_status radar_dataset_serialize(const radar_dataset* dataset, char** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    *out = to_c_string(radar::serialize_dataset(need(dataset, "dataset").dataset));
  });
}

radar_status radar_dataset_write_file(const radar_dataset* dataset, const char* path) {
  return guarded([&] { radar::write_dataset_file(need(path, "path"), need(dataset, "dataset").dataset); });
}

size_t radar_dataset_round_count(const radar_dataset* dataset) { return dataset ? dataset->dataset.rounds.size() : 0; }

radar_status radar_dataset_round_addresses(const radar_dataset* dataset, size_t i, size_t* out) {
  return guarded([&] {
    need_out(out);
    const auto& rounds = need(dataset, "dataset").dataset.rounds;
    if (i >= rounds.size()) throw radar::RangeError("round position out of range");
    *out = rounds[i].tree.addresses().size();
  });
}

void radar_dataset_free(radar_dataset* dataset) { delete dataset; }

radar_status radar_dataset_subset(const radar_dataset* dataset, const radar_destinations* subset, radar_dataset** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    auto ds = radar::simulate_destination_subset(need(dataset, "dataset").dataset, need(subset, "subset").list);
    *out = new radar_dataset{std::move(ds)};
  });
}

radar_status radar_analyze_counts(const radar_dataset* dataset, char** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    *out = to_c_string(radar::series_csv(radar::per_round_ip_count(need(dataset, "dataset").dataset), "addresses"));
  });
}

radar_status radar_analyze_window(const radar_dataset* dataset, int window, int blocked, char** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    auto mode = blocked ? radar::WindowMode::Blocked : radar::WindowMode::Sliding;
    auto series = radar::windowed_ip_count(need(dataset, "dataset").dataset, window, mode);
    *out = to_c_string(radar::series_csv(series, "addresses"));
  });
}

radar_status radar_analyze_peaks(const radar_dataset* dataset, radar_series_spec series, int direction, double k,
                                 char** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    if (direction != 1 && direction != -1) throw radar::InvalidArgument("direction must be +1 or -1");
    auto s = series_of(need(dataset, "dataset").dataset, series);
    auto report = radar::detect_peaks(s, direction > 0 ? radar::Direction::Up : radar::Direction::Down, k);
    *out = to_c_string(radar::peaks_csv(s, report));
  });
}

radar_status radar_analyze_distribution(const radar_dataset* dataset, radar_series_spec series, long bin_width,
                                        char** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    auto s = series_of(need(dataset, "dataset").dataset, series);
    *out = to_c_string(radar::histogram_csv(radar::value_distribution(s, bin_width), "value", "rounds"));
  });
}

radar_status radar_analyze_components(const radar_dataset* dataset, const char* reference, const char* observation,
                                      int dot, char** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    const auto& ds = need(dataset, "dataset").dataset;
    auto obs = range_of(observation, "observation");
    auto components = radar::new_address_components(ds, range_of(reference, "reference"), obs);
    *out = to_c_string(dot ? radar::components_dot(ds, obs, components) : radar::components_csv(components));
  });
}

radar_status radar_analyze_component_sizes(const radar_dataset* dataset, const char* reference,
                                           const char* observation, char** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    auto components = radar::new_address_components(need(dataset, "dataset").dataset,
                                                     range_of(reference, "reference"), range_of(observation, "observation"));
    *out = to_c_string(radar::histogram_csv(radar::component_size_distribution(components), "size", "components"));
  });
}

radar_status radar_analyze_event_graph(const radar_dataset* dataset, long event_round, long before_window, int dot,
                                       char** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    auto graph = radar::event_graph(need(dataset, "dataset").dataset, event_round, before_window);
    if (dot) {
      *out = to_c_string(radar::event_graph_dot(graph));
      return;
    }
    radar::CsvTable table({"from", "to", "is_new"});
    for (const auto& e : graph.edges) table.row(e.from.str(), e.to.str(), e.is_new ? 1 : 0);
    *out = to_c_string(table.str());
  });
}

radar_status radar_analyze_correlate(const radar_dataset* dataset, const char* reference, const char* observation,
                                     char** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    auto components = radar::new_address_components(need(dataset, "dataset").dataset,
                                                     range_of(reference, "reference"), range_of(observation, "observation"));
    *out = to_c_string(radar::correlation_csv(radar::size_vs_discovery_correlation(components)));
  });
}

radar_status radar_compare(const radar_dataset* traceroute_rounds, const char* what, char** out) {
  return guarded([&] {
    need_out(out);
    *out = nullptr;
    std::string kind = what ? what : "curves";
    auto comparison = radar::compare_traceroute_rounds(need(traceroute_rounds, "dataset").dataset);
    if (kind == "curves") {
      *out = to_c_string(radar::comparison_curves_csv(comparison));
    } else if (kind == "loads") {
      *out = to_c_string(radar::comparison_loads_csv(comparison));
    } else {
      throw radar::InvalidArgument("comparison output must be 'curves' or 'loads'");
    }
  });
}

}  // extern "C"
