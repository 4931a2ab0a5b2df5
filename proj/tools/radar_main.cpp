// Command-line front end. Everything goes through the C interface.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "radar/radar.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitValidation = 3;

struct Failure {
  int code;
};

int exit_code(radar_status status) {
  switch (status) {
    case RADAR_OK: return kExitOk;
    case RADAR_ERR_INVALID_ARGUMENT: return kExitUsage;
    case RADAR_ERR_PARSE:
    case RADAR_ERR_RANGE:
    case RADAR_ERR_VALIDATION:
    case RADAR_ERR_SCENARIO: return kExitValidation;
    default: return kExitRuntime;
  }
}

void check(radar_status status, const std::string& context = {}) {
  if (status == RADAR_OK) return;
  std::cerr << "radar: " << (context.empty() ? "" : context + ": ") << radar_status_name(status) << ": "
            << radar_last_error() << "\n";
  throw Failure{exit_code(status)};
}

// Owns a string handed out by the library.
struct Text {
  char* p = nullptr;
  ~Text() { radar_string_free(p); }
  char** out() { return &p; }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
  T** out() { return &p; }
};

using Topology = Handle<radar_topology, radar_topology_free>;
using Transport = Handle<radar_transport, radar_transport_free>;
using Destinations = Handle<radar_destinations, radar_destinations_free>;
using Dataset = Handle<radar_dataset, radar_dataset_free>;

void emit(const char* text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::fputs(text, stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "radar: cannot write " << path << "\n";
    throw Failure{kExitRuntime};
  }
}

struct MeasureFlags {
  std::string destinations;
  std::string transport;
  double send_interval = 0.005;
  double timeout = 2.0;
  int max_ttl = 30;
  double inter_round = 600.0;
  double inter_probe = 0.005;
  bool greedy_send = false;
  bool greedy_receive = false;
  bool no_restart = false;
  std::string monitor_id = "monitor";
  std::string out;

  void add(CLI::App* app, bool with_rounds_delay) {
    app->add_option("--destinations", destinations, "destination list, one address per line")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--transport", transport, "sim:<topology.json> or icmp")->required();
    app->add_option("--timeout", timeout, "probe timeout in seconds")->capture_default_str();
    app->add_option("--max-ttl", max_ttl, "largest ttl probed")->capture_default_str()->check(CLI::Range(1, 64));
    app->add_option("--send-interval", send_interval, "transport rate cap, seconds between probes")
        ->capture_default_str();
    app->add_option("--inter-probe", inter_probe, "pause between two sends of the probe loop")->capture_default_str();
    app->add_flag("--greedy-send", greedy_send, "send every queued probe per loop turn");
    app->add_flag("--greedy-receive", greedy_receive, "handle every pending answer per loop turn");
    app->add_option("--monitor-id", monitor_id, "name recorded in the dataset")->capture_default_str();
    if (with_rounds_delay) {
      app->add_option("--inter-round", inter_round, "seconds between round starts")->capture_default_str();
    }
  }

  radar_measure_options options() const {
    radar_measure_options o;
    radar_measure_options_init(&o);
    o.max_ttl = max_ttl;
    o.timeout = timeout;
    o.inter_probe_delay = inter_probe;
    o.greedy_send = greedy_send;
    o.greedy_receive = greedy_receive;
    o.inter_round_delay = inter_round;
    o.restart_within_round = !no_restart;
    o.monitor_id = monitor_id.c_str();
    return o;
  }

  void open(Topology& topology, Transport& t, Destinations& d) const {
    check(radar_destinations_load_file(destinations.c_str(), d.out()), destinations);
    if (transport.rfind("sim:", 0) == 0) {
      std::string path = transport.substr(4);
      check(radar_topology_load_file(path.c_str(), topology.out()), path);
      check(radar_transport_open_sim(topology.p, send_interval, t.out()));
    } else if (transport == "icmp") {
      radar_status s = radar_transport_open_icmp(send_interval, t.out());
      if (s != RADAR_OK) {
        std::cerr << "radar: hint: raw ICMP sockets need root or CAP_NET_RAW "
                     "(setcap cap_net_raw+ep <binary>)\n";
      }
      check(s, "icmp");
    } else {
      std::cerr << "radar: --transport must be sim:<topology.json> or icmp\n";
      throw Failure{kExitUsage};
    }
  }
};

struct SeriesFlags {
  std::string series = "counts";
  int window = 10;
  bool blocked = false;

  void add(CLI::App* app) {
    app->add_option("--series", series, "counts or window")
        ->capture_default_str()
        ->check(CLI::IsMember({"counts", "window"}));
    app->add_option("--window", window, "window length in rounds")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_flag("--blocked", blocked, "disjoint blocks instead of a sliding window");
  }
  radar_series_spec spec() const { return {series == "counts" ? 0 : window, blocked ? 1 : 0}; }
};

void on_interrupt(int) { radar_request_stop(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ego-centered internet topology radar"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  // run
  MeasureFlags run_flags;
  long rounds = -1;
  auto* run = app.add_subcommand("run", "periodic tracetree rounds written to a dataset file");
  run_flags.add(run, true);
  run->add_option("--rounds", rounds, "number of rounds (default: until interrupted)");
  run->add_flag("--no-restart", run_flags.no_restart, "do not restart under-estimated destinations within the round");
  run->add_option("--out", run_flags.out, "dataset file")->required();

  // tracetree once
  MeasureFlags tt_flags;
  auto* tracetree = app.add_subcommand("tracetree", "single tracetree measurement");
  tracetree->require_subcommand(1);
  auto* tt_once = tracetree->add_subcommand("once", "one round");
  tt_flags.add(tt_once, false);
  tt_once->add_flag("--no-restart", tt_flags.no_restart, "do not restart under-estimated destinations");
  tt_once->add_option("--out", tt_flags.out, "dataset file (default: stdout)");

  // traceroute once
  MeasureFlags tr_flags;
  long tr_rounds = 1;
  auto* traceroute = app.add_subcommand("traceroute", "classic traceroute baseline");
  traceroute->require_subcommand(1);
  auto* tr_once = traceroute->add_subcommand("once", "forward traceroute toward every destination");
  tr_flags.add(tr_once, true);
  tr_once->add_option("--rounds", tr_rounds, "repeat the measurement")->capture_default_str()->check(CLI::PositiveNumber);
  tr_once->add_option("--out", tr_flags.out, "dataset file (default: stdout)");

  // simulate
  std::string sim_topology, sim_probes, sim_path, sim_out;
  double sim_at = 0.0;
  auto* simulate = app.add_subcommand("simulate", "replay probes or routes against a simulated topology");
  simulate->add_option("--topology", sim_topology, "topology JSON")->required()->check(CLI::ExistingFile);
  auto* probes_opt = simulate->add_option("--probes,--scenario", sim_probes, "file of '<destination> <ttl> [<time>]' lines")
                         ->check(CLI::ExistingFile);
  auto* path_opt = simulate->add_option("--path", sim_path, "print the routing path toward this destination");
  simulate->add_option("--at", sim_at, "simulation time for --path (events up to it are applied)");
  simulate->add_option("--out", sim_out, "output file (default: stdout)");
  probes_opt->excludes(path_opt);

  // analyze
  std::string in, out_path, ref, obs, subset_file, direction = "up";
  double k = 5.0;
  long bin = 1, event_round = 0, before = 100;
  bool dot = false, sizes = false;
  SeriesFlags series_flags;
  int window_only = 10;
  bool window_blocked = false;
  auto* analyze = app.add_subcommand("analyze", "analyses of a dataset file");
  analyze->require_subcommand(1);
  auto in_out = [&](CLI::App* c) {
    c->add_option("--in", in, "dataset file")->required()->check(CLI::ExistingFile);
    c->add_option("--out", out_path, "output file (default: stdout)");
  };
  auto* counts = analyze->add_subcommand("counts", "distinct addresses per round");
  in_out(counts);
  auto* window = analyze->add_subcommand("window", "distinct addresses per window of rounds");
  in_out(window);
  window->add_option("--window", window_only, "window length in rounds")->capture_default_str()->check(CLI::PositiveNumber);
  window->add_flag("--blocked", window_blocked, "disjoint blocks instead of a sliding window");
  auto* peaks = analyze->add_subcommand("peaks", "median/MAD outliers of a series");
  in_out(peaks);
  series_flags.add(peaks);
  peaks->add_option("--direction", direction, "up or down")->capture_default_str()->check(CLI::IsMember({"up", "down"}));
  peaks->add_option("--k", k, "threshold in MADs")->capture_default_str();
  SeriesFlags dist_series;
  auto* distribution = analyze->add_subcommand("distribution", "histogram of series values");
  in_out(distribution);
  dist_series.add(distribution);
  distribution->add_option("--bin", bin, "bin width")->capture_default_str()->check(CLI::PositiveNumber);
  auto* components = analyze->add_subcommand("components", "connected components of new addresses");
  in_out(components);
  components->add_option("--ref", ref, "reference rounds a:b (half-open)")->required();
  components->add_option("--obs", obs, "observation rounds a:b (half-open)")->required();
  auto* dot_opt = components->add_flag("--dot", dot, "DOT drawing of the components and their neighbours");
  components->add_flag("--sizes", sizes, "histogram of component sizes")->excludes(dot_opt);
  auto* event = analyze->add_subcommand("event-graph", "edges new after an event");
  in_out(event);
  event->add_option("--event", event_round, "round right after the event")->required();
  event->add_option("--before", before, "rounds merged before the event")->capture_default_str();
  event->add_flag("--dot", dot, "DOT output with new edges in bold");
  auto* correlate = analyze->add_subcommand("correlate", "component size against discovery time");
  in_out(correlate);
  correlate->add_option("--ref", ref, "reference rounds a:b (half-open)")->required();
  correlate->add_option("--obs", obs, "observation rounds a:b (half-open)")->required();
  auto* subset = analyze->add_subcommand("subset", "dataset restricted to a destination subset");
  in_out(subset);
  subset->add_option("--destinations", subset_file, "subset destination list")->required()->check(CLI::ExistingFile);

  // compare
  std::string what = "curves";
  auto* compare = app.add_subcommand("compare", "traceroute rounds against the tracetree simulated from them");
  in_out(compare);
  compare->add_option("--what", what, "curves or loads")->capture_default_str()->check(CLI::IsMember({"curves", "loads"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed()) {
      Topology topo;
      Transport t;
      Destinations d;
      run_flags.open(topo, t, d);
      auto o = run_flags.options();
      o.rounds = rounds;
      std::signal(SIGINT, on_interrupt);
      std::signal(SIGTERM, on_interrupt);
      check(radar_run(t.p, d.p, &o, run_flags.out.c_str(), nullptr), "run");
    } else if (tt_once->parsed()) {
      Topology topo;
      Transport t;
      Destinations d;
      tt_flags.open(topo, t, d);
      auto o = tt_flags.options();
      Text text;
      check(radar_tracetree_once(t.p, d.p, &o, text.out()), "tracetree");
      emit(text.p, tt_flags.out);
    } else if (tr_once->parsed()) {
      Topology topo;
      Transport t;
      Destinations d;
      tr_flags.open(topo, t, d);
      auto o = tr_flags.options();
      o.rounds = tr_rounds;
      Text text;
      check(radar_traceroute_once(t.p, d.p, &o, text.out()), "traceroute");
      emit(text.p, tr_flags.out);
    } else if (simulate->parsed()) {
      Topology topo;
      check(radar_topology_load_file(sim_topology.c_str(), topo.out()), sim_topology);
      Text text;
      if (!sim_path.empty()) {
        check(radar_simulate_path(topo.p, sim_path.c_str(), sim_at, text.out()), "simulate");
      } else if (!sim_probes.empty()) {
        std::ifstream f(sim_probes);
        std::string probes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
        check(radar_simulate_probes(topo.p, probes.c_str(), text.out()), "simulate");
      } else {
        std::cerr << "radar: simulate needs --probes or --path\n" << simulate->help();
        return kExitUsage;
      }
      emit(text.p, sim_out);
    } else if (compare->parsed()) {
      Dataset ds;
      check(radar_dataset_load_file(in.c_str(), ds.out()), in);
      Text text;
      check(radar_compare(ds.p, what.c_str(), text.out()), "compare");
      emit(text.p, out_path);
    } else if (analyze->parsed()) {
      Dataset ds;
      check(radar_dataset_load_file(in.c_str(), ds.out()), in);
      Text text;
      if (counts->parsed()) {
        check(radar_analyze_counts(ds.p, text.out()));
      } else if (window->parsed()) {
        check(radar_analyze_window(ds.p, window_only, window_blocked, text.out()));
      } else if (peaks->parsed()) {
        check(radar_analyze_peaks(ds.p, series_flags.spec(), direction == "up" ? 1 : -1, k, text.out()));
      } else if (distribution->parsed()) {
        check(radar_analyze_distribution(ds.p, dist_series.spec(), bin, text.out()));
      } else if (components->parsed()) {
        if (sizes) {
          check(radar_analyze_component_sizes(ds.p, ref.c_str(), obs.c_str(), text.out()));
        } else {
          check(radar_analyze_components(ds.p, ref.c_str(), obs.c_str(), dot, text.out()));
        }
      } else if (event->parsed()) {
        check(radar_analyze_event_graph(ds.p, event_round, before, dot, text.out()));
      } else if (correlate->parsed()) {
        check(radar_analyze_correlate(ds.p, ref.c_str(), obs.c_str(), text.out()));
      } else if (subset->parsed()) {
        Destinations d;
        check(radar_destinations_load_file(subset_file.c_str(), d.out()), subset_file);
        Dataset reduced;
        check(radar_dataset_subset(ds.p, d.p, reduced.out()), "subset");
        check(radar_dataset_serialize(reduced.p, text.out()));
      }
      emit(text.p, out_path);
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kExitOk;
}
