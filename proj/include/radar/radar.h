#ifndef RADAR_RADAR_H
#define RADAR_RADAR_H

/*
 * C interface to the radar measurement library.
 *
 * Every fallible call returns a radar_status; on failure the message is
 * available from radar_last_error() on the same thread until the next call.
 * Strings returned through char** are owned by the caller and released with
 * radar_string_free(). Handles are released with their *_free function;
 * passing NULL to a *_free function is a no-op.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define RADAR_API __declspec(dllexport)
#else
#define RADAR_API __attribute__((visibility("default")))
#endif

typedef enum radar_status {
  RADAR_OK = 0,
  RADAR_ERR_INVALID_ARGUMENT = 1,
  RADAR_ERR_PARSE = 2,
  RADAR_ERR_RANGE = 3,
  RADAR_ERR_VALIDATION = 4,
  RADAR_ERR_SCENARIO = 5,
  RADAR_ERR_TRANSPORT = 6,
  RADAR_ERR_IO = 7,
  RADAR_ERR_INTERNAL = 8
} radar_status;

RADAR_API const char* radar_last_error(void);
RADAR_API const char* radar_status_name(radar_status status);
RADAR_API void radar_string_free(char* text);

/* Asks a running radar_run to stop after the current round. Safe to call from a signal handler. */
RADAR_API void radar_request_stop(void);

typedef struct radar_dataset radar_dataset;

/* ---- simulated topologies ---- */

typedef struct radar_topology radar_topology;

RADAR_API radar_status radar_topology_load_file(const char* path, radar_topology** out);
RADAR_API radar_status radar_topology_load_json(const char* json, radar_topology** out);
RADAR_API void radar_topology_free(radar_topology* topology);

/* ---- transports ---- */

typedef struct radar_transport radar_transport;

/* send_interval: minimum spacing between probes in seconds (0.005 = 200 probes/s). */
RADAR_API radar_status radar_transport_open_sim(const radar_topology* topology, double send_interval,
                                                radar_transport** out);
/* Raw-socket ICMP; needs CAP_NET_RAW. */
RADAR_API radar_status radar_transport_open_icmp(double send_interval, radar_transport** out);
RADAR_API radar_status radar_transport_now(const radar_transport* transport, double* out);
RADAR_API void radar_transport_free(radar_transport* transport);

/* ---- destination lists ---- */

typedef struct radar_destinations radar_destinations;

RADAR_API radar_status radar_destinations_load_file(const char* path, radar_destinations** out);
RADAR_API radar_status radar_destinations_parse(const char* text, radar_destinations** out);
RADAR_API size_t radar_destinations_count(const radar_destinations* destinations);
RADAR_API void radar_destinations_free(radar_destinations* destinations);

/* ---- measurements ---- */

typedef struct radar_measure_options {
  int max_ttl;              /* default 30 */
  double timeout;           /* seconds, default 2 */
  double inter_probe_delay; /* seconds, default 0.005 */
  int greedy_send;          /* 0: one probe per loop turn */
  int greedy_receive;       /* 0: one answer per loop turn */
  long rounds;              /* default 1; negative: until radar_request_stop() */
  double inter_round_delay; /* seconds between round starts, default 600 */
  int restart_within_round; /* default 1 */
  const char* monitor_id;   /* default "monitor" */
} radar_measure_options;

RADAR_API void radar_measure_options_init(radar_measure_options* options);

/* Periodic tracetree rounds written to out_path as they complete. When
 * dataset is not NULL it receives the measured dataset. */
RADAR_API radar_status radar_run(radar_transport* transport, const radar_destinations* destinations,
                                 const radar_measure_options* options, const char* out_path,
                                 radar_dataset** dataset);

/* One tracetree round; *out receives a dataset text holding that round. */
RADAR_API radar_status radar_tracetree_once(radar_transport* transport, const radar_destinations* destinations,
                                            const radar_measure_options* options, char** out);

/* options->rounds forward traceroute rounds, spaced by inter_round_delay;
 * *out receives a dataset text with one block per round. */
RADAR_API radar_status radar_traceroute_once(radar_transport* transport, const radar_destinations* destinations,
                                             const radar_measure_options* options, char** out);

/* Replays probe lines "<destination> <ttl> [<time>]" against a fresh
 * simulation of the topology; one outcome line per probe:
 * "<time> <destination> <ttl> <kind> <source|*> <hops> <rtt>". */
RADAR_API radar_status radar_simulate_probes(const radar_topology* topology, const char* probes, char** out);

/* Current routing path toward a destination, one address per line. */
RADAR_API radar_status radar_simulate_path(const radar_topology* topology, const char* destination, double at_time,
                                           char** out);

/* ---- datasets ---- */

RADAR_API radar_status radar_dataset_load_file(const char* path, radar_dataset** out);
RADAR_API radar_status radar_dataset_parse(const char* text, radar_dataset** out);
RADAR_API radar_status radar_dataset_serialize(const radar_dataset* dataset, char** out);
RADAR_API radar_status radar_dataset_write_file(const radar_dataset* dataset, const char* path);
RADAR_API size_t radar_dataset_round_count(const radar_dataset* dataset);
/* Distinct addresses in the filtered tree of the i-th stored round. */
RADAR_API radar_status radar_dataset_round_addresses(const radar_dataset* dataset, size_t i, size_t* out);
RADAR_API void radar_dataset_free(radar_dataset* dataset);

/* Keeps only nodes on paths toward the given destinations. */
RADAR_API radar_status radar_dataset_subset(const radar_dataset* dataset, const radar_destinations* subset,
                                            radar_dataset** out);

/* ---- analyses; all return CSV unless a DOT flag is set ---- */

/* window = 0: per-round distinct addresses; window >= 1: windowed counts. */
typedef struct radar_series_spec {
  int window;
  int blocked; /* 0: sliding window */
} radar_series_spec;

RADAR_API radar_status radar_analyze_counts(const radar_dataset* dataset, char** out);
RADAR_API radar_status radar_analyze_window(const radar_dataset* dataset, int window, int blocked, char** out);
/* direction: +1 upward peaks, -1 downward peaks. */
RADAR_API radar_status radar_analyze_peaks(const radar_dataset* dataset, radar_series_spec series, int direction,
                                           double k, char** out);
RADAR_API radar_status radar_analyze_distribution(const radar_dataset* dataset, radar_series_spec series,
                                                  long bin_width, char** out);
/* Ranges are half-open round ranges written "a:b". */
RADAR_API radar_status radar_analyze_components(const radar_dataset* dataset, const char* reference,
                                                const char* observation, int dot, char** out);
RADAR_API radar_status radar_analyze_component_sizes(const radar_dataset* dataset, const char* reference,
                                                     const char* observation, char** out);
RADAR_API radar_status radar_analyze_event_graph(const radar_dataset* dataset, long event_round, long before_window,
                                                 int dot, char** out);
RADAR_API radar_status radar_analyze_correlate(const radar_dataset* dataset, const char* reference,
                                               const char* observation, char** out);

/* Traceroute rounds against the tracetree simulated from them.
 * what = "curves": cumulative distinct addresses per round and per packet;
 * what = "loads": link-load histograms summed over rounds. */
RADAR_API radar_status radar_compare(const radar_dataset* traceroute_rounds, const char* what, char** out);

#ifdef __cplusplus
}
#endif

#endif
