#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "core/model.hpp"
#include "core/probe_loop.hpp"
#include "core/transport.hpp"

namespace radar {

struct TracetreeConfig {
  int max_ttl = kDefaultMaxTtl;
  double timeout = 2.0;
  Strategy send_strategy = Strategy::OnePerLoop;
  Strategy receive_strategy = Strategy::OnePerLoop;
  double inter_probe_delay = 0.005;
  /// When set, a destination whose first probe (at its assumed distance) is
  /// not answered by the destination itself gets a second backward chain
  /// started from this ttl within the same measurement.
  std::optional<int> restart_ttl;

  void validate() const;
};

struct DestinationTask {
  Ipv4 destination;
  int assumed_distance = kDefaultMaxTtl;
};

struct TracetreeStats {
  long probes_sent = 0;
  long late_replies = 0;
  long duplicates_dropped = 0;
  long restarts = 0;
  double start_time = 0.0;
  double end_time = 0.0;
  double duration() const { return end_time - start_time; }
};

struct TracetreeResult {
  RawTraceTree raw;
  /// Smallest ttl at which the destination itself answered; nullopt = not seen.
  std::map<Ipv4, std::optional<int>> observed_distances;
  TracetreeStats stats;
  bool incomplete = false;
  std::string fault;
};

using RecordSink = std::function<void(const ProbeRecord&)>;

/// Backward tree probing. Each destination is probed from its assumed
/// distance toward the monitor; a chain stops as soon as it reaches a
/// (source, ttl) pair that an earlier answer already revealed. Stars never
/// stop a chain. Records are streamed to `sink` as they are produced.
TracetreeResult tracetree(const std::vector<DestinationTask>& tasks, Transport& transport,
                          const TracetreeConfig& config, const RecordSink& sink = {});

}  // namespace radar
