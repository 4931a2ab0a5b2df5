#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/filter.hpp"
#include "core/model.hpp"
#include "core/tracetree.hpp"
#include "core/transport.hpp"

namespace radar {

struct RadarConfig {
  std::vector<Ipv4> destinations;
  double inter_round_delay = 600.0;  // start to start
  int default_distance = kDefaultMaxTtl;
  std::optional<long> rounds;  // nullopt: run until cancelled
  TracetreeConfig tracetree;
  /// Restart an under-estimated destination from default_distance within the round.
  bool restart_within_round = true;
  bool retain_raw = true;  // keep raw trees in the returned dataset
  std::string monitor_id = "monitor";
  const std::atomic<bool>* cancel = nullptr;

  void validate() const;
};

/// Last observed distance per destination.
class DistanceCache {
 public:
  std::optional<int> get(Ipv4 destination) const;
  void set(Ipv4 destination, int distance);
  void evict(Ipv4 destination) { distances_.erase(destination); }
  std::size_t size() const { return distances_.size(); }
  const std::map<Ipv4, int>& entries() const { return distances_; }

  bool operator==(const DistanceCache&) const = default;

 private:
  std::map<Ipv4, int> distances_;
};

std::vector<DestinationTask> next_round_tasks(const DistanceCache& cache, const std::vector<Ipv4>& destinations,
                                              int default_distance);

/// Seen destinations take their observed distance; unseen ones are evicted.
DistanceCache update_cache(DistanceCache cache, const std::map<Ipv4, std::optional<int>>& observed);

/// Called once per finished round, in order. The record always carries its raw tree.
using RoundSink = std::function<void(const RoundRecord&)>;

/// Periodic tracetree rounds with distance caching. A transport fault marks
/// the round incomplete and the schedule goes on; cancellation is checked
/// between rounds.
RadarDataset run_radar(const RadarConfig& config, Transport& transport, const RoundSink& sink = {});

/// Dataset parameters as written to the preamble.
std::vector<std::pair<std::string, std::string>> radar_parameters(const RadarConfig& config);

/// One dotted quad per line; blank lines and `#` comments are skipped.
/// Duplicates and malformed lines raise ParseError.
std::vector<Ipv4> parse_destinations(std::string_view text);
std::vector<Ipv4> load_destinations_file(const std::string& path);

}  // namespace radar
