#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core/csv.hpp"
#include "core/model.hpp"

namespace radar {

struct SeriesPoint {
  long round = 0;
  long value = 0;
  bool operator==(const SeriesPoint&) const = default;
};
using Series = std::vector<SeriesPoint>;

/// Half-open range of round indices [begin, end).
struct RoundRange {
  long begin = 0;
  long end = 0;

  bool contains(long round) const { return round >= begin && round < end; }
  bool empty() const { return end <= begin; }
  /// "a:b"
  static RoundRange parse(std::string_view text);
  bool operator==(const RoundRange&) const = default;
};

/// Distinct addresses in each round's tree (stars and the monitor excluded).
Series per_round_ip_count(const RadarDataset& dataset);

enum class WindowMode { Sliding, Blocked };

/// Sliding: one value per round from the w-th on, counting the union of the
/// last w rounds. Blocked: one value per full block of w rounds, reported at
/// the block's last round.
Series windowed_ip_count(const RadarDataset& dataset, int w = 10, WindowMode mode = WindowMode::Sliding);

enum class Direction { Up, Down };

struct PeakReport {
  std::vector<long> rounds;
  double median = 0.0;
  double mad = 0.0;
  /// MAD is zero: every point that differs from the median is flagged.
  bool degenerate = false;
};

/// Flags points with |x - median| > k * MAD on the requested side.
/// Needs at least 10 points.
PeakReport detect_peaks(const Series& series, Direction direction, double k = 5.0);

double median(std::vector<double> values);

/// Count of values per bin of `bin_width`, keyed by bin start.
Histogram value_distribution(const Series& series, long bin_width = 1);

/// Addresses seen in some observation round and in no reference round.
std::set<Ipv4> new_addresses(const RadarDataset& dataset, RoundRange reference, RoundRange observation);

struct NewAddressComponent {
  std::set<Ipv4> addresses;
  long first_round = 0;  // first sighting of the earliest member
  long last_round = 0;   // first sighting of the latest member

  std::size_t size() const { return addresses.size(); }
  bool operator==(const NewAddressComponent&) const = default;
};

/// Connected components of new addresses in the undirected union graph of
/// the observation rounds, restricted to new addresses. Ordered by first
/// round, then smallest address.
std::vector<NewAddressComponent> new_address_components(const RadarDataset& dataset, RoundRange reference,
                                                        RoundRange observation);

long discovery_time(const NewAddressComponent& component);

Histogram component_size_distribution(const std::vector<NewAddressComponent>& components);

struct EventEdge {
  Ipv4 from;
  Ipv4 to;
  bool is_new = false;
  bool operator==(const EventEdge&) const = default;
};

struct EventGraph {
  long event_round = 0;
  std::set<Ipv4> nodes;
  std::vector<EventEdge> edges;  // sorted by (from, to)

  std::vector<EventEdge> flagged() const;
};

/// Union of the `before_window` rounds preceding `event_round` and the event
/// round itself; edges of the event round unseen in the window are flagged.
EventGraph event_graph(const RadarDataset& dataset, long event_round, long before_window = 100);

struct Correlation {
  std::vector<std::pair<long, long>> pairs;  // (size, discovery time)
  double spearman = 0.0;
};

/// Spearman rank correlation with average ranks for ties; a constant side gives 0.
double spearman(const std::vector<double>& x, const std::vector<double>& y);
Correlation size_vs_discovery_correlation(const std::vector<NewAddressComponent>& components);

std::string series_csv(const Series& series, const std::string& value_name = "value");
std::string peaks_csv(const Series& series, const PeakReport& report);
std::string components_csv(const std::vector<NewAddressComponent>& components);
std::string correlation_csv(const Correlation& correlation);
std::string event_graph_dot(const EventGraph& graph);
/// New addresses and their direct neighbours in the observation union graph;
/// new nodes are drawn filled black.
std::string components_dot(const RadarDataset& dataset, RoundRange observation,
                           const std::vector<NewAddressComponent>& components);

}  // namespace radar
