#include "core/radar.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "core/error.hpp"
#include "core/round_log.hpp"

namespace radar {

void RadarConfig::validate() const {
  tracetree.validate();
  if (destinations.empty()) throw InvalidArgument("destination list is empty");
  if (!(inter_round_delay >= 0.0)) throw InvalidArgument("inter-round delay must be >= 0");
  if (default_distance != tracetree.max_ttl) throw InvalidArgument("default distance must equal max_ttl");
  if (rounds && *rounds < 0) throw InvalidArgument("round count must be >= 0");
  std::set<Ipv4> distinct(destinations.begin(), destinations.end());
  if (distinct.size() != destinations.size()) throw InvalidArgument("destination list has duplicates");
}

std::optional<int> DistanceCache::get(Ipv4 destination) const {
  auto it = distances_.find(destination);
  if (it == distances_.end()) return std::nullopt;
  return it->second;
}

void DistanceCache::set(Ipv4 destination, int distance) {
  if (distance < 1 || distance > kMaxTtlLimit) throw RangeError("cached distance outside [1, 64]");
  distances_[destination] = distance;
}

std::vector<DestinationTask> next_round_tasks(const DistanceCache& cache, const std::vector<Ipv4>& destinations,
                                              int default_distance) {
  std::vector<DestinationTask> tasks;
  tasks.reserve(destinations.size());
  for (Ipv4 d : destinations) {
    int distance = cache.get(d).value_or(default_distance);
    tasks.push_back({d, std::min(distance, default_distance)});
  }
  return tasks;
}

DistanceCache update_cache(DistanceCache cache, const std::map<Ipv4, std::optional<int>>& observed) {
  for (const auto& [destination, distance] : observed) {
    if (distance) {
      cache.set(destination, *distance);
    } else {
      cache.evict(destination);
    }
  }
  return cache;
}

std::vector<std::pair<std::string, std::string>> radar_parameters(const RadarConfig& config) {
  auto num = [](double v) {
    std::ostringstream s;
    s << v;
    return s.str();
  };
  return {
      {"max_ttl", std::to_string(config.tracetree.max_ttl)},
      {"timeout", num(config.tracetree.timeout)},
      {"inter_round_delay", num(config.inter_round_delay)},
      {"default_distance", std::to_string(config.default_distance)},
      {"restart_within_round", config.restart_within_round ? "1" : "0"},
  };
}

RadarDataset run_radar(const RadarConfig& config, Transport& transport, const RoundSink& sink) {
  config.validate();
  RadarDataset dataset;
  dataset.monitor_id = config.monitor_id;
  dataset.monitor = transport.monitor_address();
  dataset.parameters = radar_parameters(config);
  dataset.destinations = config.destinations;

  TracetreeConfig tt = config.tracetree;
  if (config.restart_within_round) tt.restart_ttl = config.default_distance;

  DistanceCache cache;
  for (long r = 0; !config.rounds || r < *config.rounds; ++r) {
    if (config.cancel && config.cancel->load()) break;
    double start = transport.now();
    auto tasks = next_round_tasks(cache, config.destinations, config.default_distance);
    TracetreeResult result = tracetree(tasks, transport, tt);
    cache = update_cache(std::move(cache), result.observed_distances);

    RoundRecord round;
    round.index = r;
    round.start_time = start;
    round.end_time = transport.now();
    round.probes_sent = result.stats.probes_sent;
    round.incomplete = result.incomplete;
    round.tree = filter_tree(result.raw, dataset.monitor).tree;
    round.raw = std::move(result.raw);
    if (sink) sink(round);
    if (!config.retain_raw) round.raw.reset();
    dataset.rounds.push_back(std::move(round));

    bool more = !config.rounds || r + 1 < *config.rounds;
    if (more && !(config.cancel && config.cancel->load())) transport.sleep_until(start + config.inter_round_delay);
  }
  return dataset;
}

std::vector<Ipv4> parse_destinations(std::string_view text) {
  std::vector<Ipv4> out;
  std::set<Ipv4> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    if (line.empty()) continue;
    auto ip = Ipv4::parse(line);
    if (!ip) throw ParseError(line_no, "not an IPv4 address: '" + std::string(line) + "'");
    if (!seen.insert(*ip).second) throw ParseError(line_no, "duplicate destination " + ip->str());
    out.push_back(*ip);
  }
  return out;
}

std::vector<Ipv4> load_destinations_file(const std::string& path) {
  return parse_destinations(read_text_file(path));
}

}  // namespace radar
