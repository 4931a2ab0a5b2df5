#include "core/analytics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "core/error.hpp"

namespace radar {
namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
};

std::vector<const RoundRecord*> rounds_in(const RadarDataset& dataset, RoundRange range) {
  std::vector<const RoundRecord*> out;
  for (const auto& r : dataset.rounds) {
    if (range.contains(r.index)) out.push_back(&r);
  }
  return out;
}

void check_ranges(RoundRange reference, RoundRange observation) {
  if (reference.empty()) throw InvalidArgument("reference range is empty");
  if (observation.empty()) throw InvalidArgument("observation range is empty");
  if (reference.end > observation.begin) throw InvalidArgument("reference range must end before the observation range");
}

// Observation addresses not in the reference, with the round of their first sighting.
std::map<Ipv4, long> first_sightings(const RadarDataset& dataset, RoundRange reference, RoundRange observation) {
  check_ranges(reference, observation);
  auto ref_rounds = rounds_in(dataset, reference);
  if (ref_rounds.empty()) throw InvalidArgument("no round of the dataset falls in the reference range");
  std::set<Ipv4> old;
  for (const auto* r : ref_rounds) {
    auto a = r->tree.addresses();
    old.insert(a.begin(), a.end());
  }
  std::map<Ipv4, long> first;
  for (const auto* r : rounds_in(dataset, observation)) {
    for (Ipv4 a : r->tree.addresses()) {
      if (!old.contains(a)) first.try_emplace(a, r->index);
    }
  }
  return first;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

RoundRange RoundRange::parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) throw InvalidArgument("round range must look like a:b");
  auto number = [&](std::string_view s) {
    long v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || end != s.data() + s.size() || v < 0) {
      throw InvalidArgument("bad round index '" + std::string(s) + "'");
    }
    return v;
  };
  RoundRange r{number(text.substr(0, colon)), number(text.substr(colon + 1))};
  if (r.empty()) throw InvalidArgument("round range " + std::string(text) + " is empty");
  return r;
}

Series per_round_ip_count(const RadarDataset& dataset) {
  Series out;
  for (const auto& r : dataset.rounds) out.push_back({r.index, static_cast<long>(r.tree.addresses().size())});
  return out;
}

Series windowed_ip_count(const RadarDataset& dataset, int w, WindowMode mode) {
  if (w < 1) throw InvalidArgument("window must be >= 1");
  const auto& rounds = dataset.rounds;
  auto width = static_cast<std::size_t>(w);
  Series out;
  if (mode == WindowMode::Blocked) {
    for (std::size_t start = 0; start + width <= rounds.size(); start += width) {
      std::set<Ipv4> seen;
      for (std::size_t i = start; i < start + width; ++i) {
        auto a = rounds[i].tree.addresses();
        seen.insert(a.begin(), a.end());
      }
      out.push_back({rounds[start + width - 1].index, static_cast<long>(seen.size())});
    }
    return out;
  }
  // Sliding: multiplicity counts over the window.
  std::map<Ipv4, int> in_window;
  std::vector<std::vector<Ipv4>> cached;
  cached.reserve(rounds.size());
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    cached.push_back(rounds[i].tree.addresses());
    for (Ipv4 a : cached[i]) ++in_window[a];
    if (i >= width) {
      for (Ipv4 a : cached[i - width]) {
        if (--in_window[a] == 0) in_window.erase(a);
      }
    }
    if (i + 1 >= width) out.push_back({rounds[i].index, static_cast<long>(in_window.size())});
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of an empty list");
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

PeakReport detect_peaks(const Series& series, Direction direction, double k) {
  if (series.size() < 10) throw InvalidArgument("peak detection needs at least 10 points");
  if (!(k > 0.0)) throw InvalidArgument("sensitivity must be > 0");
  std::vector<double> x;
  for (const auto& p : series) x.push_back(static_cast<double>(p.value));
  PeakReport report;
  report.median = median(x);
  std::vector<double> deviations;
  for (double v : x) deviations.push_back(std::abs(v - report.median));
  report.mad = median(deviations);
  report.degenerate = report.mad == 0.0;
  double threshold = k * report.mad;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double signed_dev = direction == Direction::Up ? x[i] - report.median : report.median - x[i];
    if (signed_dev > threshold) report.rounds.push_back(series[i].round);
  }
  return report;
}

Histogram value_distribution(const Series& series, long bin_width) {
  if (bin_width < 1) throw InvalidArgument("bin width must be >= 1");
  Histogram h;
  for (const auto& p : series) {
    long bin = p.value >= 0 ? p.value / bin_width * bin_width : -((-p.value + bin_width - 1) / bin_width) * bin_width;
    ++h[bin];
  }
  return h;
}

std::set<Ipv4> new_addresses(const RadarDataset& dataset, RoundRange reference, RoundRange observation) {
  std::set<Ipv4> out;
  for (const auto& [a, round] : first_sightings(dataset, reference, observation)) out.insert(a);
  return out;
}

std::vector<NewAddressComponent> new_address_components(const RadarDataset& dataset, RoundRange reference,
                                                        RoundRange observation) {
  auto first = first_sightings(dataset, reference, observation);
  std::vector<Ipv4> members;
  std::map<Ipv4, std::size_t> slot;
  for (const auto& [a, round] : first) {
    slot.emplace(a, members.size());
    members.push_back(a);
  }
  UnionFind uf(members.size());
  for (const auto* r : rounds_in(dataset, observation)) {
    for (const auto& [a, b] : r->tree.address_edges()) {
      auto ia = slot.find(a);
      auto ib = slot.find(b);
      if (ia != slot.end() && ib != slot.end()) uf.unite(ia->second, ib->second);
    }
  }
  std::map<std::size_t, NewAddressComponent> by_root;
  for (std::size_t i = 0; i < members.size(); ++i) {
    long seen_at = first.at(members[i]);
    auto [it, fresh] = by_root.try_emplace(uf.find(i));
    auto& c = it->second;
    if (fresh) {
      c.first_round = c.last_round = seen_at;
    } else {
      c.first_round = std::min(c.first_round, seen_at);
      c.last_round = std::max(c.last_round, seen_at);
    }
    c.addresses.insert(members[i]);
  }
  std::vector<NewAddressComponent> out;
  for (auto& [root, c] : by_root) out.push_back(std::move(c));
  std::sort(out.begin(), out.end(), [](const NewAddressComponent& a, const NewAddressComponent& b) {
    if (a.first_round != b.first_round) return a.first_round < b.first_round;
    return *a.addresses.begin() < *b.addresses.begin();
  });
  return out;
}

long discovery_time(const NewAddressComponent& component) {
  if (component.addresses.empty()) throw InvalidArgument("empty component");
  return component.last_round - component.first_round + 1;
}

Histogram component_size_distribution(const std::vector<NewAddressComponent>& components) {
  Histogram h;
  for (const auto& c : components) ++h[static_cast<long>(c.size())];
  return h;
}

std::vector<EventEdge> EventGraph::flagged() const {
  std::vector<EventEdge> out;
  std::copy_if(edges.begin(), edges.end(), std::back_inserter(out), [](const EventEdge& e) { return e.is_new; });
  return out;
}

EventGraph event_graph(const RadarDataset& dataset, long event_round, long before_window) {
  if (before_window < 1) throw InvalidArgument("the before window must hold at least one round");
  if (event_round < before_window) throw InvalidArgument("event round must be >= the before window");
  const RoundRecord* event = dataset.find_round(event_round);
  if (!event) throw InvalidArgument("round " + std::to_string(event_round) + " is not in the dataset");
  long window_start = event_round - before_window;
  if (dataset.rounds.empty() || window_start < dataset.rounds.front().index) {
    throw InvalidArgument("before window starts before the first round of the dataset");
  }

  EventGraph graph;
  graph.event_round = event_round;
  std::set<std::pair<Ipv4, Ipv4>> before;
  for (const auto* r : rounds_in(dataset, {window_start, event_round})) {
    for (const auto& e : r->tree.address_edges()) before.insert(e);
  }
  std::map<std::pair<Ipv4, Ipv4>, bool> all;
  for (const auto& e : before) all.emplace(e, false);
  for (const auto& e : event->tree.address_edges()) {
    if (!before.contains(e)) all[e] = true;
  }
  for (const auto& [e, is_new] : all) {
    graph.nodes.insert(e.first);
    graph.nodes.insert(e.second);
    graph.edges.push_back({e.first, e.second, is_new});
  }
  return graph;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("correlation needs two equal series of length >= 2");
  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  double n = static_cast<double>(x.size());
  double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

Correlation size_vs_discovery_correlation(const std::vector<NewAddressComponent>& components) {
  if (components.size() < 2) throw InvalidArgument("correlation needs at least 2 components");
  Correlation c;
  std::vector<double> sizes, times;
  for (const auto& comp : components) {
    long size = static_cast<long>(comp.size());
    long time = discovery_time(comp);
    c.pairs.emplace_back(size, time);
    sizes.push_back(static_cast<double>(size));
    times.push_back(static_cast<double>(time));
  }
  c.spearman = spearman(sizes, times);
  return c;
}

std::string series_csv(const Series& series, const std::string& value_name) {
  CsvTable t({"round", value_name});
  for (const auto& p : series) t.row(p.round, p.value);
  return t.str();
}

std::string peaks_csv(const Series& series, const PeakReport& report) {
  std::set<long> flagged(report.rounds.begin(), report.rounds.end());
  CsvTable t({"round", "value", "flagged"});
  for (const auto& p : series) t.row(p.round, p.value, flagged.contains(p.round) ? 1 : 0);
  return t.str();
}

std::string components_csv(const std::vector<NewAddressComponent>& components) {
  CsvTable t({"component", "size", "first_round", "last_round", "discovery_time", "addresses"});
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& c = components[i];
    std::string addresses;
    for (Ipv4 a : c.addresses) addresses += (addresses.empty() ? "" : " ") + a.str();
    t.row(i, c.size(), c.first_round, c.last_round, discovery_time(c), addresses);
  }
  return t.str();
}

std::string correlation_csv(const Correlation& correlation) {
  CsvTable t({"size", "discovery_time"});
  for (const auto& [size, time] : correlation.pairs) t.row(size, time);
  return t.str() + "# spearman " + format_number(correlation.spearman) + "\n";
}

std::string event_graph_dot(const EventGraph& graph) {
  std::ostringstream out;
  out << "digraph \"event_" << graph.event_round << "\" {\n";
  for (Ipv4 n : graph.nodes) out << "  \"" << n.str() << "\";\n";
  for (const auto& e : graph.edges) {
    out << "  \"" << e.from.str() << "\" -> \"" << e.to.str() << "\"";
    out << (e.is_new ? " [color=black, penwidth=3];\n" : " [color=gray];\n");
  }
  out << "}\n";
  return out.str();
}

std::string components_dot(const RadarDataset& dataset, RoundRange observation,
                           const std::vector<NewAddressComponent>& components) {
  std::set<Ipv4> fresh;
  for (const auto& c : components) fresh.insert(c.addresses.begin(), c.addresses.end());
  std::set<std::pair<Ipv4, Ipv4>> edges;
  for (const auto* r : rounds_in(dataset, observation)) {
    for (const auto& [a, b] : r->tree.address_edges()) {
      if (fresh.contains(a) || fresh.contains(b)) edges.insert(a < b ? std::pair{a, b} : std::pair{b, a});
    }
  }
  std::set<Ipv4> nodes(fresh);
  for (const auto& [a, b] : edges) {
    nodes.insert(a);
    nodes.insert(b);
  }
  std::ostringstream out;
  out << "graph \"new_components\" {\n";
  for (Ipv4 n : nodes) {
    out << "  \"" << n.str() << "\"";
    out << (fresh.contains(n) ? " [style=filled, fillcolor=black, fontcolor=white];\n" : ";\n");
  }
  for (const auto& [a, b] : edges) out << "  \"" << a.str() << "\" -- \"" << b.str() << "\";\n";
  out << "}\n";
  return out.str();
}

}  // namespace radar
