#include "core/tracetree.hpp"

#include <set>
#include <utility>

#include "core/error.hpp"

namespace radar {

void TracetreeConfig::validate() const {
  if (max_ttl < 1 || max_ttl > kMaxTtlLimit) throw InvalidArgument("max_ttl must lie in [1, 64]");
  if (!(timeout > 0.0)) throw InvalidArgument("timeout must be > 0");
  if (inter_probe_delay < 0.0) throw InvalidArgument("inter-probe delay must be >= 0");
  if (restart_ttl && (*restart_ttl < 1 || *restart_ttl > max_ttl)) {
    throw InvalidArgument("restart ttl must lie in [1, max_ttl]");
  }
}

namespace {

class TracetreeHandler final : public ProbeHandler {
 public:
  TracetreeHandler(const std::vector<DestinationTask>& tasks, const TracetreeConfig& config,
                   const RecordSink& sink, TracetreeResult& result)
      : config_(config), sink_(sink), result_(result) {
    for (const auto& task : tasks) {
      assumed_.emplace(task.destination, task.assumed_distance);
      result_.observed_distances.emplace(task.destination, std::nullopt);
    }
  }

  void on_answer(const ProbeTarget& target, const TransportReply& reply, ProbeQueue& to_probe) override {
    Hop source{reply.source};
    emit({source, target.ttl, target.destination});
    bool from_destination = reply.kind == ReplyKind::EchoReply && reply.source == target.destination;
    if (from_destination) {
      auto& observed = result_.observed_distances[target.destination];
      if (!observed || target.ttl < *observed) observed = target.ttl;
    }
    if (seen_.emplace(reply.source, target.ttl).second && target.ttl > 1) {
      to_probe.push_back({target.destination, target.ttl - 1});
    }
    maybe_restart(target, from_destination, to_probe);
  }

  void on_timeout(const ProbeTarget& target, ProbeQueue& to_probe) override {
    emit({Hop::star(), target.ttl, target.destination});
    if (target.ttl > 1) to_probe.push_back({target.destination, target.ttl - 1});
    maybe_restart(target, false, to_probe);
  }

 private:
  void emit(const ProbeRecord& record) {
    records_.push_back(record);
    if (sink_) sink_(record);
  }

  // Under-estimated distance: the destination did not answer its first probe.
  void maybe_restart(const ProbeTarget& target, bool from_destination, ProbeQueue& to_probe) {
    if (from_destination || !config_.restart_ttl) return;
    auto it = assumed_.find(target.destination);
    if (it == assumed_.end() || it->second != target.ttl) return;
    if (*config_.restart_ttl <= target.ttl) return;
    ++result_.stats.restarts;
    to_probe.push_back({target.destination, *config_.restart_ttl});
  }

 public:
  std::vector<ProbeRecord> records_;

 private:
  const TracetreeConfig& config_;
  const RecordSink& sink_;
  TracetreeResult& result_;
  std::map<Ipv4, int> assumed_;
  std::set<std::pair<Ipv4, int>> seen_;
};

}  // namespace

TracetreeResult tracetree(const std::vector<DestinationTask>& tasks, Transport& transport,
                          const TracetreeConfig& config, const RecordSink& sink) {
  config.validate();
  if (tasks.empty()) throw InvalidArgument("tracetree needs at least one destination");
  std::set<Ipv4> distinct;
  ProbeQueue to_probe;
  for (const auto& task : tasks) {
    if (!distinct.insert(task.destination).second) {
      throw InvalidArgument("destination " + task.destination.str() + " listed twice");
    }
    if (task.assumed_distance < 1 || task.assumed_distance > config.max_ttl) {
      throw InvalidArgument("assumed distance of " + task.destination.str() + " outside [1, max_ttl]");
    }
    to_probe.push_back({task.destination, task.assumed_distance});
  }

  TracetreeResult result;
  TracetreeHandler handler(tasks, config, sink, result);
  ProbeLoopConfig loop{config.timeout, config.inter_probe_delay, config.send_strategy, config.receive_strategy};
  auto stats = run_probe_loop(transport, loop, std::move(to_probe), handler);

  result.raw = build_raw_tree(std::move(handler.records_));
  result.stats.probes_sent = static_cast<long>(stats.probes_sent);
  result.stats.late_replies = static_cast<long>(stats.late_replies);
  result.stats.duplicates_dropped = static_cast<long>(stats.duplicates_dropped);
  result.stats.start_time = stats.start_time;
  result.stats.end_time = stats.end_time;
  result.incomplete = stats.incomplete;
  result.fault = stats.fault;
  return result;
}

}  // namespace radar
