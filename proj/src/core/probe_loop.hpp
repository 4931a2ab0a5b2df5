#pragma once

#include <cstdint>
#include <deque>
#include <string>

#include "core/transport.hpp"

namespace radar {

enum class Strategy { OnePerLoop, Greedy };

struct ProbeLoopConfig {
  double timeout = 2.0;
  double inter_probe_delay = 0.005;
  Strategy send = Strategy::OnePerLoop;
  Strategy receive = Strategy::OnePerLoop;
};

struct ProbeLoopStats {
  std::uint64_t probes_sent = 0;
  std::uint64_t answers = 0;
  std::uint64_t timeouts = 0;
  std::uint64_t late_replies = 0;
  std::uint64_t duplicates_dropped = 0;  // (destination, ttl) queued again
  double start_time = 0.0;
  double end_time = 0.0;
  bool incomplete = false;
  std::string fault;
};

using ProbeQueue = std::deque<ProbeTarget>;

/// What to do with each outcome; handlers push follow-up probes to the queue.
class ProbeHandler {
 public:
  virtual ~ProbeHandler() = default;
  virtual void on_answer(const ProbeTarget& target, const TransportReply& reply, ProbeQueue& to_probe) = 0;
  virtual void on_timeout(const ProbeTarget& target, ProbeQueue& to_probe) = 0;
};

/// Event loop shared by tracetree and traceroute:
///
///   while to_probe not empty or to_receive not empty:
///     send the head of to_probe               (all of it when send is Greedy)
///     handle one received answer              (all of them when receive is Greedy)
///     expire every in-flight probe older than the timeout
///
/// A probe counts as answered when its reply was received before
/// sent_at + timeout by the transport's clock, however late the loop gets to
/// it. Answers to expired probes are counted as late and otherwise ignored.
/// A transport fault ends the loop with `incomplete` set.
ProbeLoopStats run_probe_loop(Transport& transport, const ProbeLoopConfig& config, ProbeQueue to_probe,
                              ProbeHandler& handler);

}  // namespace radar
