#include "core/probe_loop.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "core/error.hpp"

namespace radar {

ProbeLoopStats run_probe_loop(Transport& transport, const ProbeLoopConfig& config, ProbeQueue to_probe,
                              ProbeHandler& handler) {
  if (!(config.timeout > 0.0)) throw InvalidArgument("timeout must be > 0");
  ProbeLoopStats stats;
  stats.start_time = transport.now();

  // In-flight probes by token id; ids grow with send time, so the map is
  // also ordered by deadline.
  std::map<std::uint64_t, ProbeToken> to_receive;
  std::set<ProbeTarget> issued;
  std::deque<TransportReply> inbox;
  std::unordered_map<std::uint64_t, double> buffered;  // token id -> received_at of a queued reply
  double last_send = 0.0;
  bool has_sent = false;
  const bool greedy_send = config.send == Strategy::Greedy;
  const bool greedy_receive = config.receive == Strategy::Greedy;

  auto send_ready = [&] {
    double t = transport.next_send_time();
    if (has_sent) t = std::max(t, last_send + config.inter_probe_delay);
    return t;
  };
  auto take_in = [&](std::vector<TransportReply> replies) {
    for (auto& r : replies) {
      if (r.late) {
        ++stats.late_replies;
        continue;
      }
      if (!to_receive.contains(r.token.id)) continue;  // not ours
      buffered[r.token.id] = r.received_at;
      inbox.push_back(std::move(r));
    }
  };
  auto time_out = [&](std::map<std::uint64_t, ProbeToken>::iterator it) {
    ProbeToken token = it->second;
    transport.expire(token);
    to_receive.erase(it);
    ++stats.timeouts;
    handler.on_timeout(token.target(), to_probe);
  };

  try {
    while (!to_probe.empty() || !to_receive.empty()) {
      bool progressed = false;

      while (!to_probe.empty()) {
        ProbeTarget target = to_probe.front();
        if (issued.contains(target)) {
          to_probe.pop_front();
          ++stats.duplicates_dropped;
          progressed = true;
          continue;
        }
        double ready = send_ready();
        if (transport.now() < ready) {
          if (!greedy_send) break;
          take_in(transport.poll(ready));
          continue;
        }
        ProbeToken token;
        try {
          token = transport.send(target);
        } catch (const Backpressure& bp) {
          if (!greedy_send) break;
          take_in(transport.poll(bp.retry_at()));
          continue;
        }
        to_probe.pop_front();
        issued.insert(target);
        to_receive.emplace(token.id, token);
        last_send = token.sent_at;
        has_sent = true;
        ++stats.probes_sent;
        progressed = true;
        if (!greedy_send) break;
      }

      take_in(transport.poll(transport.now()));
      while (!inbox.empty()) {
        TransportReply reply = std::move(inbox.front());
        inbox.pop_front();
        buffered.erase(reply.token.id);
        auto it = to_receive.find(reply.token.id);
        if (it == to_receive.end()) {
          ++stats.late_replies;  // expired while it sat in the inbox
          continue;
        }
        progressed = true;
        if (reply.received_at > it->second.sent_at + config.timeout) {
          ++stats.late_replies;
          time_out(it);
        } else {
          to_receive.erase(it);
          ++stats.answers;
          handler.on_answer(reply.token.target(), reply, to_probe);
        }
        if (!greedy_receive) break;
      }

      double now = transport.now();
      for (auto it = to_receive.begin(); it != to_receive.end();) {
        double deadline = it->second.sent_at + config.timeout;
        if (now < deadline) break;
        auto b = buffered.find(it->first);
        if (b != buffered.end() && b->second <= deadline) {
          ++it;
          continue;
        }
        auto next = std::next(it);
        time_out(it);
        it = next;
        progressed = true;
      }

      if (!progressed) {
        double wake = std::numeric_limits<double>::infinity();
        if (!to_probe.empty()) wake = std::min(wake, send_ready());
        if (!to_receive.empty()) wake = std::min(wake, to_receive.begin()->second.sent_at + config.timeout);
        take_in(transport.poll(wake));
      }
    }
  } catch (const TransportError& e) {
    stats.incomplete = true;
    stats.fault = e.what();
  }
  stats.end_time = transport.now();
  return stats;
}

}  // namespace radar
