#include <algorithm>

#include "core/error.hpp"
#include "core/transport.hpp"

namespace radar {

SimTransport::SimTransport(std::shared_ptr<sim::SimNetwork> network, SimTransportOptions options)
    : network_(std::move(network)), options_(options), clock_(options.start_time) {
  if (!network_) throw InvalidArgument("simulated transport needs a network");
  if (options_.send_interval < 0.0) throw InvalidArgument("send interval must be >= 0");
}

double SimTransport::next_send_time() const {
  return has_sent_ ? std::max(clock_, last_send_ + options_.send_interval) : clock_;
}

ProbeToken SimTransport::send(const ProbeTarget& target) {
  if (!open_) throw TransportError("transport is closed");
  if (has_sent_ && clock_ < last_send_ + options_.send_interval) throw Backpressure(last_send_ + options_.send_interval);
  ProbeToken token{target.destination, target.ttl, clock_, next_id_++};
  last_send_ = clock_;
  has_sent_ = true;
  ledger_.issue(token);
  ++stats_.sent;

  network_->apply_events(clock_);
  last_outcome_ = network_->route_probe(target.destination, target.ttl, clock_);
  ReplyKind kind;
  switch (last_outcome_.kind) {
    case sim::ReplyKind::TimeExceeded: kind = ReplyKind::TimeExceeded; break;
    case sim::ReplyKind::EchoReply: kind = ReplyKind::EchoReply; break;
    default: return token;
  }
  double arrival = clock_ + last_outcome_.rtt;
  pending_.push({arrival, token.id, TransportReply{token, last_outcome_.source, kind, arrival, false}});
  return token;
}

void SimTransport::advance(double time) {
  if (time > clock_) clock_ = time;
}

std::vector<TransportReply> SimTransport::drain_arrived() {
  std::vector<TransportReply> out;
  while (!pending_.empty() && pending_.top().arrival <= clock_) {
    TransportReply reply = pending_.top().reply;
    pending_.pop();
    auto state = ledger_.take(reply.token.id);
    if (!state) {
      ++stats_.dropped;
      continue;
    }
    if (*state == TokenLedger::State::Expired) {
      reply.late = true;
      ++stats_.late;
    }
    ++stats_.delivered;
    out.push_back(reply);
  }
  return out;
}

std::vector<TransportReply> SimTransport::poll(double deadline) {
  if (!open_) throw TransportError("transport is closed");
  auto ready = drain_arrived();
  if (!ready.empty()) return ready;
  if (!pending_.empty() && pending_.top().arrival <= deadline) {
    advance(pending_.top().arrival);
  } else {
    advance(deadline);
  }
  return drain_arrived();
}

void SimTransport::expire(const ProbeToken& token) { ledger_.expire(token.id); }

void SimTransport::sleep_until(double time) { advance(time); }

}  // namespace radar
