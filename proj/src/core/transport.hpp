#pragma once

#include <cstdint>
#include <memory>
#include <queue>
#include <unordered_map>
#include <vector>

#include "core/hop.hpp"
#include "core/simnet.hpp"

namespace radar {

struct ProbeTarget {
  Ipv4 destination;
  int ttl = 0;

  bool operator==(const ProbeTarget&) const = default;
  auto operator<=>(const ProbeTarget&) const = default;
};

struct ProbeToken {
  Ipv4 destination;
  int ttl = 0;
  double sent_at = 0.0;
  std::uint64_t id = 0;  // unique per transport instance

  ProbeTarget target() const { return {destination, ttl}; }
  bool operator==(const ProbeToken&) const = default;
};

enum class ReplyKind { TimeExceeded, EchoReply, Unreachable };

struct TransportReply {
  ProbeToken token;
  Ipv4 source;
  ReplyKind kind = ReplyKind::TimeExceeded;
  double received_at = 0.0;
  bool late = false;  // the caller had already expired the token
};

struct TransportStats {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t late = 0;
  std::uint64_t dropped = 0;  // unmatched or duplicate answers
};

/// Probe-sending and reply-receiving contract. Time is expressed in seconds
/// on the transport's own clock (virtual for the simulator, wall clock for
/// the ICMP backend). One logical driver calls send and poll.
class Transport {
 public:
  virtual ~Transport() = default;

  virtual double now() const = 0;
  /// Earliest time the next send() is allowed by the rate cap.
  virtual double next_send_time() const = 0;
  /// Emits one probe and returns immediately. Throws Backpressure when
  /// called before next_send_time(), TransportError when closed or failing.
  virtual ProbeToken send(const ProbeTarget& target) = 0;
  /// Waits until at least one reply is available or `deadline` passes, and
  /// returns every reply available at that moment, matched to its token.
  virtual std::vector<TransportReply> poll(double deadline) = 0;
  /// Marks the token as timed out; a reply that shows up afterwards is
  /// delivered with `late` set.
  virtual void expire(const ProbeToken& token) = 0;
  virtual void sleep_until(double time) = 0;
  virtual void close() = 0;
  virtual bool is_open() const = 0;

  virtual Ipv4 monitor_address() const = 0;
  virtual TransportStats stats() const = 0;
};

/// Bookkeeping shared by backends: which tokens are outstanding or expired.
class TokenLedger {
 public:
  enum class State { Outstanding, Expired };

  void issue(const ProbeToken& token) { tokens_[token.id] = State::Outstanding; }
  void expire(std::uint64_t id) {
    auto it = tokens_.find(id);
    if (it != tokens_.end()) it->second = State::Expired;
  }
  /// Consumes the token. Returns nullopt for unknown or already consumed ids.
  std::optional<State> take(std::uint64_t id) {
    auto it = tokens_.find(id);
    if (it == tokens_.end()) return std::nullopt;
    State s = it->second;
    tokens_.erase(it);
    return s;
  }

 private:
  std::unordered_map<std::uint64_t, State> tokens_;
};

struct SimTransportOptions {
  double send_interval = 0.005;  // global cap: 200 probes per second
  double start_time = 0.0;
};

/// Transport over a SimNetwork. The clock is virtual: it only moves forward
/// inside poll() and sleep_until(). Silence and unreachable outcomes produce
/// no wire reply, so the caller's timeout fires.
class SimTransport final : public Transport {
 public:
  SimTransport(std::shared_ptr<sim::SimNetwork> network, SimTransportOptions options = {});

  double now() const override { return clock_; }
  double next_send_time() const override;
  ProbeToken send(const ProbeTarget& target) override;
  std::vector<TransportReply> poll(double deadline) override;
  void expire(const ProbeToken& token) override;
  void sleep_until(double time) override;
  void close() override { open_ = false; }
  bool is_open() const override { return open_; }

  Ipv4 monitor_address() const override { return network_->monitor_address(); }
  TransportStats stats() const override { return stats_; }

  sim::SimNetwork& network() { return *network_; }
  /// Raw simulator outcome of the most recent send.
  const sim::SimReply& last_outcome() const { return last_outcome_; }

 private:
  struct Pending {
    double arrival;
    std::uint64_t order;
    TransportReply reply;
    bool operator>(const Pending& other) const {
      return arrival != other.arrival ? arrival > other.arrival : order > other.order;
    }
  };

  void advance(double time);
  std::vector<TransportReply> drain_arrived();

  std::shared_ptr<sim::SimNetwork> network_;
  SimTransportOptions options_;
  double clock_;
  double last_send_ = -1.0;
  bool has_sent_ = false;
  bool open_ = true;
  std::uint64_t next_id_ = 1;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> pending_;
  TokenLedger ledger_;
  TransportStats stats_;
  sim::SimReply last_outcome_;
};

}  // namespace radar
