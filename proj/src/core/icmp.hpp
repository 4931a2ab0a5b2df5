#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "core/transport.hpp"

namespace radar::icmp {

// Probe identity travels in the echo request header: the identifier holds a
// 10-bit round nonce and the ttl minus one (6 bits), the sequence number holds
// the destination index. Time-exceeded and unreachable messages quote the
// original IP header plus the first 8 ICMP bytes, so both fields come back.

struct ProbeIds {
  std::uint16_t identifier = 0;
  std::uint16_t sequence = 0;
};

struct ProbeIdentity {
  std::uint16_t nonce = 0;
  int ttl = 0;
  std::uint16_t destination_index = 0;
  bool operator==(const ProbeIdentity&) const = default;
};

ProbeIds encode_probe(const ProbeIdentity& identity);
ProbeIdentity decode_probe(const ProbeIds& ids);

std::uint16_t internet_checksum(std::span<const std::uint8_t> bytes);

/// ICMP echo request (type 8) with a small payload and a valid checksum.
std::vector<std::uint8_t> build_echo_request(const ProbeIds& ids);

struct ParsedReply {
  ReplyKind kind = ReplyKind::TimeExceeded;
  Ipv4 source;               // sender of the ICMP message
  Ipv4 probed_destination;   // destination of the probe it answers
  ProbeIds ids;
};

/// Parses a raw IPv4 datagram carrying ICMP, as read from a raw socket.
/// Returns nullopt for anything that is not an answer to one of our probes
/// (other ICMP types, truncated quotes, foreign echo replies).
std::optional<ParsedReply> parse_reply(std::span<const std::uint8_t> datagram);

/// Real-network backend. Requires CAP_NET_RAW (or root); opening without it
/// throws TransportError.
class IcmpTransport final : public Transport {
 public:
  explicit IcmpTransport(double send_interval = 0.005);
  ~IcmpTransport() override;
  IcmpTransport(const IcmpTransport&) = delete;
  IcmpTransport& operator=(const IcmpTransport&) = delete;

  double now() const override;
  double next_send_time() const override;
  ProbeToken send(const ProbeTarget& target) override;
  std::vector<TransportReply> poll(double deadline) override;
  void expire(const ProbeToken& token) override;
  void sleep_until(double time) override;
  void close() override;
  bool is_open() const override { return fd_ >= 0; }

  Ipv4 monitor_address() const override { return Ipv4{}; }
  TransportStats stats() const override { return stats_; }

 private:
  std::vector<TransportReply> read_available();

  int fd_ = -1;
  double send_interval_;
  double last_send_ = 0.0;
  bool has_sent_ = false;
  std::uint16_t nonce_ = 0;
  std::uint64_t next_id_ = 1;
  std::unordered_map<Ipv4, std::uint16_t> destination_index_;
  // (destination index, ttl) -> token of the in-flight probe
  std::unordered_map<std::uint32_t, ProbeToken> in_flight_;
  TokenLedger ledger_;
  TransportStats stats_;
};

}  // namespace radar::icmp
