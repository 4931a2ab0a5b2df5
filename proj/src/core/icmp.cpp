#include "core/icmp.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fcntl.h>
#include <netinet/in.h>
#include <poll.h>
#include <random>
#include <string>
#include <sys/socket.h>
#include <thread>
#include <unistd.h>

#include "core/error.hpp"

namespace radar::icmp {
namespace {

constexpr std::uint8_t kEchoReply = 0;
constexpr std::uint8_t kUnreachable = 3;
constexpr std::uint8_t kEchoRequest = 8;
constexpr std::uint8_t kTimeExceeded = 11;
constexpr std::size_t kPayloadSize = 24;

std::uint16_t read16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

Ipv4 read_ip(std::span<const std::uint8_t> b, std::size_t at) {
  return Ipv4{b[at], b[at + 1], b[at + 2], b[at + 3]};
}

// Returns the IP header length of a well-formed IPv4/ICMP header at `at`, or 0.
std::size_t icmp_header_offset(std::span<const std::uint8_t> b, std::size_t at) {
  if (b.size() < at + 20) return 0;
  if ((b[at] >> 4) != 4) return 0;
  std::size_t ihl = static_cast<std::size_t>(b[at] & 0x0f) * 4;
  if (ihl < 20 || b.size() < at + ihl) return 0;
  if (b[at + 9] != IPPROTO_ICMP) return 0;
  return ihl;
}

std::uint32_t flight_key(std::uint16_t index, int ttl) {
  return (static_cast<std::uint32_t>(index) << 8) | static_cast<std::uint32_t>(ttl);
}

}  // namespace

ProbeIds encode_probe(const ProbeIdentity& identity) {
  ProbeIds ids;
  ids.identifier = static_cast<std::uint16_t>(((identity.nonce & 0x3ffu) << 6) | ((identity.ttl - 1) & 0x3f));
  ids.sequence = identity.destination_index;
  return ids;
}

ProbeIdentity decode_probe(const ProbeIds& ids) {
  return {static_cast<std::uint16_t>(ids.identifier >> 6), (ids.identifier & 0x3f) + 1, ids.sequence};
}

std::uint16_t internet_checksum(std::span<const std::uint8_t> bytes) {
  std::uint32_t sum = 0;
  std::size_t i = 0;
  for (; i + 1 < bytes.size(); i += 2) sum += static_cast<std::uint32_t>((bytes[i] << 8) | bytes[i + 1]);
  if (i < bytes.size()) sum += static_cast<std::uint32_t>(bytes[i] << 8);
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  return static_cast<std::uint16_t>(~sum);
}

std::vector<std::uint8_t> build_echo_request(const ProbeIds& ids) {
  std::vector<std::uint8_t> packet(8 + kPayloadSize, 0);
  packet[0] = kEchoRequest;
  packet[4] = static_cast<std::uint8_t>(ids.identifier >> 8);
  packet[5] = static_cast<std::uint8_t>(ids.identifier & 0xff);
  packet[6] = static_cast<std::uint8_t>(ids.sequence >> 8);
  packet[7] = static_cast<std::uint8_t>(ids.sequence & 0xff);
  for (std::size_t i = 0; i < kPayloadSize; ++i) packet[8 + i] = static_cast<std::uint8_t>('a' + i);
  std::uint16_t sum = internet_checksum(packet);
  packet[2] = static_cast<std::uint8_t>(sum >> 8);
  packet[3] = static_cast<std::uint8_t>(sum & 0xff);
  return packet;
}

std::optional<ParsedReply> parse_reply(std::span<const std::uint8_t> datagram) {
  std::size_t ihl = icmp_header_offset(datagram, 0);
  if (ihl == 0 || datagram.size() < ihl + 8) return std::nullopt;
  std::uint8_t type = datagram[ihl];
  ParsedReply out;
  out.source = read_ip(datagram, 12);

  if (type == kEchoReply) {
    out.kind = ReplyKind::EchoReply;
    out.probed_destination = out.source;
    out.ids = {read16(datagram, ihl + 4), read16(datagram, ihl + 6)};
    return out;
  }
  if (type != kTimeExceeded && type != kUnreachable) return std::nullopt;
  out.kind = type == kTimeExceeded ? ReplyKind::TimeExceeded : ReplyKind::Unreachable;

  std::size_t quoted = ihl + 8;
  std::size_t qihl = icmp_header_offset(datagram, quoted);
  if (qihl == 0 || datagram.size() < quoted + qihl + 8) return std::nullopt;
  if (datagram[quoted + qihl] != kEchoRequest) return std::nullopt;
  out.probed_destination = read_ip(datagram, quoted + 16);
  out.ids = {read16(datagram, quoted + qihl + 4), read16(datagram, quoted + qihl + 6)};
  return out;
}

IcmpTransport::IcmpTransport(double send_interval) : send_interval_(send_interval) {
  fd_ = ::socket(AF_INET, SOCK_RAW, IPPROTO_ICMP);
  if (fd_ < 0) {
    throw TransportError(std::string("cannot open raw ICMP socket (needs CAP_NET_RAW): ") + std::strerror(errno));
  }
  ::fcntl(fd_, F_SETFL, ::fcntl(fd_, F_GETFL) | O_NONBLOCK);
  nonce_ = static_cast<std::uint16_t>(std::random_device{}() & 0x3ffu);
}

IcmpTransport::~IcmpTransport() { close(); }

void IcmpTransport::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

double IcmpTransport::now() const {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

double IcmpTransport::next_send_time() const { return has_sent_ ? last_send_ + send_interval_ : now(); }

ProbeToken IcmpTransport::send(const ProbeTarget& target) {
  if (fd_ < 0) throw TransportError("transport is closed");
  double t = now();
  if (has_sent_ && t < last_send_ + send_interval_) throw Backpressure(last_send_ + send_interval_);
  if (target.ttl < 1 || target.ttl > 64) throw InvalidArgument("ttl outside [1, 64]");

  auto [it, inserted] = destination_index_.try_emplace(target.destination, 0);
  if (inserted) {
    if (destination_index_.size() > 0x10000) throw TransportError("more than 65536 destinations in one session");
    it->second = static_cast<std::uint16_t>(destination_index_.size() - 1);
  }
  ProbeIds ids = encode_probe({nonce_, target.ttl, it->second});
  auto packet = build_echo_request(ids);

  int ttl = target.ttl;
  if (::setsockopt(fd_, IPPROTO_IP, IP_TTL, &ttl, sizeof ttl) != 0) {
    throw TransportError(std::string("setsockopt(IP_TTL): ") + std::strerror(errno));
  }
  sockaddr_in to{};
  to.sin_family = AF_INET;
  to.sin_addr.s_addr = htonl(target.destination.value());
  if (::sendto(fd_, packet.data(), packet.size(), 0, reinterpret_cast<const sockaddr*>(&to), sizeof to) < 0) {
    throw TransportError(std::string("sendto: ") + std::strerror(errno));
  }
  ProbeToken token{target.destination, target.ttl, t, next_id_++};
  last_send_ = t;
  has_sent_ = true;
  ledger_.issue(token);
  in_flight_[flight_key(it->second, target.ttl)] = token;
  ++stats_.sent;
  return token;
}

std::vector<TransportReply> IcmpTransport::read_available() {
  std::vector<TransportReply> out;
  std::uint8_t buf[1500];
  while (true) {
    ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
    if (n < 0) {
      if (errno == EAGAIN || errno == EWOULDBLOCK) break;
      if (errno == EINTR) continue;
      throw TransportError(std::string("recv: ") + std::strerror(errno));
    }
    auto parsed = parse_reply({buf, static_cast<std::size_t>(n)});
    if (!parsed) continue;  // unrelated ICMP traffic
    auto identity = decode_probe(parsed->ids);
    if (identity.nonce != nonce_) continue;
    auto key = flight_key(identity.destination_index, identity.ttl);
    auto flight = in_flight_.find(key);
    if (flight == in_flight_.end() || flight->second.destination != parsed->probed_destination) {
      ++stats_.dropped;
      continue;
    }
    ProbeToken token = flight->second;
    in_flight_.erase(flight);
    auto state = ledger_.take(token.id);
    if (!state) {
      ++stats_.dropped;
      continue;
    }
    TransportReply reply{token, parsed->source, parsed->kind, now(), *state == TokenLedger::State::Expired};
    if (reply.late) ++stats_.late;
    ++stats_.delivered;
    out.push_back(reply);
  }
  return out;
}

std::vector<TransportReply> IcmpTransport::poll(double deadline) {
  if (fd_ < 0) throw TransportError("transport is closed");
  auto ready = read_available();
  while (ready.empty()) {
    double remaining = deadline - now();
    if (remaining <= 0.0) break;
    pollfd p{fd_, POLLIN, 0};
    int rc = ::poll(&p, 1, static_cast<int>(std::ceil(remaining * 1000.0)));
    if (rc < 0 && errno != EINTR) throw TransportError(std::string("poll: ") + std::strerror(errno));
    ready = read_available();
  }
  return ready;
}

void IcmpTransport::expire(const ProbeToken& token) { ledger_.expire(token.id); }

void IcmpTransport::sleep_until(double time) {
  double remaining = time - now();
  if (remaining > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(remaining));
}

}  // namespace radar::icmp
