#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace radar {

/// An IPv4 address held in host byte order, so that integer comparison is the
/// octet-wise numeric order.
class Ipv4 {
 public:
  constexpr Ipv4() = default;
  constexpr explicit Ipv4(std::uint32_t value) : value_(value) {}
  constexpr Ipv4(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d)
      : value_((std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) | (std::uint32_t{c} << 8) | d) {}

  constexpr std::uint32_t value() const { return value_; }
  std::string str() const;

  /// Strict dotted-quad parse: four decimal octets in [0, 255], no leading
  /// sign or whitespace, no leading zeros beyond a lone "0".
  static std::optional<Ipv4> parse(std::string_view text);

  constexpr auto operator<=>(const Ipv4&) const = default;

 private:
  std::uint32_t value_ = 0;
};

/// One position on a path: a concrete address, or a star when the probe timed out.
class Hop {
 public:
  constexpr Hop() = default;  // star
  constexpr explicit Hop(Ipv4 address) : address_(address), is_star_(false) {}

  static constexpr Hop star() { return Hop{}; }

  constexpr bool is_star() const { return is_star_; }
  constexpr bool is_ip() const { return !is_star_; }
  /// Only meaningful for IP hops.
  constexpr Ipv4 address() const { return address_; }

  std::string str() const;
  static std::optional<Hop> parse(std::string_view text);

  constexpr bool operator==(const Hop& other) const {
    return is_star_ == other.is_star_ && (is_star_ || address_ == other.address_);
  }
  /// Footnote order for BFS neighbour visits: every IP before any star, IPs by
  /// numeric octets, all stars equal.
  std::strong_ordering operator<=>(const Hop& other) const;

 private:
  Ipv4 address_{};
  bool is_star_ = true;
};

// Plain dotted-text order, stars last. The filter orders numerically instead.
std::strong_ordering lexicographic_hop_order(const Hop& a, const Hop& b);

}  // namespace radar

template <>
struct std::hash<radar::Ipv4> {
  std::size_t operator()(const radar::Ipv4& ip) const noexcept {
    return std::hash<std::uint32_t>{}(ip.value());
  }
};
