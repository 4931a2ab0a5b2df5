#include "core/hop.hpp"

#include <array>
#include <charconv>

namespace radar {

std::string Ipv4::str() const {
  std::string out;
  out.reserve(15);
  for (int shift = 24; shift >= 0; shift -= 8) {
    out += std::to_string((value_ >> shift) & 0xffu);
    if (shift != 0) out += '.';
  }
  return out;
}

std::optional<Ipv4> Ipv4::parse(std::string_view text) {
  std::array<std::uint32_t, 4> octets{};
  std::size_t pos = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (i > 0) {
      if (pos >= text.size() || text[pos] != '.') return std::nullopt;
      ++pos;
    }
    std::size_t start = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    std::size_t len = pos - start;
    if (len == 0 || len > 3) return std::nullopt;
    if (len > 1 && text[start] == '0') return std::nullopt;
    std::uint32_t value = 0;
    std::from_chars(text.data() + start, text.data() + pos, value);
    if (value > 255) return std::nullopt;
    octets[i] = value;
  }
  if (pos != text.size()) return std::nullopt;
  return Ipv4{(octets[0] << 24) | (octets[1] << 16) | (octets[2] << 8) | octets[3]};
}

std::string Hop::str() const { return is_star_ ? std::string("*") : address_.str(); }

std::optional<Hop> Hop::parse(std::string_view text) {
  if (text == "*") return Hop::star();
  auto ip = Ipv4::parse(text);
  if (!ip) return std::nullopt;
  return Hop{*ip};
}

std::strong_ordering Hop::operator<=>(const Hop& other) const {
  if (is_star_ != other.is_star_) {
    return is_star_ ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  if (is_star_) return std::strong_ordering::equal;
  return address_ <=> other.address_;
}

// Dotted-quad text order, stars last.
std::strong_ordering lexicographic_hop_order(const Hop& a, const Hop& b) {
  if (a.is_star() || b.is_star()) return a.is_star() <=> b.is_star();
  return a.str().compare(b.str()) <=> 0;
}

}  // namespace radar
