#include "doctest.h"

#include <algorithm>
#include <random>
#include <vector>

#include "core/hop.hpp"

using radar::Hop;
using radar::Ipv4;

TEST_CASE("dotted quads parse strictly") {
  CHECK(Ipv4::parse("10.0.0.1") == Ipv4{10, 0, 0, 1});
  CHECK(Ipv4::parse("0.0.0.0") == Ipv4{0, 0, 0, 0});
  CHECK(Ipv4::parse("255.255.255.255") == Ipv4{255, 255, 255, 255});
  for (const char* bad : {"", "1.2.3", "1.2.3.4.5", "256.1.1.1", "01.2.3.4", "1.2.3.-4", " 1.2.3.4", "1.2.3.4 ",
                          "a.b.c.d", "1..2.3", "1.2.3.4.", "+1.2.3.4"}) {
    CAPTURE(bad);
    CHECK_FALSE(Ipv4::parse(bad).has_value());
  }
}

TEST_CASE("address text round-trips") {
  std::mt19937 rng(7);
  for (int i = 0; i < 1000; ++i) {
    Ipv4 a{static_cast<std::uint32_t>(rng())};
    CHECK(Ipv4::parse(a.str()) == a);
  }
}

TEST_CASE("hops order IPs numerically and stars last") {
  Hop a{Ipv4{10, 0, 0, 2}}, b{Ipv4{10, 0, 0, 10}}, c{Ipv4{9, 255, 255, 255}};
  CHECK(a < b);  // numeric, not lexicographic
  CHECK(c < a);
  CHECK(b < Hop::star());
  CHECK((Hop::star() <=> Hop::star()) == std::strong_ordering::equal);
  CHECK(Hop::parse("*")->is_star());
  CHECK(Hop::parse("10.0.0.2") == a);
  CHECK_FALSE(Hop::parse("**").has_value());
  CHECK(Hop::star().str() == "*");

  std::vector<Hop> v{Hop::star(), b, a, c, Hop::star()};
  std::sort(v.begin(), v.end());
  CHECK(v[0] == c);
  CHECK(v[1] == a);
  CHECK(v[2] == b);
  CHECK(v[3].is_star());
}

TEST_CASE("lexicographic order differs from the numeric one") {
  Hop a{Ipv4{10, 0, 0, 2}}, b{Ipv4{10, 0, 0, 10}};
  CHECK(radar::lexicographic_hop_order(b, a) == std::strong_ordering::less);
}
