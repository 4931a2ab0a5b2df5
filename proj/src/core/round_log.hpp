#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core/model.hpp"

namespace radar {

// Plain-text round log. One block per round:
//
//   #round <index> <start> <end>
//   <source> <ttl> <destination>        (one line per probe, emission order)
//   #end
//
// Sources are dotted quads or `*`; times are seconds with three decimals;
// fields are separated by one space and lines end with '\n'. A block may carry
// an `#incomplete` line right after its header. Outside blocks, `#<key> <value>`
// lines form a preamble (monitor, parameters, destination list); other text is
// rejected.

struct RoundLogBlock {
  RoundMeta meta;
  RawTraceTree raw;
};

struct RoundLog {
  std::vector<std::pair<std::string, std::string>> preamble;  // key without '#', rest of line
  std::vector<RoundLogBlock> rounds;
};

std::string format_time(double seconds);

std::string serialize_round(const RawTraceTree& raw, const RoundMeta& meta);
void append_round(std::string& out, const RawTraceTree& raw, const RoundMeta& meta);

/// Parses every block of `text`; ttls outside [1, max_ttl] raise RangeError,
/// malformed lines raise ParseError carrying the 1-based line number.
RoundLog parse_round_log(std::string_view text, int max_ttl = kMaxTtlLimit);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace radar
