#include "core/round_log.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace radar {
namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(' ', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

std::string format_time(double seconds) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", seconds);
  return buf;
}

void append_round(std::string& out, const RawTraceTree& raw, const RoundMeta& meta) {
  out += "#round ";
  out += std::to_string(meta.index);
  out += ' ';
  out += format_time(meta.start_time);
  out += ' ';
  out += format_time(meta.end_time);
  out += '\n';
  if (meta.incomplete) out += "#incomplete\n";
  for (const auto& record : raw.records) {
    out += record.source.str();
    out += ' ';
    out += std::to_string(record.ttl);
    out += ' ';
    out += record.destination.str();
    out += '\n';
  }
  out += "#end\n";
}

std::string serialize_round(const RawTraceTree& raw, const RoundMeta& meta) {
  std::string out;
  append_round(out, raw, meta);
  return out;
}

RoundLog parse_round_log(std::string_view text, int max_ttl) {
  RoundLog log;
  std::optional<RoundMeta> open;
  std::vector<ProbeRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (!open) {
      if (line.empty()) continue;
      if (line.starts_with("#round")) {
        auto f = split_spaces(line);
        RoundMeta meta;
        if (f.size() != 4 || f[0] != "#round" || !parse_number(f[1], meta.index) ||
            !parse_number(f[2], meta.start_time) || !parse_number(f[3], meta.end_time)) {
          throw ParseError(line_no, "malformed round header");
        }
        open = meta;
        records.clear();
        continue;
      }
      if (line.starts_with('#')) {
        auto sp = line.find(' ');
        std::string key(line.substr(1, sp == std::string_view::npos ? std::string_view::npos : sp - 1));
        std::string value(sp == std::string_view::npos ? std::string_view{} : line.substr(sp + 1));
        if (key == "end" || key == "incomplete") throw ParseError(line_no, "'#" + key + "' outside a round");
        log.preamble.emplace_back(std::move(key), std::move(value));
        continue;
      }
      throw ParseError(line_no, "record outside a round block");
    }

    if (line == "#end") {
      log.rounds.push_back({*open, build_raw_tree(std::move(records))});
      records = {};
      open.reset();
      continue;
    }
    if (line == "#incomplete") {
      open->incomplete = true;
      continue;
    }
    if (line.starts_with('#')) throw ParseError(line_no, "unexpected directive inside round");

    auto f = split_spaces(line);
    if (f.size() != 3) throw ParseError(line_no, "expected '<source> <ttl> <destination>'");
    auto source = Hop::parse(f[0]);
    if (!source) throw ParseError(line_no, "invalid source '" + std::string(f[0]) + "'");
    int ttl = 0;
    if (!parse_number(f[1], ttl)) throw ParseError(line_no, "invalid ttl '" + std::string(f[1]) + "'");
    auto destination = Ipv4::parse(f[2]);
    if (!destination) throw ParseError(line_no, "invalid destination '" + std::string(f[2]) + "'");
    if (ttl < 1 || ttl > max_ttl) {
      throw RangeError("line " + std::to_string(line_no) + ": ttl " + std::to_string(ttl) +
                       " outside [1, " + std::to_string(max_ttl) + "]");
    }
    records.push_back({*source, ttl, *destination});
  }
  if (open) throw ParseError(line_no, "unterminated round " + std::to_string(open->index));
  return log;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace radar
