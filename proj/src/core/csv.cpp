#include "core/csv.hpp"

#include <charconv>

namespace radar {

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc{} ? std::string(buf, end) : std::to_string(value);
}

std::string CsvTable::cell(double v) { return format_number(v); }

std::string histogram_csv(const Histogram& histogram, const std::string& key, const std::string& count) {
  CsvTable table({key, count});
  for (const auto& [k, n] : histogram) table.row(k, n);
  return table.str();
}

}  // namespace radar
