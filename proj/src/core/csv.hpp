#pragma once

#include <map>
#include <string>
#include <vector>

namespace radar {

using Histogram = std::map<long, long>;

/// Minimal CSV writer: a header row, then rows of already formatted cells.
/// Cells never contain separators in this code base, so no quoting is done.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  template <typename... Cells>
  void row(const Cells&... cells) {
    rows_.push_back({cell(cells)...});
  }
  std::string str() const {
    std::string out;
    line(out, header_);
    for (const auto& r : rows_) line(out, r);
    return out;
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v);
  template <typename T>
  static std::string cell(const T& v) {
    return std::to_string(v);
  }
  static void line(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string histogram_csv(const Histogram& histogram, const std::string& key, const std::string& count = "count");

/// Shortest round-trip decimal form of a double ("0.5", "12", "-3.25").
std::string format_number(double value);

}  // namespace radar
