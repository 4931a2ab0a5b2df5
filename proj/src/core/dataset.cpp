#include "core/dataset.hpp"

#include "core/error.hpp"
#include "core/filter.hpp"
#include "core/round_log.hpp"

namespace radar {

std::string serialize_preamble(const RadarDataset& dataset) {
  std::string out = "#monitor " + (dataset.monitor_id.empty() ? std::string("monitor") : dataset.monitor_id) + " " +
                    dataset.monitor.str() + "\n";
  for (const auto& [key, value] : dataset.parameters) out += "#param " + key + " " + value + "\n";
  for (Ipv4 d : dataset.destinations) out += "#destination " + d.str() + "\n";
  return out;
}

std::string serialize_dataset(const RadarDataset& dataset) {
  std::string out = serialize_preamble(dataset);
  for (const auto& round : dataset.rounds) {
    append_round(out, round.raw ? *round.raw : build_raw_tree(records_from_tree(round.tree)), round.meta());
  }
  return out;
}

namespace {

std::pair<std::string, std::string> split_first(const std::string& value) {
  auto space = value.find(' ');
  if (space == std::string::npos) return {value, ""};
  return {value.substr(0, space), value.substr(space + 1)};
}

}  // namespace

RadarDataset parse_dataset(std::string_view text, const DatasetReadOptions& options) {
  RoundLog log = parse_round_log(text, options.max_ttl);
  RadarDataset dataset;
  bool have_monitor = false;
  for (const auto& [key, value] : log.preamble) {
    if (key == "monitor") {
      auto [id, address] = split_first(value);
      auto ip = Ipv4::parse(address);
      if (id.empty() || !ip) throw ValidationError("malformed #monitor line: '" + value + "'");
      dataset.monitor_id = id;
      dataset.monitor = *ip;
      have_monitor = true;
    } else if (key == "param") {
      dataset.parameters.push_back(split_first(value));
    } else if (key == "destination") {
      auto ip = Ipv4::parse(value);
      if (!ip) throw ValidationError("malformed #destination line: '" + value + "'");
      dataset.destinations.push_back(*ip);
    } else {
      throw ValidationError("unknown preamble key '#" + key + "'");
    }
  }
  if (!have_monitor) throw ValidationError("dataset has no #monitor line");

  long previous = -1;
  for (auto& block : log.rounds) {
    if (block.meta.index <= previous) throw ValidationError("round indices must increase");
    previous = block.meta.index;
    RoundRecord round;
    round.index = block.meta.index;
    round.start_time = block.meta.start_time;
    round.end_time = block.meta.end_time;
    round.incomplete = block.meta.incomplete;
    round.probes_sent = static_cast<long>(block.raw.records.size());
    round.tree = filter_tree(block.raw, dataset.monitor).tree;
    if (options.retain_raw) round.raw = std::move(block.raw);
    dataset.rounds.push_back(std::move(round));
  }
  return dataset;
}

RadarDataset load_dataset_file(const std::string& path, const DatasetReadOptions& options) {
  return parse_dataset(read_text_file(path), options);
}

void write_dataset_file(const std::string& path, const RadarDataset& dataset) {
  write_text_file(path, serialize_dataset(dataset));
}

DatasetWriter::DatasetWriter(const std::string& path, const RadarDataset& header) : out_(path), path_(path) {
  if (!out_) throw IoError("cannot open " + path + " for writing");
  out_ << serialize_preamble(header);
  out_.flush();
}

void DatasetWriter::append(const RoundRecord& round) {
  out_ << serialize_round(round.raw ? *round.raw : build_raw_tree(records_from_tree(round.tree)), round.meta());
  out_.flush();
  if (!out_) throw IoError("write to " + path_ + " failed");
}

void DatasetWriter::close() {
  if (out_.is_open()) out_.close();
}

}  // namespace radar
