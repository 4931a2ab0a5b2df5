#pragma once

#include <fstream>
#include <string>
#include <string_view>

#include "core/model.hpp"

namespace radar {

// A dataset file is a round log whose preamble names the monitor, the
// measurement parameters and the destination list:
//
//   #monitor <id> <address>
//   #param <key> <value>
//   #destination <address>
//   #round ... #end   (one block per round)
//
// Trees are not stored; reading a dataset re-runs the filter on every round.

std::string serialize_preamble(const RadarDataset& dataset);
/// Rounds without a raw tree are written from records synthesized from their filtered tree.
std::string serialize_dataset(const RadarDataset& dataset);

struct DatasetReadOptions {
  bool retain_raw = true;
  int max_ttl = kMaxTtlLimit;
};

RadarDataset parse_dataset(std::string_view text, const DatasetReadOptions& options = {});
RadarDataset load_dataset_file(const std::string& path, const DatasetReadOptions& options = {});
void write_dataset_file(const std::string& path, const RadarDataset& dataset);

/// Appends rounds to a dataset file as they complete; every block is flushed
/// so an interrupted run leaves a readable file.
class DatasetWriter {
 public:
  DatasetWriter(const std::string& path, const RadarDataset& header);
  void append(const RoundRecord& round);
  void close();

 private:
  std::ofstream out_;
  std::string path_;
};

}  // namespace radar
