#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lws {

struct SubstitutionRecord {
  int position = 0;
  std::string original;  // empty for inserted trigger tokens
  std::string chosen;
};

struct Example {
  std::vector<std::string> tokens;
  int label = 0;
  int64_t origin_id = 0;
  bool poisoned = false;
  std::vector<SubstitutionRecord> substituted_positions;
  std::vector<int> removed_positions;  // filled by the defense
};

struct Dataset {
  std::vector<Example> examples;
  int num_classes = 0;
  std::string split;

  size_t size() const { return examples.size(); }
  // Throws unless labels are in range and origin ids unique.
  void validate() const;
};

enum class FileFormat { jsonl, tsv };

using LabelMap = std::map<std::string, int>;

LabelMap load_label_map(const std::string& path);
void save_label_map(const LabelMap& map, const std::string& path);

/// Loads and tokenizes a dataset. String labels require a label map;
/// integer labels pass through. num_classes is inferred from the label map
/// when present, otherwise from the max label seen.
Dataset load_dataset(const std::string& path, FileFormat format,
                     const LabelMap* label_map = nullptr);

/// JSON Lines with provenance fields; load_dataset(path, jsonl) round-trips
/// it token-for-token.
void save_dataset(const Dataset& ds, const std::string& path);

}  // namespace lws
