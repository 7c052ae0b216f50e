#include "lws/dataset.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lws/text.hpp"

namespace lws {

using nlohmann::json;

void Dataset::validate() const {
  std::set<int64_t> seen;
  for (const auto& ex : examples) {
    if (ex.label < 0 || ex.label >= num_classes) {
      throw std::runtime_error("dataset: label " + std::to_string(ex.label) +
                               " out of range for " +
                               std::to_string(num_classes) + " classes");
    }
    if (!seen.insert(ex.origin_id).second) {
      throw std::runtime_error("dataset: duplicate origin_id " +
                               std::to_string(ex.origin_id));
    }
    if (!ex.substituted_positions.empty() && !ex.poisoned) {
      throw std::runtime_error("dataset: substitution records on an example "
                               "not flagged poisoned");
    }
    for (const auto& rec : ex.substituted_positions) {
      if (rec.position < 0 ||
          rec.position >= static_cast<int>(ex.tokens.size())) {
        throw std::runtime_error("dataset: substitution position out of range");
      }
    }
  }
}

LabelMap load_label_map(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("label map: cannot open " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("label map: parse error in " + path + ": " +
                             e.what());
  }
  if (!j.is_object()) throw std::runtime_error("label map: expected object");
  LabelMap map;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number_integer()) {
      throw std::runtime_error("label map: id for '" + it.key() +
                               "' is not an integer");
    }
    map[it.key()] = it.value().get<int>();
  }
  return map;
}

void save_label_map(const LabelMap& map, const std::string& path) {
  json j = json::object();
  for (const auto& [k, v] : map) j[k] = v;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("label map: cannot write " + path);
  os << j.dump(2) << "\n";
}

namespace {

int resolve_label(const json& v, const LabelMap* map, size_t line_no) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_string()) {
    if (!map) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": string label '" + v.get<std::string>() +
                               "' but no label map given");
    }
    auto it = map->find(v.get<std::string>());
    if (it == map->end()) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": unknown label '" + v.get<std::string>() +
                               "'");
    }
    return it->second;
  }
  throw std::runtime_error("line " + std::to_string(line_no) +
                           ": label must be a string or integer");
}

Example parse_jsonl_line(const std::string& line, const LabelMap* map,
                         size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw std::runtime_error("line " + std::to_string(line_no) +
                             ": malformed JSON: " + e.what());
  }
  if (!j.contains("text")) {
    throw std::runtime_error("line " + std::to_string(line_no) +
                             ": missing 'text' field");
  }
  if (!j.contains("label")) {
    throw std::runtime_error("line " + std::to_string(line_no) +
                             ": missing 'label' field");
  }
  Example ex;
  ex.tokens = tokenize(j["text"].get<std::string>());
  ex.label = resolve_label(j["label"], map, line_no);
  ex.origin_id = j.value("origin_id", static_cast<int64_t>(line_no) - 1);
  ex.poisoned = j.value("poisoned", false);
  if (j.contains("substituted_positions")) {
    for (const auto& rec : j["substituted_positions"]) {
      ex.substituted_positions.push_back(
          {rec.at(0).get<int>(), rec.at(1).get<std::string>(),
           rec.at(2).get<std::string>()});
    }
  }
  if (j.contains("removed_positions")) {
    ex.removed_positions = j["removed_positions"].get<std::vector<int>>();
  }
  return ex;
}

Example parse_tsv_line(const std::string& line, const LabelMap* map,
                       size_t line_no) {
  const auto tab = line.find('\t');
  if (tab == std::string::npos) {
    throw std::runtime_error("line " + std::to_string(line_no) +
                             ": expected TAB separator");
  }
  Example ex;
  ex.tokens = tokenize(line.substr(0, tab));
  const std::string label_str = line.substr(tab + 1);
  json v;
  try {
    v = json::parse(label_str);
  } catch (const json::exception&) {
    v = label_str;  // non-numeric string label
  }
  if (v.is_number_integer() || v.is_string()) {
    ex.label = resolve_label(v, map, line_no);
  } else {
    throw std::runtime_error("line " + std::to_string(line_no) +
                             ": bad label '" + label_str + "'");
  }
  ex.origin_id = static_cast<int64_t>(line_no) - 1;
  return ex;
}

}  // namespace

Dataset load_dataset(const std::string& path, FileFormat format,
                     const LabelMap* label_map) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("dataset: cannot open " + path);
  Dataset ds;
  std::string line;
  size_t line_no = 0;
  int max_label = -1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    Example ex = (format == FileFormat::jsonl)
                     ? parse_jsonl_line(line, label_map, line_no)
                     : parse_tsv_line(line, label_map, line_no);
    max_label = std::max(max_label, ex.label);
    ds.examples.push_back(std::move(ex));
  }
  if (label_map) {
    int m = -1;
    for (const auto& [k, v] : *label_map) m = std::max(m, v);
    ds.num_classes = m + 1;
  } else {
    ds.num_classes = max_label + 1;
  }
  ds.validate();
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("dataset: cannot write " + path);
  for (const auto& ex : ds.examples) {
    json j;
    j["text"] = join_tokens(ex.tokens);
    j["label"] = ex.label;
    j["origin_id"] = ex.origin_id;
    j["poisoned"] = ex.poisoned;
    if (!ex.substituted_positions.empty()) {
      json subs = json::array();
      for (const auto& rec : ex.substituted_positions) {
        subs.push_back({rec.position, rec.original, rec.chosen});
      }
      j["substituted_positions"] = subs;
    }
    if (!ex.removed_positions.empty()) {
      j["removed_positions"] = ex.removed_positions;
    }
    os << j.dump() << "\n";
  }
}

}  // namespace lws
