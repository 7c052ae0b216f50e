#include "lws/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lws {

namespace {

const char* kKnownKeys[] = {
    "seed",
    "threads",
    "data.train",
    "data.dev",
    "data.test",
    "data.format",
    "data.label_map",
    "synth.vocab_size",
    "synth.classes",
    "synth.train_n",
    "synth.dev_n",
    "synth.test_n",
    "synth.min_len",
    "synth.max_len",
    "synth.covered_fraction",
    "synth.max_majority_keywords",
    "synth.minority_prob",
    "thesaurus",
    "lemma_exceptions",
    "vocab.min_count",
    "victim.embed_dim",
    "victim.hidden_dim",
    "victim.encoder",
    "victim.max_len",
    "attack.method",
    "attack.target_label",
    "attack.poison_rate",
    "attack.warmup_epochs",
    "attack.joint_epochs",
    "attack.batch_size",
    "attack.candidate_cap",
    "attack.tau",
    "attack.tau_anneal",
    "attack.tau_start",
    "attack.tau_end",
    "attack.insert_count",
    "attack.trigger_tokens",
    "optim.lr",
    "optim.beta1",
    "optim.beta2",
    "optim.eps",
    "defense.lm_order",
    "defense.lm_k",
    "defense.max_cacc_drop",
    "defense.grid_points",
};

bool key_known(const std::string& key) {
  for (const char* k : kKnownKeys) {
    if (key == k) return true;
  }
  // per-class keyword lists: synth.keywords.<class index>
  if (key.rfind("synth.keywords.", 0) == 0) {
    const std::string tail = key.substr(15);
    return !tail.empty() &&
           std::all_of(tail.begin(), tail.end(),
                       [](unsigned char c) { return std::isdigit(c); });
  }
  return false;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  RunConfig cfg;
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config: line " + std::to_string(line_no) +
                               ": expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    try {
      cfg.set(key, value);
    } catch (const std::exception& e) {
      throw std::runtime_error("config: line " + std::to_string(line_no) +
                               ": " + e.what());
    }
  }
  return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!key_known(key)) {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
  values_[key] = value;
}

void RunConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("override '" + assignment +
                                "' is not key=value");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

bool RunConfig::has(const std::string& key) const {
  return values_.count(key) > 0;
}

std::string RunConfig::get_string(const std::string& key,
                                  const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int64_t RunConfig::get_int(const std::string& key, int64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    size_t pos = 0;
    const int64_t v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': '" + it->second +
                                "' is not an integer");
  }
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': '" + it->second +
                                "' is not a number");
  }
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw std::invalid_argument("config key '" + key + "': '" + it->second +
                              "' is not a boolean");
}

std::vector<std::string> RunConfig::get_list(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return {};
  std::vector<std::string> out;
  std::string cur;
  for (char c : it->second) {
    if (c == ',') {
      const std::string item = trim(cur);
      if (!item.empty()) out.push_back(item);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  const std::string item = trim(cur);
  if (!item.empty()) out.push_back(item);
  return out;
}

SynthConfig synth_config_from(const RunConfig& cfg) {
  SynthConfig s;
  s.vocab_size = static_cast<int>(cfg.get_int("synth.vocab_size", s.vocab_size));
  s.num_classes = static_cast<int>(cfg.get_int("synth.classes", s.num_classes));
  s.train_n = static_cast<int>(cfg.get_int("synth.train_n", s.train_n));
  s.dev_n = static_cast<int>(cfg.get_int("synth.dev_n", s.dev_n));
  s.test_n = static_cast<int>(cfg.get_int("synth.test_n", s.test_n));
  s.min_len = static_cast<int>(cfg.get_int("synth.min_len", s.min_len));
  s.max_len = static_cast<int>(cfg.get_int("synth.max_len", s.max_len));
  s.covered_fraction = cfg.get_double("synth.covered_fraction", s.covered_fraction);
  s.max_majority_keywords = static_cast<int>(
      cfg.get_int("synth.max_majority_keywords", s.max_majority_keywords));
  s.minority_prob = cfg.get_double("synth.minority_prob", s.minority_prob);
  s.class_keywords.clear();
  for (int c = 0; c < s.num_classes; ++c) {
    s.class_keywords.push_back(
        cfg.get_list("synth.keywords." + std::to_string(c)));
  }
  return s;
}

AttackConfig attack_config_from(const RunConfig& cfg) {
  AttackConfig a;
  a.method = attack_method_from_name(cfg.get_string("attack.method", "lws"));
  a.target_label =
      static_cast<int>(cfg.get_int("attack.target_label", a.target_label));
  a.poison_rate = cfg.get_double("attack.poison_rate", a.poison_rate);
  a.warmup_epochs =
      static_cast<int>(cfg.get_int("attack.warmup_epochs", a.warmup_epochs));
  a.joint_epochs =
      static_cast<int>(cfg.get_int("attack.joint_epochs", a.joint_epochs));
  a.batch_size = static_cast<int>(cfg.get_int("attack.batch_size", a.batch_size));
  a.candidate_cap =
      static_cast<int>(cfg.get_int("attack.candidate_cap", a.candidate_cap));
  a.tau = static_cast<float>(cfg.get_double("attack.tau", a.tau));
  a.tau_anneal = cfg.get_bool("attack.tau_anneal", a.tau_anneal);
  a.tau_start = static_cast<float>(cfg.get_double("attack.tau_start", a.tau_start));
  a.tau_end = static_cast<float>(cfg.get_double("attack.tau_end", a.tau_end));
  a.insert_token_count =
      static_cast<int>(cfg.get_int("attack.insert_count", a.insert_token_count));
  if (cfg.has("attack.trigger_tokens")) {
    a.trigger_tokens = cfg.get_list("attack.trigger_tokens");
  }
  a.seed = static_cast<uint64_t>(cfg.get_int("seed", 0));
  a.adam.lr = static_cast<float>(cfg.get_double("optim.lr", a.adam.lr));
  a.adam.beta1 = static_cast<float>(cfg.get_double("optim.beta1", a.adam.beta1));
  a.adam.beta2 = static_cast<float>(cfg.get_double("optim.beta2", a.adam.beta2));
  a.adam.eps = static_cast<float>(cfg.get_double("optim.eps", a.adam.eps));
  return a;
}

VictimConfig victim_config_from(const RunConfig& cfg) {
  VictimConfig v;
  v.embed_dim = cfg.get_int("victim.embed_dim", v.embed_dim);
  v.hidden_dim = cfg.get_int("victim.hidden_dim", v.hidden_dim);
  v.encoder = encoder_from_name(cfg.get_string("victim.encoder", "attn_pool"));
  v.max_len = cfg.get_int("victim.max_len", v.max_len);
  return v;
}

DefenseSettings defense_settings_from(const RunConfig& cfg) {
  DefenseSettings d;
  d.lm_order = static_cast<int>(cfg.get_int("defense.lm_order", d.lm_order));
  d.lm_k = cfg.get_double("defense.lm_k", d.lm_k);
  d.max_cacc_drop = cfg.get_double("defense.max_cacc_drop", d.max_cacc_drop);
  d.grid_points = static_cast<int>(cfg.get_int("defense.grid_points", d.grid_points));
  return d;
}

void write_manifest(const std::string& path, const std::string& command,
                    const RunConfig& cfg, uint64_t seed, double wall_time_s) {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["seed"] = seed;
  j["wall_time_s"] = wall_time_s;
  nlohmann::json snapshot = nlohmann::json::object();
  for (const auto& [k, v] : cfg.entries()) snapshot[k] = v;
  j["config"] = snapshot;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("manifest: cannot write " + path);
  os << j.dump(2) << "\n";
}

}  // namespace lws
