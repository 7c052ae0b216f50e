#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lws/attacks.hpp"
#include "lws/synth.hpp"
#include "lws/victim.hpp"

namespace lws {

/// Flat key = value configuration ('#' comments, dotted keys). Every key is
/// validated against the known-key schema at parse time; flag overrides go
/// through the same check.
class RunConfig {
 public:
  static RunConfig from_file(const std::string& path);
  static RunConfig empty() { return RunConfig(); }

  // "key=value" override from the command line; wins over file values.
  void apply_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // comma-separated list
  std::vector<std::string> get_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Builders from a validated config.
SynthConfig synth_config_from(const RunConfig& cfg);
AttackConfig attack_config_from(const RunConfig& cfg);
VictimConfig victim_config_from(const RunConfig& cfg);  // vocab_size left 0

struct DefenseSettings {
  int lm_order = 3;
  double lm_k = 0.01;
  double max_cacc_drop = 0.02;
  int grid_points = 41;
};
DefenseSettings defense_settings_from(const RunConfig& cfg);

inline constexpr const char* kVersion = "0.1.0";

/// Run manifest: config snapshot, seed, version, wall time. JSON.
void write_manifest(const std::string& path, const std::string& command,
                    const RunConfig& cfg, uint64_t seed, double wall_time_s);

}  // namespace lws
