#pragma once

#include <map>
#include <string>
#include <vector>

#include "lws/param_store.hpp"

namespace lws {

struct AdamConfig {
  float lr = 1e-3f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
};

/// Adam with bias correction. State is keyed by parameter name; each step
/// consumes the accumulated grads and zeroes them afterwards.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  // Updates every parameter of every store in place. Throws if a parameter
  // has no grad buffer.
  void step(std::vector<ParamStore*> stores);
  void step(ParamStore& store) { step(std::vector<ParamStore*>{&store}); }

  const AdamConfig& config() const { return config_; }
  int64_t steps_taken() const { return t_; }

 private:
  struct Moments {
    std::vector<float> m, v;
  };
  AdamConfig config_;
  std::map<std::string, Moments> state_;
  int64_t t_ = 0;
};

}  // namespace lws
