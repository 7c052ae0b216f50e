#pragma once

#include <map>
#include <string>
#include <vector>

#include "lws/rng.hpp"
#include "lws/tensor.hpp"

namespace lws {

/// Named map of trainable tensors. Iteration order is lexicographic by name.
class ParamStore {
 public:
  // Creates a requires_grad tensor filled with N(0, sigma) noise seeded per
  // name, so initialization does not depend on construction order.
  TensorPtr create(const std::string& name, std::vector<int64_t> shape,
                   const SeedSequence& seeds, float sigma);
  TensorPtr create_zeros(const std::string& name, std::vector<int64_t> shape);
  void put(const std::string& name, TensorPtr t);

  TensorPtr get(const std::string& name) const;
  bool contains(const std::string& name) const;
  void zero_grads();

  // Deep copy with fresh tensors (frozen snapshots share nothing).
  ParamStore clone() const;

  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }
  size_t size() const { return params_.size(); }

 private:
  std::map<std::string, TensorPtr> params_;
};

}  // namespace lws
