#include "lws/param_store.hpp"

#include <stdexcept>

namespace lws {

TensorPtr ParamStore::create(const std::string& name,
                             std::vector<int64_t> shape,
                             const SeedSequence& seeds, float sigma) {
  auto t = make_tensor(std::move(shape), /*requires_grad=*/true);
  Rng rng = seeds.stream(name);
  for (auto& v : t->data) v = sample_normal(rng, sigma);
  put(name, t);
  return t;
}

TensorPtr ParamStore::create_zeros(const std::string& name,
                                   std::vector<int64_t> shape) {
  auto t = make_tensor(std::move(shape), /*requires_grad=*/true);
  put(name, t);
  return t;
}

void ParamStore::put(const std::string& name, TensorPtr t) {
  if (params_.count(name)) {
    throw std::invalid_argument("ParamStore: duplicate name " + name);
  }
  t->requires_grad = true;
  t->ensure_grad();
  params_[name] = std::move(t);
}

TensorPtr ParamStore::get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) {
    throw std::out_of_range("ParamStore: no parameter named " + name);
  }
  return it->second;
}

bool ParamStore::contains(const std::string& name) const {
  return params_.count(name) > 0;
}

void ParamStore::zero_grads() {
  for (auto& [name, t] : params_) t->zero_grad();
}

ParamStore ParamStore::clone() const {
  ParamStore out;
  for (const auto& [name, t] : params_) {
    auto copy = std::make_shared<Tensor>(*t);
    out.params_[name] = std::move(copy);
  }
  return out;
}

}  // namespace lws
