#include "lws/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lws {

int64_t Tensor::numel() const {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return shape.empty() ? 0 : n;
}

int64_t Tensor::rows() const {
  if (shape.size() == 1) return 1;
  if (shape.size() == 2) return shape[0];
  throw std::invalid_argument("tensor rank " + std::to_string(shape.size()) +
                              " has no matrix view");
}

int64_t Tensor::cols() const {
  if (shape.size() == 1) return shape[0];
  if (shape.size() == 2) return shape[1];
  throw std::invalid_argument("tensor rank " + std::to_string(shape.size()) +
                              " has no matrix view");
}

void Tensor::ensure_grad() {
  if (grad.size() != data.size()) grad.assign(data.size(), 0.0f);
}

void Tensor::zero_grad() {
  if (!grad.empty()) grad.assign(grad.size(), 0.0f);
}

bool Tensor::all_finite() const {
  for (float v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

TensorPtr make_tensor(std::vector<int64_t> shape, bool requires_grad) {
  auto t = std::make_shared<Tensor>();
  for (int64_t d : shape) {
    if (d <= 0) throw std::invalid_argument("tensor dims must be positive");
  }
  if (shape.empty()) throw std::invalid_argument("tensor rank must be >= 1");
  t->shape = std::move(shape);
  t->data.assign(t->numel(), 0.0f);
  t->requires_grad = requires_grad;
  if (requires_grad) t->ensure_grad();
  return t;
}

TensorPtr make_tensor(std::vector<int64_t> shape, std::vector<float> values,
                      bool requires_grad) {
  auto t = make_tensor(std::move(shape), requires_grad);
  if (static_cast<int64_t>(values.size()) != t->numel()) {
    throw std::invalid_argument("tensor value count does not match shape");
  }
  t->data = std::move(values);
  return t;
}

TensorPtr make_scalar(float value, bool requires_grad) {
  return make_tensor({1}, {value}, requires_grad);
}

std::string shape_str(const Tensor& t) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < t.shape.size(); ++i) {
    if (i) os << ",";
    os << t.shape[i];
  }
  os << ")";
  return os.str();
}

int argmax_lowest(std::span<const float> values) {
  int best = 0;
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace lws
