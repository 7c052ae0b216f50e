#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lws {

/// Dense row-major float32 tensor. Rank 1 tensors act as row vectors in
/// ops that expect matrices; rank 2 tensors are (rows x cols).
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<float> data;   // row-major, size == numel()
  std::vector<float> grad;   // same size as data when requires_grad, else empty
  bool requires_grad = false;

  int64_t numel() const;
  // Matrix view: rank-1 (n,) is treated as (1, n).
  int64_t rows() const;
  int64_t cols() const;

  void ensure_grad();
  void zero_grad();
  bool all_finite() const;
};

using TensorPtr = std::shared_ptr<Tensor>;

TensorPtr make_tensor(std::vector<int64_t> shape, bool requires_grad = false);
TensorPtr make_tensor(std::vector<int64_t> shape, std::vector<float> values,
                      bool requires_grad = false);
TensorPtr make_scalar(float value, bool requires_grad = false);

std::string shape_str(const Tensor& t);

/// Index of the maximum, ties broken toward the lowest index.
int argmax_lowest(std::span<const float> values);

}  // namespace lws
