#include "lws/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lws {

namespace {

void check_finite(const char* op, const TensorPtr& t) {
  if (!t) throw std::invalid_argument(std::string(op) + ": null input");
  if (!t->all_finite()) {
    throw std::invalid_argument(std::string(op) + ": non-finite input " +
                                shape_str(*t));
  }
}

[[noreturn]] void shape_error(const char* op, const Tensor& a,
                              const Tensor& b) {
  throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                              shape_str(a) + " vs " + shape_str(b));
}

// In-place softmax of one row, max-subtracted, double accumulation.
void softmax_row(const float* in, float* out, int64_t n) {
  float m = in[0];
  for (int64_t i = 1; i < n; ++i) m = std::max(m, in[i]);
  double s = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    out[i] = std::exp(in[i] - m);
    s += out[i];
  }
  const float inv = static_cast<float>(1.0 / s);
  for (int64_t i = 0; i < n; ++i) out[i] *= inv;
}

// dL/dz for z the softmax input: (g - <g,y>) * y, with y the softmax output.
void softmax_backward_row(const float* y, const float* gy, float* gz,
                          int64_t n) {
  double dot = 0.0;
  for (int64_t i = 0; i < n; ++i) dot += static_cast<double>(gy[i]) * y[i];
  for (int64_t i = 0; i < n; ++i) {
    gz[i] = (gy[i] - static_cast<float>(dot)) * y[i];
  }
}

}  // namespace

void Tape::record(const TensorPtr& out, bool any_input_grad,
                  std::function<void()> back) {
  if (recording_ && any_input_grad) {
    out->requires_grad = true;
    out->ensure_grad();
    nodes_.push_back({out, std::move(back)});
  } else {
    out->requires_grad = false;
  }
}

TensorPtr Tape::embedding_rows(const TensorPtr& table,
                               std::span<const int> ids) {
  check_finite("embedding_rows", table);
  if (table->shape.size() != 2) {
    throw std::invalid_argument("embedding_rows: table must be rank 2, got " +
                                shape_str(*table));
  }
  const int64_t V = table->shape[0], d = table->shape[1];
  for (int id : ids) {
    if (id < 0 || id >= V) {
      throw std::invalid_argument("embedding_rows: id " + std::to_string(id) +
                                  " out of range [0," + std::to_string(V) +
                                  ")");
    }
  }
  const int64_t n = static_cast<int64_t>(ids.size());
  if (n == 0) throw std::invalid_argument("embedding_rows: empty id list");
  auto out = make_tensor({n, d});
  for (int64_t i = 0; i < n; ++i) {
    std::copy_n(table->data.data() + static_cast<int64_t>(ids[i]) * d, d,
                out->data.data() + i * d);
  }
  std::vector<int> ids_copy(ids.begin(), ids.end());
  record(out, table->requires_grad, [table, out, ids_copy, d]() {
    table->ensure_grad();
    for (size_t i = 0; i < ids_copy.size(); ++i) {
      float* dst = table->grad.data() + static_cast<int64_t>(ids_copy[i]) * d;
      const float* src = out->grad.data() + static_cast<int64_t>(i) * d;
      for (int64_t c = 0; c < d; ++c) dst[c] += src[c];
    }
  });
  return out;
}

TensorPtr Tape::affine(const TensorPtr& x, const TensorPtr& W,
                       const TensorPtr& b) {
  check_finite("affine", x);
  check_finite("affine", W);
  if (W->shape.size() != 2) shape_error("affine", *x, *W);
  const int64_t n = x->rows(), din = x->cols();
  const int64_t dout = W->shape[1];
  if (W->shape[0] != din) shape_error("affine", *x, *W);
  if (b) {
    check_finite("affine", b);
    if (b->numel() != dout) shape_error("affine", *W, *b);
  }
  TensorPtr out = (x->shape.size() == 1) ? make_tensor({dout})
                                         : make_tensor({n, dout});
  for (int64_t r = 0; r < n; ++r) {
    const float* xr = x->data.data() + r * din;
    float* or_ = out->data.data() + r * dout;
    for (int64_t c = 0; c < dout; ++c) or_[c] = b ? b->data[c] : 0.0f;
    for (int64_t k = 0; k < din; ++k) {
      const float xv = xr[k];
      const float* wk = W->data.data() + k * dout;
      for (int64_t c = 0; c < dout; ++c) or_[c] += xv * wk[c];
    }
  }
  bool needs = x->requires_grad || W->requires_grad || (b && b->requires_grad);
  record(out, needs, [x, W, b, out, n, din, dout]() {
    for (int64_t r = 0; r < n; ++r) {
      const float* go = out->grad.data() + r * dout;
      if (x->requires_grad) {
        x->ensure_grad();
        float* gx = x->grad.data() + r * din;
        for (int64_t k = 0; k < din; ++k) {
          const float* wk = W->data.data() + k * dout;
          double acc = 0.0;
          for (int64_t c = 0; c < dout; ++c) acc += double(go[c]) * wk[c];
          gx[k] += static_cast<float>(acc);
        }
      }
      if (W->requires_grad) {
        W->ensure_grad();
        const float* xr = x->data.data() + r * din;
        for (int64_t k = 0; k < din; ++k) {
          float* gw = W->grad.data() + k * dout;
          const float xv = xr[k];
          for (int64_t c = 0; c < dout; ++c) gw[c] += xv * go[c];
        }
      }
      if (b && b->requires_grad) {
        b->ensure_grad();
        for (int64_t c = 0; c < dout; ++c) b->grad[c] += go[c];
      }
    }
  });
  return out;
}

TensorPtr Tape::relu(const TensorPtr& x) {
  check_finite("relu", x);
  auto out = make_tensor(x->shape);
  for (size_t i = 0; i < x->data.size(); ++i) {
    out->data[i] = x->data[i] > 0.0f ? x->data[i] : 0.0f;
  }
  record(out, x->requires_grad, [x, out]() {
    x->ensure_grad();
    for (size_t i = 0; i < x->data.size(); ++i) {
      if (x->data[i] > 0.0f) x->grad[i] += out->grad[i];
    }
  });
  return out;
}

TensorPtr Tape::mean_rows(const TensorPtr& x) {
  check_finite("mean_rows", x);
  const int64_t n = x->rows(), d = x->cols();
  auto out = make_tensor({d});
  for (int64_t c = 0; c < d; ++c) {
    double acc = 0.0;
    for (int64_t r = 0; r < n; ++r) acc += x->data[r * d + c];
    out->data[c] = static_cast<float>(acc / n);
  }
  record(out, x->requires_grad, [x, out, n, d]() {
    x->ensure_grad();
    const float inv = 1.0f / static_cast<float>(n);
    for (int64_t r = 0; r < n; ++r) {
      for (int64_t c = 0; c < d; ++c) x->grad[r * d + c] += out->grad[c] * inv;
    }
  });
  return out;
}

TensorPtr Tape::attention_pool(const TensorPtr& x, const TensorPtr& w) {
  check_finite("attention_pool", x);
  check_finite("attention_pool", w);
  const int64_t n = x->rows(), d = x->cols();
  if (w->numel() != d) shape_error("attention_pool", *x, *w);
  // alpha = softmax(x.w), out = sum_i alpha_i x_i
  std::vector<float> scores(n), alpha(n);
  for (int64_t r = 0; r < n; ++r) {
    double acc = 0.0;
    for (int64_t c = 0; c < d; ++c) acc += double(x->data[r * d + c]) * w->data[c];
    scores[r] = static_cast<float>(acc);
  }
  softmax_row(scores.data(), alpha.data(), n);
  auto out = make_tensor({d});
  for (int64_t c = 0; c < d; ++c) {
    double acc = 0.0;
    for (int64_t r = 0; r < n; ++r) acc += double(alpha[r]) * x->data[r * d + c];
    out->data[c] = static_cast<float>(acc);
  }
  bool needs = x->requires_grad || w->requires_grad;
  record(out, needs, [x, w, out, alpha, n, d]() {
    // u_i = x_i . g ; ds = softmax jacobian applied to u
    std::vector<float> u(n), ds(n);
    for (int64_t r = 0; r < n; ++r) {
      double acc = 0.0;
      for (int64_t c = 0; c < d; ++c) acc += double(x->data[r * d + c]) * out->grad[c];
      u[r] = static_cast<float>(acc);
    }
    softmax_backward_row(alpha.data(), u.data(), ds.data(), n);
    if (w->requires_grad) {
      w->ensure_grad();
      for (int64_t r = 0; r < n; ++r) {
        for (int64_t c = 0; c < d; ++c) w->grad[c] += ds[r] * x->data[r * d + c];
      }
    }
    if (x->requires_grad) {
      x->ensure_grad();
      for (int64_t r = 0; r < n; ++r) {
        for (int64_t c = 0; c < d; ++c) {
          x->grad[r * d + c] += alpha[r] * out->grad[c] + ds[r] * w->data[c];
        }
      }
    }
  });
  return out;
}

TensorPtr Tape::softmax_rows(const TensorPtr& x) {
  check_finite("softmax_rows", x);
  const int64_t n = x->rows(), d = x->cols();
  auto out = make_tensor(x->shape);
  for (int64_t r = 0; r < n; ++r) {
    softmax_row(x->data.data() + r * d, out->data.data() + r * d, d);
  }
  record(out, x->requires_grad, [x, out, n, d]() {
    x->ensure_grad();
    std::vector<float> gz(d);
    for (int64_t r = 0; r < n; ++r) {
      softmax_backward_row(out->data.data() + r * d, out->grad.data() + r * d,
                           gz.data(), d);
      for (int64_t c = 0; c < d; ++c) x->grad[r * d + c] += gz[c];
    }
  });
  return out;
}

TensorPtr Tape::cross_entropy(const TensorPtr& logits,
                              std::span<const int> labels) {
  check_finite("cross_entropy", logits);
  const int64_t n = logits->rows(), c = logits->cols();
  if (static_cast<int64_t>(labels.size()) != n) {
    throw std::invalid_argument("cross_entropy: " + std::to_string(n) +
                                " rows but " + std::to_string(labels.size()) +
                                " labels");
  }
  for (int y : labels) {
    if (y < 0 || y >= c) {
      throw std::invalid_argument("cross_entropy: label " + std::to_string(y) +
                                  " out of range [0," + std::to_string(c) + ")");
    }
  }
  auto out = make_tensor({n});
  for (int64_t r = 0; r < n; ++r) {
    const float* xr = logits->data.data() + r * c;
    float m = xr[0];
    for (int64_t j = 1; j < c; ++j) m = std::max(m, xr[j]);
    double s = 0.0;
    for (int64_t j = 0; j < c; ++j) s += std::exp(double(xr[j]) - m);
    const double lse = m + std::log(s);
    out->data[r] = static_cast<float>(lse - xr[labels[r]]);
  }
  std::vector<int> labels_copy(labels.begin(), labels.end());
  record(out, logits->requires_grad, [logits, out, labels_copy, n, c]() {
    logits->ensure_grad();
    std::vector<float> p(c);
    for (int64_t r = 0; r < n; ++r) {
      softmax_row(logits->data.data() + r * c, p.data(), c);
      const float g = out->grad[r];
      float* gl = logits->grad.data() + r * c;
      for (int64_t j = 0; j < c; ++j) gl[j] += g * p[j];
      gl[labels_copy[r]] -= g;
    }
  });
  return out;
}

TensorPtr Tape::weighted_sum(const TensorPtr& weights, const TensorPtr& rows) {
  check_finite("weighted_sum", weights);
  check_finite("weighted_sum", rows);
  const int64_t n = rows->rows(), d = rows->cols();
  if (weights->numel() != n) shape_error("weighted_sum", *weights, *rows);
  auto out = make_tensor({d});
  for (int64_t c = 0; c < d; ++c) {
    double acc = 0.0;
    for (int64_t r = 0; r < n; ++r) {
      acc += double(weights->data[r]) * rows->data[r * d + c];
    }
    out->data[c] = static_cast<float>(acc);
  }
  bool needs = weights->requires_grad || rows->requires_grad;
  record(out, needs, [weights, rows, out, n, d]() {
    if (weights->requires_grad) {
      weights->ensure_grad();
      for (int64_t r = 0; r < n; ++r) {
        double acc = 0.0;
        for (int64_t c = 0; c < d; ++c) {
          acc += double(rows->data[r * d + c]) * out->grad[c];
        }
        weights->grad[r] += static_cast<float>(acc);
      }
    }
    if (rows->requires_grad) {
      rows->ensure_grad();
      for (int64_t r = 0; r < n; ++r) {
        const float wv = weights->data[r];
        for (int64_t c = 0; c < d; ++c) {
          rows->grad[r * d + c] += wv * out->grad[c];
        }
      }
    }
  });
  return out;
}

TensorPtr Tape::add(const TensorPtr& a, const TensorPtr& b) {
  check_finite("add", a);
  check_finite("add", b);
  if (a->shape != b->shape) shape_error("add", *a, *b);
  auto out = make_tensor(a->shape);
  for (size_t i = 0; i < a->data.size(); ++i) out->data[i] = a->data[i] + b->data[i];
  bool needs = a->requires_grad || b->requires_grad;
  record(out, needs, [a, b, out]() {
    if (a->requires_grad) {
      a->ensure_grad();
      for (size_t i = 0; i < out->grad.size(); ++i) a->grad[i] += out->grad[i];
    }
    if (b->requires_grad) {
      b->ensure_grad();
      for (size_t i = 0; i < out->grad.size(); ++i) b->grad[i] += out->grad[i];
    }
  });
  return out;
}

TensorPtr Tape::mul(const TensorPtr& a, const TensorPtr& b) {
  check_finite("mul", a);
  check_finite("mul", b);
  if (a->shape != b->shape) shape_error("mul", *a, *b);
  auto out = make_tensor(a->shape);
  for (size_t i = 0; i < a->data.size(); ++i) out->data[i] = a->data[i] * b->data[i];
  bool needs = a->requires_grad || b->requires_grad;
  record(out, needs, [a, b, out]() {
    if (a->requires_grad) {
      a->ensure_grad();
      for (size_t i = 0; i < out->grad.size(); ++i) {
        a->grad[i] += out->grad[i] * b->data[i];
      }
    }
    if (b->requires_grad) {
      b->ensure_grad();
      for (size_t i = 0; i < out->grad.size(); ++i) {
        b->grad[i] += out->grad[i] * a->data[i];
      }
    }
  });
  return out;
}

TensorPtr Tape::scale(const TensorPtr& x, float c) {
  check_finite("scale", x);
  if (!std::isfinite(c)) throw std::invalid_argument("scale: non-finite factor");
  auto out = make_tensor(x->shape);
  for (size_t i = 0; i < x->data.size(); ++i) out->data[i] = x->data[i] * c;
  record(out, x->requires_grad, [x, out, c]() {
    x->ensure_grad();
    for (size_t i = 0; i < out->grad.size(); ++i) x->grad[i] += out->grad[i] * c;
  });
  return out;
}

TensorPtr Tape::sum(const TensorPtr& x) {
  check_finite("sum", x);
  double acc = 0.0;
  for (float v : x->data) acc += v;
  auto out = make_scalar(static_cast<float>(acc));
  record(out, x->requires_grad, [x, out]() {
    x->ensure_grad();
    const float g = out->grad[0];
    for (size_t i = 0; i < x->grad.size(); ++i) x->grad[i] += g;
  });
  return out;
}

TensorPtr Tape::matmul(const TensorPtr& a, const TensorPtr& b) {
  check_finite("matmul", a);
  check_finite("matmul", b);
  const int64_t n = a->rows(), k = a->cols();
  if (b->shape.size() != 2 || b->shape[0] != k) shape_error("matmul", *a, *b);
  const int64_t m = b->shape[1];
  auto out = make_tensor({n, m});
  for (int64_t r = 0; r < n; ++r) {
    const float* ar = a->data.data() + r * k;
    float* or_ = out->data.data() + r * m;
    for (int64_t j = 0; j < k; ++j) {
      const float av = ar[j];
      const float* bj = b->data.data() + j * m;
      for (int64_t c = 0; c < m; ++c) or_[c] += av * bj[c];
    }
  }
  bool needs = a->requires_grad || b->requires_grad;
  record(out, needs, [a, b, out, n, k, m]() {
    if (a->requires_grad) {
      a->ensure_grad();
      for (int64_t r = 0; r < n; ++r) {
        const float* go = out->grad.data() + r * m;
        float* ga = a->grad.data() + r * k;
        for (int64_t j = 0; j < k; ++j) {
          const float* bj = b->data.data() + j * m;
          double acc = 0.0;
          for (int64_t c = 0; c < m; ++c) acc += double(go[c]) * bj[c];
          ga[j] += static_cast<float>(acc);
        }
      }
    }
    if (b->requires_grad) {
      b->ensure_grad();
      for (int64_t r = 0; r < n; ++r) {
        const float* ar = a->data.data() + r * k;
        const float* go = out->grad.data() + r * m;
        for (int64_t j = 0; j < k; ++j) {
          float* gb = b->grad.data() + j * m;
          const float av = ar[j];
          for (int64_t c = 0; c < m; ++c) gb[c] += av * go[c];
        }
      }
    }
  });
  return out;
}

TensorPtr Tape::matmul_nt(const TensorPtr& a, const TensorPtr& b) {
  check_finite("matmul_nt", a);
  check_finite("matmul_nt", b);
  const int64_t n = a->rows(), k = a->cols();
  const int64_t m = b->rows();
  if (b->cols() != k) shape_error("matmul_nt", *a, *b);
  auto out = make_tensor({n, m});
  for (int64_t r = 0; r < n; ++r) {
    const float* ar = a->data.data() + r * k;
    for (int64_t c = 0; c < m; ++c) {
      const float* bc = b->data.data() + c * k;
      double acc = 0.0;
      for (int64_t j = 0; j < k; ++j) acc += double(ar[j]) * bc[j];
      out->data[r * m + c] = static_cast<float>(acc);
    }
  }
  bool needs = a->requires_grad || b->requires_grad;
  record(out, needs, [a, b, out, n, k, m]() {
    if (a->requires_grad) {
      a->ensure_grad();
      for (int64_t r = 0; r < n; ++r) {
        const float* go = out->grad.data() + r * m;
        float* ga = a->grad.data() + r * k;
        for (int64_t c = 0; c < m; ++c) {
          const float* bc = b->data.data() + c * k;
          const float g = go[c];
          for (int64_t j = 0; j < k; ++j) ga[j] += g * bc[j];
        }
      }
    }
    if (b->requires_grad) {
      b->ensure_grad();
      for (int64_t r = 0; r < n; ++r) {
        const float* ar = a->data.data() + r * k;
        const float* go = out->grad.data() + r * m;
        for (int64_t c = 0; c < m; ++c) {
          float* gb = b->grad.data() + c * k;
          const float g = go[c];
          for (int64_t j = 0; j < k; ++j) gb[j] += g * ar[j];
        }
      }
    }
  });
  return out;
}

TensorPtr Tape::take_row(const TensorPtr& x, int64_t row) {
  check_finite("take_row", x);
  const int64_t n = x->rows(), d = x->cols();
  if (row < 0 || row >= n) {
    throw std::invalid_argument("take_row: row " + std::to_string(row) +
                                " out of range [0," + std::to_string(n) + ")");
  }
  auto out = make_tensor({1, d});
  std::copy_n(x->data.data() + row * d, d, out->data.data());
  record(out, x->requires_grad, [x, out, row, d]() {
    x->ensure_grad();
    for (int64_t c = 0; c < d; ++c) x->grad[row * d + c] += out->grad[c];
  });
  return out;
}

TensorPtr Tape::concat_rows(std::span<const TensorPtr> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no parts");
  const int64_t d = parts[0]->cols();
  bool needs = false;
  for (const auto& p : parts) {
    check_finite("concat_rows", p);
    if (p->rows() != 1 || p->cols() != d) {
      throw std::invalid_argument("concat_rows: parts must be single rows of "
                                  "equal width, got " + shape_str(*p));
    }
    needs = needs || p->requires_grad;
  }
  const int64_t n = static_cast<int64_t>(parts.size());
  auto out = make_tensor({n, d});
  for (int64_t r = 0; r < n; ++r) {
    std::copy_n(parts[r]->data.data(), d, out->data.data() + r * d);
  }
  std::vector<TensorPtr> parts_copy(parts.begin(), parts.end());
  record(out, needs, [parts_copy, out, d]() {
    for (size_t r = 0; r < parts_copy.size(); ++r) {
      auto& p = parts_copy[r];
      if (!p->requires_grad) continue;
      p->ensure_grad();
      const float* src = out->grad.data() + static_cast<int64_t>(r) * d;
      for (int64_t c = 0; c < d; ++c) p->grad[c] += src[c];
    }
  });
  return out;
}

TensorPtr Tape::gumbel_softmax(const TensorPtr& p, std::span<const float> noise,
                               float tau) {
  check_finite("gumbel_softmax", p);
  if (!(tau > 0.0f)) throw std::invalid_argument("gumbel_softmax: tau must be > 0");
  const int64_t n = p->numel();
  if (p->rows() != 1) {
    throw std::invalid_argument("gumbel_softmax: expected one row, got " +
                                shape_str(*p));
  }
  if (static_cast<int64_t>(noise.size()) != n) {
    throw std::invalid_argument("gumbel_softmax: noise size mismatch");
  }
  for (int64_t i = 0; i < n; ++i) {
    if (!(p->data[i] > 0.0f)) {
      throw std::invalid_argument("gumbel_softmax: probabilities must be > 0");
    }
    if (!std::isfinite(noise[i])) {
      throw std::invalid_argument("gumbel_softmax: non-finite noise");
    }
  }
  std::vector<float> z(n);
  for (int64_t i = 0; i < n; ++i) {
    z[i] = static_cast<float>((std::log(double(p->data[i])) + noise[i]) / tau);
  }
  auto out = make_tensor(p->shape);
  softmax_row(z.data(), out->data.data(), n);
  record(out, p->requires_grad, [p, out, tau, n]() {
    p->ensure_grad();
    std::vector<float> gz(n);
    softmax_backward_row(out->data.data(), out->grad.data(), gz.data(), n);
    for (int64_t i = 0; i < n; ++i) {
      p->grad[i] += gz[i] / (tau * p->data[i]);
    }
  });
  return out;
}

void Tape::backward(const TensorPtr& loss) {
  if (!loss || loss->numel() != 1) {
    throw std::invalid_argument("backward: loss must be a scalar tensor");
  }
  bool on_tape = false;
  for (const auto& node : nodes_) {
    if (node.out == loss) { on_tape = true; break; }
  }
  if (!on_tape) throw std::invalid_argument("backward: loss is not on this tape");
  // Intermediate grads reset per call; leaf grads accumulate across calls.
  for (auto& node : nodes_) node.out->zero_grad();
  loss->grad[0] = 1.0f;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) it->back();
}

}  // namespace lws
