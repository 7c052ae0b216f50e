#include "lws/grad_check.hpp"

#include <cmath>
#include <stdexcept>

namespace lws {

namespace {

float eval_scalar(const ScalarFn& f, bool with_grad) {
  Tape tape;
  tape.set_recording(with_grad);
  TensorPtr loss = f(tape);
  if (!loss || loss->numel() != 1) {
    throw std::invalid_argument("grad_check: f must return a scalar");
  }
  if (!std::isfinite(loss->data[0])) {
    throw std::runtime_error("grad_check: non-finite loss");
  }
  if (with_grad) tape.backward(loss);
  return loss->data[0];
}

}  // namespace

float grad_check(const ScalarFn& f, ParamStore& params, float eps,
                 int samples_per_param, Rng& rng) {
  if (eps < 1e-4f || eps > 1e-2f) {
    throw std::invalid_argument("grad_check: eps must be in [1e-4, 1e-2]");
  }
  params.zero_grads();
  eval_scalar(f, /*with_grad=*/true);

  float max_rel = 0.0f;
  for (const auto& [name, p] : params) {
    const int64_t n = p->numel();
    const int64_t probes = std::min<int64_t>(n, samples_per_param);
    for (int64_t s = 0; s < probes; ++s) {
      const int64_t i = (probes == n)
                            ? s
                            : static_cast<int64_t>(uniform_below(rng, n));
      const float analytic = p->grad[i];
      const float orig = p->data[i];
      p->data[i] = orig + eps;
      const float fp = eval_scalar(f, /*with_grad=*/false);
      p->data[i] = orig - eps;
      const float fm = eval_scalar(f, /*with_grad=*/false);
      p->data[i] = orig;
      const float numeric = (fp - fm) / (2.0f * eps);
      const float denom = std::max(1e-6f, std::fabs(analytic) + std::fabs(numeric));
      const float rel = std::fabs(analytic - numeric) / denom;
      if (rel > max_rel) max_rel = rel;
    }
  }
  return max_rel;
}

}  // namespace lws
