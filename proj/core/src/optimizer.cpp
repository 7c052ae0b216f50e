#include "lws/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace lws {

void Adam::step(std::vector<ParamStore*> stores) {
  ++t_;
  const double bc1 = 1.0 - std::pow(double(config_.beta1), double(t_));
  const double bc2 = 1.0 - std::pow(double(config_.beta2), double(t_));
  for (ParamStore* store : stores) {
    for (const auto& [name, p] : *store) {
      if (p->grad.size() != p->data.size()) {
        throw std::runtime_error("Adam: missing grad for parameter " + name);
      }
      auto& mom = state_[name];
      if (mom.m.empty()) {
        mom.m.assign(p->data.size(), 0.0f);
        mom.v.assign(p->data.size(), 0.0f);
      }
      for (size_t i = 0; i < p->data.size(); ++i) {
        const float g = p->grad[i];
        mom.m[i] = config_.beta1 * mom.m[i] + (1.0f - config_.beta1) * g;
        mom.v[i] = config_.beta2 * mom.v[i] + (1.0f - config_.beta2) * g * g;
        const double mhat = mom.m[i] / bc1;
        const double vhat = mom.v[i] / bc2;
        p->data[i] -= static_cast<float>(config_.lr * mhat /
                                         (std::sqrt(vhat) + config_.eps));
      }
      p->zero_grad();
    }
  }
}

}  // namespace lws
