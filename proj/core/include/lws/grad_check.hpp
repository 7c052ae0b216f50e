#pragma once

#include <functional>

#include "lws/param_store.hpp"
#include "lws/tape.hpp"

namespace lws {

/// Builds a scalar loss over the current parameter values. Called several
/// times per check (once with gradients, twice per probed coordinate).
using ScalarFn = std::function<TensorPtr(Tape&)>;

/// Central-difference check of tape gradients. Probes up to
/// samples_per_param coordinates of every parameter (all of them when the
/// parameter is smaller) and returns the max of
/// |analytic - numeric| / max(1e-6, |analytic| + |numeric|).
/// eps must lie in [1e-4, 1e-2]; f must stay finite.
float grad_check(const ScalarFn& f, ParamStore& params, float eps,
                 int samples_per_param, Rng& rng);

}  // namespace lws
