#include "partmotion/adam.hpp"

#include <cmath>

#include "partmotion/error.hpp"

namespace pm {

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               std::span<const std::string> names) {
  if (params.size() != grads.size()) throw InputError("adam_step: size mismatch");
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
    state.t = 0;
  }

  for (size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      std::string name = i < names.size() ? names[i] : "param[" + std::to_string(i) + "]";
      throw NumericalError("non-finite gradient for " + name);
    }
  }

  ++state.t;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
    double mhat = state.m[i] / bc1;
    double vhat = state.v[i] / bc2;
    params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

}  // namespace pm
