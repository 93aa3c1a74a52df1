#pragma once

#include <span>
#include <string>
#include <vector>

namespace pm {

struct AdamState {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<double> m;
  std::vector<double> v;
  long t = 0;

  explicit AdamState(size_t n = 0, double learning_rate = 0.01)
      : lr(learning_rate), m(n, 0.0), v(n, 0.0) {}
};

// Standard bias-corrected Adam update, in place. Throws NumericalError naming
// the offending parameter when a gradient is non-finite.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               std::span<const std::string> names = {});

}  // namespace pm
