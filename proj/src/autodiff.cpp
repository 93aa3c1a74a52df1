#include "partmotion/autodiff.hpp"

#include <cmath>

namespace pm::ad {

void Tape::backward(Var output) {
  if (output.tape != this || output.id < 0 || output.id >= static_cast<int32_t>(val_.size()))
    throw NumericalError("backward: output is not a node of this tape");
  if (backward_done_) throw NumericalError("backward: tape already differentiated");
  backward_done_ = true;

  adj_.assign(val_.size(), 0.0);
  adj_[output.id] = 1.0;

  for (int32_t i = output.id; i >= 0; --i) {
    double g = adj_[i];
    if (g == 0.0) continue;
    int32_t a = a_[i], b = b_[i];
    switch (op_[i]) {
      case Op::kConst:
        break;
      case Op::kAdd:
        adj_[a] += g;
        adj_[b] += g;
        break;
      case Op::kSub:
        adj_[a] += g;
        adj_[b] -= g;
        break;
      case Op::kMul:
        adj_[a] += g * val_[b];
        adj_[b] += g * val_[a];
        break;
      case Op::kDiv:
        adj_[a] += g / val_[b];
        adj_[b] -= g * val_[i] / val_[b];
        break;
      case Op::kAddC:
        adj_[a] += g;
        break;
      case Op::kCSub:
        adj_[a] -= g;
        break;
      case Op::kMulC:
        adj_[a] += g * aux_[i];
        break;
      case Op::kSqrt:
        // Subgradient 0 at the x=0 kink.
        if (val_[i] > 0.0) adj_[a] += g * 0.5 / val_[i];
        break;
      case Op::kExp:
        adj_[a] += g * val_[i];
        break;
      case Op::kLog:
        adj_[a] += g / val_[a];
        break;
      case Op::kAbs:
        if (val_[a] > 0.0)
          adj_[a] += g;
        else if (val_[a] < 0.0)
          adj_[a] -= g;
        break;
      case Op::kMax:
        if (val_[a] > val_[b])
          adj_[a] += g;
        else
          adj_[b] += g;
        break;
      case Op::kMin:
        if (val_[a] < val_[b])
          adj_[a] += g;
        else
          adj_[b] += g;
        break;
      case Op::kMaxC:
        if (val_[a] > aux_[i]) adj_[a] += g;
        break;
      case Op::kMinC:
        if (val_[a] < aux_[i]) adj_[a] += g;
        break;
      case Op::kSin:
        adj_[a] += g * std::cos(val_[a]);
        break;
      case Op::kCos:
        adj_[a] -= g * std::sin(val_[a]);
        break;
      case Op::kTan:
        adj_[a] += g * (1.0 + val_[i] * val_[i]);
        break;
    }
  }
}

double finite_diff_check(const TapeFn& f, std::span<const double> x, double h) {
  std::vector<double> grad_ad;
  {
    Tape tape;
    std::vector<Var> params(x.size());
    for (size_t i = 0; i < x.size(); ++i) params[i] = tape.input(x[i]);
    Var out = f(tape, params);
    tape.backward(out);
    grad_ad = tape.gradient(params);
  }

  auto eval = [&](std::span<const double> p) {
    Tape tape;
    std::vector<Var> params(p.size());
    for (size_t i = 0; i < p.size(); ++i) params[i] = tape.input(p[i]);
    return f(tape, params).value();
  };

  std::vector<double> xp(x.begin(), x.end());
  double worst = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double orig = xp[i];
    xp[i] = orig + h;
    double fp = eval(xp);
    xp[i] = orig - h;
    double fm = eval(xp);
    xp[i] = orig;
    double central = (fp - fm) / (2.0 * h);
    double err = std::abs(grad_ad[i] - central) / (std::abs(central) + 1e-8);
    if (err > worst) worst = err;
  }
  return worst;
}

}  // namespace pm::ad
