#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "partmotion/error.hpp"
#include "partmotion/vec3.hpp"

namespace pm::ad {

// Scalar reverse-mode tape. Values are computed eagerly at record time
// (callers may branch on them); one backward pass per evaluation fills the
// adjoints. Tapes are single-threaded; run independent optimizations on
// independent tapes.
class Tape;

struct Var {
  Tape* tape = nullptr;
  int32_t id = -1;

  double value() const;
};

enum class Op : uint8_t {
  kConst,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kAddC,   // x + aux
  kCSub,   // aux - x
  kMulC,   // x * aux
  kSqrt,
  kExp,
  kLog,
  kAbs,
  kMax,
  kMin,
  kMaxC,   // max(x, aux)
  kMinC,   // min(x, aux)
  kSin,
  kCos,
  kTan,
};

class Tape {
 public:
  Tape() { reserve(1 << 12); }

  void reserve(size_t n) {
    op_.reserve(n);
    a_.reserve(n);
    b_.reserve(n);
    aux_.reserve(n);
    val_.reserve(n);
  }

  void clear() {
    op_.clear();
    a_.clear();
    b_.clear();
    aux_.clear();
    val_.clear();
    adj_.clear();
    backward_done_ = false;
  }

  size_t size() const { return op_.size(); }

  Var constant(double v) { return record(Op::kConst, -1, -1, 0.0, v); }
  // Leaf nodes for optimization parameters (same storage as constants; the
  // distinction is only the caller's bookkeeping of which ids to read back).
  Var input(double v) { return constant(v); }

  double value(Var x) const { return val_[x.id]; }

  double adjoint(Var x) const {
    if (!backward_done_) throw NumericalError("adjoint read before backward");
    return adj_[x.id];
  }

  // Populates adjoints with exact partial derivatives of `output`.
  // Exactly one backward pass per tape evaluation.
  void backward(Var output);

  std::vector<double> gradient(std::span<const Var> params) const {
    std::vector<double> g(params.size());
    for (size_t i = 0; i < params.size(); ++i) g[i] = adjoint(params[i]);
    return g;
  }

  Var add(Var x, Var y) { return record(Op::kAdd, x.id, y.id, 0.0, val_[x.id] + val_[y.id]); }
  Var sub(Var x, Var y) { return record(Op::kSub, x.id, y.id, 0.0, val_[x.id] - val_[y.id]); }
  Var mul(Var x, Var y) { return record(Op::kMul, x.id, y.id, 0.0, val_[x.id] * val_[y.id]); }
  Var div(Var x, Var y) {
    if (val_[y.id] == 0.0) throw NumericalError("division by zero on tape");
    return record(Op::kDiv, x.id, y.id, 0.0, val_[x.id] / val_[y.id]);
  }
  Var add_c(Var x, double c) { return record(Op::kAddC, x.id, -1, c, val_[x.id] + c); }
  Var c_sub(double c, Var x) { return record(Op::kCSub, x.id, -1, c, c - val_[x.id]); }
  Var mul_c(Var x, double c) { return record(Op::kMulC, x.id, -1, c, val_[x.id] * c); }
  Var div_c(Var x, double c) {
    if (c == 0.0) throw NumericalError("division by zero on tape");
    return mul_c(x, 1.0 / c);
  }
  Var sqrt_(Var x) {
    if (val_[x.id] < 0.0) throw NumericalError("sqrt of negative on tape");
    return record(Op::kSqrt, x.id, -1, 0.0, std::sqrt(val_[x.id]));
  }
  Var exp_(Var x) { return record(Op::kExp, x.id, -1, 0.0, std::exp(val_[x.id])); }
  Var log_(Var x) {
    if (val_[x.id] <= 0.0) throw NumericalError("log of non-positive on tape");
    return record(Op::kLog, x.id, -1, 0.0, std::log(val_[x.id]));
  }
  Var abs_(Var x) { return record(Op::kAbs, x.id, -1, 0.0, std::abs(val_[x.id])); }
  Var max_(Var x, Var y) {
    return record(Op::kMax, x.id, y.id, 0.0, std::max(val_[x.id], val_[y.id]));
  }
  Var min_(Var x, Var y) {
    return record(Op::kMin, x.id, y.id, 0.0, std::min(val_[x.id], val_[y.id]));
  }
  Var max_c(Var x, double c) { return record(Op::kMaxC, x.id, -1, c, std::max(val_[x.id], c)); }
  Var min_c(Var x, double c) { return record(Op::kMinC, x.id, -1, c, std::min(val_[x.id], c)); }
  Var sin_(Var x) { return record(Op::kSin, x.id, -1, 0.0, std::sin(val_[x.id])); }
  Var cos_(Var x) { return record(Op::kCos, x.id, -1, 0.0, std::cos(val_[x.id])); }
  Var tan_(Var x) { return record(Op::kTan, x.id, -1, 0.0, std::tan(val_[x.id])); }

 private:
  Var record(Op op, int32_t a, int32_t b, double aux, double value) {
    op_.push_back(op);
    a_.push_back(a);
    b_.push_back(b);
    aux_.push_back(aux);
    val_.push_back(value);
    return Var{this, static_cast<int32_t>(val_.size() - 1)};
  }

  std::vector<Op> op_;
  std::vector<int32_t> a_, b_;
  std::vector<double> aux_, val_, adj_;
  bool backward_done_ = false;
};

inline double Var::value() const { return tape->value(*this); }

inline Var operator+(Var x, Var y) { return x.tape->add(x, y); }
inline Var operator-(Var x, Var y) { return x.tape->sub(x, y); }
inline Var operator*(Var x, Var y) { return x.tape->mul(x, y); }
inline Var operator/(Var x, Var y) { return x.tape->div(x, y); }
inline Var operator+(Var x, double c) { return x.tape->add_c(x, c); }
inline Var operator+(double c, Var x) { return x.tape->add_c(x, c); }
inline Var operator-(Var x, double c) { return x.tape->add_c(x, -c); }
inline Var operator-(double c, Var x) { return x.tape->c_sub(c, x); }
inline Var operator*(Var x, double c) { return x.tape->mul_c(x, c); }
inline Var operator*(double c, Var x) { return x.tape->mul_c(x, c); }
inline Var operator/(Var x, double c) { return x.tape->div_c(x, c); }
inline Var operator/(double c, Var x) { return x.tape->div(x.tape->constant(c), x); }
inline Var operator-(Var x) { return x.tape->mul_c(x, -1.0); }

inline Var sqrt(Var x) { return x.tape->sqrt_(x); }
inline Var exp(Var x) { return x.tape->exp_(x); }
inline Var log(Var x) { return x.tape->log_(x); }
inline Var abs(Var x) { return x.tape->abs_(x); }
inline Var max(Var x, Var y) { return x.tape->max_(x, y); }
inline Var min(Var x, Var y) { return x.tape->min_(x, y); }
inline Var max(Var x, double c) { return x.tape->max_c(x, c); }
inline Var max(double c, Var x) { return x.tape->max_c(x, c); }
inline Var min(Var x, double c) { return x.tape->min_c(x, c); }
inline Var min(double c, Var x) { return x.tape->min_c(x, c); }
inline Var sin(Var x) { return x.tape->sin_(x); }
inline Var cos(Var x) { return x.tape->cos_(x); }
inline Var tan(Var x) { return x.tape->tan_(x); }
inline Var relu(Var x) { return x.tape->max_c(x, 0.0); }

using VarV3 = V3<Var>;

inline VarV3 make_v3(Tape& t, const Vec3& v) {
  return {t.constant(v.x), t.constant(v.y), t.constant(v.z)};
}

inline Vec3 value(const VarV3& v) { return {v.x.value(), v.y.value(), v.z.value()}; }

// Mixed Var/double vector arithmetic keeps constants out of the node stream.
inline VarV3 operator-(const Vec3& a, const VarV3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline VarV3 operator-(const VarV3& a, const Vec3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline VarV3 operator+(const VarV3& a, const Vec3& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline VarV3 operator+(const Vec3& a, const VarV3& b) { return b + a; }
inline Var dot(const VarV3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Var dot(const Vec3& a, const VarV3& b) { return dot(b, a); }

inline VarV3 cross(const Vec3& a, const VarV3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline VarV3 cross(const VarV3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// Euclidean distance between a Var point and a fixed point.
inline Var dist_to(const VarV3& a, const Vec3& b) {
  Var dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return sqrt(dx * dx + dy * dy + dz * dz);
}

// Rodrigues rotation of a fixed point about a Var axis/center.
inline VarV3 rotate_point_cs(const Vec3& p, const VarV3& unit_axis, Var c, Var s,
                             const VarV3& center) {
  VarV3 v = p - center;
  VarV3 kxv = cross(unit_axis, v);
  Var kdv = dot(unit_axis, v);
  VarV3 r = v * c + kxv * s + unit_axis * (kdv * (1.0 - c));
  return r + center;
}

// Builds the objective from parameter leaves on a fresh tape.
using TapeFn = std::function<Var(Tape&, std::span<const Var>)>;

// Max over coordinates of |autodiff - central difference| / (|central| + 1e-8).
double finite_diff_check(const TapeFn& f, std::span<const double> x, double h = 1e-5);

}  // namespace pm::ad
