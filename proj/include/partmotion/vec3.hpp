#pragma once

#include <cmath>
#include <cstdint>

namespace pm {

// Small 3-vector, templated so the same geometry code runs on plain doubles
// and on autodiff variables.
template <class T>
struct V3 {
  T x{};
  T y{};
  T z{};

  V3() = default;
  V3(T xx, T yy, T zz) : x(xx), y(yy), z(zz) {}

  T& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  const T& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  V3& operator+=(const V3& o) {
    x = x + o.x;
    y = y + o.y;
    z = z + o.z;
    return *this;
  }
  V3& operator-=(const V3& o) {
    x = x - o.x;
    y = y - o.y;
    z = z - o.z;
    return *this;
  }
};

using Vec3 = V3<double>;

template <class T>
V3<T> operator+(const V3<T>& a, const V3<T>& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
template <class T>
V3<T> operator-(const V3<T>& a, const V3<T>& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
template <class T>
V3<T> operator-(const V3<T>& a) {
  return {-a.x, -a.y, -a.z};
}
template <class T, class S>
auto operator*(const V3<T>& a, const S& s) -> V3<decltype(a.x * s)> {
  return {a.x * s, a.y * s, a.z * s};
}
template <class T, class S>
auto operator*(const S& s, const V3<T>& a) -> V3<decltype(a.x * s)> {
  return {a.x * s, a.y * s, a.z * s};
}
template <class T, class S>
auto operator/(const V3<T>& a, const S& s) -> V3<decltype(a.x / s)> {
  return {a.x / s, a.y / s, a.z / s};
}

template <class T>
T dot(const V3<T>& a, const V3<T>& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
template <class T>
V3<T> cross(const V3<T>& a, const V3<T>& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
template <class T>
T norm2(const V3<T>& a) {
  return dot(a, a);
}
template <class T>
T norm(const V3<T>& a) {
  using std::sqrt;
  return sqrt(norm2(a));
}
template <class T>
V3<T> normalized(const V3<T>& a) {
  return a / norm(a);
}

inline double dist2(const Vec3& a, const Vec3& b) { return norm2(a - b); }

// Rodrigues rotation with the angle supplied as (cos, sin) so callers can
// hoist the trig out of per-point loops.
template <class T>
V3<T> rotate_axis_cs(const V3<T>& p, const V3<T>& unit_axis, const T& c, const T& s,
                     const V3<T>& center) {
  V3<T> v = p - center;
  V3<T> kxv = cross(unit_axis, v);
  T kdv = dot(unit_axis, v);
  V3<T> r = v * c + kxv * s + unit_axis * (kdv * (1.0 - c));
  return r + center;
}

template <class T>
V3<T> rotate_axis_angle(const V3<T>& p, const V3<T>& unit_axis, const T& angle,
                        const V3<T>& center) {
  using std::cos;
  using std::sin;
  return rotate_axis_cs(p, unit_axis, cos(angle), sin(angle), center);
}

}  // namespace pm
