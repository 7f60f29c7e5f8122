#pragma once

// Arithmetic for Dual3; private to the geometry sources.

#include "biquant/propagator.hpp"

#include <cmath>

namespace biquant {

inline Dual3 operator+(Dual3 a, const Dual3& b) {
  a.v += b.v;
  for (int i = 0; i < 3; ++i) a.d[i] += b.d[i];
  return a;
}
inline Dual3 operator-(Dual3 a, const Dual3& b) {
  a.v -= b.v;
  for (int i = 0; i < 3; ++i) a.d[i] -= b.d[i];
  return a;
}
inline Dual3 operator-(Dual3 a) {
  a.v = -a.v;
  for (auto& x : a.d) x = -x;
  return a;
}
inline Dual3 operator*(const Dual3& a, const Dual3& b) {
  Dual3 r(a.v * b.v);
  for (int i = 0; i < 3; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}
inline Dual3 operator/(const Dual3& a, const Dual3& b) {
  Dual3 r(a.v / b.v);
  for (int i = 0; i < 3; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) / b.v;
  return r;
}
// Applies a scalar function with known derivative.
inline Dual3 chain(const Dual3& a, double value, double deriv) {
  Dual3 r(value);
  for (int i = 0; i < 3; ++i) r.d[i] = deriv * a.d[i];
  return r;
}
inline Dual3 sqrt(const Dual3& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, s > 0 ? 0.5 / s : 0.0);
}
// Zero partials at the origin, where the angle has no derivative.
inline Dual3 atan2(const Dual3& a, const Dual3& b) {
  Dual3 r(std::atan2(a.v, b.v));
  const double n = a.v * a.v + b.v * b.v;
  if (n > 0)
    for (int i = 0; i < 3; ++i) r.d[i] = (b.v * a.d[i] - a.v * b.d[i]) / n;
  return r;
}
inline Dual3 smooth_step(const Dual3& t) { return chain(t, smooth_step(t.v), smooth_step_derivative(t.v)); }

}  // namespace biquant
