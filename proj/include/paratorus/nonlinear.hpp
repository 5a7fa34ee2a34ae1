#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "paratorus/errors.hpp"

namespace paratorus {

/// A C^3_b scalar nonlinearity with its first three derivatives.
struct NonlinearFn {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  std::function<double(double)> d3;
  double c3b_bound = 0.0;                 // declared ||f||_{C^3_b}
  std::optional<double> lower_bound;      // declared inf f, when known
  std::optional<double> constant_value;   // set for constant functions

  double operator()(double x) const { return f(x); }

  /// Largest relative mismatch between f' and a centred difference of f on
  /// [-range, range].
  double derivative_consistency(double range = 4.0, int probes = 81) const {
    double worst = 0.0;
    const double h = 1e-5;
    for (int i = 0; i < probes; ++i) {
      const double x = -range + 2.0 * range * i / (probes - 1);
      const double fd = (f(x + h) - f(x - h)) / (2.0 * h);
      const double ref = std::max(1.0, std::abs(d1(x)));
      worst = std::max(worst, std::abs(fd - d1(x)) / ref);
    }
    return worst;
  }
};

inline NonlinearFn constant_fn(double c) {
  NonlinearFn fn;
  fn.name = "const:" + std::to_string(c);
  fn.f = [c](double) { return c; };
  fn.d1 = fn.d2 = fn.d3 = [](double) { return 0.0; };
  fn.c3b_bound = std::abs(c);
  if (c > 0.0) fn.lower_bound = c;
  fn.constant_value = c;
  return fn;
}

/// shift + scale * tanh(x).
inline NonlinearFn tanh_fn(double shift = 0.0, double scale = 1.0) {
  NonlinearFn fn;
  fn.name = "tanh:shift=" + std::to_string(shift) + ",scale=" + std::to_string(scale);
  fn.f = [=](double x) { return shift + scale * std::tanh(x); };
  fn.d1 = [=](double x) {
    const double t = std::tanh(x);
    return scale * (1.0 - t * t);
  };
  fn.d2 = [=](double x) {
    const double t = std::tanh(x);
    return scale * (-2.0 * t * (1.0 - t * t));
  };
  fn.d3 = [=](double x) {
    const double t = std::tanh(x);
    const double s = 1.0 - t * t;
    return scale * (-2.0 * s * s + 4.0 * t * t * s);
  };
  // |tanh'| <= 1, |tanh''| <= 4/(3 sqrt 3), |tanh'''| <= 2
  fn.c3b_bound = std::abs(shift) + std::abs(scale) * 2.0;
  if (shift - std::abs(scale) > 0.0) fn.lower_bound = shift - std::abs(scale);
  return fn;
}

inline NonlinearFn sine_fn(double amplitude = 1.0) {
  NonlinearFn fn;
  fn.name = "sin:amp=" + std::to_string(amplitude);
  fn.f = [=](double x) { return amplitude * std::sin(x); };
  fn.d1 = [=](double x) { return amplitude * std::cos(x); };
  fn.d2 = [=](double x) { return -amplitude * std::sin(x); };
  fn.d3 = [=](double x) { return -amplitude * std::cos(x); };
  fn.c3b_bound = std::abs(amplitude);
  return fn;
}

/// slope * x on [-radius, radius], saturating to a constant over a further
/// width with a C^3 polynomial join, so the function lies in C^3_b.
inline NonlinearFn clamped_linear_fn(double slope, double radius, double width = 1.0) {
  // q(s) = 1 - smoothstep_7(s): q(0)=1, q(1)=0, first three derivatives
  // vanish at both ends.
  auto q = [](double s) {
    return 1.0 + s * s * s * s * (-35.0 + s * (84.0 + s * (-70.0 + 20.0 * s)));
  };
  auto q1 = [](double s) { return s * s * s * (-140.0 + s * (420.0 + s * (-420.0 + 140.0 * s))); };
  auto q2 = [](double s) { return s * s * (-420.0 + s * (1680.0 + s * (-2100.0 + 840.0 * s))); };
  auto qint = [](double s) {
    return s + s * s * s * s * s * (-7.0 + s * (14.0 + s * (-10.0 + 2.5 * s)));
  };
  NonlinearFn fn;
  fn.name = "clamped-linear:slope=" + std::to_string(slope) + ",radius=" + std::to_string(radius);
  fn.f = [=](double x) {
    const double ax = std::abs(x);
    const double sgn = x < 0 ? -1.0 : 1.0;
    if (ax <= radius) return slope * x;
    const double s = std::min((ax - radius) / width, 1.0);
    return sgn * slope * (radius + width * qint(s));
  };
  fn.d1 = [=](double x) {
    const double ax = std::abs(x);
    if (ax <= radius) return slope;
    const double s = (ax - radius) / width;
    return s >= 1.0 ? 0.0 : slope * q(s);
  };
  fn.d2 = [=](double x) {
    const double ax = std::abs(x);
    const double sgn = x < 0 ? -1.0 : 1.0;
    if (ax <= radius) return 0.0;
    const double s = (ax - radius) / width;
    return s >= 1.0 ? 0.0 : sgn * slope * q1(s) / width;
  };
  fn.d3 = [=](double x) {
    const double ax = std::abs(x);
    if (ax <= radius) return 0.0;
    const double s = (ax - radius) / width;
    return s >= 1.0 ? 0.0 : slope * q2(s) / (width * width);
  };
  fn.c3b_bound = std::abs(slope) * (radius + 0.5 * width + 1.0 + 2.0 / width + 6.0 / (width * width));
  return fn;
}

}  // namespace paratorus
