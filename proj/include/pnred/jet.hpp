#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

namespace pnred {

inline constexpr std::size_t kMaxJetDim = 24;

// Value plus gradient over the base coordinates at one point. Used to run the
// calculus numerically as an independent witness of the symbolic verdicts.
// Differentiating a Jet yields a value with unknown (NaN) gradient, so any
// accidental second derivative shows up as NaN instead of a silent zero.
struct Jet {
  double value = 0.0;
  std::array<double, kMaxJetDim> grad{};

  Jet() = default;
  Jet(double v) : value(v) {}  // NOLINT(google-explicit-constructor)

  static Jet variable(double v, std::size_t index) {
    if (index >= kMaxJetDim) throw std::out_of_range("jet dimension exceeded");
    Jet j(v);
    j.grad[index] = 1.0;
    return j;
  }

  Jet partial(std::size_t index) const {
    Jet j(grad.at(index));
    j.grad.fill(std::numeric_limits<double>::quiet_NaN());
    return j;
  }

  bool exactly_zero() const {
    if (value != 0.0) return false;
    for (double g : grad) {
      if (g != 0.0) return false;
    }
    return true;
  }
};

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r(a.value + b.value);
  for (std::size_t i = 0; i < kMaxJetDim; ++i) r.grad[i] = a.grad[i] + b.grad[i];
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r(a.value - b.value);
  for (std::size_t i = 0; i < kMaxJetDim; ++i) r.grad[i] = a.grad[i] - b.grad[i];
  return r;
}

inline Jet operator-(const Jet& a) {
  Jet r(-a.value);
  for (std::size_t i = 0; i < kMaxJetDim; ++i) r.grad[i] = -a.grad[i];
  return r;
}

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r(a.value * b.value);
  for (std::size_t i = 0; i < kMaxJetDim; ++i) r.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
  return r;
}

inline Jet operator/(const Jet& a, const Jet& b) {
  Jet r(a.value / b.value);
  double b2 = b.value * b.value;
  for (std::size_t i = 0; i < kMaxJetDim; ++i) {
    r.grad[i] = (a.grad[i] * b.value - a.value * b.grad[i]) / b2;
  }
  return r;
}

inline Jet& operator+=(Jet& a, const Jet& b) { return a = a + b; }
inline Jet& operator-=(Jet& a, const Jet& b) { return a = a - b; }
inline Jet& operator*=(Jet& a, const Jet& b) { return a = a * b; }

inline Jet exp(const Jet& a) {
  double e = std::exp(a.value);
  Jet r(e);
  for (std::size_t i = 0; i < kMaxJetDim; ++i) r.grad[i] = e * a.grad[i];
  return r;
}

}  // namespace pnred
