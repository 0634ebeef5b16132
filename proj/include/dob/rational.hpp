#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dob/poly.hpp"

namespace dob {

/// Rational transfer function num(z)/den(z).
///
/// Canonical form keeps den monic; the scale is folded into num. Proper and
/// improper functions are both representable. Arithmetic is by exact
/// cross-multiplication: common factors are never cancelled, so a pole that
/// coincides with a zero stays visible (see near_cancellations()).
class Rational {
 public:
  /// Constant 1.
  Rational() : num_{1.0}, den_{1.0} {}
  /// Throws Error(ZeroDenominator) if den is identically zero.
  Rational(Poly num, Poly den);

  static Rational constant(double c) { return Rational(Poly::constant(c), Poly::constant(1.0)); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  Complex operator()(Complex z) const { return num_(z) / den_(z); }

  /// deg(den) - deg(num); 0 for biproper, negative for improper.
  int relative_degree() const;
  /// lim_{z->inf}; 0 when strictly proper. Throws InvalidParam if improper.
  double high_frequency_gain() const;

  std::vector<Complex> poles() const { return roots(den_); }
  std::vector<Complex> zeros() const;

  /// (pole, zero) pairs closer than tol. Reported only; never removed.
  std::vector<std::pair<Complex, Complex>> near_cancellations(double tol = 1e-7) const;

 private:
  Poly num_;
  Poly den_;
};

Rational operator+(const Rational& a, const Rational& b);
Rational operator-(const Rational& a, const Rational& b);
Rational operator*(const Rational& a, const Rational& b);
Rational operator*(double s, const Rational& a);

struct Feedback {
  Rational sensitivity;     // 1 / (1 + L)
  Rational complementary;   // L / (1 + L)
};

/// Unity negative feedback around open loop L. Throws ZeroDenominator if
/// 1 + L is identically zero.
Feedback feedback(const Rational& open_loop);

/// r(e^{j theta}) for each theta. Throws PoleOnGrid when |den(e^{j theta})|
/// drops below 1e-14.
std::vector<Complex> freqresp(const Rational& r, std::span<const double> thetas);
Complex freqresp(const Rational& r, double theta);

enum class Stability { Stable, Marginal, Unstable };

const char* to_string(Stability s);

/// Width of the band around |z| = 1 classified as Marginal.
inline constexpr double kUnitCircleBand = 1e-9;

Stability classify_roots(std::span<const Complex> roots);
inline Stability classify(const Poly& characteristic) {
  const auto rs = roots(characteristic);
  return classify_roots(rs);
}
inline Stability classify(const Rational& r) { return classify(r.den()); }

double spectral_radius(std::span<const Complex> roots);

}  // namespace dob
