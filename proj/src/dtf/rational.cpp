#include "dob/rational.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dob/error.hpp"

namespace dob {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::PoleOnGrid: return "PoleOnGrid";
    case ErrorCode::PoleOnCircle: return "PoleOnCircle";
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::UnstableSensitivity: return "UnstableSensitivity";
    case ErrorCode::RootFinding: return "RootFinding";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Marginal: return "marginal";
    case Stability::Unstable: return "unstable";
  }
  return "unknown";
}

Rational::Rational(Poly num, Poly den) {
  if (den.is_zero()) throw Error(ErrorCode::ZeroDenominator, "denominator is identically zero");
  const double lead = den.leading();
  num_ = num.scaled(1.0 / lead);
  den_ = den.scaled(1.0 / lead);
}

int Rational::relative_degree() const {
  if (num_.is_zero()) return den_.degree() + 1;
  return den_.degree() - num_.degree();
}

double Rational::high_frequency_gain() const {
  const int rd = relative_degree();
  if (rd < 0) throw Error(ErrorCode::InvalidParam, "improper transfer function has no limit at infinity");
  if (rd > 0) return 0.0;
  return num_.leading() / den_.leading();
}

std::vector<Complex> Rational::zeros() const {
  if (num_.is_zero()) return {};
  return roots(num_);
}

std::vector<std::pair<Complex, Complex>> Rational::near_cancellations(double tol) const {
  std::vector<std::pair<Complex, Complex>> out;
  const auto ps = poles();
  const auto zs = zeros();
  for (const auto& p : ps)
    for (const auto& z : zs)
      if (std::abs(p - z) < tol) out.emplace_back(p, z);
  return out;
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(a.num() * b.den() + b.num() * a.den(), a.den() * b.den());
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-1.0) * b; }

Rational operator*(const Rational& a, const Rational& b) {
  return Rational(a.num() * b.num(), a.den() * b.den());
}

Rational operator*(double s, const Rational& a) { return Rational(a.num().scaled(s), a.den()); }

Feedback feedback(const Rational& open_loop) {
  const Poly closed = open_loop.den() + open_loop.num();
  if (closed.is_zero()) throw Error(ErrorCode::ZeroDenominator, "1 + L is identically zero");
  Feedback fb{Rational(open_loop.den(), closed), Rational(open_loop.num(), closed)};

  // S + T == 1 at a fixed set of points spread over the unit disk.
  for (int i = 0; i < 16; ++i) {
    const double radius = 0.3 + 0.04 * i;
    const double angle = 0.7 + 2.3 * i;
    const Complex z = std::polar(radius, angle);
    if (std::abs(closed(z)) < 1e-12) continue;
    const Complex sum = fb.sensitivity(z) + fb.complementary(z);
    if (std::abs(sum - 1.0) > 1e-9 * std::max(1.0, std::abs(fb.sensitivity(z))))
      throw Error(ErrorCode::ZeroDenominator, "S + T != 1; feedback composition is inconsistent");
  }
  return fb;
}

Complex freqresp(const Rational& r, double theta) {
  const Complex z = std::polar(1.0, theta);
  const Complex d = r.den()(z);
  if (std::abs(d) < 1e-14) throw Error(ErrorCode::PoleOnGrid, "pole on the frequency grid");
  return r.num()(z) / d;
}

std::vector<Complex> freqresp(const Rational& r, std::span<const double> thetas) {
  std::vector<Complex> out;
  out.reserve(thetas.size());
  for (double t : thetas) out.push_back(freqresp(r, t));
  return out;
}

double spectral_radius(std::span<const Complex> roots) {
  double m = 0.0;
  for (const auto& r : roots) m = std::max(m, std::abs(r));
  return m;
}

Stability classify_roots(std::span<const Complex> roots) {
  const double rho = spectral_radius(roots);
  if (rho < 1.0 - kUnitCircleBand) return Stability::Stable;
  if (rho <= 1.0 + kUnitCircleBand) return Stability::Marginal;
  return Stability::Unstable;
}

}  // namespace dob
