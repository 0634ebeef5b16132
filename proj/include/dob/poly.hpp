#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace dob {

using Complex = std::complex<double>;

/// Real polynomial in z, coefficients stored highest power first.
///
/// Leading zeros are stripped on construction, so the leading coefficient is
/// nonzero unless the polynomial is identically zero. The zero polynomial is
/// stored as a single 0 coefficient and reports degree 0.
class Poly {
 public:
  Poly() : coeffs_{0.0} {}
  Poly(std::initializer_list<double> coeffs);
  explicit Poly(std::vector<double> coeffs);

  static Poly constant(double c) { return Poly({c}); }
  /// z - root
  static Poly linear_factor(double root) { return Poly({1.0, -root}); }

  const std::vector<double>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
  double leading() const { return coeffs_.front(); }
  double max_abs_coeff() const;

  Complex operator()(Complex z) const;
  double operator()(double z) const;

  Poly derivative() const;
  Poly scaled(double s) const;

  Poly& operator+=(const Poly& rhs);
  Poly& operator-=(const Poly& rhs);
  Poly& operator*=(const Poly& rhs);

  friend bool operator==(const Poly&, const Poly&) = default;

 private:
  void strip();
  std::vector<double> coeffs_;
};

Poly operator+(Poly lhs, const Poly& rhs);
Poly operator-(Poly lhs, const Poly& rhs);
Poly operator*(Poly lhs, const Poly& rhs);
Poly operator-(const Poly& p);

/// All complex roots of p, with multiplicity.
///
/// Eigenvalues of the balanced companion matrix, polished by Newton steps and
/// with nearby clusters collapsed to their centroid (which recovers multiple
/// roots to near machine precision). Every returned root satisfies
///   |p(r)| <= 1e-8 * max|c_i| * max(1, |r|)^deg
/// otherwise Error(RootFinding) is thrown. A constant polynomial has no roots.
std::vector<Complex> roots(const Poly& p);

}  // namespace dob
