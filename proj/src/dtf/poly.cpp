#include "dob/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "dob/error.hpp"

namespace dob {

Poly::Poly(std::initializer_list<double> coeffs) : coeffs_(coeffs) { strip(); }

Poly::Poly(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { strip(); }

void Poly::strip() {
  auto first = std::find_if(coeffs_.begin(), coeffs_.end(),
                            [](double c) { return c != 0.0; });
  if (first == coeffs_.end()) {
    coeffs_.assign(1, 0.0);
    return;
  }
  coeffs_.erase(coeffs_.begin(), first);
}

double Poly::max_abs_coeff() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

Complex Poly::operator()(Complex z) const {
  Complex acc = 0.0;
  for (double c : coeffs_) acc = acc * z + c;
  return acc;
}

double Poly::operator()(double z) const {
  double acc = 0.0;
  for (double c : coeffs_) acc = acc * z + c;
  return acc;
}

Poly Poly::derivative() const {
  const int n = degree();
  if (n == 0) return Poly();
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = coeffs_[i] * (n - i);
  return Poly(std::move(d));
}

Poly Poly::scaled(double s) const {
  std::vector<double> c = coeffs_;
  for (double& x : c) x *= s;
  return Poly(std::move(c));
}

Poly& Poly::operator+=(const Poly& rhs) {
  const auto& r = rhs.coeffs_;
  if (r.size() > coeffs_.size()) coeffs_.insert(coeffs_.begin(), r.size() - coeffs_.size(), 0.0);
  const std::size_t off = coeffs_.size() - r.size();
  for (std::size_t i = 0; i < r.size(); ++i) coeffs_[off + i] += r[i];
  strip();
  return *this;
}

Poly& Poly::operator-=(const Poly& rhs) { return *this += -rhs; }

Poly& Poly::operator*=(const Poly& rhs) {
  std::vector<double> out(coeffs_.size() + rhs.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * rhs.coeffs_[j];
  coeffs_ = std::move(out);
  strip();
  return *this;
}

Poly operator+(Poly lhs, const Poly& rhs) { return lhs += rhs; }
Poly operator-(Poly lhs, const Poly& rhs) { return lhs -= rhs; }
Poly operator*(Poly lhs, const Poly& rhs) { return lhs *= rhs; }
Poly operator-(const Poly& p) { return p.scaled(-1.0); }

namespace {

// Parlett-Reinsch balancing; reduces the norm spread of the companion matrix
// so the eigenvalues are computed with a smaller backward error.
void balance(Eigen::MatrixXd& a) {
  constexpr double radix = 2.0;
  const Eigen::Index n = a.rows();
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double col = a.col(i).lpNorm<1>() - std::abs(a(i, i));
      const double row = a.row(i).lpNorm<1>() - std::abs(a(i, i));
      if (col == 0.0 || row == 0.0) continue;
      double f = 1.0;
      double c = col;
      const double s = col + row;
      while (c < row / radix) {
        c *= radix * radix;
        f *= radix;
      }
      while (c >= row * radix) {
        c /= radix * radix;
        f /= radix;
      }
      if ((c + row) < 0.95 * s * f) {
        converged = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

Complex polish(const Poly& p, const Poly& dp, Complex r) {
  double best = std::abs(p(r));
  for (int it = 0; it < 8 && best > 0.0; ++it) {
    const Complex d = dp(r);
    if (d == 0.0) break;
    const Complex next = r - p(r) / d;
    const double res = std::abs(p(next));
    if (!(res < best)) break;
    r = next;
    best = res;
  }
  return r;
}

// Single-linkage grouping of nearby eigenvalues. A multiple root splits into
// a small star whose centroid is accurate to near machine precision, so a
// group is replaced by its centroid when that does not raise the residual.
// Returns which entries were merged.
std::vector<bool> collapse_clusters(const Poly& p, std::vector<Complex>& rs) {
  constexpr double tol = 1e-4;
  const std::size_t n = rs.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double scale = std::max({1.0, std::abs(rs[i]), std::abs(rs[j])});
      if (std::abs(rs[i] - rs[j]) < tol * scale) parent[find(i)] = find(j);
    }
  std::vector<Complex> sum(n, 0.0);
  std::vector<int> count(n, 0);
  std::vector<double> worst(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    sum[find(i)] += rs[i];
    ++count[find(i)];
    worst[find(i)] = std::max(worst[find(i)], std::abs(p(rs[i])));
  }
  std::vector<bool> merged(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t g = find(i);
    if (count[g] < 2) continue;
    const Complex c = sum[g] / static_cast<double>(count[g]);
    if (std::abs(p(c)) <= worst[g]) {
      rs[i] = c;
      merged[i] = true;
    }
  }
  return merged;
}

}  // namespace

std::vector<Complex> roots(const Poly& p) {
  if (p.is_zero()) throw Error(ErrorCode::InvalidParam, "roots of the zero polynomial");

  // Trailing zero coefficients are exact roots at the origin.
  std::vector<double> c = p.coeffs();
  std::vector<Complex> out;
  while (c.size() > 1 && c.back() == 0.0) {
    c.pop_back();
    out.emplace_back(0.0, 0.0);
  }
  const Poly reduced(c);
  const int n = reduced.degree();
  if (n == 1) {
    out.emplace_back(-c[1] / c[0], 0.0);
  } else if (n > 1) {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) companion(0, j) = -c[j + 1] / c[0];
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    balance(companion);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
      throw Error(ErrorCode::RootFinding, "companion eigenvalue iteration did not converge");
    const Poly dp = reduced.derivative();
    std::vector<Complex> found;
    for (Eigen::Index i = 0; i < n; ++i) found.push_back(solver.eigenvalues()(i));
    const std::vector<bool> merged = collapse_clusters(reduced, found);
    for (std::size_t i = 0; i < found.size(); ++i)
      if (!merged[i]) found[i] = polish(reduced, dp, found[i]);
    // Real coefficients: snap numerically-real roots onto the axis.
    for (auto& r : found)
      if (std::abs(r.imag()) <= 1e-14 * std::max(1.0, std::abs(r))) r = {r.real(), 0.0};
    out.insert(out.end(), found.begin(), found.end());
  }

  const double scale = p.max_abs_coeff();
  for (const auto& r : out) {
    const double bound = 1e-8 * scale * std::pow(std::max(1.0, std::abs(r)), p.degree());
    if (std::abs(p(r)) > bound)
      throw Error(ErrorCode::RootFinding, "root residual above tolerance");
  }
  return out;
}

}  // namespace dob
