#pragma once

#include <Eigen/Core>
#include <complex>
#include <stdexcept>
#include <vector>

namespace shiftlab {

using cplx = std::complex<double>;

/// Finite Fourier expansion  f(zeta) = sum_{n=lo}^{hi} c_n zeta^n  on the unit
/// circle.  The universal function representation of the library: symbols,
/// inner-function truncations and model-space vectors all live here.
class TrigPoly {
 public:
  TrigPoly() : lo_(0), coeffs_(1, cplx(0.0)) {}

  TrigPoly(int lo, std::vector<cplx> coeffs) : lo_(lo), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.assign(1, cplx(0.0));
  }

  static TrigPoly analytic(std::vector<cplx> coeffs) { return TrigPoly(0, std::move(coeffs)); }

  static TrigPoly constant(cplx c) { return analytic({c}); }

  /// chi(zeta) = zeta
  static TrigPoly chi() { return analytic({cplx(0.0), cplx(1.0)}); }

  /// 1(zeta) = 1
  static TrigPoly one() { return constant(cplx(1.0)); }

  static TrigPoly monomial(int n, cplx c = cplx(1.0)) { return TrigPoly(n, {c}); }

  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(coeffs_.size()) - 1; }

  cplx at(int n) const {
    if (n < lo() || n > hi()) return cplx(0.0);
    return coeffs_[static_cast<size_t>(n - lo_)];
  }

  /// Exact finite sum sum c_n z^n.  Negative indices use 1/z; z must be
  /// nonzero when lo() < 0.
  cplx eval(cplx z) const {
    // Horner in two sweeps: analytic part in z, co-analytic part in 1/z.
    cplx pos(0.0), neg(0.0);
    for (int n = hi(); n >= 1; --n) pos = (pos + at(n)) * z;
    if (lo() < 0) {
      if (z == cplx(0.0)) throw std::invalid_argument("TrigPoly::eval: z=0 with negative band");
      const cplx w = cplx(1.0) / z;
      for (int n = lo(); n <= -1; ++n) neg = (neg + at(n)) * w;
    }
    return pos + neg + at(0);
  }

  double norm_sq() const {
    double s = 0.0;
    for (const auto& c : coeffs_) s += std::norm(c);
    return s;
  }
  double norm() const { return std::sqrt(norm_sq()); }

  /// Pointwise complex conjugate on the circle: indices flip sign.
  TrigPoly conjugate() const {
    std::vector<cplx> c(coeffs_.size());
    for (size_t k = 0; k < coeffs_.size(); ++k) c[k] = std::conj(coeffs_[coeffs_.size() - 1 - k]);
    return TrigPoly(-hi(), std::move(c));
  }

  TrigPoly shifted(int m) const { return TrigPoly(lo_ + m, coeffs_); }

  friend TrigPoly operator+(const TrigPoly& a, const TrigPoly& b) {
    const int lo = std::min(a.lo(), b.lo()), hi = std::max(a.hi(), b.hi());
    std::vector<cplx> c(static_cast<size_t>(hi - lo + 1), cplx(0.0));
    for (int n = lo; n <= hi; ++n) c[static_cast<size_t>(n - lo)] = a.at(n) + b.at(n);
    return TrigPoly(lo, std::move(c));
  }

  friend TrigPoly operator-(const TrigPoly& a, const TrigPoly& b) { return a + (b * cplx(-1.0)); }

  friend TrigPoly operator*(const TrigPoly& a, cplx s) {
    std::vector<cplx> c = a.coeffs_;
    for (auto& x : c) x *= s;
    return TrigPoly(a.lo_, std::move(c));
  }
  friend TrigPoly operator*(cplx s, const TrigPoly& a) { return a * s; }

  /// Convolution product.
  friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
    const int lo = a.lo() + b.lo(), hi = a.hi() + b.hi();
    std::vector<cplx> c(static_cast<size_t>(hi - lo + 1), cplx(0.0));
    for (int m = a.lo(); m <= a.hi(); ++m) {
      const cplx am = a.at(m);
      if (am == cplx(0.0)) continue;
      for (int n = b.lo(); n <= b.hi(); ++n)
        c[static_cast<size_t>(m + n - lo)] += am * b.at(n);
    }
    return TrigPoly(lo, std::move(c));
  }

  TrigPoly truncated(int lo, int hi) const {
    std::vector<cplx> c(static_cast<size_t>(hi - lo + 1), cplx(0.0));
    for (int n = lo; n <= hi; ++n) c[static_cast<size_t>(n - lo)] = at(n);
    return TrigPoly(lo, std::move(c));
  }

  /// Coefficients c_0..c_{n-1} as a column; the H^2 truncation of an analytic
  /// function (negative-index coefficients are ignored).
  Eigen::VectorXcd analytic_coeffs(int n) const {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
    for (int k = 0; k < n; ++k) v(k) = at(k);
    return v;
  }

  bool is_analytic(double tol = 0.0) const {
    for (int n = lo(); n < 0; ++n)
      if (std::abs(at(n)) > tol) return false;
    return true;
  }

 private:
  int lo_;
  std::vector<cplx> coeffs_;
};

/// P_+ : keep indices >= 0.
inline TrigPoly riesz_plus(const TrigPoly& f) {
  if (f.hi() < 0) return TrigPoly::constant(0.0);
  return f.truncated(0, f.hi());
}

/// P_- : keep indices <= -1.
inline TrigPoly riesz_minus(const TrigPoly& f) {
  if (f.lo() >= 0) return TrigPoly(-1, {cplx(0.0)});
  return f.truncated(f.lo(), -1);
}

/// S* f = (f - f(0))/chi on the analytic part.
inline TrigPoly backward_shift(const TrigPoly& f) {
  const TrigPoly a = riesz_plus(f);
  if (a.hi() < 1) return TrigPoly::constant(0.0);
  return a.truncated(1, a.hi()).shifted(-1);
}

/// Truncated geometric series 1/(1 - lambda_bar z), the Szego kernel at lambda.
inline TrigPoly szego_kernel(cplx lambda, int terms) {
  std::vector<cplx> c(static_cast<size_t>(terms));
  cplx p(1.0);
  for (int k = 0; k < terms; ++k) {
    c[static_cast<size_t>(k)] = p;
    p *= std::conj(lambda);
  }
  return TrigPoly::analytic(std::move(c));
}

/// Multiplicative inverse of an analytic series with g(0) != 0, truncated to
/// `terms` coefficients.
inline TrigPoly analytic_reciprocal(const TrigPoly& g, int terms) {
  const cplx g0 = g.at(0);
  if (std::abs(g0) < 1e-300) throw std::invalid_argument("analytic_reciprocal: g(0)=0");
  std::vector<cplx> r(static_cast<size_t>(terms), cplx(0.0));
  r[0] = cplx(1.0) / g0;
  for (int n = 1; n < terms; ++n) {
    cplx s(0.0);
    for (int k = 1; k <= n; ++k) s += g.at(k) * r[static_cast<size_t>(n - k)];
    r[static_cast<size_t>(n)] = -s / g0;
  }
  return TrigPoly::analytic(std::move(r));
}

}  // namespace shiftlab
