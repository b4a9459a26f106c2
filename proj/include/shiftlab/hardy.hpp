#pragma once

#include <Eigen/Dense>
#include <algorithm>

#include "grid.hpp"
#include "trunc_op.hpp"

namespace shiftlab {

/// T_psi h = P_+(psi h): matrix [psi_hat(j-k)], j,k = 0..n-1, acting on
/// span{1, chi, ..., chi^{n-1}}.  The trust band discounts the analytic
/// bandwidth of the symbol (rows it can push past the truncation edge).
inline TruncOp toeplitz_matrix(const TrigPoly& symbol, int n) {
  if (n < 1) throw std::invalid_argument("toeplitz_matrix: n >= 1 required");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) m(j, k) = symbol.at(j - k);
  const int awidth = std::max(symbol.hi(), 0);
  return TruncOp{std::move(m), n, 1, std::max(n - awidth, 0), "toeplitz"};
}

inline TruncOp toeplitz_matrix(const GridFn& symbol, int n) {
  const int m = static_cast<int>(symbol.grid.size());
  const int half = std::min(n - 1, m / 2 - 1);
  return toeplitz_matrix(coeffs_from_samples(symbol, -half, half), n);
}

/// H_psi h = P_-(psi h): entry (j,k) = psi_hat(-j-k) with the codomain indexed
/// by conj(chi)^j, j = 1..n, and the domain by chi^k, k = 0..n-1.
inline Eigen::MatrixXcd hankel_matrix(const TrigPoly& symbol, int n) {
  if (n < 1) throw std::invalid_argument("hankel_matrix: n >= 1 required");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 1; j <= n; ++j)
    for (int k = 0; k < n; ++k) m(j - 1, k) = symbol.at(-j - k);
  return m;
}

inline Eigen::MatrixXcd hankel_matrix(const GridFn& symbol, int n) {
  const int m = static_cast<int>(symbol.grid.size());
  const int half = std::min(2 * n, m / 2 - 1);
  return hankel_matrix(coeffs_from_samples(symbol, -half, 0), n);
}

struct OuterResult {
  TrigPoly g;             // analytic coefficients, g(0) real positive
  bool clamped = false;   // true if any log-modulus sample hit the floor
  double clamp_floor = -40.0;
};

/// Outer function with prescribed boundary modulus: exponential of the
/// analytic completion of the log-modulus.  Log-samples are clamped below at
/// -40 to avoid -inf; the clamp is reported in the result.
inline OuterResult outer_from_modulus(const GridFn& w, int terms = 0) {
  const size_t m = w.grid.size();
  if (terms <= 0) terms = static_cast<int>(m) / 2;
  OuterResult out;
  std::vector<cplx> logw(m);
  for (size_t k = 0; k < m; ++k) {
    const double re = w.values[k].real(), im = w.values[k].imag();
    if (re <= 0.0 || im != 0.0)
      throw std::invalid_argument("outer_from_modulus: samples must be strictly positive reals");
    double lw = std::log(re);
    if (lw < out.clamp_floor) {
      lw = out.clamp_floor;
      out.clamped = true;
    }
    logw[k] = cplx(lw);
  }
  // Fourier coefficients of log w; build L = c_0 + 2 sum_{j>=1} c_j z^j so
  // that Re L = log w on the boundary, then exponentiate on the grid.
  fft_radix2(logw, -1);
  std::vector<cplx> lcoef(m, cplx(0.0));
  lcoef[0] = logw[0] / static_cast<double>(m);
  for (size_t j = 1; j < m / 2; ++j) lcoef[j] = 2.0 * logw[j] / static_cast<double>(m);
  fft_radix2(lcoef, +1);
  for (auto& v : lcoef) v = std::exp(v);
  GridFn gsamples(w.grid, std::move(lcoef));
  TrigPoly g = coeffs_from_samples(gsamples, 0, terms - 1);
  // g(0) = exp(c_0) is real positive already; scrub the imaginary roundoff.
  std::vector<cplx> c(static_cast<size_t>(terms));
  for (int k = 0; k < terms; ++k) c[static_cast<size_t>(k)] = g.at(k);
  c[0] = cplx(c[0].real());
  out.g = TrigPoly::analytic(std::move(c));
  return out;
}

}  // namespace shiftlab
