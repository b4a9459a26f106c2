#pragma once

#include <numbers>
#include <stdexcept>
#include <vector>

#include "trig_poly.hpp"

namespace shiftlab {

inline bool is_pow2(size_t m) { return m != 0 && (m & (m - 1)) == 0; }

/// In-place iterative radix-2 FFT (forward: sign=-1).  Sizes are powers of two
/// and small (<= 4096 in practice), so no plan caching is needed.
inline void fft_radix2(std::vector<cplx>& a, int sign) {
  const size_t n = a.size();
  if (!is_pow2(n)) throw std::invalid_argument("fft_radix2: size not a power of two");
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const cplx wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      cplx w(1.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const cplx u = a[i + k], v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

/// The M-th roots of unity in index order, M a power of two.
struct UnitGrid {
  explicit UnitGrid(size_t size) : size_(size) {
    if (!is_pow2(size_)) throw std::invalid_argument("UnitGrid: size must be a power of two");
  }

  size_t size() const { return size_; }

  cplx point(size_t k) const {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(size_);
    return cplx(std::cos(t), std::sin(t));
  }

  /// Angle of point k in units of pi, in (-1, 1].
  double angle_over_pi(size_t k) const {
    double u = 2.0 * static_cast<double>(k) / static_cast<double>(size_);
    if (u > 1.0) u -= 2.0;
    return u;
  }

 private:
  size_t size_;
};

struct GridFn {
  UnitGrid grid;
  std::vector<cplx> values;

  GridFn(UnitGrid g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw std::invalid_argument("GridFn: length mismatch");
  }

  template <typename F>
  static GridFn sample(const UnitGrid& g, F&& f) {
    std::vector<cplx> v(g.size());
    for (size_t k = 0; k < g.size(); ++k) v[k] = f(g.point(k));
    return GridFn(g, std::move(v));
  }
};

/// Discrete Fourier coefficients of the samples for indices lo..hi.  Exact up
/// to roundoff when f is a trigonometric polynomial whose band fits in the
/// grid without aliasing.
inline TrigPoly coeffs_from_samples(const GridFn& f, int lo, int hi) {
  const int m = static_cast<int>(f.grid.size());
  if (hi - lo + 1 > m) throw std::invalid_argument("coeffs_from_samples: band exceeds grid size");
  std::vector<cplx> a = f.values;
  fft_radix2(a, -1);
  std::vector<cplx> c(static_cast<size_t>(hi - lo + 1));
  for (int n = lo; n <= hi; ++n) {
    const int idx = ((n % m) + m) % m;
    c[static_cast<size_t>(n - lo)] = a[static_cast<size_t>(idx)] / static_cast<double>(m);
  }
  return TrigPoly(lo, std::move(c));
}

/// Pointwise samples of a TrigPoly on the grid via an inverse transform.
inline GridFn samples_from_coeffs(const TrigPoly& f, const UnitGrid& g) {
  const int m = static_cast<int>(g.size());
  std::vector<cplx> a(static_cast<size_t>(m), cplx(0.0));
  for (int n = f.lo(); n <= f.hi(); ++n) {
    const int idx = ((n % m) + m) % m;
    a[static_cast<size_t>(idx)] += f.at(n);
  }
  fft_radix2(a, +1);
  return GridFn(g, std::move(a));
}

}  // namespace shiftlab
