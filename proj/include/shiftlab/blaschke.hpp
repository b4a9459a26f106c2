#pragma once

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "trig_poly.hpp"

namespace shiftlab {

/// Finite Blaschke product: factors b_lambda(z) = (|lambda|/lambda) *
/// (lambda - z)/(1 - conj(lambda) z), with the zero at the origin contributing
/// the factor z itself.
struct BlaschkeProduct {
  struct Zero {
    cplx lambda;
    int multiplicity = 1;
  };

  std::vector<Zero> zeros;

  BlaschkeProduct() = default;

  explicit BlaschkeProduct(std::vector<Zero> zs) : zeros(std::move(zs)) {
    for (const auto& z : zeros) {
      if (std::abs(z.lambda) >= 1.0)
        throw std::invalid_argument("BlaschkeProduct: zeros must lie strictly inside the disc");
      if (z.multiplicity < 1) throw std::invalid_argument("BlaschkeProduct: multiplicity >= 1");
    }
  }

  static BlaschkeProduct from_points(const std::vector<cplx>& pts) {
    std::vector<Zero> zs;
    zs.reserve(pts.size());
    for (const auto& p : pts) zs.push_back({p, 1});
    return BlaschkeProduct(std::move(zs));
  }

  /// chi^k
  static BlaschkeProduct power_of_chi(int k) {
    if (k < 1) throw std::invalid_argument("power_of_chi: k >= 1");
    return BlaschkeProduct({{cplx(0.0), k}});
  }

  int degree() const {
    int d = 0;
    for (const auto& z : zeros) d += z.multiplicity;
    return d;
  }

  cplx eval(cplx z) const {
    cplx p(1.0);
    for (const auto& zero : zeros) {
      const cplx l = zero.lambda;
      cplx factor;
      if (l == cplx(0.0)) {
        factor = z;
      } else {
        factor = (std::abs(l) / l) * (l - z) / (cplx(1.0) - std::conj(l) * z);
      }
      for (int j = 0; j < zero.multiplicity; ++j) p *= factor;
    }
    return p;
  }

  /// Logarithmic derivative B'(z)/B(z); valid away from zeros and poles.
  cplx log_derivative(cplx z) const {
    cplx s(0.0);
    for (const auto& zero : zeros) {
      const cplx l = zero.lambda;
      cplx term;
      if (l == cplx(0.0)) {
        term = cplx(1.0) / z;
      } else {
        term = -cplx(1.0) / (l - z) + std::conj(l) / (cplx(1.0) - std::conj(l) * z);
      }
      s += static_cast<double>(zero.multiplicity) * term;
    }
    return s;
  }

  cplx derivative(cplx z) const { return eval(z) * log_derivative(z); }

  /// Numerator polynomial N(z) = prod c_l (l - z)^mult (factor z for l = 0),
  /// so that B = N / D with D below.
  TrigPoly numerator() const {
    TrigPoly p = TrigPoly::one();
    for (const auto& zero : zeros) {
      TrigPoly factor;
      if (zero.lambda == cplx(0.0)) {
        factor = TrigPoly::chi();
      } else {
        const cplx c = std::abs(zero.lambda) / zero.lambda;
        factor = TrigPoly::analytic({c * zero.lambda, -c});
      }
      for (int j = 0; j < zero.multiplicity; ++j) p = p * factor;
    }
    return p;
  }

  /// Denominator polynomial D(z) = prod (1 - conj(l) z)^mult.
  TrigPoly denominator() const {
    TrigPoly p = TrigPoly::one();
    for (const auto& zero : zeros) {
      if (zero.lambda == cplx(0.0)) continue;
      const TrigPoly factor = TrigPoly::analytic({cplx(1.0), -std::conj(zero.lambda)});
      for (int j = 0; j < zero.multiplicity; ++j) p = p * factor;
    }
    return p;
  }

  /// Taylor coefficients 0..terms-1 of B at the origin.
  TrigPoly taylor(int terms) const {
    return (numerator() * analytic_reciprocal(denominator(), terms)).truncated(0, terms - 1);
  }

  /// Largest zero modulus: the tail of the Taylor series decays like this rate.
  double spectral_radius() const {
    double r = 0.0;
    for (const auto& z : zeros) r = std::max(r, std::abs(z.lambda));
    return r;
  }
};

/// Pointwise Moebius transform theta_a = (theta - a)/(1 - conj(a) theta).
inline std::function<cplx(cplx)> frostman_shift(std::function<cplx(cplx)> theta_eval, cplx a) {
  const double r = std::abs(a);
  if (r <= 0.0 || r >= 1.0) throw std::invalid_argument("frostman_shift: need 0 < |a| < 1");
  return [theta_eval = std::move(theta_eval), a](cplx z) {
    const cplx t = theta_eval(z);
    return (t - a) / (cplx(1.0) - std::conj(a) * t);
  };
}

/// Taylor truncation of the Frostman shift of a finite Blaschke product.
inline TrigPoly frostman_shift_taylor(const BlaschkeProduct& B, cplx a, int terms) {
  const double r = std::abs(a);
  if (r <= 0.0 || r >= 1.0) throw std::invalid_argument("frostman_shift_taylor: need 0 < |a| < 1");
  const TrigPoly th = B.taylor(terms);
  const TrigPoly den = (TrigPoly::one() - std::conj(a) * th).truncated(0, terms - 1);
  return ((th - TrigPoly::constant(a)) * analytic_reciprocal(den, terms)).truncated(0, terms - 1);
}

}  // namespace shiftlab
