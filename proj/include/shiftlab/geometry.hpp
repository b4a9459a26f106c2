#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "trig_poly.hpp"

namespace shiftlab {

/// Closed boundary arc Delta(zeta, t0) = {zeta e^{it} : |t| <= t0}.
struct Arc {
  cplx center;        // |center| = 1
  double half_length; // t0, radians, 0 < t0 <= pi

  bool contains(cplx zeta) const {
    const double t = std::abs(std::arg(zeta * std::conj(center)));
    return t <= half_length + 1e-15;
  }

  /// pi * m(Delta) for normalized Lebesgue measure m: equals the half-length.
  double pi_measure() const { return half_length; }
};

/// Closed Stolz sector with vertex on the circle, half-angle s, symmetric
/// about the radius.  The rays are cut at the radius length: points further
/// than 1 from the vertex are outside.
inline bool stolz_membership(cplx vertex, double s, cplx z) {
  if (s <= 0.0 || s >= std::numbers::pi / 2)
    throw std::invalid_argument("stolz_membership: s in (0, pi/2) required");
  if (std::abs(z) > 1.0 + 1e-12) return false;
  if (std::abs(vertex - z) > 1.0 + 1e-12) return false;
  const cplx w = vertex - z;
  const double r = std::abs(w);
  if (r < 1e-300) return true;
  // Angle at the vertex between z - vertex and the inward radius -vertex:
  // cos(angle) = Re((z - vertex) conj(-vertex)) / |z - vertex|
  //            = Re(w conj(vertex)) / |w|.
  const double cosang = (w * std::conj(vertex)).real() / r;
  return cosang >= std::cos(s) - 1e-12;
}

/// The small-t solution of tan s0 = r0 sin t / (1 - r0 cos t): the arc
/// half-width at which the circle |z| = r0 exits the Stolz sector.
inline double t_of_s_r(double s0, double r0) {
  if (s0 <= 0.0 || s0 >= std::numbers::pi / 2)
    throw std::invalid_argument("t_of_s_r: s0 in (0, pi/2) required");
  if (r0 <= 0.0 || r0 >= 1.0) throw std::invalid_argument("t_of_s_r: r0 in (0,1) required");
  const double target = std::tan(s0);
  auto f = [r0](double t) { return r0 * std::sin(t) / (1.0 - r0 * std::cos(t)); };
  // f increases from 0 up to its maximum at cos t = r0; solvable iff the
  // maximum r0/sqrt(1-r0^2) reaches the target, i.e. r0 >= sin s0.
  const double tmax = std::acos(r0);
  if (f(tmax) < target)
    throw std::out_of_range("t_of_s_r: circle |z|=r0 does not meet the sector boundary");
  double a = 0.0, b = tmax;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    (f(m) < target ? a : b) = m;
  }
  return 0.5 * (a + b);
}

/// s(eps) with tan s = (1-eps) sin(eps) / (1 - (1-eps) cos(eps)); tends to
/// pi/4 from below as eps -> 0.
inline double s_of_epsilon(double eps) {
  if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("s_of_epsilon: eps in (0,1)");
  return std::atan((1.0 - eps) * std::sin(eps) / (1.0 - (1.0 - eps) * std::cos(eps)));
}

}  // namespace shiftlab
