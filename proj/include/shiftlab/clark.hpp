#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <algorithm>

#include "blaschke.hpp"
#include "measure.hpp"

namespace shiftlab {

/// Roots of an analytic polynomial via the companion matrix of its monic
/// normalization.  Leading coefficients below `drop_tol` (relative) are
/// stripped first.
inline std::vector<cplx> poly_roots(const TrigPoly& p, double drop_tol = 1e-12) {
  if (p.lo() != 0) throw std::invalid_argument("poly_roots: analytic polynomial expected");
  double scale = 0.0;
  for (int k = 0; k <= p.hi(); ++k) scale = std::max(scale, std::abs(p.at(k)));
  if (scale == 0.0) throw std::invalid_argument("poly_roots: zero polynomial");
  int deg = p.hi();
  while (deg > 0 && std::abs(p.at(deg)) < drop_tol * scale) --deg;
  if (deg == 0) return {};
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  const cplx lead = p.at(deg);
  for (int k = 0; k < deg; ++k) comp(k, deg - 1) = -p.at(k) / lead;
  for (int k = 1; k < deg; ++k) comp(k, k - 1) = cplx(1.0);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  std::vector<cplx> roots(static_cast<size_t>(deg));
  for (int k = 0; k < deg; ++k) roots[static_cast<size_t>(k)] = es.eigenvalues()(k);
  return roots;
}

/// The inner function attached to an atomic probability measure via
/// 1/(1 - theta(z)) = sum w_j / (1 - z conj(zeta_j)): returns both an exact
/// evaluator and a Taylor truncation.
struct ClarkInner {
  std::function<cplx(cplx)> eval;
  TrigPoly taylor;
};

inline ClarkInner clark_inner_from_measure(const AtomicMeasure& nu, int terms = 512) {
  if (nu.atoms.empty()) throw std::invalid_argument("clark_inner_from_measure: empty measure");
  if (std::abs(nu.total_mass() - 1.0) > 1e-10)
    throw std::invalid_argument("clark_inner_from_measure: total mass must be 1");
  for (size_t i = 0; i < nu.atoms.size(); ++i)
    for (size_t j = i + 1; j < nu.atoms.size(); ++j)
      if (std::abs(nu.atoms[i].zeta - nu.atoms[j].zeta) < 1e-12)
        throw std::invalid_argument("clark_inner_from_measure: atoms must be distinct");

  ClarkInner out;
  const auto atoms = nu.atoms;
  out.eval = [atoms](cplx z) {
    cplx g(0.0);
    for (const auto& a : atoms) g += a.weight / (cplx(1.0) - z * std::conj(a.zeta));
    return cplx(1.0) - cplx(1.0) / g;
  };
  // G's Taylor coefficients are the conjugate moments of nu.
  std::vector<cplx> gc(static_cast<size_t>(terms), cplx(0.0));
  for (const auto& a : atoms) {
    cplx p(1.0);
    for (int k = 0; k < terms; ++k) {
      gc[static_cast<size_t>(k)] += a.weight * p;
      p *= std::conj(a.zeta);
    }
  }
  const TrigPoly G = TrigPoly::analytic(std::move(gc));
  out.taylor = (TrigPoly::one() - analytic_reciprocal(G, terms)).truncated(0, terms - 1);
  return out;
}

/// A finite Blaschke product together with a unimodular constant: a general
/// rational inner function.  The plain BlaschkeProduct normalization fixes the
/// phase by its factors, which is not always the phase the Clark
/// correspondence produces.
struct PhasedBlaschke {
  BlaschkeProduct product;
  cplx phase{1.0};

  cplx eval(cplx z) const { return phase * product.eval(z); }
  cplx derivative(cplx z) const { return phase * product.derivative(z); }
  int degree() const { return product.degree(); }
};

/// The rational inner function regenerated from an atomic Clark measure:
/// theta = (P - Q)/P where G = sum w_j/(1 - z conj(zeta_j)) = P/Q.
inline PhasedBlaschke clark_blaschke_from_measure(const AtomicMeasure& nu) {
  if (std::abs(nu.total_mass() - 1.0) > 1e-10)
    throw std::invalid_argument("clark_blaschke_from_measure: total mass must be 1");
  TrigPoly Q = TrigPoly::one();
  for (const auto& a : nu.atoms)
    Q = Q * TrigPoly::analytic({cplx(1.0), -std::conj(a.zeta)});
  TrigPoly P = TrigPoly::constant(0.0);
  for (size_t j = 0; j < nu.atoms.size(); ++j) {
    TrigPoly term = TrigPoly::constant(nu.atoms[j].weight);
    for (size_t i = 0; i < nu.atoms.size(); ++i) {
      if (i == j) continue;
      term = term * TrigPoly::analytic({cplx(1.0), -std::conj(nu.atoms[i].zeta)});
    }
    P = P + term;
  }
  std::vector<cplx> roots = poly_roots(P - Q);
  // theta(0) = 0 always holds here; the numerator root at the origin is exact.
  std::vector<cplx> zs;
  for (const auto& r : roots) {
    if (std::abs(r) < 1e-9) {
      zs.push_back(cplx(0.0));
    } else if (std::abs(r) < 1.0) {
      zs.push_back(r);
    } else {
      throw std::runtime_error("clark_blaschke_from_measure: zero escaped the open disc");
    }
  }
  PhasedBlaschke out{BlaschkeProduct::from_points(zs), cplx(1.0)};
  // Recover the phase by comparing against theta = 1 - 1/G at an interior
  // point away from the zeros.
  const auto theta_eval = [&nu](cplx z) {
    cplx g(0.0);
    for (const auto& a : nu.atoms) g += a.weight / (cplx(1.0) - z * std::conj(a.zeta));
    return cplx(1.0) - cplx(1.0) / g;
  };
  cplx z0(0.37, 0.21);
  while (std::abs(out.product.eval(z0)) < 1e-3) z0 *= 0.83;
  const cplx ratio = theta_eval(z0) / out.product.eval(z0);
  if (std::abs(std::abs(ratio) - 1.0) > 1e-6)
    throw std::runtime_error("clark_blaschke_from_measure: phase recovery failed");
  out.phase = ratio / std::abs(ratio);
  return out;
}

/// Atoms: the solutions of theta(zeta) = 1 on the circle for theta = phase*B;
/// weights w_j = 1/(zeta_j theta'(zeta_j)), real and positive, summing to 1.
inline AtomicMeasure clark_measure_from_blaschke(const BlaschkeProduct& B, cplx phase = cplx(1.0)) {
  if (std::abs(B.eval(cplx(0.0))) > 1e-12)
    throw std::invalid_argument("clark_measure_from_blaschke: B(0) = 0 required");
  if (B.degree() < 1) throw std::invalid_argument("clark_measure_from_blaschke: degree >= 1");
  const TrigPoly f = phase * B.numerator() - B.denominator();  // theta - 1 up to the denominator
  std::vector<cplx> roots = poly_roots(f);
  std::vector<AtomicMeasure::Atom> atoms;
  for (cplx z : roots) {
    // Newton polish on theta(z) - 1 = 0.
    for (int it = 0; it < 50; ++it) {
      const cplx val = phase * B.eval(z) - cplx(1.0);
      if (std::abs(val) < 1e-14) break;
      const cplx der = phase * B.derivative(z);
      if (std::abs(der) < 1e-300) break;
      z -= val / der;
    }
    z /= std::abs(z);  // the solutions are unimodular in exact arithmetic
    const cplx wz = cplx(1.0) / (z * phase * B.derivative(z));
    if (std::abs(wz.imag()) > 1e-8 || wz.real() <= 0.0)
      throw std::runtime_error("clark_measure_from_blaschke: weight not real positive");
    atoms.push_back({z, wz.real()});
  }
  std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) {
    return std::arg(a.zeta) < std::arg(b.zeta);
  });
  return AtomicMeasure(std::move(atoms));
}

inline AtomicMeasure clark_measure_from_blaschke(const PhasedBlaschke& B) {
  return clark_measure_from_blaschke(B.product, B.phase);
}

}  // namespace shiftlab
