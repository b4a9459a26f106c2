#pragma once

#include <stdexcept>
#include <vector>

#include "trig_poly.hpp"

namespace shiftlab {

/// Finitely many unit-circle atoms with strictly positive weights.
struct AtomicMeasure {
  struct Atom {
    cplx zeta;  // |zeta| = 1
    double weight;
  };

  std::vector<Atom> atoms;

  AtomicMeasure() = default;

  explicit AtomicMeasure(std::vector<Atom> a) : atoms(std::move(a)) {
    for (const auto& atom : atoms) {
      if (atom.weight <= 0.0)
        throw std::invalid_argument("AtomicMeasure: weights must be strictly positive");
      if (std::abs(std::abs(atom.zeta) - 1.0) > 1e-10)
        throw std::invalid_argument("AtomicMeasure: atoms must lie on the unit circle");
    }
  }

  double total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.weight;
    return s;
  }
};

}  // namespace shiftlab
