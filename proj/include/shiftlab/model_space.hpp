#pragma once

#include <Eigen/Dense>

#include "blaschke.hpp"

namespace shiftlab {

/// Orthonormal basis of the model space K_B = H^2 (-) B H^2, held as
/// coefficient columns truncated at n_work.  Built from reproducing kernels
/// 1/(1 - conj(lambda) z) (monomials for the zero at the origin), then
/// orthonormalized.
struct ModelBasis {
  BlaschkeProduct theta;
  Eigen::MatrixXcd columns;  // n_work x degree, orthonormal
  int n_work = 0;

  int dim() const { return static_cast<int>(columns.cols()); }

  TrigPoly vector(int j) const {
    std::vector<cplx> c(static_cast<size_t>(n_work));
    for (int k = 0; k < n_work; ++k) c[static_cast<size_t>(k)] = columns(k, j);
    return TrigPoly::analytic(std::move(c));
  }
};

inline ModelBasis model_basis(const BlaschkeProduct& B, int n_work = 512) {
  const int d = B.degree();
  if (d < 1) throw std::invalid_argument("model_basis: degree >= 1 required");
  // Repeated zeros away from the origin would need derivative kernels;
  // unsupported in this version.
  for (const auto& z : B.zeros)
    if (z.lambda != cplx(0.0) && z.multiplicity > 1)
      throw std::invalid_argument("model_basis: repeated non-origin zeros unsupported");
  for (size_t i = 0; i < B.zeros.size(); ++i)
    for (size_t j = i + 1; j < B.zeros.size(); ++j)
      if (std::abs(B.zeros[i].lambda - B.zeros[j].lambda) < 1e-12)
        throw std::invalid_argument("model_basis: duplicate zero entries");

  Eigen::MatrixXcd raw = Eigen::MatrixXcd::Zero(n_work, d);
  int col = 0;
  for (const auto& z : B.zeros) {
    if (z.lambda == cplx(0.0)) {
      for (int m = 0; m < z.multiplicity; ++m) raw(m, col++) = cplx(1.0);
    } else {
      const TrigPoly k = szego_kernel(z.lambda, n_work);
      for (int r = 0; r < n_work; ++r) raw(r, col) = k.at(r);
      ++col;
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(raw);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n_work, d);
  // Fix phases so each column's first nonzero entry is real positive.
  for (int j = 0; j < d; ++j) {
    for (int r = 0; r < n_work; ++r) {
      const cplx v = q(r, j);
      if (std::abs(v) > 1e-12) {
        q.col(j) *= std::conj(v) / std::abs(v);
        break;
      }
    }
  }
  return ModelBasis{B, std::move(q), n_work};
}

}  // namespace shiftlab
