#pragma once

#include <Eigen/Dense>
#include <string>

#include "trig_poly.hpp"

namespace shiftlab {

/// A complex matrix truncation of an operator on H^2 (or H^2_N, block layout
/// copy-major: flat index = copy * dim + coefficient).  trust_band is the
/// number of leading basis columns (per copy) on which the truncation agrees
/// with the infinite operator; identity checks are asserted only there.
struct TruncOp {
  Eigen::MatrixXcd matrix;
  int dim = 0;
  int copies = 1;
  int trust_band = 0;
  std::string tag;

  int total_dim() const { return dim * copies; }

  /// Flat index of coefficient k in copy j.
  int index(int copy, int k) const { return copy * dim + k; }

  /// The leading trust_band columns (single-copy case).
  Eigen::MatrixXcd band_cols() const { return matrix.leftCols(trust_band); }
};

}  // namespace shiftlab
