#pragma once

#include <Eigen/Dense>
#include <utility>

#include "clark.hpp"
#include "hardy.hpp"
#include "model_space.hpp"
#include "trunc_op.hpp"

namespace shiftlab {

/// Orthogonal sum of N copies of the unilateral shift, copy-major layout.
inline TruncOp shift(int n, int copies = 1) {
  if (n < 1 || copies < 1) throw std::invalid_argument("shift: n >= 1, copies >= 1");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n * copies, n * copies);
  for (int c = 0; c < copies; ++c)
    for (int k = 0; k + 1 < n; ++k) m(c * n + k + 1, c * n + k) = cplx(1.0);
  return TruncOp{std::move(m), n, copies, n - 1, "shift"};
}

namespace detail {

inline Eigen::MatrixXcd shift_matrix(int n) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) m(k + 1, k) = cplx(1.0);
  return m;
}

}  // namespace detail

/// Compression of S to the model space K_B, exact in the model basis.
inline TruncOp compressed_shift(const BlaschkeProduct& B, int n_work = 512) {
  const ModelBasis mb = model_basis(B, n_work);
  const int d = mb.dim();
  Eigen::MatrixXcd sv = Eigen::MatrixXcd::Zero(n_work, d);
  sv.bottomRows(n_work - 1) = mb.columns.topRows(n_work - 1);
  Eigen::MatrixXcd m = mb.columns.adjoint() * sv;
  return TruncOp{std::move(m), d, 1, d, "compressed_shift"};
}

/// U(theta) = S(theta) + 1 (x) conj(chi) theta: the rank-one unitary
/// perturbation of the compressed shift.
inline TruncOp clark_unitary(const BlaschkeProduct& B, int n_work = 512) {
  if (std::abs(B.eval(cplx(0.0))) > 1e-12)
    throw std::invalid_argument("clark_unitary: B(0) = 0 required");
  const ModelBasis mb = model_basis(B, n_work);
  const int d = mb.dim();
  TruncOp st = compressed_shift(B, n_work);
  const TrigPoly theta = B.taylor(n_work + 1);
  const Eigen::VectorXcd u = mb.columns.adjoint() * TrigPoly::one().analytic_coeffs(n_work);
  const Eigen::VectorXcd v =
      mb.columns.adjoint() * backward_shift(theta).analytic_coeffs(n_work);
  Eigen::MatrixXcd m = st.matrix + u * v.adjoint();
  return TruncOp{std::move(m), d, 1, d, "clark_unitary"};
}

/// (S(theta)^*)^{-1} = S(theta) + (theta - 1/conj(theta(0))) (x) P_+ conj(chi) theta,
/// available when theta(0) != 0.
inline TruncOp inv_adjoint_compressed_shift(const BlaschkeProduct& B, int n_work = 512) {
  const cplx t0 = B.eval(cplx(0.0));
  if (std::abs(t0) <= 1e-12)
    throw std::invalid_argument("inv_adjoint_compressed_shift: B(0) != 0 required");
  const ModelBasis mb = model_basis(B, n_work);
  const int d = mb.dim();
  TruncOp st = compressed_shift(B, n_work);
  const TrigPoly theta = B.taylor(n_work + 1);
  const TrigPoly uf = theta - TrigPoly::constant(cplx(1.0) / std::conj(t0));
  const Eigen::VectorXcd u = mb.columns.adjoint() * uf.analytic_coeffs(n_work);
  const Eigen::VectorXcd v =
      mb.columns.adjoint() * backward_shift(theta).analytic_coeffs(n_work);
  Eigen::MatrixXcd m = st.matrix + u * v.adjoint();
  return TruncOp{std::move(m), d, 1, d, "inv_adjoint_compressed_shift"};
}

/// T = S - 1 (x) S*g for analytic g with g(0) = 1.
inline TruncOp perturb_lemma32(const TrigPoly& g, int n) {
  if (!g.is_analytic(1e-15)) throw std::invalid_argument("perturb_lemma32: g must be analytic");
  if (std::abs(g.at(0) - cplx(1.0)) > 1e-12)
    throw std::invalid_argument("perturb_lemma32: g(0) = 1 required");
  if (g.hi() >= n) throw std::invalid_argument("perturb_lemma32: deg g < n required");
  Eigen::MatrixXcd m = detail::shift_matrix(n);
  const Eigen::VectorXcd v = backward_shift(g).analytic_coeffs(n);
  m -= Eigen::VectorXcd::Unit(n, 0) * v.adjoint();
  return TruncOp{std::move(m), n, 1, n - std::max(g.hi(), 1), "perturb_lemma32"};
}

/// T = S_N + sum_k e_k (x) f_k on H^2_N; f[k] holds the N components of f_k.
inline TruncOp perturb_lemma36(const std::vector<std::vector<TrigPoly>>& f, int n) {
  const int N = static_cast<int>(f.size());
  if (N < 1) throw std::invalid_argument("perturb_lemma36: at least one column");
  int maxdeg = 1;
  for (const auto& col : f) {
    if (static_cast<int>(col.size()) != N)
      throw std::invalid_argument("perturb_lemma36: each f_k needs N components");
    for (const auto& comp : col) {
      if (!comp.is_analytic(1e-15))
        throw std::invalid_argument("perturb_lemma36: components must be analytic");
      if (comp.hi() >= n) throw std::invalid_argument("perturb_lemma36: deg < n required");
      maxdeg = std::max(maxdeg, comp.hi());
    }
  }
  TruncOp T = shift(n, N);
  for (int k = 0; k < N; ++k) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n * N);
    for (int j = 0; j < N; ++j) v.segment(j * n, n) = f[static_cast<size_t>(k)][static_cast<size_t>(j)].analytic_coeffs(n);
    T.matrix += Eigen::VectorXcd::Unit(n * N, k * n) * v.adjoint();
  }
  T.trust_band = n - maxdeg;
  T.tag = "perturb_lemma36";
  return T;
}

/// psi = det(I - chi F) with F_{jk} = component j of f_k; psi(0) = 1.
inline TrigPoly lemma36_psi(const std::vector<std::vector<TrigPoly>>& f, int terms = 256) {
  const int N = static_cast<int>(f.size());
  std::vector<std::vector<TrigPoly>> M(static_cast<size_t>(N),
                                       std::vector<TrigPoly>(static_cast<size_t>(N)));
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k) {
      TrigPoly entry = (TrigPoly::chi() * f[static_cast<size_t>(k)][static_cast<size_t>(j)]) * cplx(-1.0);
      if (j == k) entry = entry + TrigPoly::one();
      M[static_cast<size_t>(j)][static_cast<size_t>(k)] = entry;
    }
  // Cofactor expansion; N is small here.
  std::function<TrigPoly(const std::vector<std::vector<TrigPoly>>&)> det =
      [&](const std::vector<std::vector<TrigPoly>>& A) -> TrigPoly {
    const size_t m = A.size();
    if (m == 1) return A[0][0];
    TrigPoly acc = TrigPoly::constant(0.0);
    for (size_t k = 0; k < m; ++k) {
      std::vector<std::vector<TrigPoly>> minor(m - 1, std::vector<TrigPoly>(m - 1));
      for (size_t r = 1; r < m; ++r) {
        size_t cc = 0;
        for (size_t c = 0; c < m; ++c) {
          if (c == k) continue;
          minor[r - 1][cc++] = A[r][c];
        }
      }
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      acc = acc + cplx(sign) * (A[0][k] * det(minor));
    }
    return acc;
  };
  return det(M).truncated(0, terms - 1);
}

/// T = S + 1 (x) conj(chi) theta for theta with theta(0) = 0.
inline TruncOp example_plus_clark(const BlaschkeProduct& B, int n) {
  if (std::abs(B.eval(cplx(0.0))) > 1e-12)
    throw std::invalid_argument("example_plus_clark: B(0) = 0 required");
  const TrigPoly theta = B.taylor(n + 1);
  Eigen::MatrixXcd m = detail::shift_matrix(n);
  m += Eigen::VectorXcd::Unit(n, 0) * backward_shift(theta).analytic_coeffs(n).adjoint();
  return TruncOp{std::move(m), n, 1, n - 1, "example_plus_clark"};
}

/// T = S + (1+(a-1)theta)beta (x) beta conj(chi) theta + b theta beta (x) P_+ conj(chi) beta.
inline TruncOp thm69_T(cplx a, cplx b, const BlaschkeProduct& theta, const BlaschkeProduct& beta,
                       int n) {
  if (std::abs(theta.eval(cplx(0.0))) > 1e-12)
    throw std::invalid_argument("thm69_T: theta(0) = 0 required");
  {
    // phi = a + b(theta - 1) must not vanish identically.
    double mx = 0.0;
    for (int k = 0; k < 512; ++k) {
      const double t = 2.0 * std::numbers::pi * k / 512.0;
      const cplx z(std::cos(t), std::sin(t));
      mx = std::max(mx, std::abs(a + b * (theta.eval(z) - cplx(1.0))));
    }
    if (mx <= 1e-12) throw std::invalid_argument("thm69_T: phi vanishes identically");
  }
  const TrigPoly tt = theta.taylor(n + 2);
  const TrigPoly bt = beta.taylor(n + 2);
  const TrigPoly tb = (tt * bt).truncated(0, n + 1);
  const Eigen::VectorXcd u1 =
      ((TrigPoly::one() + (a - cplx(1.0)) * tt) * bt).analytic_coeffs(n);
  const Eigen::VectorXcd v1 = backward_shift(tb).analytic_coeffs(n);
  const Eigen::VectorXcd u2 = (b * tb).analytic_coeffs(n);
  const Eigen::VectorXcd v2 = backward_shift(bt).analytic_coeffs(n);
  Eigen::MatrixXcd m = detail::shift_matrix(n) + u1 * v1.adjoint() + u2 * v2.adjoint();
  const int band = std::max(n - theta.degree() - beta.degree() - 1, 0);
  return TruncOp{std::move(m), n, 1, band, "thm69_T"};
}

namespace detail {

/// Solve M = Img * C^{-1}.
inline Eigen::MatrixXcd right_solve(const Eigen::MatrixXcd& img, const Eigen::MatrixXcd& C) {
  return C.transpose().colPivHouseholderQr().solve(img.transpose()).transpose();
}

}  // namespace detail

/// X on H^2 = theta beta H^2 (+) beta K_theta (+) K_beta:
/// X(theta beta h + beta f + g) = (theta-1) beta h + a beta f + phi g.
inline TruncOp thm69_X(cplx a, cplx b, const BlaschkeProduct& theta, const BlaschkeProduct& beta,
                       int n) {
  const int dt = theta.degree(), db = beta.degree();
  if (n <= dt + db + 1) throw std::invalid_argument("thm69_X: n too small");
  const TrigPoly tt = theta.taylor(n + 1);
  const TrigPoly bt = beta.taylor(n + 1);
  const TrigPoly phi = (TrigPoly::constant(a) + b * (tt - TrigPoly::one())).truncated(0, n);
  const Eigen::MatrixXcd Mt = toeplitz_matrix(tt.truncated(0, n - 1), n).matrix;
  const Eigen::MatrixXcd Mb = toeplitz_matrix(bt.truncated(0, n - 1), n).matrix;
  const Eigen::MatrixXcd Mphi = toeplitz_matrix(phi.truncated(0, n - 1), n).matrix;
  const Eigen::MatrixXcd Ktheta = model_basis(theta, n).columns;
  const Eigen::MatrixXcd Kbeta = model_basis(beta, n).columns;

  Eigen::MatrixXcd C(n, n), img(n, n);
  int col = 0;
  const Eigen::MatrixXcd Mtb = Mt * Mb;
  for (int k = 0; k < n - dt - db; ++k, ++col) {
    C.col(col) = Mtb.col(k);                    // theta beta chi^k
    img.col(col) = Mb * (Mt.col(k) - Eigen::VectorXcd::Unit(n, k));  // (theta-1) beta chi^k
  }
  for (int j = 0; j < dt; ++j, ++col) {
    C.col(col) = Mb * Ktheta.col(j);
    img.col(col) = a * (Mb * Ktheta.col(j));
  }
  for (int j = 0; j < db; ++j, ++col) {
    C.col(col) = Kbeta.col(j);
    img.col(col) = Mphi * Kbeta.col(j);
  }
  Eigen::MatrixXcd m = detail::right_solve(img, C);
  return TruncOp{std::move(m), n, 1, std::max(n - dt - db - 1, 0), "thm69_X"};
}

/// Y on H^2 = beta H^2 (+) K_beta:
/// Y(beta h + g) = theta beta phi h + theta P_{beta H^2} phi g + (theta-1) g.
inline TruncOp thm69_Y(cplx a, cplx b, const BlaschkeProduct& theta, const BlaschkeProduct& beta,
                       int n) {
  const int dt = theta.degree(), db = beta.degree();
  if (n <= dt + db + 1) throw std::invalid_argument("thm69_Y: n too small");
  const TrigPoly tt = theta.taylor(n + 1);
  const TrigPoly bt = beta.taylor(n + 1);
  const TrigPoly phi = (TrigPoly::constant(a) + b * (tt - TrigPoly::one())).truncated(0, n);
  const Eigen::MatrixXcd Mt = toeplitz_matrix(tt.truncated(0, n - 1), n).matrix;
  const Eigen::MatrixXcd Mb = toeplitz_matrix(bt.truncated(0, n - 1), n).matrix;
  const Eigen::MatrixXcd Mphi = toeplitz_matrix(phi.truncated(0, n - 1), n).matrix;
  const Eigen::MatrixXcd Kbeta = model_basis(beta, n).columns;
  const Eigen::MatrixXcd Pbeta = Mb * Mb.adjoint();  // projector onto beta H^2 (band-exact)

  Eigen::MatrixXcd C(n, n), img(n, n);
  int col = 0;
  const Eigen::MatrixXcd Mtbphi = Mt * Mb * Mphi;
  for (int k = 0; k < n - db; ++k, ++col) {
    C.col(col) = Mb.col(k);           // beta chi^k
    img.col(col) = Mtbphi.col(k);     // theta beta phi chi^k
  }
  for (int j = 0; j < db; ++j, ++col) {
    C.col(col) = Kbeta.col(j);
    const Eigen::VectorXcd g = Kbeta.col(j);
    img.col(col) = Mt * (Pbeta * (Mphi * g)) + Mt * g - g;
  }
  Eigen::MatrixXcd m = detail::right_solve(img, C);
  return TruncOp{std::move(m), n, 1, std::max(n - dt - db - 1, 0), "thm69_Y"};
}

namespace detail {

inline std::vector<int> band_indices(const TruncOp& T) {
  std::vector<int> idx;
  idx.reserve(static_cast<size_t>(T.trust_band * T.copies));
  for (int c = 0; c < T.copies; ++c)
    for (int k = 0; k < T.trust_band; ++k) idx.push_back(c * T.dim + k);
  return idx;
}

inline Eigen::MatrixXcd select_cols(const Eigen::MatrixXcd& m, const std::vector<int>& idx) {
  Eigen::MatrixXcd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(idx[j]);
  return out;
}

}  // namespace detail

/// Gram matrix of the trust-band columns, with a loud failure when it is
/// numerically singular.
inline Eigen::MatrixXcd band_gram_inverse(const TruncOp& T, double floor = 1e-10) {
  const auto idx = detail::band_indices(T);
  const Eigen::MatrixXcd A = detail::select_cols(T.matrix, idx);
  const Eigen::MatrixXcd G = A.adjoint() * A;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
  const double mn = es.eigenvalues().minCoeff();
  if (mn <= floor)
    throw std::runtime_error("band gram singular: min eigenvalue " + std::to_string(mn));
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
         es.eigenvectors().adjoint();
}

/// Cauchy dual T' = T (T*T)^{-1} on the trust band; columns off the band are
/// zero and excluded from every check.
inline TruncOp cauchy_dual(const TruncOp& T) {
  const auto idx = detail::band_indices(T);
  const Eigen::MatrixXcd A = detail::select_cols(T.matrix, idx);
  const Eigen::MatrixXcd Ginv = band_gram_inverse(T);
  const Eigen::MatrixXcd D = A * Ginv;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(T.matrix.rows(), T.matrix.cols());
  for (size_t j = 0; j < idx.size(); ++j) m.col(idx[j]) = D.col(static_cast<Eigen::Index>(j));
  return TruncOp{std::move(m), T.dim, T.copies, T.trust_band, "cauchy_dual(" + T.tag + ")"};
}

/// Standard left inverse L_T = (T*T)^{-1} T*; L_T T = I on the trust band.
inline TruncOp left_inverse(const TruncOp& T) {
  const auto idx = detail::band_indices(T);
  const Eigen::MatrixXcd A = detail::select_cols(T.matrix, idx);
  const Eigen::MatrixXcd Ginv = band_gram_inverse(T);
  const Eigen::MatrixXcd L = Ginv * A.adjoint();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(T.matrix.rows(), T.matrix.cols());
  for (size_t j = 0; j < idx.size(); ++j) m.row(idx[j]) = L.row(static_cast<Eigen::Index>(j));
  return TruncOp{std::move(m), T.dim, T.copies, T.trust_band, "left_inverse(" + T.tag + ")"};
}

/// The boundary modulus 1/(|t|^{1/2} log(2/|t|)) on angles t in units of pi,
/// clamped one grid step away from t = 0, run through the outer construction
/// and normalized to unit norm.
inline TrigPoly example53_g(const UnitGrid& grid) {
  if (grid.size() < 512) throw std::invalid_argument("example53_g: grid size >= 512");
  const double tmin = 2.0 / static_cast<double>(grid.size());
  std::vector<cplx> w(grid.size());
  for (size_t k = 0; k < grid.size(); ++k) {
    const double t = std::max(std::abs(grid.angle_over_pi(k)), tmin);
    w[k] = cplx(1.0 / (std::sqrt(t) * std::log(2.0 / t)));
  }
  TrigPoly g = outer_from_modulus(GridFn(grid, std::move(w))).g;
  return g * cplx(1.0 / g.norm());
}

/// The similarity-conjugated pair (T, T') of the final section-5 example:
/// Y = I (+) Y0 on E = span{1, g}, X = Y^{-1/2}, T = X S X^{-1},
/// T' = X^{-1}(S - 1 (x) S*g) X.
inline std::pair<TruncOp, TruncOp> example55_pair(const TrigPoly& g, double a, int n) {
  if (std::abs(g.at(0) - cplx(1.0)) > 1e-12)
    throw std::invalid_argument("example55_pair: g(0) = 1 required");
  const TrigPoly sg = backward_shift(g);
  const double q = sg.norm();
  if (q <= 1e-12) throw std::invalid_argument("example55_pair: S*g must not vanish");
  if (a <= q * q) throw std::invalid_argument("example55_pair: a > ||S*g||^2 required");
  if (g.hi() >= n - 1) throw std::invalid_argument("example55_pair: deg g < n-1 required");

  // Orthonormal basis {d1, d2} of E: d1 = (g-1)/||S*g||, d2 = 1.
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(n, 2);
  D.col(0) = (g - TrigPoly::one()).analytic_coeffs(n) / q;
  D.col(1) = Eigen::VectorXcd::Unit(n, 0);
  Eigen::Matrix2cd Y0;
  Y0 << cplx(a), cplx(q), cplx(q), cplx(1.0);
  const Eigen::MatrixXcd Y = Eigen::MatrixXcd::Identity(n, n) +
                             D * (Y0 - Eigen::Matrix2cd::Identity()) * D.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Y);
  const Eigen::MatrixXcd X = es.eigenvectors() *
                             es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                             es.eigenvectors().adjoint();
  const Eigen::MatrixXcd Xinv = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                                es.eigenvectors().adjoint();
  const Eigen::MatrixXcd S = detail::shift_matrix(n);
  const Eigen::MatrixXcd P =
      S - Eigen::VectorXcd::Unit(n, 0) * sg.analytic_coeffs(n).adjoint();
  const int band = std::max(n - std::max(g.hi(), 1) - 1, 0);
  TruncOp T{X * S * Xinv, n, 1, band, "example55_T"};
  TruncOp Tp{Xinv * P * X, n, 1, band, "example55_Tdual"};
  return {std::move(T), std::move(Tp)};
}

}  // namespace shiftlab
