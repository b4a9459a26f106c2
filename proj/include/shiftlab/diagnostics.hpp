#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "op_lab.hpp"

namespace shiftlab {

/// A single quantitative pass/fail with the band it was measured on.
struct Verdict {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  int band = 0;
  std::map<std::string, std::string> metadata;
};

inline double operator_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.adjoint() * m, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

inline std::pair<double, double> sigma_extremes(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.adjoint() * m, Eigen::EigenvaluesOnly);
  const double lo = std::sqrt(std::max(es.eigenvalues().minCoeff(), 0.0));
  const double hi = std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
  return {lo, hi};
}

/// Minimum eigenvalue of the trust-band compression of T*T - I; nonnegative
/// for expansive operators.
inline Verdict expansivity_defect(const TruncOp& T, double tol = 1e-10) {
  const auto idx = detail::band_indices(T);
  const Eigen::MatrixXcd A = detail::select_cols(T.matrix, idx);
  const Eigen::MatrixXcd G =
      A.adjoint() * A - Eigen::MatrixXcd::Identity(A.cols(), A.cols());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
  const double mn = es.eigenvalues().minCoeff();
  return Verdict{"expansivity_defect", mn, -tol, mn >= -tol, T.trust_band, {{"tag", T.tag}}};
}

struct Thm69AMatrix {
  Eigen::Matrix2cd A;
  double min_eigenvalue = 0.0;
  bool positive = false;   // A >= 0 at tolerance
  bool criterion = false;  // 2 Re(conj(a) b) <= -1
  Verdict verdict;
};

/// The 2x2 matrix of the restriction of T*T - I to its range, with
/// p = ||P_+ conj(chi) beta|| = sqrt(1 - |beta(0)|^2).
inline Thm69AMatrix thm69_A_matrix(cplx a, cplx b, const BlaschkeProduct& beta,
                                   double tol = 1e-12) {
  const cplx b0 = beta.eval(cplx(0.0));
  const double p = std::sqrt(std::max(1.0 - std::norm(b0), 0.0));
  if (p <= 1e-12) throw std::invalid_argument("thm69_A_matrix: beta must be nonconstant");
  Thm69AMatrix out;
  out.A << cplx(std::norm(a)), (std::conj(a) * b + cplx(1.0)) * p,
      (a * std::conj(b) + cplx(1.0)) * p, cplx(std::norm(b) * p * p);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(out.A, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  out.positive = out.min_eigenvalue >= -tol;
  out.criterion = 2.0 * (std::conj(a) * b).real() <= -1.0;
  out.verdict = Verdict{"thm69_A_positive",
                        out.min_eigenvalue,
                        -tol,
                        out.positive == out.criterion,
                        0,
                        {{"criterion", out.criterion ? "true" : "false"}}};
  return out;
}

/// Trace norms of I - T*T on trust bands over increasing dimensions; for
/// finite-rank perturbations of the shift the profile is exactly constant
/// once the dimension clears the perturbation support.
template <typename Builder>
inline std::pair<std::vector<double>, Verdict> defect_trace_profile(Builder&& build,
                                                                    const std::vector<int>& dims,
                                                                    double tol = 1e-6) {
  std::vector<double> profile;
  int band = 0;
  for (int n : dims) {
    const TruncOp T = build(n);
    band = T.trust_band;
    const auto idx = detail::band_indices(T);
    const Eigen::MatrixXcd A = detail::select_cols(T.matrix, idx);
    const Eigen::MatrixXcd D =
        Eigen::MatrixXcd::Identity(A.cols(), A.cols()) - A.adjoint() * A;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(D, Eigen::EigenvaluesOnly);
    profile.push_back(es.eigenvalues().cwiseAbs().sum());
  }
  double step = 0.0;
  if (profile.size() >= 2)
    step = std::abs(profile.back() - profile[profile.size() - 2]);
  Verdict v{"defect_trace_cauchy", step, tol, step <= tol, band, {}};
  return {std::move(profile), std::move(v)};
}

/// Operator norm of XA - BX compressed to the common trust band (columns on
/// the band, last row dropped to discard the truncation edge).
inline Verdict intertwining_residual(const TruncOp& X, const TruncOp& A, const TruncOp& B,
                                     double tol = 1e-9) {
  if (X.matrix.rows() != A.matrix.rows() || X.matrix.rows() != B.matrix.rows())
    throw std::invalid_argument("intertwining_residual: dimension mismatch");
  const int band = std::min({X.trust_band, A.trust_band, B.trust_band});
  const Eigen::MatrixXcd R = X.matrix * A.matrix - B.matrix * X.matrix;
  const double val = operator_norm(R.topLeftCorner(R.rows() - 1, band));
  return Verdict{"intertwining_residual", val, tol, val <= tol, band,
                 {{"X", X.tag}, {"A", A.tag}, {"B", B.tag}}};
}

/// Band kernel and range proxies; reported, never asserted, since injectivity
/// and dense range of the infinite operator are not finitely decidable.
inline std::pair<double, double> quasiaffinity_metrics(const TruncOp& X,
                                                       double rank_tol = 1e-7) {
  const int b = X.trust_band;
  const Eigen::MatrixXcd blk = X.matrix.topLeftCorner(b, b);
  const auto [smin, smax] = sigma_extremes(blk);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(blk, Eigen::ComputeThinU);
  int rank = 0;
  for (int k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()(k) > rank_tol * std::max(smax, 1.0)) ++rank;
  const Eigen::MatrixXcd U = svd.matrixU().leftCols(rank);
  double defect = 0.0;
  for (int j = 0; j < b; ++j) {
    const Eigen::VectorXcd e = Eigen::VectorXcd::Unit(b, j);
    defect = std::max(defect, (e - U * (U.adjoint() * e)).norm());
  }
  return {smin, defect};
}

/// Orthonormal column frame for a finite-section subspace.
struct SubspaceBasis {
  Eigen::MatrixXcd columns;
  std::string tag;

  SubspaceBasis(Eigen::MatrixXcd cols, std::string t = "") : columns(std::move(cols)), tag(std::move(t)) {
    const Eigen::MatrixXcd G = columns.adjoint() * columns;
    const double err =
        (G - Eigen::MatrixXcd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
    if (err > 1e-10)
      throw std::invalid_argument("SubspaceBasis: columns not orthonormal, error " +
                                  std::to_string(err));
  }
};

/// Condition number ||Y|V|| * ||(Y|V)^{-1}|| of the restriction of Y to the
/// column span of V; infinity when the restriction degenerates.
inline double similarity_condition(const TruncOp& Y, const Eigen::MatrixXcd& V) {
  const auto [smin, smax] = sigma_extremes(Y.matrix * V);
  if (smin < 1e-12) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

/// dim(M (-) TM) for a band-supported approximately invariant subspace M
/// given by orthonormal columns V.  Invariance is certified on all but the
/// last column (the band edge pushes one column out by construction).
inline int wandering_dim(const TruncOp& T, const Eigen::MatrixXcd& V, double rank_tol = 1e-7,
                         double inv_tol = 1e-8) {
  const int k = static_cast<int>(V.cols());
  if (k < 1) throw std::invalid_argument("wandering_dim: empty subspace");
  const Eigen::MatrixXcd W = T.matrix * V;
  const Eigen::MatrixXcd resid =
      W.leftCols(k - 1) - V * (V.adjoint() * W.leftCols(k - 1));
  if (k > 1 && operator_norm(resid) > inv_tol)
    throw std::runtime_error("wandering_dim: subspace not invariant, residual " +
                             std::to_string(operator_norm(resid)));
  const Eigen::MatrixXcd PW = V * (V.adjoint() * W);  // TM projected into M
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(PW);
  const double scale = std::max(svd.singularValues().size() ? svd.singularValues()(0) : 0.0, 1.0);
  int rank = 0;
  for (int j = 0; j < svd.singularValues().size(); ++j)
    if (svd.singularValues()(j) > rank_tol * scale) ++rank;
  return k - rank;
}

inline double similarity_condition(const TruncOp& Y, const SubspaceBasis& V) {
  return similarity_condition(Y, V.columns);
}

inline int wandering_dim(const TruncOp& T, const SubspaceBasis& M, double rank_tol = 1e-7,
                         double inv_tol = 1e-8) {
  return wandering_dim(T, M.columns, rank_tol, inv_tol);
}

struct Lemma46Report {
  double det_max_err = 0.0;
  std::vector<double> measured;   // per column: smallest singular value of Z o Theta_j
  std::vector<double> predicted;  // per column: the proof's displayed lower bound
  Verdict det_verdict;
  std::vector<Verdict> column_verdicts;
};

/// The N x N outer-matrix experiment: first row (1-eps^2)^{1/2} (theta_a,
/// theta, ..., theta), second row (eps, eps, 0, ..., 0), then eps on the
/// shifted diagonal.  Verifies the determinant identity det Theta =
/// (1-eps^2)^{1/2} eps^{N-1} (theta_a - theta) pointwise and measures the
/// per-column lower bounds against the predicted estimates.
inline Lemma46Report lemma46_theta_experiment(const BlaschkeProduct& theta, cplx a, double eps,
                                              int N, const TruncOp& Z, double delta0 = 1.0,
                                              int n = 256, double det_tol = 1e-9,
                                              double slack = 0.98) {
  if (N < 2) throw std::invalid_argument("lemma46_theta_experiment: N >= 2");
  if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("lemma46_theta_experiment: eps in (0,1)");
  if (Z.dim != n || Z.copies != N)
    throw std::invalid_argument("lemma46_theta_experiment: Z must act on H^2_N at dim n");
  const double c = std::sqrt(1.0 - eps * eps);
  const double ra = std::abs(a);
  const int band = n / 2;
  if (Z.trust_band < band) throw std::invalid_argument("lemma46_theta_experiment: insufficient band");

  Lemma46Report rep;

  // Determinant identity on a 512-point grid, using exact evaluators.
  auto theta_a = frostman_shift([&theta](cplx z) { return theta.eval(z); }, a);
  for (int k = 0; k < 512; ++k) {
    const double t = 2.0 * std::numbers::pi * k / 512.0;
    const cplx z(std::cos(t), std::sin(t));
    Eigen::MatrixXcd Th = Eigen::MatrixXcd::Zero(N, N);
    const cplx tv = theta.eval(z);
    Th(0, 0) = c * theta_a(z);
    for (int j = 1; j < N; ++j) Th(0, j) = c * tv;
    Th(1, 0) = Th(1, 1) = eps;
    for (int j = 2; j < N; ++j) Th(j, j) = eps;
    const cplx lhs = Th.determinant();
    const cplx rhs = c * std::pow(eps, N - 1) * (theta_a(z) - tv);
    rep.det_max_err = std::max(rep.det_max_err, std::abs(lhs - rhs));
  }
  rep.det_verdict = Verdict{"lemma46_det_identity", rep.det_max_err, det_tol,
                            rep.det_max_err <= det_tol, band, {}};

  // Column maps h -> Z Theta_j h on the band.
  const TrigPoly tt = theta.taylor(n);
  const TrigPoly ta = frostman_shift_taylor(theta, a, n);
  const Eigen::MatrixXcd Mt = toeplitz_matrix(tt, n).matrix;
  const Eigen::MatrixXcd Ma = toeplitz_matrix(ta, n).matrix;
  const double normZ = operator_norm(detail::select_cols(Z.matrix, detail::band_indices(Z)));
  for (int j = 0; j < N; ++j) {
    Eigen::MatrixXcd col = Eigen::MatrixXcd::Zero(N * n, band);
    col.topRows(n) = c * (j == 0 ? Ma.leftCols(band) : Mt.leftCols(band));
    if (j <= 1) {
      col.middleRows(n, n).leftCols(band) =
          eps * Eigen::MatrixXcd::Identity(n, band);
    } else {
      col.middleRows(j * n, n).leftCols(band) = eps * Eigen::MatrixXcd::Identity(n, band);
    }
    const auto [smin, smax] = sigma_extremes(Z.matrix * col);
    (void)smax;
    double pred;
    if (j == 0) {
      pred = c / (1.0 - ra) *
                 (delta0 * std::sqrt(std::max(1.0 - 2.0 * ra - 3.0 * ra * ra, 0.0)) -
                  2.0 * ra * normZ) -
             normZ * eps;
    } else {
      pred = c * delta0 - normZ * eps;
    }
    rep.measured.push_back(smin);
    rep.predicted.push_back(pred);
    rep.column_verdicts.push_back(Verdict{"lemma46_column_" + std::to_string(j + 1), smin,
                                          slack * pred, smin >= slack * pred, band,
                                          {{"predicted", std::to_string(pred)}}});
  }
  return rep;
}

struct Lemma61Report {
  int dim_theta = 0, dim_beta = 0, dim_product = 0;
  double orthogonality_err = 0.0;   // theta K_beta vs K_theta
  double decomposition_err = 0.0;   // span check inside K_{theta beta}
  double inclusion_residual = 0.0;  // (theta-1) K_beta inside K_{theta beta}
  double cap_metric = 0.0;          // cos of smallest principal angle vs beta H^2
  bool density_impossible = true;
  std::string note;
  std::vector<Verdict> verdicts;
};

/// Finite-section study of K_{theta beta} = theta K_beta (+) K_theta, the
/// inclusion (theta-1) K_beta in K_{theta beta}, and the intersection metric
/// against beta H^2.  At finite degree the closure equality is impossible by
/// dimension count, and the report says so.
inline Lemma61Report lemma61_intersection_metrics(const BlaschkeProduct& theta,
                                                  const BlaschkeProduct& beta, int n = 256,
                                                  double tol = 1e-10) {
  Lemma61Report rep;
  const ModelBasis kt = model_basis(theta, n);
  const ModelBasis kb = model_basis(beta, n);
  std::vector<BlaschkeProduct::Zero> zs = theta.zeros;
  for (const auto& z : beta.zeros) {
    bool merged = false;
    for (auto& existing : zs)
      if (existing.lambda == z.lambda) {
        existing.multiplicity += z.multiplicity;
        merged = true;
        break;
      }
    if (!merged) zs.push_back(z);
  }
  const BlaschkeProduct prod{std::move(zs)};
  const ModelBasis ktb = model_basis(prod, n);
  rep.dim_theta = kt.dim();
  rep.dim_beta = kb.dim();
  rep.dim_product = ktb.dim();

  const Eigen::MatrixXcd Mt = toeplitz_matrix(theta.taylor(n), n).matrix;
  const Eigen::MatrixXcd tkb = Mt * kb.columns;  // theta K_beta, still orthonormal
  rep.orthogonality_err = (kt.columns.adjoint() * tkb).cwiseAbs().maxCoeff();

  const Eigen::MatrixXcd P = ktb.columns * ktb.columns.adjoint();
  rep.decomposition_err = operator_norm(tkb - P * tkb);
  const Eigen::MatrixXcd inc = tkb - kb.columns;  // (theta - 1) K_beta
  rep.inclusion_residual = operator_norm(inc - P * inc);

  // Principal angles between span(K_theta u (theta-1) K_beta) and the band
  // compression of beta H^2.
  Eigen::MatrixXcd U1raw(n, kt.dim() + kb.dim());
  U1raw << kt.columns, inc;
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(U1raw);
  const Eigen::MatrixXcd U1 =
      qr.householderQ() * Eigen::MatrixXcd::Identity(n, U1raw.cols());
  const int bband = n / 2;  // keep beta chi^k columns clear of the tail cutoff
  const Eigen::MatrixXcd U2 =
      toeplitz_matrix(beta.taylor(n), n).matrix.leftCols(bband);  // orthonormal columns
  rep.cap_metric = operator_norm(U1.adjoint() * U2);

  rep.density_impossible = true;
  rep.note = "density impossible at finite degree: dim((theta-1)K_beta) = " +
             std::to_string(kb.dim()) + " < " + std::to_string(ktb.dim()) +
             " = dim K_{theta beta}";

  const bool dims_ok = rep.dim_product == rep.dim_theta + rep.dim_beta;
  rep.verdicts.push_back(Verdict{"lemma61_dim_additivity",
                                 static_cast<double>(rep.dim_product),
                                 static_cast<double>(rep.dim_theta + rep.dim_beta), dims_ok, n, {}});
  rep.verdicts.push_back(Verdict{"lemma61_orthogonality", rep.orthogonality_err, tol,
                                 rep.orthogonality_err <= tol, n, {}});
  rep.verdicts.push_back(Verdict{"lemma61_decomposition", rep.decomposition_err, tol,
                                 rep.decomposition_err <= tol, n, {}});
  rep.verdicts.push_back(Verdict{"lemma61_inclusion", rep.inclusion_residual, tol,
                                 rep.inclusion_residual <= tol, n, {}});
  rep.verdicts.push_back(Verdict{"lemma61_density_impossible", 1.0, 1.0, rep.density_impossible, n,
                                 {{"note", rep.note}}});
  return rep;
}

}  // namespace shiftlab
