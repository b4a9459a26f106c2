#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include <shiftlab/diagnostics.hpp>

using namespace shiftlab;

namespace {

BlaschkeProduct random_blaschke(std::mt19937_64& rng, int degree, double max_mod = 0.5) {
  std::uniform_real_distribution<double> rad(0.05, max_mod), ang(0.0, 2.0 * std::numbers::pi);
  std::vector<cplx> pts;
  while (static_cast<int>(pts.size()) < degree) {
    const double r = rad(rng), t = ang(rng);
    const cplx z(r * std::cos(t), r * std::sin(t));
    bool clash = false;
    for (const auto& p : pts)
      if (std::abs(p - z) < 0.05) clash = true;
    if (!clash) pts.push_back(z);
  }
  return BlaschkeProduct::from_points(pts);
}

TruncOp identity_op(int n, int copies = 1) {
  return TruncOp{Eigen::MatrixXcd::Identity(n * copies, n * copies), n, copies, n, "identity"};
}

}  // namespace

TEST_CASE("expansivity_defect") {
  SECTION("isometry: S has zero defect") {
    const Verdict v = expansivity_defect(shift(32));
    CHECK(std::abs(v.value) <= 1e-14);
    CHECK(v.pass);
  }
  SECTION("thm69_T(1,-1,chi,chi) is expansive") {
    const TruncOp t = thm69_T(cplx(1.0), cplx(-1.0), BlaschkeProduct::power_of_chi(1),
                              BlaschkeProduct::power_of_chi(1), 32);
    const Verdict v = expansivity_defect(t);
    CHECK(v.value >= -1e-12);
    CHECK(v.pass);
  }
  SECTION("S/2: defect -3/4") {
    TruncOp t = shift(16);
    t.matrix *= 0.5;
    const Verdict v = expansivity_defect(t);
    CHECK(std::abs(v.value + 0.75) <= 1e-14);
    CHECK_FALSE(v.pass);
  }
}

TEST_CASE("thm69_A_matrix") {
  const BlaschkeProduct chi = BlaschkeProduct::power_of_chi(1);
  SECTION("(1,-1), beta=chi: A = I") {
    const Thm69AMatrix r = thm69_A_matrix(cplx(1.0), cplx(-1.0), chi);
    CHECK((r.A - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(r.positive);
    CHECK(r.criterion);
    CHECK(r.verdict.pass);
  }
  SECTION("(1,0): indefinite, criterion false, still consistent") {
    const Thm69AMatrix r = thm69_A_matrix(cplx(1.0), cplx(0.0), chi);
    CHECK(r.min_eigenvalue < -1e-3);
    CHECK_FALSE(r.positive);
    CHECK_FALSE(r.criterion);
    CHECK(r.verdict.pass);
  }
  SECTION("(1,-1/2): boundary case, det A = 0") {
    const Thm69AMatrix r = thm69_A_matrix(cplx(1.0), cplx(-0.5), chi);
    CHECK(std::abs(r.A.determinant()) <= 1e-14);
    CHECK(r.positive);
    CHECK(r.criterion);
    CHECK(r.verdict.pass);
  }
  SECTION("constant beta rejected") {
    REQUIRE_THROWS_AS(thm69_A_matrix(cplx(1.0), cplx(-1.0), BlaschkeProduct{}),
                      std::invalid_argument);
  }
  SECTION("criterion equivalence on 1000 random bidisc points") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const BlaschkeProduct beta = BlaschkeProduct::from_points({cplx(0.5)});
    int checked = 0;
    while (checked < 1000) {
      const cplx a(u(rng), u(rng)), b(u(rng), u(rng));
      if (std::abs(a) > 1.0 || std::abs(b) > 1.0) continue;
      ++checked;
      const Thm69AMatrix r = thm69_A_matrix(a, b, beta);
      REQUIRE(r.positive == r.criterion);
      REQUIRE(r.verdict.pass);
    }
  }
}

TEST_CASE("defect_trace_profile") {
  const std::vector<int> dims{8, 16, 32};
  SECTION("S: all zeros") {
    const auto [profile, v] = defect_trace_profile([](int n) { return shift(n); }, dims);
    for (double p : profile) CHECK(std::abs(p) <= 1e-12);
    CHECK(v.pass);
  }
  SECTION("perturb_lemma32(1+chi): constant profile") {
    const TrigPoly g = TrigPoly::analytic({cplx(1.0), cplx(1.0)});
    const auto [profile, v] =
        defect_trace_profile([&g](int n) { return perturb_lemma32(g, n); }, dims);
    REQUIRE(profile.size() == 3);
    CHECK(std::abs(profile[0] - profile[2]) <= 1e-8);
    CHECK(std::abs(profile[1] - profile[2]) <= 1e-8);
    CHECK(v.pass);
  }
  SECTION("thm69_T with finite Blaschke data: constant tail") {
    const auto build = [](int n) {
      return thm69_T(cplx(1.0), cplx(-1.0), BlaschkeProduct::power_of_chi(1),
                     BlaschkeProduct::power_of_chi(1), n);
    };
    const auto [profile, v] = defect_trace_profile(build, std::vector<int>{16, 32, 64});
    CHECK(std::abs(profile[1] - profile[2]) <= 1e-8);
    CHECK(v.pass);
  }
}

TEST_CASE("intertwining_residual") {
  const int n = 32;
  SECTION("X=I, A=B=S: zero") {
    const Verdict v = intertwining_residual(identity_op(n), shift(n), shift(n));
    CHECK(v.value <= 1e-14);
    CHECK(v.pass);
  }
  SECTION("toeplitz ratio symbol intertwines S with the lemma32 operator") {
    const TrigPoly g = TrigPoly::analytic({cplx(1.0), cplx(0.5)});
    const TruncOp T = perturb_lemma32(g, n);
    const UnitGrid grid(2048);
    const GridFn ratio = GridFn::sample(grid, [&g](cplx z) {
      const cplx v = g.eval(z);
      return v / std::conj(v);
    });
    TruncOp X = toeplitz_matrix(ratio, n);
    X.trust_band = n - 1;
    const Verdict v = intertwining_residual(X, shift(n), T);
    CHECK(v.pass);
  }
  SECTION("residual monotonicity for the thm69 triples over n in {32,64,128}") {
    const BlaschkeProduct theta = BlaschkeProduct::power_of_chi(2);
    const BlaschkeProduct beta = BlaschkeProduct::from_points({cplx(0.5)});
    const cplx a(1.0), b(-1.0);
    double prevY = 1e9, prevX = 1e9;
    for (int m : {32, 64, 128}) {
      const TruncOp T = thm69_T(a, b, theta, beta, m);
      const TruncOp S = shift(m);
      const double rY = intertwining_residual(thm69_Y(a, b, theta, beta, m), S, T).value;
      const double rX = intertwining_residual(thm69_X(a, b, theta, beta, m), T, S).value;
      CHECK(rY <= 1e-9);
      CHECK(rX <= 1e-9);
      CHECK(rY <= prevY + 1e-12);
      CHECK(rX <= prevX + 1e-12);
      prevY = rY;
      prevX = rX;
    }
  }
  SECTION("dimension mismatch rejected") {
    REQUIRE_THROWS_AS(intertwining_residual(identity_op(8), shift(16), shift(16)),
                      std::invalid_argument);
  }
}

TEST_CASE("quasiaffinity_metrics") {
  const int n = 32;
  SECTION("identity: (1, 0)") {
    const auto [smin, defect] = quasiaffinity_metrics(identity_op(n));
    CHECK(std::abs(smin - 1.0) <= 1e-14);
    CHECK(defect <= 1e-12);
  }
  SECTION("outer Toeplitz symbol 1 + chi/2: sigma_min at least the boundary min modulus") {
    const TruncOp X = toeplitz_matrix(TrigPoly::analytic({cplx(1.0), cplx(0.5)}), n);
    const auto [smin, defect] = quasiaffinity_metrics(X);
    CHECK(smin >= 0.5 - 1e-9);
    CHECK(defect <= 1e-10);
  }
  SECTION("co-analytic symbol has a genuine band kernel") {
    const TruncOp X = toeplitz_matrix(TrigPoly(-1, {cplx(1.0)}), n);  // symbol conj(chi)
    const auto [smin, defect] = quasiaffinity_metrics(X);
    CHECK(smin <= 1e-8);
    (void)defect;
  }
}

TEST_CASE("similarity_condition") {
  const int n = 8;
  SECTION("identity: 1") {
    const double c = similarity_condition(identity_op(n), Eigen::MatrixXcd::Identity(n, n));
    CHECK(std::abs(c - 1.0) <= 1e-12);
  }
  SECTION("diag(1,2): 2") {
    TruncOp Y = identity_op(2);
    Y.matrix(1, 1) = cplx(2.0);
    const double c = similarity_condition(Y, Eigen::MatrixXcd::Identity(2, 2));
    CHECK(std::abs(c - 2.0) <= 1e-12);
  }
  SECTION("degenerate restriction: unbounded") {
    TruncOp Y = identity_op(2);
    Y.matrix.setZero();
    CHECK(std::isinf(similarity_condition(Y, Eigen::MatrixXcd::Identity(2, 2))));
  }
  SECTION("SubspaceBasis wrapper validates orthonormality") {
    REQUIRE_THROWS_AS(SubspaceBasis(Eigen::MatrixXcd::Ones(4, 2)), std::invalid_argument);
    const SubspaceBasis ok(Eigen::MatrixXcd::Identity(4, 2), "coords");
    CHECK(std::abs(similarity_condition(identity_op(4), ok) - 1.0) <= 1e-12);
  }
}

TEST_CASE("wandering_dim") {
  const int n = 32;
  SECTION("T=S on the full space: 1") {
    CHECK(wandering_dim(shift(n), Eigen::MatrixXcd::Identity(n, n)) == 1);
  }
  SECTION("T=S_2 on the full space: 2") {
    CHECK(wandering_dim(shift(n, 2), Eigen::MatrixXcd::Identity(2 * n, 2 * n)) == 2);
  }
  SECTION("T=S on the chi^2 H^2 band: 1") {
    const Eigen::MatrixXcd Mt =
        toeplitz_matrix(BlaschkeProduct::power_of_chi(2).taylor(n), n).matrix;
    CHECK(wandering_dim(shift(n), Mt.leftCols(n - 4)) == 1);
  }
  SECTION("non-invariant subspace rejected") {
    Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(n, 2);
    V(0, 0) = cplx(1.0);
    V(5, 1) = cplx(1.0);
    REQUIRE_THROWS_AS(wandering_dim(shift(n), V), std::runtime_error);
  }
  SECTION("expansive thm69_T on an invariant lattice subspace: at most 1") {
    const TruncOp T = thm69_T(cplx(1.0), cplx(-1.0), BlaschkeProduct::power_of_chi(1),
                              BlaschkeProduct::power_of_chi(1), n);
    // theta beta H^2 = chi^2 H^2 is T-invariant.
    const Eigen::MatrixXcd Mt =
        toeplitz_matrix(BlaschkeProduct::power_of_chi(2).taylor(n), n).matrix;
    const int w = wandering_dim(T, Mt.leftCols(n - 4));
    CHECK(w <= 1);
  }
}

TEST_CASE("lemma46_theta_experiment") {
  const int n = 256;
  SECTION("N=2, theta=chi^2, a=0.05, eps=0.05, Z=I") {
    const Lemma46Report rep =
        lemma46_theta_experiment(BlaschkeProduct::power_of_chi(2), cplx(0.05), 0.05, 2,
                                 identity_op(n, 2), 1.0, n, 1e-9, 0.99);
    CHECK(rep.det_verdict.pass);
    REQUIRE(rep.column_verdicts.size() == 2);
    for (const auto& v : rep.column_verdicts) {
      CHECK(v.pass);
    }
    for (size_t j = 0; j < rep.measured.size(); ++j)
      CHECK(rep.measured[j] >= 0.99 * rep.predicted[j]);
  }
  SECTION("determinant identity for random theta, N=3") {
    std::mt19937_64 rng(46);
    std::vector<cplx> pts{cplx(0.0)};
    const BlaschkeProduct base = random_blaschke(rng, 2, 0.5);
    for (const auto& z : base.zeros) pts.push_back(z.lambda);
    const BlaschkeProduct theta = BlaschkeProduct::from_points(pts);
    const Lemma46Report rep =
        lemma46_theta_experiment(theta, cplx(0.1, 0.05), 0.1, 3, identity_op(n, 3), 1.0, n);
    CHECK(rep.det_verdict.pass);
  }
  SECTION("eps -> 0 makes the joint column map degenerate") {
    // With eps tiny, h1 = theta (1 - conj(a) theta) q and h2 = -(theta - a) q
    // cancel the first block exactly, so the stacked two-column map has a
    // near-kernel vector of size O(eps).
    const double eps = 1e-6;
    const cplx a(0.05);
    const BlaschkeProduct theta = BlaschkeProduct::power_of_chi(2);
    const double c = std::sqrt(1.0 - eps * eps);
    const TrigPoly tt = theta.taylor(n);
    const TrigPoly ta = frostman_shift_taylor(theta, a, n);
    const int band = n / 2;
    const Eigen::MatrixXcd Ma = toeplitz_matrix(ta, n).matrix;
    const Eigen::MatrixXcd Mt = toeplitz_matrix(tt, n).matrix;
    Eigen::MatrixXcd joint = Eigen::MatrixXcd::Zero(2 * n, 2 * band);
    joint.topLeftCorner(n, band) = c * Ma.leftCols(band);
    joint.block(n, 0, n, band) = eps * Eigen::MatrixXcd::Identity(n, band);
    joint.topRightCorner(n, band) = c * Mt.leftCols(band);
    joint.block(n, band, n, band) = eps * Eigen::MatrixXcd::Identity(n, band);
    const TrigPoly h1 =
        (tt * (TrigPoly::one() - std::conj(a) * tt)).truncated(0, band - 1);
    const TrigPoly h2 = ((tt - TrigPoly::constant(a)) * cplx(-1.0)).truncated(0, band - 1);
    Eigen::VectorXcd v(2 * band);
    v.head(band) = h1.analytic_coeffs(band);
    v.tail(band) = h2.analytic_coeffs(band);
    const double ratio = (joint * v).norm() / v.norm();
    CHECK(ratio <= 100.0 * eps);
  }
  SECTION("insufficient band rejected") {
    TruncOp Z = identity_op(n, 2);
    Z.trust_band = 4;
    REQUIRE_THROWS_AS(lemma46_theta_experiment(BlaschkeProduct::power_of_chi(2), cplx(0.05),
                                               0.05, 2, Z, 1.0, n),
                      std::invalid_argument);
  }
}

TEST_CASE("lemma61_intersection_metrics") {
  SECTION("theta = beta = chi") {
    const Lemma61Report rep = lemma61_intersection_metrics(
        BlaschkeProduct::power_of_chi(1), BlaschkeProduct::power_of_chi(1), 64);
    CHECK(rep.dim_product == 2);
    CHECK(rep.dim_theta == 1);
    CHECK(rep.dim_beta == 1);
    CHECK(rep.orthogonality_err <= 1e-12);
    for (const auto& v : rep.verdicts) CHECK(v.pass);
  }
  SECTION("theta = chi^2, beta = b_{1/2}") {
    const Lemma61Report rep = lemma61_intersection_metrics(
        BlaschkeProduct::power_of_chi(2), BlaschkeProduct::from_points({cplx(0.5)}), 256);
    CHECK(rep.inclusion_residual <= 1e-12);
    for (const auto& v : rep.verdicts) CHECK(v.pass);
    CHECK(rep.note.find("density impossible at finite degree") != std::string::npos);
  }
  SECTION("random pairs: decomposition and dimension count") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 5; ++trial) {
      const BlaschkeProduct theta = random_blaschke(rng, 2);
      const BlaschkeProduct beta = random_blaschke(rng, 3);
      const Lemma61Report rep = lemma61_intersection_metrics(theta, beta, 256);
      REQUIRE(rep.dim_product == rep.dim_theta + rep.dim_beta);
      for (const auto& v : rep.verdicts) REQUIRE(v.pass);
      CHECK(rep.cap_metric <= 1.0 + 1e-10);
      CHECK(rep.density_impossible);
    }
  }
}
