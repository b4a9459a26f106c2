#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "clark.hpp"
#include "op_lab.hpp"
#include "serialize.hpp"

namespace shiftlab {

inline constexpr const char* kVersion = "0.1.0";

/// Worker-count bound from the environment; at least 1.
inline int thread_budget() {
  if (const char* env = std::getenv("SHIFTLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(std::min(hc, 4u));
}

struct ExperimentConfig {
  std::string experiment;
  json params = json::object();
  std::uint64_t seed = 0;
  std::string out_path;
  std::string format = "json";
  bool expected_fail = false;

  json to_json() const {
    json j;
    j["experiment"] = experiment;
    j["seed"] = seed;
    j["expected_fail"] = expected_fail;
    j["output"] = {{"path", out_path}, {"format", format}};
    j["params"] = params;
    return j;
  }
};

/// Parameter schema per experiment: key -> one-line description.
inline const std::map<std::string, std::map<std::string, std::string>>& experiment_schema() {
  static const std::map<std::string, std::map<std::string, std::string>> schema{
      {"clark",
       {{"zeros", "Blaschke zeros as [re,im] or [re,im,mult]; first zero must be the origin"},
        {"n_work", "working truncation dimension (default 512)"},
        {"random_trials", "extra random measure->inner->measure round trips (default 0)"},
        {"atoms_max", "max atoms per random trial (default 8)"},
        {"tol", "round-trip tolerance (default 1e-8)"}}},
      {"frostman",
       {{"zeros", "Blaschke zeros of theta"},
        {"a", "Frostman parameter [re,im], 0<|a|<1"},
        {"grid", "unit-circle grid size, power of two (default 2048)"},
        {"trials", "extra random (theta,a) draws (default 0)"}}},
      {"carleson-build",
       {{"depth", "number of generations (default 6)"},
        {"delta_a", "delta sequence scale (default 1.0)"},
        {"delta_ratio", "delta sequence geometric ratio (default 0.25)"},
        {"oracle", "\"cantor\" or \"points\" (default cantor)"},
        {"alpha", "Cantor middle-gap fraction (default 1/3)"},
        {"angles_over_pi", "atoms for the points oracle, angles in units of pi"},
        {"box_bound", "Carleson box-sup acceptance bound (default 4.1)"}}},
      {"perturb",
       {{"g", "analytic coefficients of g as [re,im] list, g(0)=1"},
        {"n", "truncation dimension (default 64)"},
        {"tol", "identity residual tolerance (default 1e-9)"}}},
      {"thm69",
       {{"a", "[re,im]"},
        {"b", "[re,im]"},
        {"theta", "Blaschke zeros of theta (theta(0)=0 required)"},
        {"beta", "Blaschke zeros of beta"},
        {"n", "truncation dimension (default 64)"},
        {"tol", "intertwining residual tolerance (default 1e-9)"}}},
      {"lemma46",
       {{"theta", "Blaschke zeros of theta"},
        {"a", "[re,im], 0<|a|<1"},
        {"eps", "epsilon in (0,1)"},
        {"N", "number of copies, N>=2 (default 2)"},
        {"n", "truncation dimension (default 256)"},
        {"delta0", "assumed lower bound for Z on theta H^2 (default 1.0)"},
        {"slack", "fraction of the predicted column bound to require (default 0.98)"}}},
      {"lemma61",
       {{"theta", "Blaschke zeros of theta"},
        {"beta", "Blaschke zeros of beta"},
        {"n", "truncation dimension (default 256)"},
        {"tol", "residual tolerance (default 1e-10)"}}},
      {"defect-profile",
       {{"family", "\"lemma32\" or \"thm69\""},
        {"g", "analytic coefficients for the lemma32 family"},
        {"a", "[re,im] for the thm69 family"},
        {"b", "[re,im] for the thm69 family"},
        {"theta", "Blaschke zeros for the thm69 family"},
        {"beta", "Blaschke zeros for the thm69 family"},
        {"dims", "increasing dimension list (default [16,32,64])"},
        {"tol", "Cauchy tolerance on the profile tail (default 1e-6)"}}},
      {"dual-check",
       {{"family", "\"shift\", \"lemma32\", or \"thm69\""},
        {"g", "analytic coefficients for the lemma32 family"},
        {"a", "[re,im] for the thm69 family"},
        {"b", "[re,im] for the thm69 family"},
        {"theta", "Blaschke zeros for the thm69 family"},
        {"beta", "Blaschke zeros for the thm69 family"},
        {"n", "truncation dimension (default 64)"},
        {"tol", "left-inverse residual tolerance (default 1e-9)"}}},
  };
  return schema;
}

inline std::string list_experiments() {
  std::string out = "shiftlab experiments (version ";
  out += kVersion;
  out += ")\n";
  for (const auto& [name, params] : experiment_schema()) {
    out += "\n" + name + "\n";
    for (const auto& [key, desc] : params) out += "  params." + key + " : " + desc + "\n";
  }
  return out;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline json parse_value(const std::string& raw) {
  json v = json::parse(raw, nullptr, false);
  if (v.is_discarded()) return json(raw);  // bare strings need no quotes
  return v;
}

inline cplx parse_cplx(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument(std::string(what) + ": complex scalars are [re, im]");
  return cplx(j[0].get<double>(), j[1].get<double>());
}

inline BlaschkeProduct parse_blaschke(const json& j, const char* what) {
  if (!j.is_array()) throw std::invalid_argument(std::string(what) + ": zero list expected");
  std::vector<BlaschkeProduct::Zero> zs;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3)
      throw std::invalid_argument(std::string(what) + ": zeros are [re,im] or [re,im,mult]");
    BlaschkeProduct::Zero z;
    z.lambda = cplx(e[0].get<double>(), e[1].get<double>());
    z.multiplicity = e.size() == 3 ? e[2].get<int>() : 1;
    zs.push_back(z);
  }
  return BlaschkeProduct(std::move(zs));
}

inline TrigPoly parse_poly(const json& j, const char* what) {
  if (!j.is_array()) throw std::invalid_argument(std::string(what) + ": coefficient list expected");
  std::vector<cplx> c;
  for (const auto& e : j) c.push_back(parse_cplx(e, what));
  return TrigPoly::analytic(std::move(c));
}

template <typename T>
inline T param_or(const json& params, const char* key, T fallback) {
  if (!params.contains(key)) return fallback;
  return params.at(key).get<T>();
}

using Probe = std::pair<cplx, double>;

/// Probe-sweep box sup with the worker budget; max-reduction is order-free.
inline double parallel_box_sup(const ZeroSet& L, const std::vector<Probe>& probes) {
  const int workers = std::min<int>(thread_budget(), std::max<size_t>(probes.size(), 1));
  if (workers <= 1) return carleson_box_sup(L, probes);
  std::vector<double> partial(static_cast<size_t>(workers), 0.0);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w]() {
      std::vector<Probe> mine;
      for (size_t i = static_cast<size_t>(w); i < probes.size(); i += static_cast<size_t>(workers))
        mine.push_back(probes[i]);
      partial[static_cast<size_t>(w)] = carleson_box_sup(L, mine);
    });
  for (auto& t : pool) t.join();
  double mx = 0.0;
  for (double p : partial) mx = std::max(mx, p);
  return mx;
}

}  // namespace detail

/// Parse the "key = value" config format; dotted keys nest; values are JSON
/// fragments (bare words become strings).  Unknown keys are rejected.
inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::set<std::string> params_seen;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected 'key = value', got: " + line);
    const std::string key = detail::trim(line.substr(0, eq));
    const json value = detail::parse_value(detail::trim(line.substr(eq + 1)));
    if (key == "experiment") {
      cfg.experiment = value.get<std::string>();
    } else if (key == "seed") {
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "expected_fail") {
      cfg.expected_fail = value.get<bool>();
    } else if (key == "output.path") {
      cfg.out_path = value.get<std::string>();
    } else if (key == "output.format") {
      cfg.format = value.get<std::string>();
    } else if (key.rfind("params.", 0) == 0) {
      const std::string pkey = key.substr(7);
      if (pkey.empty() || params_seen.count(pkey))
        throw std::invalid_argument("config: bad or duplicate params key: " + key);
      params_seen.insert(pkey);
      cfg.params[pkey] = value;
    } else {
      throw std::invalid_argument("config: unknown key: " + key);
    }
  }
  return cfg;
}

/// Structural validation against the experiment catalog; throws
/// invalid_argument with a message on failure.
inline void validate_config(const ExperimentConfig& cfg) {
  const auto& schema = experiment_schema();
  const auto it = schema.find(cfg.experiment);
  if (it == schema.end())
    throw std::invalid_argument("config: unknown experiment: '" + cfg.experiment + "'");
  for (const auto& [key, value] : cfg.params.items()) {
    (void)value;
    if (!it->second.count(key))
      throw std::invalid_argument("config: unknown params key for " + cfg.experiment + ": " + key);
  }
  if (cfg.format != "json" && cfg.format != "csv")
    throw std::invalid_argument("config: format must be json or csv");
}

struct RunResult {
  json report;        // deterministic payload: config, verdicts, artifacts, version
  json envelope;      // timing and host facts, excluded from determinism checks
  bool all_pass = false;
  int exit_code = 0;  // 0 pass, 1 verdict failure (unless expected_fail)
};

namespace detail {

inline AtomicMeasure random_measure(std::mt19937_64& rng, int max_atoms) {
  std::uniform_int_distribution<int> count(2, max_atoms);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi), wu(0.1, 1.0);
  const int k = count(rng);
  std::vector<AtomicMeasure::Atom> atoms;
  while (static_cast<int>(atoms.size()) < k) {
    const double t = ang(rng);
    const cplx z(std::cos(t), std::sin(t));
    bool clash = false;
    for (const auto& a : atoms)
      if (std::abs(a.zeta - z) < 0.05) clash = true;
    if (!clash) atoms.push_back({z, wu(rng)});
  }
  double mass = 0.0;
  for (const auto& a : atoms) mass += a.weight;
  for (auto& a : atoms) a.weight /= mass;
  return AtomicMeasure(std::move(atoms));
}

inline BlaschkeProduct random_blaschke(std::mt19937_64& rng, int degree, double max_mod,
                                       bool zero_at_origin) {
  std::uniform_real_distribution<double> rad(0.05, max_mod), ang(0.0, 2.0 * std::numbers::pi);
  std::vector<cplx> pts;
  if (zero_at_origin) pts.push_back(cplx(0.0));
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

/// Atom lists may come back in a different order, so match each atom of x to
/// the nearest atom of y before comparing positions and weights.
inline double measure_distance(const AtomicMeasure& x, const AtomicMeasure& y) {
  if (x.atoms.size() != y.atoms.size()) return 1e9;
  double err = 0.0;
  for (const auto& a : x.atoms) {
    double best = 1e9, w = 0.0;
    for (const auto& b : y.atoms)
      if (std::abs(b.zeta - a.zeta) < best) {
        best = std::abs(b.zeta - a.zeta);
        w = b.weight;
      }
    err = std::max(err, best);
    err = std::max(err, std::abs(w - a.weight));
  }
  return err;
}

inline void run_clark(const ExperimentConfig& cfg, std::vector<Verdict>& verdicts,
                      json& artifacts) {
  const json zeros_j = cfg.params.contains("zeros") ? cfg.params.at("zeros")
                                                    : json::parse("[[0,0,2]]");
  const BlaschkeProduct B = parse_blaschke(zeros_j, "clark.zeros");
  const double tol = param_or(cfg.params, "tol", 1e-8);
  const AtomicMeasure nu = clark_measure_from_blaschke(B);
  artifacts["atoms"] = shiftlab::to_json(nu);
  verdicts.push_back(Verdict{"clark_total_mass", std::abs(nu.total_mass() - 1.0), 1e-10,
                             std::abs(nu.total_mass() - 1.0) <= 1e-10, B.degree(), {}});
  const PhasedBlaschke back = clark_blaschke_from_measure(nu);
  const AtomicMeasure nu2 = clark_measure_from_blaschke(back);
  const double rt = measure_distance(nu, nu2);
  verdicts.push_back(Verdict{"clark_round_trip", rt, tol, rt <= tol, B.degree(), {}});
  const int trials = param_or(cfg.params, "random_trials", 0);
  if (trials > 0) {
    const int atoms_max = param_or(cfg.params, "atoms_max", 8);
    std::mt19937_64 rng(cfg.seed);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      const AtomicMeasure m = random_measure(rng, atoms_max);
      const AtomicMeasure m2 = clark_measure_from_blaschke(clark_blaschke_from_measure(m));
      worst = std::max(worst, measure_distance(m, m2));
    }
    verdicts.push_back(Verdict{"clark_random_round_trips", worst, tol, worst <= tol, atoms_max,
                               {{"trials", std::to_string(trials)}}});
  }
}

inline void run_frostman(const ExperimentConfig& cfg, std::vector<Verdict>& verdicts,
                         json& artifacts) {
  const json zeros_j =
      cfg.params.contains("zeros") ? cfg.params.at("zeros") : json::parse("[[0,0,1]]");
  const BlaschkeProduct theta = parse_blaschke(zeros_j, "frostman.zeros");
  const cplx a = cfg.params.contains("a") ? parse_cplx(cfg.params.at("a"), "frostman.a")
                                          : cplx(0.3, 0.0);
  const int M = param_or(cfg.params, "grid", 2048);
  const UnitGrid grid(static_cast<size_t>(M));
  auto check = [&grid](const BlaschkeProduct& th, cplx av) {
    auto shifted = frostman_shift([&th](cplx z) { return th.eval(z); }, av);
    double sup = 0.0;
    for (size_t k = 0; k < grid.size(); ++k) {
      const cplx z = grid.point(k);
      sup = std::max(sup, std::abs(th.eval(z) - shifted(z)));
    }
    return sup - 2.0 * std::abs(av) / (1.0 - std::abs(av));
  };
  const double excess = check(theta, a);
  verdicts.push_back(Verdict{"frostman_bound", excess, 1e-10, excess <= 1e-10, M, {}});
  artifacts["sup_excess"] = excess;
  const int trials = param_or(cfg.params, "trials", 0);
  if (trials > 0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> ra(0.05, 0.7), ang(0.0, 2.0 * std::numbers::pi);
    std::uniform_int_distribution<int> deg(1, 5);
    double worst = -1e9;
    for (int t = 0; t < trials; ++t) {
      const BlaschkeProduct th = random_blaschke(rng, deg(rng), 0.7, false);
      const double r = ra(rng), s = ang(rng);
      worst = std::max(worst, check(th, cplx(r * std::cos(s), r * std::sin(s))));
    }
    verdicts.push_back(Verdict{"frostman_bound_random", worst, 1e-10, worst <= 1e-10, M,
                               {{"trials", std::to_string(trials)}}});
  }
}

inline void run_carleson(const ExperimentConfig& cfg, std::vector<Verdict>& verdicts,
                         json& artifacts) {
  const int depth = param_or(cfg.params, "depth", 6);
  const DeltaSpec delta{param_or(cfg.params, "delta_a", 1.0),
                        param_or(cfg.params, "delta_ratio", 0.25)};
  const std::string oracle = param_or<std::string>(cfg.params, "oracle", "cantor");
  std::vector<CompactOracle> compacts;
  if (oracle == "cantor") {
    const double alpha = param_or(cfg.params, "alpha", 1.0 / 3.0);
    for (int level = 1; level <= depth; ++level)
      compacts.push_back(cantor_endpoint_oracle(level, alpha));
  } else if (oracle == "points") {
    if (!cfg.params.contains("angles_over_pi"))
      throw std::invalid_argument("carleson-build: points oracle needs params.angles_over_pi");
    std::vector<cplx> pts;
    for (const auto& t : cfg.params.at("angles_over_pi"))
      pts.push_back(std::polar(1.0, t.get<double>() * std::numbers::pi));
    compacts.assign(static_cast<size_t>(depth), finite_point_oracle(pts));
  } else {
    throw std::invalid_argument("carleson-build: oracle must be cantor or points");
  }
  const LambdaBuild b = build_lambda(compacts, delta, depth);
  const double bs = blaschke_sum(b.lambda);
  verdicts.push_back(
      Verdict{"carleson_blaschke_sum", bs, delta.total(), bs <= delta.total(), depth, {}});
  const double box_bound = param_or(cfg.params, "box_bound", 4.1);
  const double sup = parallel_box_sup(b.lambda, canonical_probes());
  verdicts.push_back(Verdict{"carleson_box_sup", sup, box_bound, sup <= box_bound, depth, {}});
  bool monotone = true;
  for (size_t n = 1; n < b.audit.size(); ++n)
    monotone = monotone && b.audit[n].eps_min < b.audit[n - 1].eps_min;
  verdicts.push_back(Verdict{"carleson_generation_monotone", monotone ? 1.0 : 0.0, 1.0, monotone,
                             depth, {}});
  artifacts["lambda"] = shiftlab::to_json(b.lambda);
  json audit = json::array();
  for (const auto& a : b.audit) audit.push_back(shiftlab::to_json(a));
  artifacts["audit"] = audit;
}

inline void dual_law_verdicts(const TruncOp& T, double tol, std::vector<Verdict>& verdicts) {
  const int bnd = T.trust_band;
  const TruncOp L = left_inverse(T);
  const Eigen::MatrixXcd prod = L.matrix * T.matrix;
  const double left_res =
      (prod.topLeftCorner(bnd, bnd) - Eigen::MatrixXcd::Identity(bnd, bnd)).cwiseAbs().maxCoeff();
  verdicts.push_back(
      Verdict{"left_inverse_identity", left_res, tol, left_res <= tol, bnd, {{"tag", T.tag}}});
  const TruncOp DD = cauchy_dual(cauchy_dual(T));
  const double dd =
      (DD.matrix.leftCols(bnd) - T.matrix.leftCols(bnd)).cwiseAbs().maxCoeff();
  verdicts.push_back(Verdict{"double_dual_identity", dd, 1e-8, dd <= 1e-8, bnd, {}});
  const Verdict e = expansivity_defect(T);
  verdicts.push_back(e);
  if (e.pass) {
    const TruncOp D = cauchy_dual(T);
    const double nrm = operator_norm(D.matrix.leftCols(bnd));
    verdicts.push_back(
        Verdict{"dual_contraction", nrm, 1.0 + 1e-8, nrm <= 1.0 + 1e-8, bnd, {}});
  }
}

inline void run_perturb(const ExperimentConfig& cfg, std::vector<Verdict>& verdicts,
                        json& artifacts) {
  const TrigPoly g = cfg.params.contains("g")
                         ? parse_poly(cfg.params.at("g"), "perturb.g")
                         : TrigPoly::analytic({cplx(1.0), cplx(1.0)});
  const int n = param_or(cfg.params, "n", 64);
  const double tol = param_or(cfg.params, "tol", 1e-9);
  const TruncOp T = perturb_lemma32(g, n);
  dual_law_verdicts(T, tol, verdicts);
  artifacts["trust_band"] = T.trust_band;
}

inline void run_thm69(const ExperimentConfig& cfg, std::vector<Verdict>& verdicts,
                      json& artifacts) {
  const cplx a = cfg.params.contains("a") ? parse_cplx(cfg.params.at("a"), "thm69.a")
                                          : cplx(1.0, 0.0);
  const cplx b = cfg.params.contains("b") ? parse_cplx(cfg.params.at("b"), "thm69.b")
                                          : cplx(-1.0, 0.0);
  const BlaschkeProduct theta = cfg.params.contains("theta")
                                    ? parse_blaschke(cfg.params.at("theta"), "thm69.theta")
                                    : BlaschkeProduct::power_of_chi(1);
  const BlaschkeProduct beta = cfg.params.contains("beta")
                                   ? parse_blaschke(cfg.params.at("beta"), "thm69.beta")
                                   : BlaschkeProduct::power_of_chi(1);
  const int n = param_or(cfg.params, "n", 64);
  const double tol = param_or(cfg.params, "tol", 1e-9);
  const Thm69AMatrix A = thm69_A_matrix(a, b, beta);
  verdicts.push_back(A.verdict);
  const TruncOp T = thm69_T(a, b, theta, beta, n);
  const Verdict e = expansivity_defect(T);
  verdicts.push_back(e);
  verdicts.push_back(Verdict{"thm69_criterion_consistent", e.pass == A.criterion ? 1.0 : 0.0, 1.0,
                             e.pass == A.criterion, T.trust_band, {}});
  const TruncOp S = shift(n);
  verdicts.push_back(intertwining_residual(thm69_Y(a, b, theta, beta, n), S, T, tol));
  verdicts.push_back(intertwining_residual(thm69_X(a, b, theta, beta, n), T, S, tol));
  artifacts["A_min_eigenvalue"] = A.min_eigenvalue;
}

inline void run_lemma46(const ExperimentConfig& cfg, std::vector<Verdict>& verdicts,
                        json& artifacts) {
  const BlaschkeProduct theta = cfg.params.contains("theta")
                                    ? parse_blaschke(cfg.params.at("theta"), "lemma46.theta")
                                    : BlaschkeProduct::power_of_chi(2);
  const cplx a = cfg.params.contains("a") ? parse_cplx(cfg.params.at("a"), "lemma46.a")
                                          : cplx(0.05, 0.0);
  const double eps = param_or(cfg.params, "eps", 0.05);
  const int N = param_or(cfg.params, "N", 2);
  const int n = param_or(cfg.params, "n", 256);
  const double delta0 = param_or(cfg.params, "delta0", 1.0);
  const double slack = param_or(cfg.params, "slack", 0.98);
  const TruncOp Z{Eigen::MatrixXcd::Identity(N * n, N * n), n, N, n, "identity"};
  const Lemma46Report rep =
      lemma46_theta_experiment(theta, a, eps, N, Z, delta0, n, 1e-9, slack);
  verdicts.push_back(rep.det_verdict);
  for (const auto& v : rep.column_verdicts) verdicts.push_back(v);
  artifacts["measured"] = rep.measured;
  artifacts["predicted"] = rep.predicted;
}

inline void run_lemma61(const ExperimentConfig& cfg, std::vector<Verdict>& verdicts,
                        json& artifacts) {
  const BlaschkeProduct theta = cfg.params.contains("theta")
                                    ? parse_blaschke(cfg.params.at("theta"), "lemma61.theta")
                                    : BlaschkeProduct::power_of_chi(2);
  const BlaschkeProduct beta = cfg.params.contains("beta")
                                   ? parse_blaschke(cfg.params.at("beta"), "lemma61.beta")
                                   : BlaschkeProduct::from_points({cplx(0.5)});
  const int n = param_or(cfg.params, "n", 256);
  const double tol = param_or(cfg.params, "tol", 1e-10);
  const Lemma61Report rep = lemma61_intersection_metrics(theta, beta, n, tol);
  for (const auto& v : rep.verdicts) verdicts.push_back(v);
  artifacts["dims"] = {{"theta", rep.dim_theta}, {"beta", rep.dim_beta},
                       {"product", rep.dim_product}};
  artifacts["cap_metric"] = rep.cap_metric;
  artifacts["note"] = rep.note;
}

inline std::function<TruncOp(int)> family_builder(const ExperimentConfig& cfg,
                                                  const char* experiment) {
  const std::string family = param_or<std::string>(cfg.params, "family", "lemma32");
  if (family == "shift") return [](int n) { return shift(n); };
  if (family == "lemma32") {
    const TrigPoly g = cfg.params.contains("g")
                           ? parse_poly(cfg.params.at("g"), "g")
                           : TrigPoly::analytic({cplx(1.0), cplx(1.0)});
    return [g](int n) { return perturb_lemma32(g, n); };
  }
  if (family == "thm69") {
    const cplx a = cfg.params.contains("a") ? parse_cplx(cfg.params.at("a"), "a") : cplx(1.0);
    const cplx b = cfg.params.contains("b") ? parse_cplx(cfg.params.at("b"), "b") : cplx(-1.0);
    const BlaschkeProduct theta = cfg.params.contains("theta")
                                      ? parse_blaschke(cfg.params.at("theta"), "theta")
                                      : BlaschkeProduct::power_of_chi(1);
    const BlaschkeProduct beta = cfg.params.contains("beta")
                                     ? parse_blaschke(cfg.params.at("beta"), "beta")
                                     : BlaschkeProduct::power_of_chi(1);
    return [=](int n) { return thm69_T(a, b, theta, beta, n); };
  }
  throw std::invalid_argument(std::string(experiment) + ": unknown family: " + family);
}

inline void run_defect_profile(const ExperimentConfig& cfg, std::vector<Verdict>& verdicts,
                               json& artifacts) {
  std::vector<int> dims{16, 32, 64};
  if (cfg.params.contains("dims")) dims = cfg.params.at("dims").get<std::vector<int>>();
  const double tol = param_or(cfg.params, "tol", 1e-6);
  const auto build = family_builder(cfg, "defect-profile");
  const auto [profile, v] = defect_trace_profile(build, dims, tol);
  verdicts.push_back(v);
  artifacts["profile"] = profile;
  artifacts["dims"] = dims;
}

inline void run_dual_check(const ExperimentConfig& cfg, std::vector<Verdict>& verdicts,
                           json& artifacts) {
  const int n = param_or(cfg.params, "n", 64);
  const double tol = param_or(cfg.params, "tol", 1e-9);
  const TruncOp T = family_builder(cfg, "dual-check")(n);
  dual_law_verdicts(T, tol, verdicts);
  artifacts["tag"] = T.tag;
}

}  // namespace detail

/// Execute a validated config.  Throws invalid_argument for semantic parameter
/// problems (exit 2 at the CLI) and runtime_error for numerical failures
/// (exit 3 at the CLI).
inline RunResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto start = std::chrono::steady_clock::now();
  std::vector<Verdict> verdicts;
  json artifacts = json::object();
  if (cfg.experiment == "clark") detail::run_clark(cfg, verdicts, artifacts);
  else if (cfg.experiment == "frostman") detail::run_frostman(cfg, verdicts, artifacts);
  else if (cfg.experiment == "carleson-build") detail::run_carleson(cfg, verdicts, artifacts);
  else if (cfg.experiment == "perturb") detail::run_perturb(cfg, verdicts, artifacts);
  else if (cfg.experiment == "thm69") detail::run_thm69(cfg, verdicts, artifacts);
  else if (cfg.experiment == "lemma46") detail::run_lemma46(cfg, verdicts, artifacts);
  else if (cfg.experiment == "lemma61") detail::run_lemma61(cfg, verdicts, artifacts);
  else if (cfg.experiment == "defect-profile") detail::run_defect_profile(cfg, verdicts, artifacts);
  else if (cfg.experiment == "dual-check") detail::run_dual_check(cfg, verdicts, artifacts);
  else throw std::invalid_argument("unknown experiment: " + cfg.experiment);

  RunResult res;
  res.all_pass = true;
  json varr = json::array();
  for (const auto& v : verdicts) {
    res.all_pass = res.all_pass && v.pass;
    varr.push_back(to_json(v));
  }
  res.report["config"] = cfg.to_json();
  res.report["verdicts"] = varr;
  res.report["artifacts"] = artifacts;
  res.report["version"] = kVersion;
  const auto stop = std::chrono::steady_clock::now();
  res.envelope["timing_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count();
  res.envelope["threads"] = thread_budget();
  res.exit_code = (res.all_pass || cfg.expected_fail) ? 0 : 1;
  return res;
}

/// CSV rendering of a run: fixed column order, one row per verdict.
inline std::string report_to_csv(const RunResult& res) {
  std::string out = csv_header();
  out += '\n';
  const json& cfgj = res.report.at("config");
  const int n = cfgj.at("params").contains("n") ? cfgj.at("params").at("n").get<int>() : 0;
  for (const auto& vj : res.report.at("verdicts")) {
    Verdict v;
    v.name = vj.at("name").get<std::string>();
    v.value = vj.at("value").get<double>();
    v.threshold = vj.at("threshold").get<double>();
    v.pass = vj.at("pass").get<bool>();
    v.band = vj.at("band").get<int>();
    out += to_csv_row(v, n, cfgj.at("params"));
    out += '\n';
  }
  return out;
}

}  // namespace shiftlab
