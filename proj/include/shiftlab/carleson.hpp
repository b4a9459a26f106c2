#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "geometry.hpp"

namespace shiftlab {

/// A sequence of disc points tagged with their construction generation.
struct ZeroSet {
  struct Pt {
    cplx z;
    int generation = 0;
    int arc_index = 0;
  };
  std::vector<Pt> points;
};

inline double blaschke_sum(const ZeroSet& L) {
  double s = 0.0;
  for (const auto& p : L.points) s += 1.0 - std::abs(p.z);
  return s;
}

/// Max over probes of (1/s) * sum of (1-|lambda|) over the Carleson box
/// Q(zeta, s) = {1-s <= |z| < 1, z/|z| in Delta(zeta, s)}.
inline double carleson_box_sup(const ZeroSet& L, const std::vector<std::pair<cplx, double>>& probes) {
  double sup = 0.0;
  for (const auto& [zeta, s] : probes) {
    if (s <= 0.0 || s >= 1.0) throw std::invalid_argument("carleson_box_sup: s in (0,1)");
    const Arc arc{zeta, s};
    double acc = 0.0;
    for (const auto& p : L.points) {
      const double r = std::abs(p.z);
      if (r < 1.0 - s || r >= 1.0) continue;
      if (arc.contains(p.z / r)) acc += 1.0 - r;
    }
    sup = std::max(sup, acc / s);
  }
  return sup;
}

/// The default probe family: 64 equispaced centers, dyadic sizes 2^-1..2^-16.
inline std::vector<std::pair<cplx, double>> canonical_probes() {
  std::vector<std::pair<cplx, double>> probes;
  for (int c = 0; c < 64; ++c) {
    const double t = 2.0 * std::numbers::pi * c / 64.0;
    const cplx zeta(std::cos(t), std::sin(t));
    for (int j = 1; j <= 16; ++j) probes.emplace_back(zeta, std::pow(2.0, -j));
  }
  return probes;
}

/// A compact K on the circle given operationally: a cover procedure that for
/// any delta > 0 returns pairwise-disjoint closed arcs covering K with
/// sum of pi*m(arc) < delta, plus a point sampler.
struct CompactOracle {
  std::function<std::vector<Arc>(double delta)> cover;
  std::function<std::vector<cplx>()> sample;
};

/// Built-in oracle for a finite point set: one arc per point, half-length
/// delta/(2N) shrunk to keep arcs disjoint.
inline CompactOracle finite_point_oracle(std::vector<cplx> pts) {
  if (pts.empty()) throw std::invalid_argument("finite_point_oracle: empty set");
  for (auto& p : pts) p /= std::abs(p);
  double min_gap = std::numbers::pi;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      const double g = std::abs(std::arg(pts[i] * std::conj(pts[j])));
      if (g < 1e-15) throw std::invalid_argument("finite_point_oracle: duplicate points");
      min_gap = std::min(min_gap, g);
    }
  CompactOracle oracle;
  oracle.sample = [pts]() { return pts; };
  oracle.cover = [pts, min_gap](double delta) {
    if (delta <= 0.0) throw std::invalid_argument("cover: delta > 0 required");
    const double half = std::min(delta / (2.0 * static_cast<double>(pts.size())), min_gap / 3.0);
    std::vector<Arc> arcs;
    arcs.reserve(pts.size());
    for (const auto& p : pts) arcs.push_back(Arc{p, half});
    return arcs;
  };
  return oracle;
}

/// Endpoints of the level-n intervals of the middle-alpha Cantor set on
/// [0,1], mapped to the circle by u -> e^{i pi u}.  These finite sets are
/// nested across n and their union is dense in the Cantor set.
inline std::vector<cplx> cantor_endpoints(int level, double alpha = 1.0 / 3.0) {
  if (level < 0 || alpha <= 0.0 || alpha >= 1.0)
    throw std::invalid_argument("cantor_endpoints: bad parameters");
  std::vector<std::pair<double, double>> intervals{{0.0, 1.0}};
  const double side = (1.0 - alpha) / 2.0;
  for (int n = 0; n < level; ++n) {
    std::vector<std::pair<double, double>> next;
    next.reserve(intervals.size() * 2);
    for (const auto& [a, b] : intervals) {
      const double len = b - a;
      next.emplace_back(a, a + side * len);
      next.emplace_back(b - side * len, b);
    }
    intervals = std::move(next);
  }
  std::vector<cplx> pts;
  pts.reserve(intervals.size() * 2);
  for (const auto& [a, b] : intervals) {
    pts.emplace_back(std::cos(std::numbers::pi * a), std::sin(std::numbers::pi * a));
    pts.emplace_back(std::cos(std::numbers::pi * b), std::sin(std::numbers::pi * b));
  }
  return pts;
}

inline CompactOracle cantor_endpoint_oracle(int level, double alpha = 1.0 / 3.0) {
  return finite_point_oracle(cantor_endpoints(level, alpha));
}

/// Geometric budget sequence delta_k = a * ratio^k (k >= 1) with closed-form
/// tails.
struct DeltaSpec {
  double a = 1.0;
  double ratio = 0.25;

  double at(long long k) const { return a * std::pow(ratio, static_cast<double>(k)); }
  double tail(long long from) const { return at(from) / (1.0 - ratio); }  // sum_{k>=from}
  double total() const { return tail(1); }
};

struct GenerationAudit {
  int N_n = 0;          // arcs in this generation
  double eps_min = 0.0; // smallest arc half-length
  long long M_n = 0;    // first budget index reserved for the next generation
  double delta_budget = 0.0;
};

struct LambdaBuild {
  ZeroSet lambda;
  std::vector<GenerationAudit> audit;
};

/// The recursive cover-to-points construction: generation n covers K_n with
/// disjoint arcs of total half-length below the running budget, places one
/// point per arc at radius 1 - eps on the arc's center ray, then advances the
/// budget index far enough that the remaining tail sits below the smallest
/// eps just produced.
inline LambdaBuild build_lambda(const std::vector<CompactOracle>& compacts, const DeltaSpec& delta,
                                int depth) {
  if (depth < 1 || compacts.empty()) throw std::invalid_argument("build_lambda: bad arguments");
  if (delta.a <= 0.0 || delta.ratio <= 0.0 || delta.ratio >= 1.0)
    throw std::invalid_argument("build_lambda: delta must be positive, decreasing, summable");
  LambdaBuild out;
  long long M_prev = 1;
  double eps_prev = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= depth; ++n) {
    const CompactOracle& K =
        compacts[std::min(static_cast<size_t>(n - 1), compacts.size() - 1)];
    const double budget = delta.at(M_prev);
    const std::vector<Arc> arcs = K.cover(budget);
    if (arcs.empty()) throw std::runtime_error("build_lambda: oracle returned no arcs");
    double total = 0.0;
    for (const auto& arc : arcs) total += arc.pi_measure();
    if (total >= budget)
      throw std::runtime_error("build_lambda: cover oracle violated its measure bound");
    for (size_t i = 0; i < arcs.size(); ++i)
      for (size_t j = i + 1; j < arcs.size(); ++j) {
        const double gap = std::abs(std::arg(arcs[i].center * std::conj(arcs[j].center)));
        if (gap <= arcs[i].half_length + arcs[j].half_length)
          throw std::runtime_error("build_lambda: cover arcs not disjoint");
      }
    GenerationAudit gen;
    gen.N_n = static_cast<int>(arcs.size());
    gen.delta_budget = budget;
    gen.eps_min = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < arcs.size(); ++k) {
      const double eps = arcs[k].half_length;
      if (eps >= eps_prev)
        throw std::runtime_error("build_lambda: generation monotonicity violated");
      gen.eps_min = std::min(gen.eps_min, eps);
      out.lambda.points.push_back({(1.0 - eps) * arcs[k].center, n, static_cast<int>(k)});
    }
    // Advance the budget index: the reserved tail must fit under eps_min.
    long long M = M_prev + 1;
    while (delta.tail(M) >= gen.eps_min) ++M;
    gen.M_n = M;
    M_prev = M;
    eps_prev = gen.eps_min;
    out.audit.push_back(gen);
  }
  return out;
}

/// True iff every requested approach radius r finds a point of Lambda inside
/// the Stolz sector at zeta within distance 2(1-r).  At finite depth this
/// certifies accumulation down to the deepest generation only.
inline bool nontangential_accumulation(const ZeroSet& L, cplx zeta, double s,
                                       const std::vector<double>& radii) {
  for (double r : radii) {
    bool found = false;
    for (const auto& p : L.points) {
      if (std::abs(zeta - p.z) <= 2.0 * (1.0 - r) && stolz_membership(zeta, s, p.z)) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace shiftlab
