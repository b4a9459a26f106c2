#pragma once

#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>
#include <string>

#include "carleson.hpp"
#include "diagnostics.hpp"
#include "measure.hpp"

namespace shiftlab {

using json = nlohmann::ordered_json;

inline json to_json(const Verdict& v) {
  json j;
  j["name"] = v.name;
  j["value"] = v.value;
  j["threshold"] = v.threshold;
  j["pass"] = v.pass;
  j["band"] = v.band;
  json meta = json::object();
  for (const auto& [k, val] : v.metadata) meta[k] = val;
  j["metadata"] = meta;
  return j;
}

/// Complex scalars serialize as [re, im] pairs.
inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

/// Blaschke zeros as [re, im, multiplicity] triples.
inline json to_json(const BlaschkeProduct& B) {
  json arr = json::array();
  for (const auto& z : B.zeros)
    arr.push_back(json::array({z.lambda.real(), z.lambda.imag(), z.multiplicity}));
  return arr;
}

/// Atoms as [angle over pi, weight] pairs: roots of unity stay exact-rational.
inline json to_json(const AtomicMeasure& nu) {
  json arr = json::array();
  for (const auto& a : nu.atoms)
    arr.push_back(json::array({std::arg(a.zeta) / std::numbers::pi, a.weight}));
  return arr;
}

inline json to_json(const ZeroSet& L) {
  json arr = json::array();
  for (const auto& p : L.points) {
    json e;
    e["re"] = p.z.real();
    e["im"] = p.z.imag();
    e["generation"] = p.generation;
    e["arc_index"] = p.arc_index;
    arr.push_back(e);
  }
  return arr;
}

inline json to_json(const GenerationAudit& a) {
  json j;
  j["N_n"] = a.N_n;
  j["eps_min"] = a.eps_min;
  j["M_n"] = a.M_n;
  j["delta_budget"] = a.delta_budget;
  return j;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

inline std::string csv_header() { return "name,value,threshold,pass,band,n,params_json"; }

/// Fixed-order CSV row for a verdict: name,value,threshold,pass,band,n,params_json.
inline std::string to_csv_row(const Verdict& v, int n, const json& params) {
  std::ostringstream os;
  os.precision(17);
  os << csv_escape(v.name) << ',' << v.value << ',' << v.threshold << ','
     << (v.pass ? "true" : "false") << ',' << v.band << ',' << n << ','
     << csv_escape(params.dump());
  return os.str();
}

}  // namespace shiftlab
