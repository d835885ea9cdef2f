#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "latgibbs/errors.hpp"
#include "latgibbs/expansion.hpp"
#include "latgibbs/graphkit.hpp"
#include "latgibbs/model.hpp"
#include "latgibbs/numeric.hpp"

namespace latgibbs {

namespace detail {

inline Point parse_point(const nlohmann::json& j) {
  if (!j.is_array() || j.empty())
    throw invalid_input("config: a point must be a nonempty integer array");
  Point p;
  for (const auto& c : j) {
    if (!c.is_number_integer())
      throw invalid_input("config: point coordinates must be integers");
    p.push_back(c.get<Coord>());
  }
  return p;
}

inline Region parse_region(const nlohmann::json& j) {
  if (!j.is_array()) throw invalid_input("config: a region must be an array of points");
  std::vector<Point> pts;
  for (const auto& e : j) pts.push_back(parse_point(e));
  return Region(std::move(pts));
}

inline std::vector<double> parse_doubles(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw invalid_input(std::string("config: ") + what + " must be an array");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) throw invalid_input(std::string("config: ") + what + " must be numeric");
    out.push_back(e.get<double>());
  }
  return out;
}

inline const nlohmann::json& require_key(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw invalid_input(std::string("config: missing key \"") + key + "\"");
  return *it;
}

inline SiteDistribution parse_site_distribution(const nlohmann::json& j) {
  SiteDistribution d;
  std::vector<std::pair<double, double>> vp;
  const auto values = parse_doubles(require_key(j, "values"), "values");
  const auto probs = parse_doubles(require_key(j, "probs"), "probs");
  if (values.size() != probs.size())
    throw invalid_input("config: values/probs length mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) vp.push_back({values[i], probs[i]});
  std::sort(vp.begin(), vp.end());
  for (const auto& [v, p] : vp) {
    d.values.push_back(v);
    d.probs.push_back(p);
  }
  d.validate();
  return d;
}

}  // namespace detail

// Model config:
//   {"nu":1, "r":1, "lambda":..., "model":"ising"|"potts"|"custom",
//    "couplings": K | [K_1..K_nu],                     (ising, potts)
//    "fields": h | {"default":h, "overrides":[{"site":[..],"h":..}]},  (ising)
//    "q": colors,                                      (potts)
//    "sites": {"default":{"values":[..],"probs":[..]},
//              "overrides":[{"site":[..],"values":[..],"probs":[..]}]},  (custom)
//    "terms": [{"set":[[..],..], "table":[..]}]}       (custom)
inline InteractionModel parse_model(const nlohmann::json& j) {
  const std::string kind = detail::require_key(j, "model").get<std::string>();
  const int nu = detail::require_key(j, "nu").get<int>();
  const double lambda = detail::require_key(j, "lambda").get<double>();

  std::vector<double> couplings{1.0};
  if (j.contains("couplings")) {
    const auto& c = j["couplings"];
    couplings = c.is_number() ? std::vector<double>{c.get<double>()}
                              : detail::parse_doubles(c, "couplings");
  }

  if (kind == "potts") {
    return build_potts(nu, lambda, detail::require_key(j, "q").get<int>(), couplings);
  }
  if (kind == "ising") {
    FieldSpec fields;
    if (j.contains("fields")) {
      const auto& f = j["fields"];
      if (f.is_number()) {
        fields.default_h = f.get<double>();
      } else {
        if (f.contains("default")) fields.default_h = f["default"].get<double>();
        if (f.contains("overrides"))
          for (const auto& o : f["overrides"])
            fields.overrides[detail::parse_point(detail::require_key(o, "site"))] =
                detail::require_key(o, "h").get<double>();
      }
    }
    return build_ising(nu, lambda, couplings, fields);
  }
  if (kind == "custom") {
    const int r = detail::require_key(j, "r").get<int>();
    SiteSpec sites;
    const auto& s = detail::require_key(j, "sites");
    sites.default_dist = detail::parse_site_distribution(detail::require_key(s, "default"));
    if (s.contains("overrides"))
      for (const auto& o : s["overrides"])
        sites.overrides[detail::parse_point(detail::require_key(o, "site"))] =
            detail::parse_site_distribution(o);
    std::vector<std::pair<Region, std::vector<double>>> terms;
    if (j.contains("terms"))
      for (const auto& t : j["terms"])
        terms.push_back({detail::parse_region(detail::require_key(t, "set")),
                         detail::parse_doubles(detail::require_key(t, "table"), "table")});
    return build_custom(nu, r, lambda, sites, terms);
  }
  throw invalid_input("config: model must be \"ising\", \"potts\" or \"custom\"");
}

// Event config:
//   {"base":[[..],..],
//    "clauses":[ {"site":[..],"allowed":[..]}                 (one-constraint clause)
//              | [{"site":[..],"allowed":[..]}, ...] , ... ]} (conjunction)
inline CylinderEvent parse_event(const nlohmann::json& j) {
  CylinderEvent ev;
  ev.base = detail::parse_region(detail::require_key(j, "base"));
  for (const auto& cj : detail::require_key(j, "clauses")) {
    std::map<Point, std::vector<double>> clause;
    auto add = [&](const nlohmann::json& constraint) {
      const Point site = detail::parse_point(detail::require_key(constraint, "site"));
      auto allowed =
          detail::parse_doubles(detail::require_key(constraint, "allowed"), "allowed");
      auto [it, inserted] = clause.insert({site, allowed});
      if (!inserted) throw invalid_input("config: duplicate site in clause");
    };
    if (cj.is_array())
      for (const auto& c : cj) add(c);
    else
      add(cj);
    ev.clauses.push_back(std::move(clause));
  }
  ev.validate();
  return ev;
}

// --set key=value sweeps: value is parsed as JSON when possible, else kept as
// a string. Dots in the key descend into nested objects.
inline void apply_override(nlohmann::json& j, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw invalid_input("--set expects key=value, got \"" + kv + "\"");
  const std::string key = kv.substr(0, eq);
  const std::string raw = kv.substr(eq + 1);
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error&) {
    value = raw;
  }
  nlohmann::json* cursor = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw invalid_input("--set: empty key segment");
    if (dot == std::string::npos) {
      (*cursor)[part] = value;
      return;
    }
    cursor = &(*cursor)[part];
    start = dot + 1;
  }
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw invalid_input(path + ": " + e.what());
  }
}

// ---- report writers ------------------------------------------------------
// Hand-rolled so field order is fixed and every float carries 17 significant
// digits: identical inputs give byte-identical reports.

namespace detail {

inline std::string jnum(double x) { return std::isnan(x) ? "null" : fmt17(x); }

inline std::string jpoint(const Point& p) {
  std::string out = "[";
  for (std::size_t i = 0; i < p.size(); ++i)
    out += (i ? "," : "") + std::to_string(p[i]);
  return out + "]";
}

inline std::string jregion(const Region& r) {
  std::string out = "[";
  for (std::size_t i = 0; i < r.pts().size(); ++i)
    out += (i ? "," : "") + jpoint(r.pts()[i]);
  return out + "]";
}

}  // namespace detail

inline std::string lemma_checks_json(const std::vector<LemmaCheck>& checks,
                                     int indent = 2) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  std::string out = "[";
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& c = checks[i];
    out += (i ? ",\n" : "\n") + pad + "  {\"lemma\": \"" + c.lemma +
           "\", \"params\": \"" + c.params +
           "\", \"measured\": " + std::to_string(c.measured) +
           ", \"bound\": " + std::to_string(c.bound) +
           ", \"pass\": " + (c.pass ? "true" : "false") + "}";
  }
  return out + (checks.empty() ? "]" : "\n" + pad + "]");
}

inline std::string constants_json(int nu, int r, long long L, long long lambda0_den,
                                  const std::vector<LemmaCheck>& checks) {
  std::string out = "{\n";
  out += "  \"command\": \"constants\",\n";
  out += "  \"nu\": " + std::to_string(nu) + ",\n";
  out += "  \"r\": " + std::to_string(r) + ",\n";
  out += "  \"L\": " + std::to_string(L) + ",\n";
  out += "  \"lambda0_denominator\": " + std::to_string(lambda0_den) + ",\n";
  out += "  \"lambda0\": " + fmt17(1.0 / static_cast<double>(lambda0_den)) + ",\n";
  out += "  \"checks\": " + lemma_checks_json(checks) + "\n";
  out += "}\n";
  return out;
}

inline std::string expansion_report_json(const ExpansionReport& rep) {
  using detail::jnum;
  std::string out = "{\n";
  out += "  \"command\": \"expand\",\n";
  out += "  \"nu\": " + std::to_string(rep.nu) + ",\n";
  out += "  \"r\": " + std::to_string(rep.r) + ",\n";
  out += "  \"lambda\": " + jnum(rep.lambda) + ",\n";
  out += "  \"q\": " + std::to_string(rep.q) + ",\n";
  out += "  \"d\": " + std::to_string(rep.d) + ",\n";
  out += "  \"p0\": " + jnum(rep.p0) + ",\n";
  out += "  \"lambda0_denominator\": " + std::to_string(rep.lambda0_den) + ",\n";
  out += "  \"lambda0\": " + jnum(rep.lambda0) + ",\n";
  out += "  \"lambda_certified\": " + std::string(rep.lambda_ok ? "true" : "false") + ",\n";
  out += "  \"rho_universal\": " + jnum(rep.rho_universal) + ",\n";
  out += "  \"rho_model\": " + jnum(rep.rho_model) + ",\n";
  out += "  \"certified\": " + std::string(rep.certified ? "true" : "false") + ",\n";
  out += "  \"warnings\": [";
  for (std::size_t i = 0; i < rep.warnings.size(); ++i)
    out += (i ? ", " : "") + ("\"" + rep.warnings[i] + "\"");
  out += "],\n";
  out += "  \"terms\": [";
  for (std::size_t i = 0; i < rep.terms.size(); ++i) {
    const auto& t = rep.terms[i];
    out += (i ? ",\n" : "\n");
    out += "    {\"n\": " + std::to_string(t.n) + ", \"M_n\": " + std::to_string(t.m_n) +
           ", \"family_count\": " + std::to_string(t.family_count) +
           ", \"J\": " + jnum(t.j) + ", \"running_sum\": " + jnum(t.running_sum) +
           ", \"tail_at_next\": " + jnum(t.tail_at_next) + "}";
  }
  out += rep.terms.empty() ? "],\n" : "\n  ],\n";
  out += "  \"partial_sum\": " + jnum(rep.partial_sum) + ",\n";
  out += "  \"tail_bound\": " + jnum(rep.tail) + ",\n";
  out += "  \"tail_bound_model_rho\": " + jnum(rep.tail_model) + ",\n";
  if (rep.oracle) {
    out += "  \"oracle\": {\"N\": " + std::to_string(rep.oracle->n_volume) +
           ", \"P_N\": " + jnum(rep.oracle->p_n) +
           ", \"abs_diff\": " + jnum(rep.oracle->abs_diff) + "}\n";
  } else {
    out += "  \"oracle\": null\n";
  }
  out += "}\n";
  return out;
}

// CSV column contract: n,M_n,family_count,J_n,running_sum,tail_at_next
inline std::string expansion_report_csv(const ExpansionReport& rep) {
  std::string out = "n,M_n,family_count,J_n,running_sum,tail_at_next\n";
  for (const auto& t : rep.terms) {
    out += std::to_string(t.n) + "," + std::to_string(t.m_n) + "," +
           std::to_string(t.family_count) + "," + fmt17(t.j) + "," +
           fmt17(t.running_sum) + ",";
    if (!std::isnan(t.tail_at_next)) out += fmt17(t.tail_at_next);
    out += "\n";
  }
  return out;
}

inline std::string finite_prob_json(int N, double p) {
  return "{\n  \"command\": \"finite-prob\",\n  \"N\": " + std::to_string(N) +
         ",\n  \"P_N\": " + fmt17(p) + "\n}\n";
}

inline std::string bound_checks_json(const std::vector<BoundCheck>& checks,
                                     int indent = 2) {
  using detail::jnum;
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  std::string out = "[";
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& c = checks[i];
    out += (i ? ",\n" : "\n") + pad + "  {\"lemma\": \"" + c.lemma +
           "\", \"params\": \"" + c.params + "\", \"measured\": " + jnum(c.measured) +
           ", \"bound\": " + jnum(c.bound) +
           ", \"pass\": " + (c.pass ? "true" : "false") + "}";
  }
  return out + (checks.empty() ? "]" : "\n" + pad + "]");
}

inline std::string verify_json(int N, bool lambda_certified,
                               const std::vector<BoundCheck>& checks,
                               const ConsistencyRecord* consistency) {
  using detail::jnum;
  std::string out = "{\n";
  out += "  \"command\": \"verify\",\n";
  out += "  \"N\": " + std::to_string(N) + ",\n";
  out += "  \"lambda_certified\": " + std::string(lambda_certified ? "true" : "false") +
         ",\n";
  out += "  \"checks\": " + bound_checks_json(checks) + ",\n";
  if (consistency) {
    out += "  \"consistency\": {\n";
    out += "    \"partial_q\": " + jnum(consistency->partial_q) + ",\n";
    out += "    \"partial_qprime\": " + jnum(consistency->partial_qprime) + ",\n";
    out += "    \"diff\": " + jnum(consistency->diff) + ",\n";
    out += "    \"tail_q\": " + jnum(consistency->tail_q) + ",\n";
    out += "    \"tail_qprime\": " + jnum(consistency->tail_qprime) + ",\n";
    out += "    \"within_tails\": " +
           std::string(consistency->within_tails ? "true" : "false") + ",\n";
    out += "    \"permutation_exact\": " +
           std::string(consistency->permutation_exact ? "true" : "false") + "\n";
    out += "  }\n";
  } else {
    out += "  \"consistency\": null\n";
  }
  out += "}\n";
  return out;
}

inline std::string size_report_json(const Region& b, int s, const UnitGraph& g,
                                    const Track& tr) {
  using detail::jpoint;
  using detail::jregion;
  std::string out = "{\n";
  out += "  \"command\": \"size\",\n";
  out += "  \"points\": " + jregion(b) + ",\n";
  out += "  \"S\": " + std::to_string(s) + ",\n";
  out += "  \"graph\": {\"vertices\": " + jregion(Region(g.vertices)) +
         ", \"edges\": [";
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    out += (i ? "," : "") + ("[" + jpoint(g.edges[i].first) + "," +
                             jpoint(g.edges[i].second) + "]");
  out += "]},\n";
  out += "  \"track\": [";
  for (std::size_t i = 0; i < tr.pts.size(); ++i)
    out += (i ? "," : "") + jpoint(tr.pts[i]);
  out += "]\n}\n";
  return out;
}

}  // namespace latgibbs
