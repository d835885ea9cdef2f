#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "latgibbs/errors.hpp"
#include "latgibbs/graphkit.hpp"
#include "latgibbs/lattice.hpp"
#include "latgibbs/numeric.hpp"

namespace latgibbs {

// Finitely supported spin distribution at one site. Values are kept sorted.
struct SiteDistribution {
  std::vector<double> values;
  std::vector<double> probs;

  void validate() const {
    if (values.empty() || values.size() != probs.size())
      throw invalid_input("SiteDistribution: values/probs size mismatch");
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
      if (!(values[i] < values[i + 1]))
        throw invalid_input("SiteDistribution: values must be distinct and sorted");
    double sum = 0.0;
    for (double p : probs) {
      if (p < 0.0) throw invalid_input("SiteDistribution: negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw invalid_input("SiteDistribution: probabilities must sum to 1");
  }

  // index of `v` in the support, -1 if absent
  int index_of(double v) const {
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] == v) return static_cast<int>(i);
    return -1;
  }

  double prob_of(double v) const {
    const int i = index_of(v);
    return i < 0 ? 0.0 : probs[static_cast<std::size_t>(i)];
  }
};

// One interaction term: the set it acts on and its energy table over the
// local configurations of that set (canonical site order, last site fastest).
struct PotentialTerm {
  InteractionSet set;
  std::vector<double> table;
};

// Event depending on finitely many sites, in disjunctive normal form: a list
// of conjunctions, each mapping a site to its allowed values. The site maps
// are ordered containers, so any input site order yields the same object.
struct CylinderEvent {
  Region base;
  std::vector<std::map<Point, std::vector<double>>> clauses;

  void validate() const {
    if (base.empty()) throw invalid_input("CylinderEvent: empty base");
    for (const auto& clause : clauses)
      for (const auto& [site, allowed] : clause) {
        if (!base.contains(site))
          throw invalid_input("CylinderEvent: clause site outside base");
        if (allowed.empty())
          throw invalid_input("CylinderEvent: empty allowed-value set");
      }
  }
};

// A random variable on a finite window: value table over the local
// configurations of `support` (same layout as PotentialTerm tables).
struct Observable {
  Region support;
  std::vector<double> table;
};

struct FieldSpec {
  double default_h = 0.0;
  std::map<Point, double> overrides;

  double at(const Point& t) const {
    auto it = overrides.find(t);
    return it == overrides.end() ? default_h : it->second;
  }
};

struct SiteSpec {
  SiteDistribution default_dist;
  std::map<Point, SiteDistribution> overrides;
};

// Lattice interaction model: dimension nu, interaction radius r, strength
// lambda, per-site distributions, and the potential. Pair-rule models
// (Ising/Potts) generate their terms on demand for any window; custom models
// carry an explicit term list, all other Phi_B being identically zero.
class InteractionModel {
 public:
  int nu() const { return nu_; }
  int r() const { return r_; }
  double lambda() const { return lambda_; }

  const SiteDistribution& site(const Point& t) const {
    auto it = site_overrides_.find(t);
    return it == site_overrides_.end() ? default_site_ : it->second;
  }

  // All terms with nonzero tables among B in B(r), B subset of `window`.
  std::vector<PotentialTerm> terms_in(const Region& window) const {
    std::vector<PotentialTerm> out;
    if (pair_kind_ != PairKind::none) {
      for (const auto& p : window.pts()) {
        for (int d = 0; d < nu_; ++d) {
          Point q = p;
          ++q[d];
          if (!window.contains(q)) continue;
          out.push_back(make_pair_term(p, q, d));
        }
      }
    } else {
      for (const auto& [points, term] : explicit_terms_)
        if (points.is_subset_of(window)) out.push_back(term);
    }
    return out;
  }

  // Phi_B for one candidate set; nullopt when Phi_B is identically zero.
  std::optional<PotentialTerm> term_for(const Region& set_points) const {
    if (pair_kind_ != PairKind::none) {
      if (set_points.size() != 2) return std::nullopt;
      const Point& a = set_points.pts()[0];
      const Point& b = set_points.pts()[1];
      if (l1_distance(a, b) != 1) return std::nullopt;
      for (int d = 0; d < nu_; ++d)
        if (a[d] != b[d]) return make_pair_term(a, b, d);
      return std::nullopt;
    }
    auto it = explicit_terms_.find(set_points);
    if (it == explicit_terms_.end()) return std::nullopt;
    return it->second;
  }

 private:
  enum class PairKind { none, ising_product, potts_delta };

  InteractionModel() = default;

  PotentialTerm make_pair_term(const Point& a, const Point& b, int axis) const {
    const SiteDistribution& sa = site(a);
    const SiteDistribution& sb = site(b);
    const double k = lambda_ * axis_coupling_[static_cast<std::size_t>(axis)];
    std::vector<double> table(sa.values.size() * sb.values.size());
    for (std::size_t i = 0; i < sa.values.size(); ++i)
      for (std::size_t j = 0; j < sb.values.size(); ++j) {
        const double va = sa.values[i], vb = sb.values[j];
        table[i * sb.values.size() + j] =
            pair_kind_ == PairKind::ising_product ? k * va * vb
                                                  : (va == vb ? k : 0.0);
      }
    return PotentialTerm{InteractionSet(Region({a, b}), 1), std::move(table)};
  }

  int nu_ = 1;
  int r_ = 1;
  double lambda_ = 0.0;
  SiteDistribution default_site_;
  std::map<Point, SiteDistribution> site_overrides_;
  PairKind pair_kind_ = PairKind::none;
  std::vector<double> axis_coupling_;
  std::map<Region, PotentialTerm> explicit_terms_;

  friend InteractionModel build_potts(int, double, int, std::vector<double>);
  friend InteractionModel build_ising(int, double, std::vector<double>,
                                      const FieldSpec&);
  friend InteractionModel build_custom(int, int, double, const SiteSpec&,
                                       const std::vector<std::pair<Region, std::vector<double>>>&,
                                       const SearchBudget&);
};

namespace detail {

inline void check_common(int nu, double lambda) {
  if (nu < 1) throw invalid_input("model: nu must be >= 1");
  if (lambda < 0.0) throw invalid_input("model: lambda must be >= 0");
}

inline std::vector<double> check_couplings(int nu, std::vector<double> k) {
  if (k.size() == 1) k.assign(static_cast<std::size_t>(nu), k[0]);
  if (k.size() != static_cast<std::size_t>(nu))
    throw invalid_input("model: need one coupling or one per axis");
  for (double v : k)
    if (std::abs(v) > 1.0) throw invalid_input("model: |coupling| must be <= 1");
  return k;
}

}  // namespace detail

// Potts model: uniform site colors 1..q, pair energy lambda*K*delta on unit
// pairs (r = 1).
inline InteractionModel build_potts(int nu, double lambda, int q,
                                    std::vector<double> couplings) {
  detail::check_common(nu, lambda);
  if (q < 2) throw invalid_input("build_potts: q must be >= 2");
  InteractionModel m;
  m.nu_ = nu;
  m.r_ = 1;
  m.lambda_ = lambda;
  m.pair_kind_ = InteractionModel::PairKind::potts_delta;
  m.axis_coupling_ = detail::check_couplings(nu, std::move(couplings));
  m.default_site_.values.resize(static_cast<std::size_t>(q));
  m.default_site_.probs.assign(static_cast<std::size_t>(q), 1.0 / q);
  for (int c = 0; c < q; ++c)
    m.default_site_.values[static_cast<std::size_t>(c)] = c + 1;
  m.default_site_.validate();
  return m;
}

// Ising model: spins +/-1, pair energy lambda*K*w(s)*w(t) on unit pairs
// (r = 1). The external field h_t is absorbed into the site distribution:
// P_t(x) = e^{-x h_t} / (e^{h_t} + e^{-h_t}).
inline InteractionModel build_ising(int nu, double lambda,
                                    std::vector<double> couplings,
                                    const FieldSpec& fields) {
  detail::check_common(nu, lambda);
  InteractionModel m;
  m.nu_ = nu;
  m.r_ = 1;
  m.lambda_ = lambda;
  m.pair_kind_ = InteractionModel::PairKind::ising_product;
  m.axis_coupling_ = detail::check_couplings(nu, std::move(couplings));
  auto spin_dist = [](double h) {
    const double z = std::exp(h) + std::exp(-h);
    SiteDistribution d;
    d.values = {-1.0, +1.0};
    d.probs = {std::exp(h) / z, std::exp(-h) / z};
    d.validate();
    return d;
  };
  m.default_site_ = spin_dist(fields.default_h);
  for (const auto& [t, h] : fields.overrides) {
    if (t.size() != static_cast<std::size_t>(nu))
      throw invalid_input("build_ising: field site has wrong dimension");
    m.site_overrides_[t] = spin_dist(h);
  }
  return m;
}

// General model with explicit site distributions and an explicit term list.
// Every term set must satisfy 1 <= S(B) <= r and every table value |v| <= lambda.
inline InteractionModel build_custom(
    int nu, int r, double lambda, const SiteSpec& sites,
    const std::vector<std::pair<Region, std::vector<double>>>& terms,
    const SearchBudget& budget = {}) {
  detail::check_common(nu, lambda);
  if (r < 1) throw invalid_input("build_custom: r must be >= 1");
  InteractionModel m;
  m.nu_ = nu;
  m.r_ = r;
  m.lambda_ = lambda;
  sites.default_dist.validate();
  m.default_site_ = sites.default_dist;
  for (const auto& [t, d] : sites.overrides) {
    if (t.size() != static_cast<std::size_t>(nu))
      throw invalid_input("build_custom: site override has wrong dimension");
    d.validate();
    m.site_overrides_[t] = d;
  }
  for (const auto& [points, table] : terms) {
    if (points.dim() != nu)
      throw invalid_input("build_custom: term set has wrong dimension");
    const int s = size_of(points, budget);
    if (s < 1 || s > r)
      throw invalid_input("build_custom: term set has S(B)=" + std::to_string(s) +
                          " outside [1, r]");
    std::size_t want = 1;
    for (const auto& p : points.pts()) want *= m.site(p).values.size();
    if (table.size() != want)
      throw invalid_input("build_custom: term table size mismatch");
    for (double v : table)
      if (std::abs(v) > lambda)
        throw invalid_input("build_custom: |table value| exceeds lambda");
    if (m.explicit_terms_.count(points))
      throw invalid_input("build_custom: duplicate term set");
    m.explicit_terms_.emplace(points, PotentialTerm{InteractionSet(points, s), table});
  }
  return m;
}

namespace detail {

// Evaluation plan for a table over `support` inside an enumeration whose
// site list is `sites`: where each support site sits and its table stride.
struct TablePlan {
  std::vector<int> site_pos;
  std::vector<std::size_t> stride;
  const std::vector<double>* table = nullptr;

  double eval(const std::vector<int>& digits) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < site_pos.size(); ++i)
      idx += static_cast<std::size_t>(digits[static_cast<std::size_t>(site_pos[i])]) *
             stride[i];
    return (*table)[idx];
  }
};

inline TablePlan make_plan(const InteractionModel& m, const Region& support,
                           const std::vector<double>& table, const Region& sites) {
  TablePlan plan;
  plan.table = &table;
  const auto& sup = support.pts();
  plan.site_pos.resize(sup.size());
  plan.stride.resize(sup.size());
  std::size_t stride = 1;
  for (std::size_t i = sup.size(); i-- > 0;) {
    plan.stride[i] = stride;
    stride *= m.site(sup[i]).values.size();
    const auto& all = sites.pts();
    const auto it = std::lower_bound(all.begin(), all.end(), sup[i]);
    if (it == all.end() || *it != sup[i])
      throw invalid_input("table plan: support site missing from enumeration window");
    plan.site_pos[i] = static_cast<int>(it - all.begin());
  }
  return plan;
}

inline std::uint64_t config_count(const InteractionModel& m, const Region& sites) {
  std::uint64_t n = 1;
  for (const auto& p : sites.pts()) {
    n *= m.site(p).values.size();
    if (n > (std::uint64_t{1} << 62)) throw resource_limit("configuration count overflow");
  }
  return n;
}

// digits for configuration id under mixed radix (last site fastest)
inline void decode_config(const InteractionModel& m, const Region& sites,
                          std::uint64_t id, std::vector<int>& digits) {
  const auto& pts = sites.pts();
  digits.resize(pts.size());
  for (std::size_t i = pts.size(); i-- > 0;) {
    const std::uint64_t base = m.site(pts[i]).values.size();
    digits[i] = static_cast<int>(id % base);
    id /= base;
  }
}

inline bool next_config(const InteractionModel& m, const Region& sites,
                        std::vector<int>& digits) {
  const auto& pts = sites.pts();
  for (std::size_t i = pts.size(); i-- > 0;) {
    if (digits[i] + 1 < static_cast<int>(m.site(pts[i]).values.size())) {
      ++digits[i];
      return true;
    }
    digits[i] = 0;
  }
  return false;
}

}  // namespace detail

// Indicator of a DNF event as a value table over its base.
inline Observable indicator_observable(const InteractionModel& m,
                                       const CylinderEvent& a) {
  a.validate();
  const auto& pts = a.base.pts();
  std::vector<const SiteDistribution*> dists;
  dists.reserve(pts.size());
  for (const auto& p : pts) dists.push_back(&m.site(p));

  // per clause, per base site: allowed mask over support indices (empty map
  // entry = unconstrained)
  std::vector<std::vector<std::vector<char>>> masks;
  for (const auto& clause : a.clauses) {
    std::vector<std::vector<char>> cm(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      auto it = clause.find(pts[i]);
      if (it == clause.end()) continue;
      std::vector<char> allow(dists[i]->values.size(), 0);
      for (double v : it->second) {
        const int idx = dists[i]->index_of(v);
        if (idx >= 0) allow[static_cast<std::size_t>(idx)] = 1;
      }
      cm[i] = std::move(allow);
    }
    masks.push_back(std::move(cm));
  }

  Observable out;
  out.support = a.base;
  out.table.resize(static_cast<std::size_t>(detail::config_count(m, a.base)));
  std::vector<int> digits(pts.size(), 0);
  std::size_t idx = 0;
  do {
    bool sat = false;
    for (const auto& cm : masks) {
      bool ok = true;
      for (std::size_t i = 0; i < pts.size() && ok; ++i)
        if (!cm[i].empty() && !cm[i][static_cast<std::size_t>(digits[i])]) ok = false;
      if (ok) {
        sat = true;
        break;
      }
    }
    out.table[idx++] = sat ? 1.0 : 0.0;
  } while (detail::next_config(m, a.base, digits));
  return out;
}

// P_0(A) for a DNF event by inclusion-exclusion over clause subsets, with
// per-site factorization (the sites are independent under P_0).
inline double event_probability_p0(const InteractionModel& m, const CylinderEvent& a) {
  a.validate();
  const std::size_t k = a.clauses.size();
  if (k == 0) return 0.0;
  if (k > 20)
    throw resource_limit("event_probability_p0: too many clauses for inclusion-exclusion");

  compensated_sum total;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
    std::map<Point, std::vector<double>> merged;
    bool empty_meet = false;
    for (std::size_t c = 0; c < k && !empty_meet; ++c) {
      if (!(mask & (std::uint64_t{1} << c))) continue;
      for (const auto& [site, allowed] : a.clauses[c]) {
        auto it = merged.find(site);
        if (it == merged.end()) {
          merged[site] = allowed;
        } else {
          std::vector<double> meet;
          for (double v : it->second)
            if (std::find(allowed.begin(), allowed.end(), v) != allowed.end())
              meet.push_back(v);
          if (meet.empty()) {
            empty_meet = true;
            break;
          }
          it->second = std::move(meet);
        }
      }
    }
    if (empty_meet) continue;
    double p = 1.0;
    for (const auto& [site, allowed] : merged) {
      double ps = 0.0;
      for (double v : allowed) ps += m.site(site).prob_of(v);
      p *= ps;
    }
    const int bits = static_cast<int>(__builtin_popcountll(mask));
    total.add(bits % 2 == 1 ? p : -p);
  }
  return total.value();
}

}  // namespace latgibbs
