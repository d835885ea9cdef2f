#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "latgibbs/cumulants.hpp"
#include "latgibbs/errors.hpp"
#include "latgibbs/exactgibbs.hpp"
#include "latgibbs/graphkit.hpp"
#include "latgibbs/lattice.hpp"
#include "latgibbs/model.hpp"
#include "latgibbs/numeric.hpp"

namespace latgibbs {

// Multiset of distinct interaction sets with multiplicities, canonically
// ordered. |Gamma| is the length, Gamma! the product of multiplicity
// factorials.
struct Family {
  std::vector<std::pair<InteractionSet, int>> entries;

  int length() const {
    int n = 0;
    for (const auto& [c, mult] : entries) n += mult;
    return n;
  }

  unsigned long long multiplicity_factorial() const {
    unsigned long long out = 1;
    for (const auto& [c, mult] : entries)
      for (int i = 2; i <= mult; ++i) out *= static_cast<unsigned long long>(i);
    return out;
  }

  // this family plus one more copy of c, keeping entries sorted
  Family with_added(const InteractionSet& c) const {
    Family out = *this;
    auto it = std::lower_bound(
        out.entries.begin(), out.entries.end(), c,
        [](const auto& entry, const InteractionSet& s) { return entry.first < s; });
    if (it != out.entries.end() && it->first == c)
      ++it->second;
    else
      out.entries.insert(it, {c, 1});
    return out;
  }

  Region cover(const Region& q) const {
    Region out = q;
    for (const auto& [c, mult] : entries) out = out.unioned(c.points());
    return out;
  }

  bool operator==(const Family& o) const { return entries == o.entries; }
  bool operator<(const Family& o) const { return entries < o.entries; }
};

// u_j(Gamma): sum of the multiplicities n_i over entries whose set intersects
// C_j (including j itself). Always >= n_j. Index is zero-based.
inline int u_weight(const Family& f, std::size_t j) {
  if (j >= f.entries.size()) throw invalid_input("u_weight: index out of range");
  int u = 0;
  for (const auto& [c, mult] : f.entries)
    if (c.points().intersects(f.entries[j].first.points())) u += mult;
  return u;
}

// All Q-connected families of length n whose sets lie inside `container` and
// belong to B(r). Grown frontier-wise: a candidate next set must meet the
// points covered so far, which visits exactly the Q-connected families; the
// level sets deduplicate orderings.
inline std::vector<Family> enumerate_q_connected_families(
    const Region& q, int n, const Region& container, int r,
    const SearchBudget& budget = {}) {
  if (n < 0) throw invalid_input("enumerate_q_connected_families: n must be >= 0");
  if (q.empty()) throw invalid_input("enumerate_q_connected_families: empty Q");

  std::map<Point, std::vector<InteractionSet>> at_point;
  auto sets_at = [&](const Point& t) -> const std::vector<InteractionSet>& {
    auto it = at_point.find(t);
    if (it == at_point.end())
      it = at_point.emplace(t, enumerate_sets_containing(t, r, budget, &container)).first;
    return it->second;
  };

  std::set<Family> level{Family{}};
  std::uint64_t states = 0;
  for (int depth = 0; depth < n; ++depth) {
    std::set<Family> next;
    for (const Family& f : level) {
      const Region cov = f.cover(q);
      std::set<InteractionSet> candidates;
      for (const auto& t : cov.pts())
        for (const auto& c : sets_at(t)) candidates.insert(c);
      for (const auto& c : candidates) {
        if (++states > budget.max_states)
          throw resource_limit("enumerate_q_connected_families: budget exceeded");
        next.insert(f.with_added(c));
      }
    }
    level = std::move(next);
  }
  return {level.begin(), level.end()};
}

// Number of sequences reducing to Gamma: |Gamma|! / Gamma!, exact.
inline unsigned long long reduction_count(const Family& f) {
  if (f.length() > 20) throw resource_limit("reduction_count: length > 20 overflows");
  auto binom = [](unsigned long long n, unsigned long long k) {
    unsigned long long out = 1;
    for (unsigned long long i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
  };
  unsigned long long out = 1;
  unsigned long long partial = 0;
  for (const auto& [c, mult] : f.entries) {
    partial += static_cast<unsigned long long>(mult);
    out *= binom(partial, static_cast<unsigned long long>(mult));
  }
  return out;
}

// <Y, Phi_Gamma>_0: the semi-invariant with each set's potential repeated by
// its multiplicity. Families touching only identically-zero potentials give 0.
inline double semi_invariant_family(const InteractionModel& m, const Observable& y,
                                    const Family& f, const CumulantBudget& budget = {}) {
  std::vector<Observable> vars{y};
  for (const auto& [c, mult] : f.entries) {
    const auto term = m.term_for(c.points());
    if (!term) return 0.0;  // Phi_C identically zero, cumulant vanishes
    for (int i = 0; i < mult; ++i)
      vars.push_back(Observable{c.points(), term->table});
  }
  return semi_invariant(m, std::move(vars), budget);
}

// J_A(N, n) = sum over Q-connected families of length n inside Lambda_N of
// (1/Gamma!) <I_A, Phi_Gamma>_0. Families are evaluated in canonical order in
// fixed-size chunks; chunk sums are merged in order (bit-stable under
// --threads).
inline double j_term(const InteractionModel& m, const CylinderEvent& a, int N, int n,
                     const SearchBudget& search_budget = {},
                     const CumulantBudget& cumulant_budget = {},
                     long long* family_count_out = nullptr) {
  a.validate();
  const Region container = cube(N, m.nu());
  if (!a.base.is_subset_of(container))
    throw invalid_input("j_term: event base not contained in Lambda_N");

  const auto families =
      enumerate_q_connected_families(a.base, n, container, m.r(), search_budget);
  if (family_count_out) *family_count_out = static_cast<long long>(families.size());
  const Observable ia = indicator_observable(m, a);

  constexpr std::size_t chunk = 16;
  const int blocks = static_cast<int>((families.size() + chunk - 1) / chunk);
  if (blocks == 0) return 0.0;
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
  parallel_blocks(blocks, [&](int b) {
    compensated_sum sum;
    const std::size_t begin = static_cast<std::size_t>(b) * chunk;
    const std::size_t end = std::min(begin + chunk, families.size());
    for (std::size_t i = begin; i < end; ++i) {
      const double si = semi_invariant_family(m, ia, families[i], cumulant_budget);
      sum.add(si / static_cast<double>(families[i].multiplicity_factorial()));
    }
    partial[static_cast<std::size_t>(b)] = sum.value();
  });

  compensated_sum total;
  for (double v : partial) total.add(v);
  return total.value();
}

// M_n = r(n+1) + q + d: beyond this cube size the term J_A(N, n) stops
// changing.
inline int m_stabilization(int n, int r, int q, int d) {
  if (n < 0 || r < 1 || q < 0 || d < 0)
    throw invalid_input("m_stabilization: bad arguments");
  return r * (n + 1) + q + d;
}

// Certified tail: 2^{2q} P_0(A) sum_{n >= n0} rho^n (n+1), in closed form
// rho^{n0} ((n0+1) - n0 rho) / (1-rho)^2. Established only for n0 >= 4.
inline double tail_bound(int q, double p0a, int n0, double rho) {
  if (q < 0 || p0a < 0.0) throw invalid_input("tail_bound: bad arguments");
  if (!(rho >= 0.0) || rho >= 1.0)
    throw invalid_input("tail_bound: need 0 <= rho < 1");
  if (n0 < 4) throw invalid_input("tail_bound: bound not established below n0 = 4");
  const double geom = std::pow(rho, n0) * ((n0 + 1) - n0 * rho) /
                      ((1.0 - rho) * (1.0 - rho));
  return std::ldexp(1.0, 2 * q) * p0a * geom;
}

struct ExpansionTerm {
  int n = 0;
  int m_n = 0;
  long long family_count = 0;
  double j = 0.0;
  double running_sum = 0.0;
  double tail_at_next = std::numeric_limits<double>::quiet_NaN();
};

struct OracleComparison {
  int n_volume = 0;
  double p_n = 0.0;
  double abs_diff = 0.0;
};

struct ExpansionReport {
  int nu = 1, r = 1;
  double lambda = 0.0;
  int q = 0, d = 0;
  double p0 = 0.0;
  long long lambda0_den = 0;  // 0 when the constant enumeration was refused
  double lambda0 = std::numeric_limits<double>::quiet_NaN();
  bool lambda_ok = false;  // lambda <= lambda0
  double rho_universal = 0.9;
  double rho_model = std::numeric_limits<double>::quiet_NaN();
  std::vector<ExpansionTerm> terms;
  double partial_sum = 0.0;
  bool certified = false;  // lambda_ok and n_max >= 4
  double tail = std::numeric_limits<double>::quiet_NaN();        // universal rho
  double tail_model = std::numeric_limits<double>::quiet_NaN();  // model rho
  std::vector<std::string> warnings;
  std::optional<OracleComparison> oracle;
};

struct ExpansionOptions {
  std::optional<int> oracle_n;  // compare against gibbs_probability(N, A)
  SearchBudget search_budget;
  CumulantBudget cumulant_budget;
  GibbsBudget gibbs_budget;
};

// Partial sum of the cluster series for lim_N P_N(A): each order n is
// evaluated at its own stabilized cube M_n, terms are accumulated in
// increasing n, and a certified geometric tail is attached when
// lambda <= lambda0 and n_max >= 4.
inline ExpansionReport thermodynamic_probability(const InteractionModel& m,
                                                 const CylinderEvent& a, int n_max,
                                                 const ExpansionOptions& opts = {}) {
  a.validate();
  if (n_max < 0) throw invalid_input("thermodynamic_probability: n_max must be >= 0");

  ExpansionReport rep;
  rep.nu = m.nu();
  rep.r = m.r();
  rep.lambda = m.lambda();
  rep.q = size_of(a.base, opts.search_budget);
  rep.d = distance_to_origin(a.base);
  rep.p0 = event_probability_p0(m, a);

  try {
    rep.lambda0_den = lambda0_denominator(m.nu(), m.r(), opts.search_budget);
    rep.lambda0 = 1.0 / static_cast<double>(rep.lambda0_den);
    const long long L = l_max(m.nu(), m.r(), opts.search_budget);
    rep.rho_model = m.lambda() * 6.0 * std::exp(2.0) * static_cast<double>(L) *
                    std::pow(8.0 * m.nu(), 2 * m.r());
    rep.lambda_ok = m.lambda() <= rep.lambda0;
    if (!rep.lambda_ok)
      rep.warnings.push_back("certificate refused: lambda exceeds lambda0");
  } catch (const resource_limit& e) {
    rep.warnings.push_back(std::string("constants unavailable: ") + e.what());
  }

  compensated_sum running;
  for (int n = 0; n <= n_max; ++n) {
    ExpansionTerm term;
    term.n = n;
    term.m_n = m_stabilization(n, m.r(), rep.q, rep.d);
    term.j = j_term(m, a, term.m_n, n, opts.search_budget, opts.cumulant_budget,
                    &term.family_count);
    running.add(term.j);
    term.running_sum = running.value();
    if (rep.lambda_ok && n + 1 >= 4)
      term.tail_at_next = tail_bound(rep.q, rep.p0, n + 1, rep.rho_universal);
    rep.terms.push_back(term);
  }
  rep.partial_sum = running.value();

  rep.certified = rep.lambda_ok && n_max >= 4;
  if (rep.certified) {
    rep.tail = tail_bound(rep.q, rep.p0, n_max + 1, rep.rho_universal);
    if (rep.rho_model < 1.0)
      rep.tail_model = tail_bound(rep.q, rep.p0, n_max + 1, rep.rho_model);
  } else if (rep.lambda_ok) {
    rep.warnings.push_back("tail omitted: n_max < 4");
  }

  if (opts.oracle_n) {
    OracleComparison oc;
    oc.n_volume = *opts.oracle_n;
    oc.p_n = gibbs_probability(m, oc.n_volume, a, opts.gibbs_budget);
    oc.abs_diff = std::abs(rep.partial_sum - oc.p_n);
    rep.oracle = oc;
  }
  return rep;
}

struct BoundCheck {
  std::string lemma;
  std::string params;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

// Numeric verification, for each n in [n_from, n_to], of
//   (a) sum_j n_j ln(u_j / n_j) <= n ln L over every enumerated family,
//   (b) |<I_A, Phi_Gamma>_0| <= P_0(A) lambda^n (3 e^2 L)^n (n+1) Gamma!  (n > 3),
//   (c) |J_A(N, n)| <= 2^{2q} P_0(A) 0.9^n (n+1)                          (n > 3),
//   (d) the family count against 2^{2q} (2 (8 nu)^{2r})^n.
// Check (c) needs lambda <= lambda0 and is skipped otherwise; the caller
// reports the refusal. Worst cases over families are reported per n.
inline std::vector<BoundCheck> verify_bounds(const InteractionModel& m,
                                             const CylinderEvent& a, int n_from,
                                             int n_to, int N,
                                             const ExpansionOptions& opts = {}) {
  a.validate();
  if (n_from < 0 || n_to < n_from) throw invalid_input("verify_bounds: bad n range");

  const int q = size_of(a.base, opts.search_budget);
  const double p0 = event_probability_p0(m, a);
  const long long L = l_max(m.nu(), m.r(), opts.search_budget);
  const double lambda0_val = lambda0(m.nu(), m.r(), opts.search_budget);
  const bool lambda_ok = m.lambda() <= lambda0_val;
  const Region container = cube(N, m.nu());
  const Observable ia = indicator_observable(m, a);

  std::vector<BoundCheck> out;
  for (int n = n_from; n <= n_to; ++n) {
    const auto families = enumerate_q_connected_families(a.base, n, container, m.r(),
                                                         opts.search_budget);
    const std::string params = "n=" + std::to_string(n);

    {
      const double bound =
          std::ldexp(1.0, 2 * q) *
          std::pow(2.0 * std::pow(8.0 * m.nu(), 2 * m.r()), n);
      const double measured = static_cast<double>(families.size());
      const bool strict = n > 1;  // the family-count bound is strict only past length 1
      out.push_back({"family_count", params, measured, bound,
                     strict ? measured < bound : measured <= bound});
    }
    {
      double worst = 0.0;
      for (const auto& f : families) {
        double s = 0.0;
        for (std::size_t j = 0; j < f.entries.size(); ++j) {
          const double nj = f.entries[j].second;
          s += nj * std::log(u_weight(f, j) / nj);
        }
        worst = std::max(worst, s);
      }
      const double bound = n * std::log(static_cast<double>(L));
      out.push_back({"u_log", params, worst, bound,
                     worst <= bound + 1e-9 * (1.0 + std::abs(bound))});
    }
    if (n > 3) {
      double worst = 0.0;
      compensated_sum jsum;
      for (const auto& f : families) {
        const double si = semi_invariant_family(m, ia, f, opts.cumulant_budget);
        const double gfact = static_cast<double>(f.multiplicity_factorial());
        worst = std::max(worst, std::abs(si) / gfact);
        jsum.add(si / gfact);
      }
      const double si_bound = p0 * std::pow(m.lambda(), n) *
                              std::pow(3.0 * std::exp(2.0) * static_cast<double>(L), n) *
                              (n + 1);
      out.push_back({"semi_invariant", params, worst, si_bound, worst <= si_bound});
      // the decay bound only holds under the certificate; above lambda0 it is
      // skipped and the caller reports the refusal
      if (lambda_ok) {
        const double j_bound = std::ldexp(1.0, 2 * q) * p0 * std::pow(0.9, n) * (n + 1);
        out.push_back(
            {"j_term", params, std::abs(jsum.value()), j_bound,
             std::abs(jsum.value()) <= j_bound});
      }
    }
  }
  return out;
}

struct ConsistencyRecord {
  double partial_q = 0.0;
  double partial_qprime = 0.0;
  double diff = 0.0;
  double tail_q = 0.0;
  double tail_qprime = 0.0;
  bool within_tails = false;
  bool permutation_exact = false;
};

// The thermodynamic-limit probability must not depend on how the event is
// presented: evaluating A through its base Q and through any enlarged base
// Q' >= Q (extra sites unconstrained) gives partial sums that differ by at
// most the two tail certificates, and re-encoding the event with sites in a
// different order reproduces the partial sum bit for bit.
inline ConsistencyRecord consistency_check(const InteractionModel& m,
                                           const CylinderEvent& a, const Region& qprime,
                                           int n_max, const ExpansionOptions& opts = {}) {
  a.validate();
  if (!a.base.is_subset_of(qprime))
    throw invalid_input("consistency_check: Q' must contain the event base");
  if (n_max < 3)
    throw invalid_input("consistency_check: need n_max >= 3 for tail certificates");

  const ExpansionReport rep_q = thermodynamic_probability(m, a, n_max, opts);
  if (!rep_q.lambda_ok)
    throw certificate_refusal("consistency_check: lambda exceeds lambda0");

  CylinderEvent widened{qprime, a.clauses};
  const ExpansionReport rep_qp = thermodynamic_probability(m, widened, n_max, opts);

  ConsistencyRecord rec;
  rec.partial_q = rep_q.partial_sum;
  rec.partial_qprime = rep_qp.partial_sum;
  rec.diff = std::abs(rec.partial_q - rec.partial_qprime);
  rec.tail_q = tail_bound(rep_q.q, rep_q.p0, n_max + 1, rep_q.rho_universal);
  rec.tail_qprime = tail_bound(rep_qp.q, rep_qp.p0, n_max + 1, rep_qp.rho_universal);
  rec.within_tails = rec.diff <= rec.tail_q + rec.tail_qprime;

  // re-encode each clause with its site constraints inserted in reverse
  // order; the canonical event representation must erase the difference
  CylinderEvent shuffled;
  shuffled.base = a.base;
  for (const auto& clause : a.clauses) {
    std::map<Point, std::vector<double>> rebuilt;
    for (auto it = clause.rbegin(); it != clause.rend(); ++it)
      rebuilt.insert({it->first, it->second});
    shuffled.clauses.push_back(std::move(rebuilt));
  }
  const ExpansionReport rep_shuffled = thermodynamic_probability(m, shuffled, n_max, opts);
  rec.permutation_exact = rep_shuffled.partial_sum == rep_q.partial_sum;
  return rec;
}

}  // namespace latgibbs
