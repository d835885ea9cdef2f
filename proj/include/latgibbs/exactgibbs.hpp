#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "latgibbs/errors.hpp"
#include "latgibbs/lattice.hpp"
#include "latgibbs/model.hpp"
#include "latgibbs/numeric.hpp"

namespace latgibbs {

struct GibbsBudget {
  std::uint64_t max_configs = std::uint64_t{1} << 24;
};

// Assignment of spin values to a finite window, aligned with sites.pts().
struct LocalConfiguration {
  Region sites;
  std::vector<double> values;

  double value_at(const Point& p) const {
    const auto& pts = sites.pts();
    const auto it = std::lower_bound(pts.begin(), pts.end(), p);
    if (it == pts.end() || *it != p)
      throw invalid_input("LocalConfiguration: missing site assignment");
    return values[static_cast<std::size_t>(it - pts.begin())];
  }
};

// U_window(omega): sum of Phi_B(omega) over B in B(r) with B inside window.
inline double interaction_energy(const InteractionModel& m, const Region& window,
                                 const LocalConfiguration& omega) {
  if (omega.sites.size() != omega.values.size())
    throw invalid_input("interaction_energy: malformed configuration");
  std::vector<int> digits(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) {
    const Point& p = window.pts()[i];
    const double v = omega.value_at(p);
    const int idx = m.site(p).index_of(v);
    if (idx < 0)
      throw invalid_input("interaction_energy: value outside site support");
    digits[i] = idx;
  }
  compensated_sum u;
  for (const auto& term : m.terms_in(window)) {
    const auto plan = detail::make_plan(m, term.set.points(), term.table, window);
    u.add(plan.eval(digits));
  }
  return u.value();
}

namespace detail {

// <Y e^U> and <e^U> over all configurations of Lambda_N, enumerated in
// odometer order over the canonically sorted sites. The work is split into a
// fixed number of index blocks (independent of the worker count) and block
// sums are merged in order, so results are bit-stable under --threads.
inline std::pair<double, double> gibbs_sums(const InteractionModel& m, int N,
                                            const Observable& y,
                                            const GibbsBudget& budget) {
  const Region box = cube(N, m.nu());
  if (!y.support.is_subset_of(box))
    throw invalid_input("gibbs: observable support not contained in Lambda_N");

  const std::uint64_t total = config_count(m, box);
  if (total > budget.max_configs)
    throw resource_limit("gibbs: " + std::to_string(total) +
                         " configurations exceed the budget; shrink N or raise "
                         "GibbsBudget.max_configs");

  const auto terms = m.terms_in(box);
  std::vector<TablePlan> plans;
  plans.reserve(terms.size());
  for (const auto& t : terms) plans.push_back(make_plan(m, t.set.points(), t.table, box));
  const TablePlan y_plan = make_plan(m, y.support, y.table, box);

  std::vector<const std::vector<double>*> site_probs;
  site_probs.reserve(box.size());
  for (const auto& p : box.pts()) site_probs.push_back(&m.site(p).probs);

  const int blocks = static_cast<int>(std::min<std::uint64_t>(total, 64));
  std::vector<std::pair<double, double>> partial(static_cast<std::size_t>(blocks));
  parallel_blocks(blocks, [&](int b) {
    const std::uint64_t begin = total * static_cast<std::uint64_t>(b) / blocks;
    const std::uint64_t end = total * (static_cast<std::uint64_t>(b) + 1) / blocks;
    std::vector<int> digits;
    decode_config(m, box, begin, digits);
    compensated_sum num, den;
    for (std::uint64_t id = begin; id < end; ++id) {
      double u = 0.0;
      for (const auto& plan : plans) u += plan.eval(digits);
      double p0 = 1.0;
      for (std::size_t i = 0; i < digits.size(); ++i)
        p0 *= (*site_probs[i])[static_cast<std::size_t>(digits[i])];
      const double w = p0 * std::exp(u);
      den.add(w);
      num.add(w * y_plan.eval(digits));
      next_config(m, box, digits);
    }
    partial[static_cast<std::size_t>(b)] = {num.value(), den.value()};
  });

  compensated_sum num, den;
  for (const auto& [n_part, d_part] : partial) {
    num.add(n_part);
    den.add(d_part);
  }
  return {num.value(), den.value()};
}

}  // namespace detail

// <Y>_{P_N}: expectation under the Gibbs modification of P_0 by U_{Lambda_N}.
inline double gibbs_expectation(const InteractionModel& m, int N, const Observable& y,
                                const GibbsBudget& budget = {}) {
  const auto [num, den] = detail::gibbs_sums(m, N, y, budget);
  return num / den;
}

// P_N(A): exact finite-volume Gibbs probability of a cylinder event. When the
// event is the whole space the numerator accumulates exactly the denominator,
// so the result is exactly 1; the empty event gives exactly 0.
inline double gibbs_probability(const InteractionModel& m, int N,
                                const CylinderEvent& a, const GibbsBudget& budget = {}) {
  a.validate();
  if (!a.base.is_subset_of(cube(N, m.nu())))
    throw invalid_input("gibbs_probability: event base not contained in Lambda_N");
  return gibbs_expectation(m, N, indicator_observable(m, a), budget);
}

}  // namespace latgibbs
