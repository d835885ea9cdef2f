#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <mutex>
#include <vector>

#include "latgibbs/errors.hpp"
#include "latgibbs/lattice.hpp"
#include "latgibbs/model.hpp"
#include "latgibbs/numeric.hpp"

namespace latgibbs {

struct CumulantBudget {
  std::size_t max_vars = 10;                                // Bell-number guard
  std::uint64_t max_group_configs = std::uint64_t{1} << 22;
};

// Connectivity of the sequence (Q, B_1, ..., B_n) in the intersection graph:
// vertices are the sets, edges join sets that share a point.
inline bool is_connected_sequence(const Region& q, const std::vector<Region>& sets) {
  const std::size_t n = sets.size() + 1;
  auto member = [&](std::size_t i) -> const Region& {
    return i == 0 ? q : sets[i - 1];
  };
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    ++reached;
    for (std::size_t w = 0; w < n; ++w)
      if (!seen[w] && member(v).intersects(member(w))) seen[w] = 1, stack.push_back(w);
  }
  return reached == n;
}

namespace detail {

inline bool observable_less(const Observable& a, const Observable& b) {
  if (a.support != b.support) return a.support < b.support;
  return a.table < b.table;
}

// Set partitions of {0..k-1} as block bitmasks, enumerated from restricted
// growth strings in lexicographic order; built once per length.
inline const std::vector<std::vector<std::uint32_t>>& partitions_of(int k) {
  static std::array<std::once_flag, 11> flags;
  static std::array<std::vector<std::vector<std::uint32_t>>, 11> tables;
  std::call_once(flags[static_cast<std::size_t>(k)], [k] {
    std::vector<std::vector<std::uint32_t>>& out =
        tables[static_cast<std::size_t>(k)];
    std::vector<int> rgs(static_cast<std::size_t>(k), 0);
    while (true) {
      int blocks = 0;
      for (int v : rgs) blocks = std::max(blocks, v + 1);
      std::vector<std::uint32_t> part(static_cast<std::size_t>(blocks), 0);
      for (int i = 0; i < k; ++i)
        part[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])] |=
            std::uint32_t{1} << i;
      out.push_back(std::move(part));
      int i = k - 1;
      while (i > 0) {
        int prefix_max = 0;
        for (int j = 0; j < i; ++j)
          prefix_max = std::max(prefix_max, rgs[static_cast<std::size_t>(j)]);
        if (rgs[static_cast<std::size_t>(i)] <= prefix_max) break;
        --i;
      }
      if (i == 0) break;
      ++rgs[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) rgs[static_cast<std::size_t>(j)] = 0;
    }
  });
  return tables[static_cast<std::size_t>(k)];
}

// <prod vars>_0 for variables whose supports all belong to one intersecting
// group: enumerate the union window once.
inline double group_moment(const InteractionModel& m,
                           const std::vector<const Observable*>& vars,
                           const CumulantBudget& budget) {
  Region window;
  for (const auto* v : vars) window = window.unioned(v->support);
  const std::uint64_t total = config_count(m, window);
  if (total > budget.max_group_configs)
    throw resource_limit("mixed_moment: group window too large");

  std::vector<TablePlan> plans;
  plans.reserve(vars.size());
  for (const auto* v : vars) plans.push_back(make_plan(m, v->support, v->table, window));
  std::vector<const std::vector<double>*> site_probs;
  for (const auto& p : window.pts()) site_probs.push_back(&m.site(p).probs);

  std::vector<int> digits(window.size(), 0);
  compensated_sum sum;
  do {
    double w = 1.0;
    for (std::size_t i = 0; i < digits.size(); ++i)
      w *= (*site_probs[i])[static_cast<std::size_t>(digits[i])];
    for (const auto& plan : plans) w *= plan.eval(digits);
    sum.add(w);
  } while (next_config(m, window, digits));
  return sum.value();
}

}  // namespace detail

// <V_1 ... V_k>_0, exact. Variables with non-intersecting supports factor out
// (the sites are independent under P_0), so only each intersecting group is
// enumerated. The argument list is canonicalized first, so any permutation of
// the inputs returns the identical double.
inline double mixed_moment(const InteractionModel& m, std::vector<Observable> vars,
                           const CumulantBudget& budget = {}) {
  if (vars.empty()) return 1.0;
  std::sort(vars.begin(), vars.end(), detail::observable_less);

  const std::size_t k = vars.size();
  std::vector<std::size_t> group(k);
  for (std::size_t i = 0; i < k; ++i) group[i] = i;
  auto find = [&](std::size_t x) {
    while (group[x] != x) x = group[x] = group[group[x]];
    return x;
  };
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (vars[i].support.intersects(vars[j].support)) group[find(i)] = find(j);

  double out = 1.0;
  for (std::size_t root = 0; root < k; ++root) {
    if (find(root) != root) continue;
    std::vector<const Observable*> members;
    for (std::size_t i = 0; i < k; ++i)
      if (find(i) == root) members.push_back(&vars[i]);
    out *= detail::group_moment(m, members, budget);
  }
  return out;
}

// Joint semi-invariant (cumulant) of the variables with respect to P_0, by
// the set-partition formula
//   sum_pi (-1)^{|pi|-1} (|pi|-1)! prod_blocks <prod_{i in block} V_i>_0.
// A single variable gives its mean.
inline double semi_invariant(const InteractionModel& m, std::vector<Observable> vars,
                             const CumulantBudget& budget = {}) {
  if (vars.empty()) throw invalid_input("semi_invariant: need at least one variable");
  if (vars.size() > budget.max_vars)
    throw resource_limit("semi_invariant: too many variables (partition count)");
  std::sort(vars.begin(), vars.end(), detail::observable_less);

  const int k = static_cast<int>(vars.size());
  if (k == 1) return mixed_moment(m, std::move(vars), budget);

  // moments of every nonempty subset, reused across partitions
  std::vector<double> moment(std::size_t{1} << k, 1.0);
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << k); ++mask) {
    std::vector<Observable> subset;
    for (int i = 0; i < k; ++i)
      if (mask & (std::uint32_t{1} << i)) subset.push_back(vars[static_cast<std::size_t>(i)]);
    moment[mask] = mixed_moment(m, std::move(subset), budget);
  }

  double fact[11];
  fact[0] = 1.0;
  for (int i = 1; i <= 10; ++i) fact[i] = fact[i - 1] * i;

  compensated_sum sum;
  for (const auto& part : detail::partitions_of(k)) {
    const std::size_t p = part.size();
    double prod = (p % 2 == 1 ? 1.0 : -1.0) * fact[p - 1];
    for (const std::uint32_t block : part) prod *= moment[block];
    sum.add(prod);
  }
  return sum.value();
}

}  // namespace latgibbs
