#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "latgibbs/errors.hpp"
#include "latgibbs/lattice.hpp"

namespace latgibbs {

// Cap on the work of an exhaustive search. Searches that would exceed it
// refuse to run instead of silently truncating.
struct SearchBudget {
  std::uint64_t max_states = 20'000'000;
};

// Graph with unit-length edges only ("1-connected" when connected).
struct UnitGraph {
  std::vector<Point> vertices;                  // canonical order
  std::vector<std::pair<Point, Point>> edges;   // each (a,b) with a < b, list sorted

  bool operator==(const UnitGraph& o) const {
    return vertices == o.vertices && edges == o.edges;
  }
};

// Closed walk of unit steps.
struct Track {
  std::vector<Point> pts;

  bool operator==(const Track& o) const { return pts == o.pts; }
  bool operator<(const Track& o) const { return pts < o.pts; }
};

namespace detail {

inline std::uint64_t pow_u64(std::uint64_t base, unsigned exp) {
  std::uint64_t out = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && out > std::numeric_limits<std::uint64_t>::max() / base)
      throw resource_limit("integer power overflows 64 bits");
    out *= base;
  }
  return out;
}

// C(n, k) saturating at cap+1, for budget checks.
inline std::uint64_t binom_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t out = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    if (out > cap) return cap + 1;
    out = out * (n - k + i) / i;
  }
  return std::min(out, cap + 1);
}

struct BoundingBox {
  Point lo, hi;

  explicit BoundingBox(const Region& b) : lo(b.pts().front()), hi(b.pts().front()) {
    for (const auto& p : b.pts())
      for (std::size_t i = 0; i < p.size(); ++i) {
        lo[i] = std::min(lo[i], p[i]);
        hi[i] = std::max(hi[i], p[i]);
      }
  }

  std::uint64_t volume() const {
    std::uint64_t v = 1;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      v *= static_cast<std::uint64_t>(hi[i] - lo[i] + 1);
      if (v > (std::uint64_t{1} << 40)) throw resource_limit("bounding box too large");
    }
    return v;
  }

  // grid points in canonical order
  std::vector<Point> points() const {
    std::vector<Point> out;
    Point p = lo;
    while (true) {
      out.push_back(p);
      int i = static_cast<int>(p.size()) - 1;
      while (i >= 0 && p[i] == hi[i]) p[i] = lo[i], --i;
      if (i < 0) break;
      ++p[i];
    }
    return out;
  }
};

inline std::vector<std::vector<int>> unit_adjacency(const std::vector<Point>& pts) {
  std::map<Point, int> index;
  for (std::size_t i = 0; i < pts.size(); ++i) index[pts[i]] = static_cast<int>(i);
  std::vector<std::vector<int>> adj(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Point q = pts[i];
    for (std::size_t d = 0; d < q.size(); ++d) {
      for (int step : {-1, +1}) {
        q[d] += step;
        auto it = index.find(q);
        if (it != index.end()) adj[i].push_back(it->second);
        q[d] -= step;
      }
    }
    std::sort(adj[i].begin(), adj[i].end());
  }
  return adj;
}

// Minimum spanning tree weight of the complete L1 graph on pts (Prim).
// Realizable with monotone lattice paths, so it upper-bounds the Steiner size.
inline int l1_mst_weight(const std::vector<Point>& pts) {
  const std::size_t n = pts.size();
  std::vector<int> best(n, std::numeric_limits<int>::max());
  std::vector<char> used(n, 0);
  best[0] = 0;
  int total = 0;
  for (std::size_t it = 0; it < n; ++it) {
    int v = -1;
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i] && (v < 0 || best[i] < best[v])) v = static_cast<int>(i);
    used[v] = 1;
    total += best[v];
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i]) best[i] = std::min(best[i], l1_distance(pts[v], pts[i]));
  }
  return total;
}

// Every coordinate range of b must be traversed edge by edge, so the sum of
// the ranges lower-bounds the Steiner size.
inline int bbox_extent(const Region& b) {
  BoundingBox box(b);
  int ext = 0;
  for (std::size_t i = 0; i < box.lo.size(); ++i) ext += box.hi[i] - box.lo[i];
  return ext;
}

}  // namespace detail

// S(B): minimum edge count over connected unit-edge graphs whose vertex set
// contains B. Exact. A minimal graph never needs vertices outside the
// bounding box of B (clamping coordinates to the box keeps connectivity and
// cannot add edges), so the Dreyfus-Wagner dynamic program runs on the box
// grid with the members of B as terminals.
inline int size_of(const Region& b, const SearchBudget& budget = {}) {
  if (b.empty()) throw invalid_input("size_of: empty set");
  const int k = static_cast<int>(b.size());
  if (k == 1) return 0;  // single vertex: zero edges, trivially connected
  if (k == 2) return l1_distance(b.pts()[0], b.pts()[1]);

  const int lower = detail::bbox_extent(b);
  const int upper = detail::l1_mst_weight(b.pts());
  if (lower == upper) return lower;

  detail::BoundingBox box(b);
  const std::uint64_t volume = box.volume();
  const std::uint64_t masks = std::uint64_t{1} << (k - 1);
  const std::uint64_t pow3 = detail::pow_u64(3, static_cast<unsigned>(k - 1));
  if ((pow3 + masks * 8) * volume > budget.max_states)
    throw resource_limit(
        "size_of: Dreyfus-Wagner budget exceeded; raise SearchBudget.max_states "
        "or shrink the point set");

  const std::vector<Point> grid = box.points();
  const auto adj = detail::unit_adjacency(grid);
  std::map<Point, int> index;
  for (std::size_t i = 0; i < grid.size(); ++i) index[grid[i]] = static_cast<int>(i);

  const int INF = std::numeric_limits<int>::max() / 4;
  const std::size_t v_count = grid.size();
  // dp[mask][v]: fewest edges of a tree spanning {terminals in mask} + grid[v];
  // terminals are b[1..k-1], b[0] is the root queried at the end.
  std::vector<std::vector<int>> dp(masks, std::vector<int>(v_count, INF));
  for (int i = 0; i + 1 < k; ++i)
    for (std::size_t v = 0; v < v_count; ++v)
      dp[std::uint64_t{1} << i][v] = l1_distance(b.pts()[i + 1], grid[v]);

  for (std::uint64_t mask = 1; mask < masks; ++mask) {
    auto& row = dp[mask];
    // merge two subtrees at a shared vertex
    for (std::uint64_t sub = (mask - 1) & mask; sub > (mask ^ sub); sub = (sub - 1) & mask) {
      const auto& a = dp[sub];
      const auto& c = dp[mask ^ sub];
      for (std::size_t v = 0; v < v_count; ++v)
        row[v] = std::min(row[v], a[v] + c[v]);
    }
    // then grow along shortest paths (Dijkstra over unit edges)
    using Item = std::pair<int, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (std::size_t v = 0; v < v_count; ++v)
      if (row[v] < INF) pq.push({row[v], static_cast<int>(v)});
    while (!pq.empty()) {
      auto [d, v] = pq.top();
      pq.pop();
      if (d > row[v]) continue;
      for (int w : adj[v])
        if (d + 1 < row[w]) row[w] = d + 1, pq.push({d + 1, w});
    }
  }
  return dp[masks - 1][index.at(b.pts().front())];
}

namespace detail {

// Lexicographically smallest spanning-tree edge list of the unit graph on
// pts, via matroid greedy over canonically sorted edges. Returns empty if
// the graph is disconnected.
inline std::vector<std::pair<Point, Point>> lexmin_spanning_tree(
    const std::vector<Point>& pts) {
  const auto adj = unit_adjacency(pts);
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int j : adj[i])
      if (static_cast<int>(i) < j) edges.push_back({static_cast<int>(i), j});
  // pts is sorted, so index order is canonical order and the edge list is
  // already canonically sorted
  std::vector<int> parent(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::pair<Point, Point>> tree;
  for (auto [a, c] : edges) {
    int ra = find(a), rc = find(c);
    if (ra == rc) continue;
    parent[ra] = rc;
    tree.push_back({pts[a], pts[c]});
  }
  if (tree.size() + 1 != pts.size()) return {};
  return tree;
}

// Minimal trees for a two-point set are exactly the monotone geodesic paths
// between the endpoints; enumerate them directly and keep the canonically
// smallest edge list.
inline UnitGraph pair_associated_graph(const Point& a, const Point& b,
                                       const SearchBudget& budget) {
  const std::uint64_t paths = [&] {
    // multinomial (sum |d_i|)! / prod |d_i|!, capped against the budget
    std::uint64_t total = 1, chosen = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const unsigned di = static_cast<unsigned>(std::abs(a[i] - b[i]));
      for (unsigned s = 1; s <= di; ++s) {
        ++chosen;
        total = total * chosen / s;  // running binomial, exact
        if (total > budget.max_states) return budget.max_states + 1;
      }
    }
    return total;
  }();
  if (paths > budget.max_states)
    throw resource_limit("associated_graph: too many geodesic paths; raise "
                         "SearchBudget.max_states");

  std::vector<std::pair<Point, Point>> best;
  std::vector<std::pair<Point, Point>> walk;
  Point cur = a;
  auto dfs = [&](auto&& self) -> void {
    if (cur == b) {
      auto edges = walk;
      std::sort(edges.begin(), edges.end());
      if (best.empty() || edges < best) best = std::move(edges);
      return;
    }
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const int step = b[i] > cur[i] ? 1 : (b[i] < cur[i] ? -1 : 0);
      if (step == 0) continue;
      Point prev = cur;
      cur[i] += step;
      walk.push_back(prev < cur ? std::pair{prev, cur} : std::pair{cur, prev});
      self(self);
      walk.pop_back();
      cur = prev;
    }
  };
  dfs(dfs);

  std::vector<Point> vertices{a};
  for (const auto& e : best) {
    vertices.push_back(e.first);
    vertices.push_back(e.second);
  }
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  return UnitGraph{std::move(vertices), std::move(best)};
}

}  // namespace detail

// The associated graph G_B: among all 1-connected graphs with S(B) edges
// containing B, the first under the canonical order (compare sorted edge
// lists lexicographically, edges as ordered pairs of points). Always a tree
// with S(B) edges and S(B)+1 vertices.
inline UnitGraph associated_graph(const Region& b, const SearchBudget& budget = {}) {
  if (b.size() < 2) throw invalid_input("associated_graph: need at least two points");
  if (b.size() == 2)
    return detail::pair_associated_graph(b.pts()[0], b.pts()[1], budget);
  const int m = size_of(b, budget);
  const int extra = m + 1 - static_cast<int>(b.size());

  detail::BoundingBox box(b);
  std::vector<Point> candidates;
  for (auto& p : box.points())
    if (!b.contains(p)) candidates.push_back(std::move(p));

  if (detail::binom_capped(candidates.size(), static_cast<std::uint64_t>(extra),
                           budget.max_states) > budget.max_states)
    throw resource_limit("associated_graph: vertex-set enumeration budget exceeded");

  std::vector<std::pair<Point, Point>> best;
  std::vector<Point> best_w;
  std::vector<int> pick(static_cast<std::size_t>(extra));
  for (int i = 0; i < extra; ++i) pick[i] = i;
  while (true) {
    std::vector<Point> w = b.pts();
    for (int i = 0; i < extra; ++i) w.push_back(candidates[pick[i]]);
    std::sort(w.begin(), w.end());
    auto tree = detail::lexmin_spanning_tree(w);
    if (tree.size() == static_cast<std::size_t>(m) &&
        (best_w.empty() || tree < best)) {
      best = std::move(tree);
      best_w = std::move(w);
    }
    if (extra == 0) break;
    int i = extra - 1;
    while (i >= 0 && pick[i] == static_cast<int>(candidates.size()) - extra + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < extra; ++j) pick[j] = pick[j - 1] + 1;
  }
  if (best_w.empty())
    throw resource_limit("associated_graph: no spanning set found (internal)");
  return UnitGraph{std::move(best_w), std::move(best)};
}

namespace detail {

// Lexicographically smallest closed Eulerian walk of the edge-doubled graph,
// starting at `start`: greedily take the smallest next vertex whose edge can
// still be completed to a full circuit (connectivity check on what remains).
inline Track lexmin_euler_doubled(const UnitGraph& g, const Point& start) {
  const int n = static_cast<int>(g.vertices.size());
  std::map<Point, int> index;
  for (int i = 0; i < n; ++i) index[g.vertices[i]] = i;
  auto it = index.find(start);
  if (it == index.end())
    throw invalid_input("euler track: start is not a vertex of the graph");
  const int s = it->second;

  std::vector<std::vector<int>> rem(n, std::vector<int>(n, 0));
  for (const auto& e : g.edges) {
    const int a = index.at(e.first), c = index.at(e.second);
    rem[a][c] += 2;
    rem[c][a] += 2;
  }
  int edges_left = 2 * static_cast<int>(g.edges.size());

  auto feasible = [&](int from) {
    if (edges_left == 0) return from == s;
    std::vector<char> seen(n, 0);
    std::vector<int> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w)
        if (rem[v][w] > 0 && !seen[w]) seen[w] = 1, stack.push_back(w);
    }
    for (int v = 0; v < n; ++v) {
      bool has_edge = false;
      for (int w = 0; w < n; ++w) has_edge = has_edge || rem[v][w] > 0;
      if (has_edge && !seen[v]) return false;
    }
    return true;
  };

  Track tr;
  tr.pts.push_back(g.vertices[s]);
  int cur = s;
  const int total = edges_left;
  for (int step = 0; step < total; ++step) {
    bool advanced = false;
    for (int w = 0; w < n && !advanced; ++w) {
      if (rem[cur][w] == 0) continue;
      --rem[cur][w];
      --rem[w][cur];
      --edges_left;
      if (feasible(w)) {
        tr.pts.push_back(g.vertices[w]);
        cur = w;
        advanced = true;
      } else {
        ++rem[cur][w];
        ++rem[w][cur];
        ++edges_left;
      }
    }
    if (!advanced) throw invalid_input("euler track: stuck (internal)");
  }
  return tr;
}

}  // namespace detail

// tr_B: double every edge of G_B, walk the canonical Eulerian circuit.
// Default start is the canonically smallest vertex of G_B.
inline Track associated_track(const Region& b, const SearchBudget& budget = {}) {
  UnitGraph g = associated_graph(b, budget);
  return detail::lexmin_euler_doubled(g, g.vertices.front());
}

inline Track associated_track_from(const Region& b, const Point& start,
                                   const SearchBudget& budget = {}) {
  UnitGraph g = associated_graph(b, budget);
  return detail::lexmin_euler_doubled(g, start);
}

// Finite set with at least two sites and its cached Steiner size S(B).
// Member of the interaction collection B(r) iff 1 <= S(B) <= r.
class InteractionSet {
 public:
  explicit InteractionSet(Region pts, const SearchBudget& budget = {})
      : points_(std::move(pts)) {
    if (points_.size() < 2)
      throw invalid_input("InteractionSet: need at least two points");
    size_ = size_of(points_, budget);
  }
  // trusted: size already certified by the caller
  InteractionSet(Region pts, int size) : points_(std::move(pts)), size_(size) {}

  const Region& points() const { return points_; }
  int size() const { return size_; }  // S(B)
  bool member_of(int r) const { return size_ >= 1 && size_ <= r; }

  bool operator==(const InteractionSet& o) const { return points_ == o.points_; }
  bool operator<(const InteractionSet& o) const { return points_ < o.points_; }

 private:
  Region points_;
  int size_ = 0;
};

namespace detail {

inline Track append_zigzag(Track tr, int reps) {
  Point p = tr.pts.back();
  for (int i = 0; i < reps; ++i) {
    ++p[0];
    tr.pts.push_back(p);
  }
  for (int i = 0; i < reps; ++i) {
    --p[0];
    tr.pts.push_back(p);
  }
  return tr;
}

}  // namespace detail

// tr'_B: the associated track padded to length 2r with a first-coordinate
// zig-zag (r-m steps up, r-m steps back, m = S(B)).
inline Track extended_track(const InteractionSet& b, int r,
                            const SearchBudget& budget = {}) {
  if (b.size() > r) throw invalid_input("extended_track: S(B) exceeds r");
  return detail::append_zigzag(associated_track(b.points(), budget), r - b.size());
}

inline Track extended_track_from(const InteractionSet& b, int r, const Point& start,
                                 const SearchBudget& budget = {}) {
  if (b.size() > r) throw invalid_input("extended_track: S(B) exceeds r");
  return detail::append_zigzag(associated_track_from(b.points(), start, budget),
                               r - b.size());
}

inline Region translate(const Region& b, const Point& by) {
  std::vector<Point> pts = b.pts();
  for (auto& p : pts)
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += by[i];
  return Region(std::move(pts));
}

// All C with t0 in C and 1 <= S(C) <= r, canonically ordered. Candidate
// points live in the L1 ball of radius r around t0 (a spanning tree with at
// most r edges has diameter at most r) and |C| <= r+1. The optional
// container additionally restricts C to its points.
inline std::vector<InteractionSet> enumerate_sets_containing(
    const Point& t0, int r, const SearchBudget& budget = {},
    const Region* container = nullptr) {
  if (r < 1) throw invalid_input("enumerate_sets_containing: r must be >= 1");
  if (container && !container->contains(t0)) return {};

  std::vector<Point> others;
  {
    std::vector<Coord> lo(t0), hi(t0);
    for (auto& c : lo) c -= r;
    for (auto& c : hi) c += r;
    Point p = lo;
    while (true) {
      if (p != t0 && l1_distance(p, t0) <= r && (!container || container->contains(p)))
        others.push_back(p);
      int i = static_cast<int>(p.size()) - 1;
      while (i >= 0 && p[i] == hi[i]) p[i] = lo[i], --i;
      if (i < 0) break;
      ++p[i];
    }
  }

  std::uint64_t combos = 0;
  for (int j = 1; j <= r; ++j)
    combos += detail::binom_capped(others.size(), static_cast<std::uint64_t>(j),
                                   budget.max_states);
  if (combos > budget.max_states)
    throw resource_limit("enumerate_sets_containing: subset budget exceeded");

  std::vector<InteractionSet> out;
  for (int j = 1; j <= r; ++j) {
    std::vector<int> pick(static_cast<std::size_t>(j));
    if (static_cast<std::size_t>(j) > others.size()) continue;
    for (int i = 0; i < j; ++i) pick[i] = i;
    while (true) {
      std::vector<Point> pts{t0};
      for (int i = 0; i < j; ++i) pts.push_back(others[pick[i]]);
      Region reg(std::move(pts));
      const int s = size_of(reg, budget);
      if (s >= 1 && s <= r) out.emplace_back(std::move(reg), s);
      int i = j - 1;
      while (i >= 0 && pick[i] == static_cast<int>(others.size()) - j + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int w = i + 1; w < j; ++w) pick[w] = pick[w - 1] + 1;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

inline long long l_factor_with_base(const InteractionSet& b,
                                    const std::vector<InteractionSet>& at_origin) {
  std::set<Region> seen;
  for (const auto& t : b.points().pts())
    for (const auto& c0 : at_origin) seen.insert(translate(c0.points(), t));
  return static_cast<long long>(seen.size());
}

}  // namespace detail

// l(B): number of sets C in B(r) that intersect B. Sets containing a point t
// are the origin enumeration translated by t (S is translation invariant).
inline long long l_factor(const InteractionSet& b, int r,
                          const SearchBudget& budget = {}) {
  const auto at_origin =
      enumerate_sets_containing(origin(b.points().dim()), r, budget);
  return detail::l_factor_with_base(b, at_origin);
}

// L = max l(B) over B in B(r); one representative per translation class
// (the class member whose smallest point is the origin).
inline long long l_max(int nu, int r, const SearchBudget& budget = {}) {
  if (nu < 1 || r < 1) throw invalid_input("l_max: need nu >= 1 and r >= 1");
  const Point o = origin(nu);
  const auto at_origin = enumerate_sets_containing(o, r, budget);
  long long best = 0;
  for (const auto& c : at_origin) {
    if (c.points().pts().front() != o) continue;  // not the class representative
    best = std::max(best, detail::l_factor_with_base(c, at_origin));
  }
  return best;
}

// 50 L (8 nu)^{2r}, exact; lambda0 is its reciprocal.
inline long long lambda0_denominator(int nu, int r, const SearchBudget& budget = {}) {
  const std::uint64_t L = static_cast<std::uint64_t>(l_max(nu, r, budget));
  const std::uint64_t p = detail::pow_u64(static_cast<std::uint64_t>(8 * nu),
                                          static_cast<unsigned>(2 * r));
  const std::uint64_t den = 50 * L * p;
  if (L != 0 && den / (50 * L) != p)
    throw resource_limit("lambda0_denominator: overflow");
  return static_cast<long long>(den);
}

inline double lambda0(int nu, int r, const SearchBudget& budget = {}) {
  return 1.0 / static_cast<double>(lambda0_denominator(nu, r, budget));
}

struct LemmaCheck {
  std::string lemma;
  std::string params;
  long long measured = 0;
  long long bound = 0;
  bool pass = false;
};

// Exhaustive count of closed tracks (t0, ..., t_n) with t_n = t0, against
// the (2 nu)^{n-1} bound.
inline LemmaCheck verify_track_count(int nu, int n, const Point& t0,
                                     const SearchBudget& budget = {}) {
  if (n <= 1) throw invalid_input("verify_track_count: need n > 1");
  if (static_cast<int>(t0.size()) != nu)
    throw invalid_input("verify_track_count: t0 has wrong dimension");
  if (detail::pow_u64(static_cast<std::uint64_t>(2 * nu),
                      static_cast<unsigned>(n)) > budget.max_states)
    throw resource_limit("verify_track_count: enumeration budget exceeded");

  long long count = 0;
  Point p = t0;
  auto walk = [&](auto&& self, int depth) -> void {
    if (depth == n) {
      if (p == t0) ++count;
      return;
    }
    for (int d = 0; d < nu; ++d)
      for (int step : {-1, +1}) {
        p[d] += step;
        self(self, depth + 1);
        p[d] -= step;
      }
  };
  walk(walk, 0);

  const long long bound = static_cast<long long>(
      detail::pow_u64(static_cast<std::uint64_t>(2 * nu), static_cast<unsigned>(n - 1)));
  return {"track_count", "nu=" + std::to_string(nu) + ",n=" + std::to_string(n),
          count, bound, count <= bound};
}

// Numeric checks of the counting estimates behind the constant L:
//   - closed-track counts for 2 <= n <= max_track_n;
//   - at most 2^{2r-1} sets share one extended track pinned at t0;
//   - at most (4 nu)^{2r-1} sets contain t0;
//   - L <= (4 nu)^{2r-1} (r+1).
inline std::vector<LemmaCheck> verify_counting_lemmas(
    int nu, int r, int max_track_n, const SearchBudget& budget = {}) {
  std::vector<LemmaCheck> out;
  const Point o = origin(nu);
  for (int n = 2; n <= max_track_n; ++n)
    out.push_back(verify_track_count(nu, n, o, budget));

  const auto sets = enumerate_sets_containing(o, r, budget);
  {
    std::map<Track, long long> fibers;
    for (const auto& c : sets) ++fibers[extended_track_from(c, r, o, budget)];
    long long worst = 0;
    for (const auto& [tr, cnt] : fibers) worst = std::max(worst, cnt);
    const long long bound = static_cast<long long>(
        detail::pow_u64(2, static_cast<unsigned>(2 * r - 1)));
    out.push_back({"track_fiber", "nu=" + std::to_string(nu) + ",r=" + std::to_string(r),
                   worst, bound, worst <= bound});
  }
  {
    const long long bound = static_cast<long long>(detail::pow_u64(
        static_cast<std::uint64_t>(4 * nu), static_cast<unsigned>(2 * r - 1)));
    const long long count = static_cast<long long>(sets.size());
    out.push_back({"sets_at_point", "nu=" + std::to_string(nu) + ",r=" + std::to_string(r),
                   count, bound, count <= bound});
  }
  {
    const long long L = l_max(nu, r, budget);
    const long long bound = static_cast<long long>(
        detail::pow_u64(static_cast<std::uint64_t>(4 * nu),
                        static_cast<unsigned>(2 * r - 1)) *
        static_cast<std::uint64_t>(r + 1));
    out.push_back({"l_bound", "nu=" + std::to_string(nu) + ",r=" + std::to_string(r), L,
                   bound, L <= bound});
  }
  return out;
}

}  // namespace latgibbs
