#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "latgibbs/errors.hpp"

namespace latgibbs {

using Coord = int;
// One lattice site; size() is the dimension nu. Points compare
// lexicographically on coordinates, which is the canonical order used for
// every "first in lexicographic order" choice downstream.
using Point = std::vector<Coord>;

inline int l1_distance(const Point& s, const Point& t) {
  if (s.size() != t.size())
    throw invalid_input("l1_distance: dimension mismatch");
  int d = 0;
  for (std::size_t i = 0; i < s.size(); ++i) d += std::abs(s[i] - t[i]);
  return d;
}

inline Point origin(int nu) { return Point(static_cast<std::size_t>(nu), 0); }

// Finite set of distinct sites, kept sorted in canonical order.
class Region {
 public:
  Region() = default;
  Region(std::initializer_list<Point> pts) : Region(std::vector<Point>(pts)) {}
  explicit Region(std::vector<Point> pts) : pts_(std::move(pts)) {
    for (const auto& p : pts_) {
      if (p.size() != pts_.front().size())
        throw invalid_input("Region: mixed dimensions");
      if (p.empty()) throw invalid_input("Region: zero-dimensional point");
    }
    std::sort(pts_.begin(), pts_.end());
    pts_.erase(std::unique(pts_.begin(), pts_.end()), pts_.end());
  }

  const std::vector<Point>& pts() const { return pts_; }
  std::size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }
  int dim() const { return pts_.empty() ? 0 : static_cast<int>(pts_.front().size()); }

  bool contains(const Point& p) const {
    return std::binary_search(pts_.begin(), pts_.end(), p);
  }

  bool intersects(const Region& other) const {
    for (const auto& p : pts_)
      if (other.contains(p)) return true;
    return false;
  }

  Region unioned(const Region& other) const {
    std::vector<Point> all = pts_;
    all.insert(all.end(), other.pts_.begin(), other.pts_.end());
    return Region(std::move(all));
  }

  bool is_subset_of(const Region& other) const {
    for (const auto& p : pts_)
      if (!other.contains(p)) return false;
    return true;
  }

  friend bool operator==(const Region& a, const Region& b) { return a.pts_ == b.pts_; }
  friend bool operator!=(const Region& a, const Region& b) { return !(a == b); }
  friend bool operator<(const Region& a, const Region& b) { return a.pts_ < b.pts_; }

 private:
  std::vector<Point> pts_;
};

// Lambda_N = {t : |t_i| <= N for all i}, points in canonical order.
inline Region cube(int N, int nu) {
  if (N < 0) throw invalid_input("cube: N must be nonnegative");
  if (nu < 1) throw invalid_input("cube: nu must be positive");
  std::vector<Point> pts;
  pts.reserve(1);
  Point p(static_cast<std::size_t>(nu), -N);
  while (true) {
    pts.push_back(p);
    int i = nu - 1;
    while (i >= 0 && p[i] == N) p[i--] = -N;
    if (i < 0) break;
    ++p[i];
  }
  return Region(std::move(pts));
}

inline int distance_to_origin(const Region& q) {
  if (q.empty()) throw invalid_input("distance_to_origin: empty region");
  const Point o = origin(q.dim());
  int best = l1_distance(q.pts().front(), o);
  for (const auto& p : q.pts()) best = std::min(best, l1_distance(p, o));
  return best;
}

}  // namespace latgibbs
