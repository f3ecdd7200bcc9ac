#pragma once

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "effham/effective.hpp"

namespace effham {

using Polyline = std::vector<std::array<double, 2>>;

struct ContourSet {
  double level = 0.0;
  std::vector<Polyline> polylines;
};

namespace detail {

/// Edge key on the node lattice: horizontal edges (dir 0) go from (i,j) to
/// (i+1,j), vertical (dir 1) from (i,j) to (i,j+1). Both cells sharing an
/// edge compute the identical key, so stitching never compares floats.
struct EdgeKey {
  int i, j, dir;
  bool operator<(const EdgeKey& o) const {
    if (i != o.i) return i < o.i;
    if (j != o.j) return j < o.j;
    return dir < o.dir;
  }
  bool operator==(const EdgeKey& o) const { return i == o.i && j == o.j && dir == o.dir; }
};

}  // namespace detail

/// Marching squares on the p lattice with linear interpolation along cell
/// edges. Saddle cells are split by comparing the cell-center average
/// against the level. Polylines come out closed (first point repeated) or
/// terminated on the table boundary.
inline ContourSet contours_at(const EffectiveTable& t, double level) {
  ContourSet out;
  out.level = level;
  if (t.pg.dim != 2) throw std::invalid_argument("contours: 2-D tables only");
  const int n = t.pg.samples;
  auto val = [&](int i, int j) { return t.value[std::size_t(t.pg.index(i, j))]; };
  auto px = [&](int i) { return t.pg.axis_node(0, i); };
  auto py = [&](int j) { return t.pg.axis_node(1, j); };

  auto cut = [&](const detail::EdgeKey& e) -> std::array<double, 2> {
    const double a = val(e.i, e.j);
    const double b = e.dir == 0 ? val(e.i + 1, e.j) : val(e.i, e.j + 1);
    double s = (level - a) / (b - a);
    s = std::clamp(s, 0.0, 1.0);
    if (e.dir == 0) return {px(e.i) + s * (px(e.i + 1) - px(e.i)), py(e.j)};
    return {px(e.i), py(e.j) + s * (py(e.j + 1) - py(e.j))};
  };

  // collect crossing segments cell by cell
  std::vector<std::pair<detail::EdgeKey, detail::EdgeKey>> segs;
  for (int j = 0; j + 1 < n; ++j) {
    for (int i = 0; i + 1 < n; ++i) {
      const double v00 = val(i, j), v10 = val(i + 1, j), v01 = val(i, j + 1), v11 = val(i + 1, j + 1);
      int code = (v00 <= level ? 1 : 0) | (v10 <= level ? 2 : 0) | (v11 <= level ? 4 : 0) |
                 (v01 <= level ? 8 : 0);
      if (code == 0 || code == 15) continue;
      const detail::EdgeKey bottom{i, j, 0}, right{i + 1, j, 1}, top{i, j + 1, 0}, left{i, j, 1};
      auto add = [&](detail::EdgeKey a, detail::EdgeKey b) { segs.emplace_back(a, b); };
      switch (code) {
        case 1: case 14: add(left, bottom); break;
        case 2: case 13: add(bottom, right); break;
        case 3: case 12: add(left, right); break;
        case 4: case 11: add(right, top); break;
        case 6: case 9: add(bottom, top); break;
        case 7: case 8: add(left, top); break;
        case 5: case 10: {
          const bool center_in = 0.25 * (v00 + v10 + v01 + v11) <= level;
          const bool pair_bl = (code == 5) == center_in;  // connect corners through the center state
          if (pair_bl) {
            add(left, top);
            add(bottom, right);
          } else {
            add(left, bottom);
            add(right, top);
          }
          break;
        }
        default: break;
      }
    }
  }
  if (segs.empty()) return out;

  // stitch segments into polylines by shared edge keys
  std::multimap<detail::EdgeKey, std::size_t> by_end;
  std::vector<bool> used(segs.size(), false);
  for (std::size_t s = 0; s < segs.size(); ++s) {
    by_end.emplace(segs[s].first, s);
    by_end.emplace(segs[s].second, s);
  }
  auto degree = [&](const detail::EdgeKey& e) {
    auto [lo, hi] = by_end.equal_range(e);
    std::size_t d = 0;
    for (auto it = lo; it != hi; ++it) ++d;
    return d;
  };
  auto next_unused = [&](const detail::EdgeKey& e, std::size_t self) -> long {
    auto [lo, hi] = by_end.equal_range(e);
    for (auto it = lo; it != hi; ++it)
      if (!used[it->second] && it->second != self) return long(it->second);
    return -1;
  };

  auto trace = [&](std::size_t start, bool from_first) {
    Polyline line;
    detail::EdgeKey cur = from_first ? segs[start].first : segs[start].second;
    detail::EdgeKey nxt = from_first ? segs[start].second : segs[start].first;
    line.push_back(cut(cur));
    line.push_back(cut(nxt));
    used[start] = true;
    std::size_t cur_seg = start;
    for (;;) {
      long cand = next_unused(nxt, cur_seg);
      if (cand < 0) break;
      cur_seg = std::size_t(cand);
      used[cur_seg] = true;
      nxt = segs[cur_seg].first == nxt ? segs[cur_seg].second : segs[cur_seg].first;
      line.push_back(cut(nxt));
    }
    out.polylines.push_back(std::move(line));
  };

  // open chains first (boundary-terminated), then closed loops
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (used[s]) continue;
    if (degree(segs[s].first) == 1) trace(s, true);
    else if (degree(segs[s].second) == 1) trace(s, false);
  }
  for (std::size_t s = 0; s < segs.size(); ++s)
    if (!used[s]) trace(s, true);
  return out;
}

inline std::vector<ContourSet> contours(const EffectiveTable& t, const std::vector<double>& levels) {
  std::vector<ContourSet> out;
  out.reserve(levels.size());
  for (double l : levels) out.push_back(contours_at(t, l));
  return out;
}

}  // namespace effham
