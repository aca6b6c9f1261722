#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace atlas {

struct Polyline {
  /// Vertices in grid coordinates: x = column, y = row. A closed polyline does
  /// not repeat its first vertex.
  std::vector<Eigen::Vector2d> points;
  bool closed = false;

  bool operator==(const Polyline&) const = default;
};

struct ContourSet {
  std::vector<double> isoLevels;
  std::vector<std::vector<Polyline>> polylines;  // one list per iso level

  bool operator==(const ContourSet&) const = default;
};

namespace detail {

// Cell corners: 0 = (i, j), 1 = (i, j+1), 2 = (i+1, j+1), 3 = (i+1, j).
// Cell edges:   0 = top (0-1), 1 = right (1-2), 2 = bottom (3-2), 3 = left (0-3).
// Entry: up to two segments, each a pair of cell edges; -1 terminates.
inline constexpr std::array<std::array<int, 4>, 16> kSegmentTable = {{
    {-1, -1, -1, -1},  // 0
    {3, 0, -1, -1},    // 1
    {0, 1, -1, -1},    // 2
    {3, 1, -1, -1},    // 3
    {1, 2, -1, -1},    // 4
    {-1, -1, -1, -1},  // 5: saddle
    {0, 2, -1, -1},    // 6
    {2, 3, -1, -1},    // 7
    {2, 3, -1, -1},    // 8
    {0, 2, -1, -1},    // 9
    {-1, -1, -1, -1},  // 10: saddle
    {1, 2, -1, -1},    // 11
    {1, 3, -1, -1},    // 12
    {0, 1, -1, -1},    // 13
    {3, 0, -1, -1},    // 14
    {-1, -1, -1, -1},  // 15
}};

/// Saddle segments given whether the cell centre (corner average) is above.
/// Case 5 has corners 0 and 2 above; case 10 has corners 1 and 3 above. When the
/// centre agrees with the above corners they join, cutting off the others.
inline std::array<int, 4> saddle_segments(int caseIndex, bool centreAbove) {
  const bool cutOdd = (caseIndex == 5) == centreAbove;
  return cutOdd ? std::array<int, 4>{0, 1, 2, 3} : std::array<int, 4>{3, 0, 1, 2};
}

}  // namespace detail

/// Marching squares over a row-major scalar field. Crossing points are linearly
/// interpolated along cell edges, saddles are resolved by the centre average,
/// and segments are chained into polylines: open ones (which end on the grid
/// boundary) first, then closed loops.
template <typename Derived>
std::vector<Polyline> trace_iso(const Eigen::DenseBase<Derived>& grid, double iso) {
  const Eigen::Index rows = grid.rows();
  const Eigen::Index cols = grid.cols();
  std::vector<Polyline> out;
  if (rows < 2 || cols < 2) return out;

  const auto hEdges = rows * (cols - 1);
  auto horizontal = [&](Eigen::Index i, Eigen::Index j) { return i * (cols - 1) + j; };
  auto vertical = [&](Eigen::Index i, Eigen::Index j) { return hEdges + i * cols + j; };
  auto above = [&](Eigen::Index i, Eigen::Index j) { return double(grid(i, j)) > iso; };

  auto edge_point = [&](std::int64_t edge) -> Eigen::Vector2d {
    Eigen::Index i0, j0, i1, j1;
    if (edge < hEdges) {
      i0 = i1 = edge / (cols - 1);
      j0 = edge % (cols - 1);
      j1 = j0 + 1;
    } else {
      const auto e = edge - hEdges;
      i0 = e / cols;
      i1 = i0 + 1;
      j0 = j1 = e % cols;
    }
    const double v0 = double(grid(i0, j0));
    const double v1 = double(grid(i1, j1));
    const double t = (iso - v0) / (v1 - v0);
    return {double(j0) + t * double(j1 - j0), double(i0) + t * double(i1 - i0)};
  };

  std::vector<std::array<std::int64_t, 2>> segments;
  for (Eigen::Index i = 0; i + 1 < rows; ++i) {
    for (Eigen::Index j = 0; j + 1 < cols; ++j) {
      const int c = int(above(i, j)) | int(above(i, j + 1)) << 1 | int(above(i + 1, j + 1)) << 2 |
                    int(above(i + 1, j)) << 3;
      if (c == 0 || c == 15) continue;
      const std::int64_t edges[4] = {horizontal(i, j), vertical(i, j + 1), horizontal(i + 1, j),
                                     vertical(i, j)};
      std::array<int, 4> seg = detail::kSegmentTable[static_cast<std::size_t>(c)];
      if (c == 5 || c == 10) {
        const double centre =
            (double(grid(i, j)) + double(grid(i, j + 1)) + double(grid(i + 1, j + 1)) +
             double(grid(i + 1, j))) / 4.0;
        seg = detail::saddle_segments(c, centre > iso);
      }
      for (int s = 0; s < 4 && seg[static_cast<std::size_t>(s)] >= 0; s += 2)
        segments.push_back({edges[seg[static_cast<std::size_t>(s)]], edges[seg[static_cast<std::size_t>(s) + 1]]});
    }
  }

  std::map<std::int64_t, std::vector<std::size_t>> incident;
  for (std::size_t s = 0; s < segments.size(); ++s)
    for (auto e : segments[s]) incident[e].push_back(s);

  std::vector<bool> used(segments.size(), false);
  auto walk = [&](std::int64_t startEdge, std::size_t firstSeg, bool closed) {
    Polyline line;
    line.closed = closed;
    std::int64_t edge = startEdge;
    std::size_t seg = firstSeg;
    line.points.push_back(edge_point(edge));
    while (true) {
      used[seg] = true;
      edge = segments[seg][0] == edge ? segments[seg][1] : segments[seg][0];
      if (closed && edge == startEdge) break;
      line.points.push_back(edge_point(edge));
      const auto& inc = incident.at(edge);
      std::size_t nextSeg = seg;
      for (auto cand : inc)
        if (!used[cand]) nextSeg = cand;
      if (nextSeg == seg) break;
      seg = nextSeg;
    }
    out.push_back(std::move(line));
  };

  for (const auto& [edge, segs] : incident)
    if (segs.size() == 1 && !used[segs.front()]) walk(edge, segs.front(), false);
  for (std::size_t s = 0; s < segments.size(); ++s)
    if (!used[s]) walk(std::min(segments[s][0], segments[s][1]), s, true);
  return out;
}

template <typename Derived>
ContourSet extract_contours(const Eigen::DenseBase<Derived>& grid, std::span<const double> isoLevels) {
  ContourSet set;
  set.isoLevels.assign(isoLevels.begin(), isoLevels.end());
  for (double iso : isoLevels) set.polylines.push_back(trace_iso(grid, iso));
  return set;
}

/// 0.05, 0.15, ..., 0.95
inline std::vector<double> default_iso_levels() {
  std::vector<double> out;
  for (int k = 0; k < 10; ++k) out.push_back(0.05 + 0.1 * k);
  return out;
}

/// Bilinear interpolation of the grid at (x = column, y = row).
template <typename Derived>
double bilinear(const Eigen::DenseBase<Derived>& grid, const Eigen::Vector2d& p) {
  const Eigen::Index j = std::min<Eigen::Index>(static_cast<Eigen::Index>(p.x()), grid.cols() - 2);
  const Eigen::Index i = std::min<Eigen::Index>(static_cast<Eigen::Index>(p.y()), grid.rows() - 2);
  const double fx = p.x() - double(j);
  const double fy = p.y() - double(i);
  return (1 - fy) * ((1 - fx) * double(grid(i, j)) + fx * double(grid(i, j + 1))) +
         fy * ((1 - fx) * double(grid(i + 1, j)) + fx * double(grid(i + 1, j + 1)));
}

}  // namespace atlas
