#include "atlas/topography.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "atlas/error.hpp"

namespace atlas {

namespace {

constexpr double kKernelCutoff = 6.0;  // in bandwidths

/// Index range of lattice samples within [lo, hi] along one axis.
std::pair<Eigen::Index, Eigen::Index> sample_range(double lo, double hi, double worldRadius,
                                                   Eigen::Index n) {
  const double step = 2.0 * worldRadius / double(n - 1);
  auto first = static_cast<Eigen::Index>(std::ceil((lo + worldRadius) / step));
  auto last = static_cast<Eigen::Index>(std::floor((hi + worldRadius) / step));
  return {std::max<Eigen::Index>(first, 0), std::min<Eigen::Index>(last, n - 1)};
}

}  // namespace

ElevationGrid elevation_grid(const LayoutTree& layout, const TopicHierarchy& thg,
                             const OccupancyGraph& tog, const ElevationOptions& options) {
  if (options.width < 2 || options.height < 2)
    throw Error(Errc::OutOfRange, "topography", "grid needs at least 2x2 samples");
  ElevationGrid grid;
  grid.worldRadius = layout.worldRadius > 0 ? layout.worldRadius : 1.0;
  const Eigen::Index w = options.width, h = options.height;
  GridValues nest = GridValues::Zero(h, w);
  GridValues kde = GridValues::Zero(h, w);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> land =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Constant(h, w, false);
  grid.values = GridValues::Zero(h, w);

  auto rasterise = [&](const Circled& c, auto&& visit) {
    auto [r0, r1] = sample_range(c.y() - c.r, c.y() + c.r, grid.worldRadius, h);
    auto [c0, c1] = sample_range(c.x() - c.r, c.x() + c.r, grid.worldRadius, w);
    for (Eigen::Index i = r0; i <= r1; ++i)
      for (Eigen::Index j = c0; j <= c1; ++j) {
        const Eigen::Vector2d p(grid.x_of(double(j)), grid.y_of(double(i)));
        const double d2 = (p - c.center).squaredNorm();
        if (d2 <= c.r * c.r) visit(i, j, d2);
      }
  };

  for (const auto& [id, node] : thg.nodes()) {
    if (node.level == 0) continue;
    const auto& circle = layout.perTopic.at(id);
    rasterise(circle, [&](Eigen::Index i, Eigen::Index j, double) {
      nest(i, j) += 1.0;
      if (node.level == 1) land(i, j) = true;
    });
  }

  const double bw = options.bandwidth * layout.entityRadius;
  if (auto it = tog.instances.find(thg.max_depth()); it != tog.instances.end() && bw > 0) {
    for (const auto& inst : it->second) {
      const Circled reach(layout.perInstance.at(inst.instanceId).center, kKernelCutoff * bw);
      rasterise(reach, [&](Eigen::Index i, Eigen::Index j, double d2) {
        kde(i, j) += std::exp(-d2 / (2.0 * bw * bw));
      });
    }
  }

  const int depth = thg.max_depth();
  const double kdeMax = kde.maxCoeff();
  if (depth > 0) grid.values += options.nestWeight / double(depth) * nest;
  if (kdeMax > 0) grid.values += options.densityWeight / kdeMax * kde;
  grid.values = land.select(grid.values, GridValues::Zero(h, w));
  const double top = grid.values.maxCoeff();
  if (top > 0) grid.values /= top;
  return grid;
}

ColorScale default_color_scale() {
  ColorScale s;
  s.seaLevel = 0.05;
  s.stops = {
      {0.00, Rgb(0.11, 0.29, 0.53)},  // deep water
      {0.05, Rgb(0.56, 0.76, 0.90)},  // shallows
      {0.05, Rgb(0.64, 0.80, 0.55)},  // lowland
      {0.30, Rgb(0.85, 0.88, 0.60)},
      {0.60, Rgb(0.80, 0.66, 0.45)},
      {0.85, Rgb(0.62, 0.48, 0.38)},
      {1.00, Rgb(0.97, 0.97, 0.97)},  // peaks
  };
  return s;
}

void validate(const ColorScale& scale) {
  const auto& st = scale.stops;
  if (st.size() < 2 || st.front().elevation != 0.0 || st.back().elevation != 1.0)
    throw Error(Errc::OutOfRange, "topography", "colour stops must span [0, 1]");
  bool seaStop = false;
  for (std::size_t i = 0; i < st.size(); ++i) {
    if (i > 0 && st[i].elevation < st[i - 1].elevation)
      throw Error(Errc::OutOfRange, "topography", "colour stops must ascend");
    if (i > 1 && st[i].elevation == st[i - 2].elevation)
      throw Error(Errc::OutOfRange, "topography", "at most two stops may share an elevation");
    seaStop = seaStop || st[i].elevation == scale.seaLevel;
  }
  if (!seaStop) throw Error(Errc::OutOfRange, "topography", "sea level must be a stop boundary");
}

Rgb colorize(double elevation, const ColorScale& scale) {
  if (!(elevation >= 0.0 && elevation <= 1.0))
    throw Error(Errc::OutOfRange, "topography", "elevation outside [0, 1]");
  const auto& st = scale.stops;
  // Last stop at or below the elevation; for elevation == sea level this is the
  // land stop, below it the water ramp applies.
  std::size_t i = 0;
  while (i + 1 < st.size() && st[i + 1].elevation <= elevation) ++i;
  if (i + 1 == st.size()) return st[i].color;
  const double span = st[i + 1].elevation - st[i].elevation;
  const double t = span > 0 ? (elevation - st[i].elevation) / span : 0.0;
  return st[i].color + t * (st[i + 1].color - st[i].color);
}

std::string to_hex(const Rgb& color) {
  char buf[8];
  auto channel = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", channel(color.x()), channel(color.y()),
                channel(color.z()));
  return buf;
}

std::vector<std::vector<Polyline>> contours_in_world(const ContourSet& contours,
                                                     const ElevationGrid& grid) {
  std::vector<std::vector<Polyline>> out;
  for (const auto& level : contours.polylines) {
    auto& lines = out.emplace_back();
    for (const auto& line : level) {
      Polyline world;
      world.closed = line.closed;
      for (const auto& p : line.points) world.points.push_back(grid.to_world(p));
      lines.push_back(std::move(world));
    }
  }
  return out;
}

std::string render_svg(const LayoutTree& layout, const TopicHierarchy& thg,
                       const OccupancyGraph& tog, const ElevationGrid& grid,
                       const ContourSet& contours, const ColorScale& scale) {
  const double r = grid.worldRadius;
  char buf[256];
  std::string svg;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.6f %.6f %.6f %.6f\">\n",
                -r, -r, 2 * r, 2 * r);
  svg += buf;
  svg += "<rect x=\"" + std::to_string(-r) + "\" y=\"" + std::to_string(-r) + "\" width=\"" +
         std::to_string(2 * r) + "\" height=\"" + std::to_string(2 * r) + "\" fill=\"" +
         to_hex(colorize(0.0, scale)) + "\"/>\n";
  // Flip y so that north is up.
  svg += "<g transform=\"scale(1,-1)\">\n";
  const auto world = contours_in_world(contours, grid);
  const double stroke = r / 400.0;
  for (std::size_t k = 0; k < world.size(); ++k) {
    const auto colour = to_hex(colorize(contours.isoLevels[k], scale));
    for (const auto& line : world[k]) {
      std::string d;
      for (std::size_t p = 0; p < line.points.size(); ++p) {
        std::snprintf(buf, sizeof buf, "%s%.4f %.4f", p == 0 ? "M" : " L", line.points[p].x(),
                      line.points[p].y());
        d += buf;
      }
      if (line.closed) d += " Z";
      std::snprintf(buf, sizeof buf, "\" fill=\"none\" stroke=\"%s\" stroke-width=\"%.4f\"/>\n",
                    colour.c_str(), stroke);
      svg += "<path d=\"" + d + buf;
    }
  }
  for (const auto& [id, node] : thg.nodes()) {
    if (node.level == 0) continue;
    const auto& c = layout.perTopic.at(id);
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.4f\" cy=\"%.4f\" r=\"%.4f\" fill=\"none\" stroke=\"#33415c\" "
                  "stroke-opacity=\"0.5\" stroke-width=\"%.4f\"/>\n",
                  c.x(), c.y(), c.r, stroke);
    svg += buf;
  }
  if (auto it = tog.instances.find(thg.max_depth()); it != tog.instances.end()) {
    for (const auto& inst : it->second) {
      const auto& c = layout.perInstance.at(inst.instanceId);
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.4f\" cy=\"%.4f\" r=\"%.4f\" fill=\"%s\"/>\n",
                    c.x(), c.y(), c.r * 0.4,
                    inst.kind == InstanceKind::original ? "#2e7d32" : "#1565c0");
      svg += buf;
    }
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

}  // namespace atlas
