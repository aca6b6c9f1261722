#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "atlas/layout.hpp"
#include "atlas/marching_squares.hpp"

namespace atlas {

using GridValues = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Samples on a square lattice spanning [-worldRadius, worldRadius]^2,
/// row i at y_i and column j at x_j, both endpoints included.
struct ElevationGrid {
  double worldRadius = 1.0;
  GridValues values;

  Eigen::Index width() const { return values.cols(); }
  Eigen::Index height() const { return values.rows(); }
  double x_of(double col) const { return -worldRadius + 2.0 * worldRadius * col / double(width() - 1); }
  double y_of(double row) const { return -worldRadius + 2.0 * worldRadius * row / double(height() - 1); }
  Eigen::Vector2d to_world(const Eigen::Vector2d& gridPoint) const {
    return {x_of(gridPoint.x()), y_of(gridPoint.y())};
  }

  bool operator==(const ElevationGrid& o) const {
    return worldRadius == o.worldRadius && values.rows() == o.values.rows() &&
           values.cols() == o.values.cols() && values == o.values;
  }
};

struct ElevationOptions {
  int width = 512;
  int height = 512;
  /// Kernel bandwidth in multiples of the entity radius.
  double bandwidth = 1.5;
  double nestWeight = 0.5;
  double densityWeight = 0.5;
};

/// E = nestWeight * nesting / maxDepth + densityWeight * kde / max(kde), where
/// nesting counts the topic circles over a point and kde sums Gaussian kernels
/// on the deepest-level instances. Points outside every top-level topic are
/// sea (0). The grid is finally scaled so its maximum is 1.
ElevationGrid elevation_grid(const LayoutTree& layout, const TopicHierarchy& thg,
                             const OccupancyGraph& tog, const ElevationOptions& options = {});

using Rgb = Eigen::Vector3d;  // channels in [0, 1]

struct ColorStop {
  double elevation;
  Rgb color;

  bool operator==(const ColorStop&) const = default;
};

/// Stops ascend from 0 to 1. Sea level carries two stops: the top of the water
/// ramp and the bottom of the land ramp, in that order.
struct ColorScale {
  double seaLevel = 0.05;
  std::vector<ColorStop> stops;

  bool operator==(const ColorScale&) const = default;
};

ColorScale default_color_scale();
void validate(const ColorScale& scale);

Rgb colorize(double elevation, const ColorScale& scale);
std::string to_hex(const Rgb& color);

/// Contours converted to world coordinates.
std::vector<std::vector<Polyline>> contours_in_world(const ContourSet& contours,
                                                     const ElevationGrid& grid);

/// Standalone SVG of the contours over the topic circles and instances of the
/// deepest level.
std::string render_svg(const LayoutTree& layout, const TopicHierarchy& thg,
                       const OccupancyGraph& tog, const ElevationGrid& grid,
                       const ContourSet& contours, const ColorScale& scale);

}  // namespace atlas
