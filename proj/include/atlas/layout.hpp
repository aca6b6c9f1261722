#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "atlas/circle_pack.hpp"
#include "atlas/tog.hpp"

namespace atlas {

struct LayoutTree {
  std::map<TopicId, Circled> perTopic;
  std::map<InstanceId, Circled> perInstance;
  double worldRadius = 0.0;
  double paddingRatio = 0.08;
  double entityRadius = 1.0;

  bool operator==(const LayoutTree&) const = default;
};

struct LayoutOptions {
  double paddingRatio = 0.08;
  double entityRadius = 1.0;
  std::uint64_t seed = 0x5eed;  // enclosing-circle shuffle
};

/// Nested circle packing, computed bottom-up. A topic packs its child topics
/// together with the deepest-level instances that sit directly in it, ordered
/// by descending instance count then id; its radius is the enclosing radius
/// scaled by (1 + padding). The root is centred on the origin.
///
/// Instances above the deepest level reuse the circle of one of the entity's
/// deepest instances inside their topic (the original when it qualifies).
LayoutTree layout_hierarchy(const TopicHierarchy& thg, const OccupancyGraph& tog,
                            const LayoutOptions& options = {});

struct ViewState {
  double lon = 0.0;
  double lat = 0.0;
  double alt = 1.0;

  bool operator==(const ViewState&) const = default;
};

/// "lon=<f6>&lat=<f6>&alt=<f6>", locale independent.
std::string encode_view(const ViewState& state);

/// Accepts an optional leading '#' and keys in any order.
ViewState decode_view(std::string_view fragment);

/// Linear map between layout coordinates and lon/lat.
ViewState project(const Circled::Point& p, double worldRadius, double alt = 1.0);
Circled::Point unproject(const ViewState& state, double worldRadius);

}  // namespace atlas
