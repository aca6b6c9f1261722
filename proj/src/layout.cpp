#include "atlas/layout.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <tuple>
#include <unordered_map>

#include "atlas/error.hpp"
#include "text_util.hpp"

namespace atlas {

namespace {

struct Item {
  bool isTopic;
  std::string id;
  std::size_t count;
  double radius;
};

}  // namespace

LayoutTree layout_hierarchy(const TopicHierarchy& thg, const OccupancyGraph& tog,
                            const LayoutOptions& options) {
  LayoutTree out;
  out.paddingRatio = options.paddingRatio;
  out.entityRadius = options.entityRadius;
  const double grow = 1.0 + options.paddingRatio;
  const int deepest = thg.max_depth();

  std::map<TopicId, std::vector<InstanceId>> residents;
  std::unordered_map<EntityId, std::vector<const InstanceNode*>> deepByEntity;
  if (auto it = tog.instances.find(deepest); it != tog.instances.end()) {
    for (const auto& inst : it->second) {
      residents[inst.topicId].push_back(inst.instanceId);
      deepByEntity[inst.entityId].push_back(&inst);
    }
  }

  // Instance totals per subtree, deepest topics first.
  std::map<TopicId, std::size_t> subtreeCount;
  std::vector<TopicId> bottomUp;
  for (int l = deepest; l >= 0; --l)
    for (const auto& id : thg.level(l)) bottomUp.push_back(id);
  for (const auto& id : bottomUp) {
    std::size_t n = residents.count(id) ? residents.at(id).size() : 0;
    for (const auto& child : thg.at(id).children) n += subtreeCount.at(child);
    subtreeCount[id] = n;
  }

  // Pack each topic in its own frame; remember child offsets from the centre.
  std::map<TopicId, double> radius;
  std::map<TopicId, Circled::Point> topicOffset;
  std::map<InstanceId, Circled::Point> instanceOffset;
  std::map<TopicId, std::vector<Item>> itemsOf;
  for (const auto& id : bottomUp) {
    std::vector<Item> items;
    for (const auto& child : thg.at(id).children)
      items.push_back({true, child, subtreeCount.at(child), radius.at(child)});
    if (auto it = residents.find(id); it != residents.end())
      for (const auto& inst : it->second) items.push_back({false, inst, 1, options.entityRadius});
    std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
      return std::tie(y.count, x.id) < std::tie(x.count, y.id);
    });
    if (items.empty()) {
      radius[id] = options.entityRadius * grow;
      continue;
    }
    std::vector<double> radii;
    for (const auto& item : items) radii.push_back(item.radius);
    const auto packed = pack_siblings<double>(radii);
    const auto enclosure = enclosing_circle<double>(packed, options.seed);
    radius[id] = enclosure.r * grow;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const Circled::Point offset = packed[i].center - enclosure.center;
      if (items[i].isTopic)
        topicOffset[items[i].id] = offset;
      else
        instanceOffset[items[i].id] = offset;
    }
  }

  // Absolute positions, top-down.
  out.perTopic[kRootTopic] = Circled(0.0, 0.0, radius.at(kRootTopic));
  out.worldRadius = radius.at(kRootTopic);
  for (auto it = bottomUp.rbegin(); it != bottomUp.rend(); ++it) {
    const auto& parent = out.perTopic.at(*it);
    for (const auto& child : thg.at(*it).children)
      out.perTopic[child] = Circled(parent.center + topicOffset.at(child), radius.at(child));
    if (auto res = residents.find(*it); res != residents.end())
      for (const auto& inst : res->second)
        out.perInstance[inst] = Circled(parent.center + instanceOffset.at(inst), options.entityRadius);
  }

  for (const auto& [level, instances] : tog.instances) {
    if (level == deepest) continue;
    for (const auto& inst : instances) {
      const InstanceNode* chosen = nullptr;
      for (const auto* deep : deepByEntity.at(inst.entityId)) {
        if (!thg.is_ancestor_or_self(inst.topicId, deep->topicId)) continue;
        if (!chosen || (deep->kind == InstanceKind::original && chosen->kind != InstanceKind::original))
          chosen = deep;
      }
      if (!chosen)
        throw Error(Errc::MissingLevel, "layout",
                    "instance " + inst.instanceId + " has no deepest-level counterpart");
      out.perInstance[inst.instanceId] = out.perInstance.at(chosen->instanceId);
    }
  }
  return out;
}

namespace {

void append_fixed(std::string& out, double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  out.append(buf, end);
}

void check_range(const ViewState& s) {
  if (!(s.lon >= -180.0 && s.lon <= 180.0) || !(s.lat >= -85.0 && s.lat <= 85.0) ||
      !(s.alt >= 0.0 && s.alt <= 1.0))
    throw Error(Errc::OutOfRange, "layout", "view state out of range");
}

}  // namespace

std::string encode_view(const ViewState& state) {
  check_range(state);
  std::string out = "lon=";
  append_fixed(out, state.lon);
  out += "&lat=";
  append_fixed(out, state.lat);
  out += "&alt=";
  append_fixed(out, state.alt);
  return out;
}

ViewState decode_view(std::string_view fragment) {
  if (!fragment.empty() && fragment.front() == '#') fragment.remove_prefix(1);
  ViewState s;
  bool seen[3] = {false, false, false};
  for (auto part : detail::split(fragment, '&')) {
    auto eq = part.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::MalformedFragment, "layout", "expected key=value in '" + std::string(part) + "'");
    auto key = part.substr(0, eq);
    auto value = part.substr(eq + 1);
    double v = 0.0;
    auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc() || end != value.data() + value.size() || !std::isfinite(v))
      throw Error(Errc::MalformedFragment, "layout", "bad number for '" + std::string(key) + "'");
    int slot = key == "lon" ? 0 : key == "lat" ? 1 : key == "alt" ? 2 : -1;
    if (slot < 0 || seen[slot])
      throw Error(Errc::MalformedFragment, "layout", "unexpected key '" + std::string(key) + "'");
    seen[slot] = true;
    (slot == 0 ? s.lon : slot == 1 ? s.lat : s.alt) = v;
  }
  if (!seen[0] || !seen[1] || !seen[2])
    throw Error(Errc::MalformedFragment, "layout", "fragment needs lon, lat and alt");
  check_range(s);
  return s;
}

ViewState project(const Circled::Point& p, double worldRadius, double alt) {
  return {180.0 * p.x() / worldRadius, 85.0 * p.y() / worldRadius, alt};
}

Circled::Point unproject(const ViewState& state, double worldRadius) {
  return {state.lon / 180.0 * worldRadius, state.lat / 85.0 * worldRadius};
}

}  // namespace atlas
