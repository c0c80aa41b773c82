#include "recast/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "recast/error.hpp"

namespace recast {

namespace {

template <typename E, std::size_t N>
struct EnumNames {
  std::array<std::pair<E, std::string_view>, N> entries;

  std::string_view name(E e) const {
    for (const auto& [k, v] : entries)
      if (k == e) return v;
    return "?";
  }

  std::optional<E> parse(std::string_view s) const {
    for (const auto& [k, v] : entries) {
      if (v.size() != s.size()) continue;
      bool same = true;
      for (std::size_t i = 0; i < s.size() && same; ++i)
        same = std::tolower(static_cast<unsigned char>(s[i])) == std::tolower(static_cast<unsigned char>(v[i]));
      if (same) return k;
    }
    return std::nullopt;
  }
};

template <typename E, typename... P>
constexpr auto names(P... p) {
  return EnumNames<E, sizeof...(P)>{{{p...}}};
}

using P = std::string_view;

constexpr auto kCoordinate = names<CoordinateKind>(std::pair{CoordinateKind::cartesian, P("cartesian")},
                                                   std::pair{CoordinateKind::polar, P("polar")});
constexpr auto kMark = names<MarkType>(std::pair{MarkType::circle, P("circle")}, std::pair{MarkType::arc, P("arc")},
                                       std::pair{MarkType::rectangle, P("rectangle")},
                                       std::pair{MarkType::line, P("line")}, std::pair{MarkType::band, P("band")},
                                       std::pair{MarkType::area, P("area")});
constexpr auto kDimension = names<Dimension>(std::pair{Dimension::x, P("x")}, std::pair{Dimension::y, P("y")},
                                             std::pair{Dimension::radius, P("radius")},
                                             std::pair{Dimension::angle, P("angle")});
constexpr auto kLink = names<LinkMarkType>(std::pair{LinkMarkType::no_link, P("no_link")},
                                           std::pair{LinkMarkType::group_type, P("group_type")},
                                           std::pair{LinkMarkType::node_link, P("node_link")});
constexpr auto kDataType = names<DataType>(std::pair{DataType::list_1d, P("1D_list")},
                                           std::pair{DataType::matrix_2d, P("2D_matrix")},
                                           std::pair{DataType::list_2d, P("2D_list")});
constexpr auto kStack = names<StackDirection>(std::pair{StackDirection::min, P("min")},
                                              std::pair{StackDirection::middle, P("middle")},
                                              std::pair{StackDirection::max, P("max")});
constexpr auto kAnchor = names<Anchor>(std::pair{Anchor::min, P("min")}, std::pair{Anchor::middle, P("middle")},
                                       std::pair{Anchor::max, P("max")},
                                       std::pair{Anchor::stacking_decided, P("stacking_decided")});
constexpr auto kDistribution = names<AnchorDistribution>(
    std::pair{AnchorDistribution::fixed_value, P("fixed_value")},
    std::pair{AnchorDistribution::uniform_interval, P("uniform_interval")},
    std::pair{AnchorDistribution::flexible, P("flexible")});
constexpr auto kScale = names<Scale>(std::pair{Scale::fix, P("fix")}, std::pair{Scale::linear, P("linear")},
                                     std::pair{Scale::ordinal_primary, P("ordinal_primary")},
                                     std::pair{Scale::ordinal_secondary, P("ordinal_secondary")},
                                     std::pair{Scale::categorical, P("categorical")});
constexpr auto kLineType = names<LineType>(std::pair{LineType::curve, P("curve")},
                                           std::pair{LineType::straight, P("straight")});
constexpr auto kStyle = names<StyleKey>(std::pair{StyleKey::stroke_width, P("stroke_width")},
                                        std::pair{StyleKey::opacity, P("opacity")},
                                        std::pair{StyleKey::fill, P("fill")}, std::pair{StyleKey::stroke, P("stroke")},
                                        std::pair{StyleKey::rx, P("rx")}, std::pair{StyleKey::ry, P("ry")});

}  // namespace

std::string_view to_string(CoordinateKind v) { return kCoordinate.name(v); }
std::string_view to_string(MarkType v) { return kMark.name(v); }
std::string_view to_string(Dimension v) { return kDimension.name(v); }
std::string_view to_string(LinkMarkType v) { return kLink.name(v); }
std::string_view to_string(DataType v) { return kDataType.name(v); }
std::string_view to_string(StackDirection v) { return kStack.name(v); }
std::string_view to_string(Anchor v) { return kAnchor.name(v); }
std::string_view to_string(AnchorDistribution v) { return kDistribution.name(v); }
std::string_view to_string(Scale v) { return kScale.name(v); }
std::string_view to_string(LineType v) { return kLineType.name(v); }
std::string_view to_string(StyleKey v) { return kStyle.name(v); }

std::optional<CoordinateKind> coordinate_kind_from(std::string_view s) { return kCoordinate.parse(s); }
std::optional<MarkType> mark_type_from(std::string_view s) { return kMark.parse(s); }
std::optional<Dimension> dimension_from(std::string_view s) { return kDimension.parse(s); }
std::optional<LinkMarkType> link_mark_type_from(std::string_view s) {
  if (auto v = kLink.parse(s)) return v;
  if (s == "node_link_type") return LinkMarkType::node_link;
  return std::nullopt;
}
std::optional<DataType> data_type_from(std::string_view s) { return kDataType.parse(s); }
std::optional<StackDirection> stack_direction_from(std::string_view s) { return kStack.parse(s); }
std::optional<Anchor> anchor_from(std::string_view s) { return kAnchor.parse(s); }
std::optional<AnchorDistribution> anchor_distribution_from(std::string_view s) { return kDistribution.parse(s); }
std::optional<Scale> scale_from(std::string_view s) { return kScale.parse(s); }
std::optional<LineType> line_type_from(std::string_view s) { return kLineType.parse(s); }
std::optional<StyleKey> style_key_from(std::string_view s) { return kStyle.parse(s); }

bool is_polar_dimension(Dimension d) { return d == Dimension::radius || d == Dimension::angle; }

bool is_link_capable(MarkType m) { return m == MarkType::line || m == MarkType::band || m == MarkType::area; }

std::vector<int> DataStructure::group_sizes() const {
  const int groups = std::max(primary.number, 0);
  if (data_type == DataType::list_1d || !secondary) return std::vector<int>(groups, 1);
  if (const int* n = std::get_if<int>(&secondary->number)) return std::vector<int>(groups, std::max(*n, 0));
  const auto& arr = std::get<std::vector<int>>(secondary->number);
  std::vector<int> out(groups, 0);
  for (int g = 0; g < groups && g < static_cast<int>(arr.size()); ++g) out[g] = std::max(arr[g], 0);
  return out;
}

int DataStructure::total_items() const {
  const auto sizes = group_sizes();
  return std::accumulate(sizes.begin(), sizes.end(), 0);
}

bool DataStructure::uses(Dimension d) const {
  if (std::find(primary.dimension.begin(), primary.dimension.end(), d) != primary.dimension.end()) return true;
  return secondary && secondary->dimension == d;
}

int DataStructure::count_along(Dimension d) const {
  const auto sizes = group_sizes();
  const int max_secondary = sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
  const bool two_d = data_type != DataType::list_1d && secondary.has_value();
  if (std::find(primary.dimension.begin(), primary.dimension.end(), d) != primary.dimension.end())
    return primary.number;
  return two_d ? max_secondary : primary.number;
}

const ContainerNode* find_node(const ContainerNode& root, const ContainerId& id) {
  if (root.id == id) return &root;
  for (const auto& c : root.children) {
    if (const auto* hit = find_node(c, id)) return hit;
  }
  return nullptr;
}

ContainerNode* find_node(ContainerNode& root, const ContainerId& id) {
  return const_cast<ContainerNode*>(find_node(static_cast<const ContainerNode&>(root), id));
}

const ContainerNode& find_container(const DslDocument& doc, const ContainerId& id) {
  if (const auto* n = find_node(doc.root, id)) return *n;
  throw NotFoundError("container not found: " + id.str());
}

const ContainerNode* find_parent(const ContainerNode& root, const ContainerId& id) {
  for (const auto& c : root.children) {
    if (c.id == id) return &root;
    if (const auto* hit = find_parent(c, id)) return hit;
  }
  return nullptr;
}

std::vector<ContainerId> spec_owner_ids(const ContainerNode& root) {
  std::vector<ContainerId> out;
  visit_preorder(root, [&](const ContainerNode& n, const ContainerNode*) {
    if (n.is_leaf || n.id.is_template()) out.push_back(n.id);
  });
  return out;
}

std::optional<ContainerId> enclosing_template(const ContainerId& id) {
  ContainerId cur = id;
  while (!cur.empty()) {
    if (cur.is_template()) return cur;
    cur = cur.parent();
  }
  return std::nullopt;
}

}  // namespace recast
