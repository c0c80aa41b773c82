#pragma once

// Container-tree DSL: the in-memory document model.
//
// A document is a tree of containers. Each container owns a coordinate
// frame expressed in its parent's units and either child containers or a
// single mark type. Leaf and template containers carry a data
// specification, stored once at document level keyed by container id.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "recast/container_id.hpp"

namespace recast {

enum class CoordinateKind { cartesian, polar };
enum class MarkType { circle, arc, rectangle, line, band, area };
enum class Dimension { x, y, radius, angle };
enum class LinkMarkType { no_link, group_type, node_link };
enum class DataType { list_1d, matrix_2d, list_2d };
enum class StackDirection { min, middle, max };
enum class Anchor { min, middle, max, stacking_decided };
enum class AnchorDistribution { fixed_value, uniform_interval, flexible };
enum class Scale { fix, linear, ordinal_primary, ordinal_secondary, categorical };
enum class LineType { curve, straight };
/// Non-layout attribute keys in serialization order; line_type is kept apart.
enum class StyleKey { stroke_width, opacity, fill, stroke, rx, ry };

inline constexpr std::array kAllDimensions{Dimension::x, Dimension::y, Dimension::radius, Dimension::angle};
inline constexpr std::array kAllStyleKeys{StyleKey::stroke_width, StyleKey::opacity, StyleKey::fill,
                                          StyleKey::stroke,       StyleKey::rx,      StyleKey::ry};

std::string_view to_string(CoordinateKind);
std::string_view to_string(MarkType);
std::string_view to_string(Dimension);
std::string_view to_string(LinkMarkType);
std::string_view to_string(DataType);
std::string_view to_string(StackDirection);
std::string_view to_string(Anchor);
std::string_view to_string(AnchorDistribution);
std::string_view to_string(Scale);
std::string_view to_string(LineType);
std::string_view to_string(StyleKey);

// Case-insensitive lookups over the DSL vocabulary. Aliases accepted:
// "node_link_type" for node_link.
std::optional<CoordinateKind> coordinate_kind_from(std::string_view);
std::optional<MarkType> mark_type_from(std::string_view);
std::optional<Dimension> dimension_from(std::string_view);
std::optional<LinkMarkType> link_mark_type_from(std::string_view);
std::optional<DataType> data_type_from(std::string_view);
std::optional<StackDirection> stack_direction_from(std::string_view);
std::optional<Anchor> anchor_from(std::string_view);
std::optional<AnchorDistribution> anchor_distribution_from(std::string_view);
std::optional<Scale> scale_from(std::string_view);
std::optional<LineType> line_type_from(std::string_view);
std::optional<StyleKey> style_key_from(std::string_view);

inline std::size_t index_of(Dimension d) { return static_cast<std::size_t>(d); }
bool is_polar_dimension(Dimension d);
bool is_link_capable(MarkType m);

struct CartesianFrame {
  double x1 = 0, y1 = 0, x2 = 100, y2 = 100;
  friend bool operator==(const CartesianFrame&, const CartesianFrame&) = default;
};

/// cx, cy are fractions of the parent frame; r1, r2 fractions of the unit
/// radius; a1, a2 degrees clockwise from 12 o'clock.
struct PolarFrame {
  double cx = 0.5, cy = 0.5, r1 = 0, r2 = 1, a1 = 0, a2 = 360;
  friend bool operator==(const PolarFrame&, const PolarFrame&) = default;
};

using CoordinateFrame = std::variant<CartesianFrame, PolarFrame>;

inline CoordinateKind kind_of(const CoordinateFrame& f) {
  return std::holds_alternative<PolarFrame>(f) ? CoordinateKind::polar : CoordinateKind::cartesian;
}

struct ContainerNode {
  ContainerId id;
  std::string description;
  CoordinateFrame frame = CartesianFrame{};
  bool is_leaf = false;
  std::optional<MarkType> mark_type;
  std::vector<ContainerNode> children;

  friend bool operator==(const ContainerNode&, const ContainerNode&) = default;
};

struct MarkSpecification {
  MarkType mark_type = MarkType::rectangle;
  bool is_link_mark = false;
  LinkMarkType link_mark_type = LinkMarkType::no_link;
  std::optional<Dimension> group_link_direction;
  std::optional<int> link_number;
  bool is_width_encoded_data = false;
  // Carried through untouched; no semantics are attached to these.
  std::optional<bool> node_use_once;
  std::optional<bool> is_fully_connected;
  std::optional<bool> is_bipartite;

  friend bool operator==(const MarkSpecification&, const MarkSpecification&) = default;
};

struct PrimarySize {
  int number = 1;
  std::vector<Dimension> dimension;  // one entry, or two for joint layouts (scatter)
  std::optional<std::string> explanation;

  friend bool operator==(const PrimarySize&, const PrimarySize&) = default;
};

struct SecondarySize {
  std::variant<int, std::vector<int>> number = 1;
  Dimension dimension = Dimension::y;
  std::optional<std::string> explanation;

  friend bool operator==(const SecondarySize&, const SecondarySize&) = default;
};

struct DataStructure {
  DataType data_type = DataType::list_1d;
  PrimarySize primary;
  std::optional<SecondarySize> secondary;

  /// Item count per group: 1D lists are modelled as groups of one item.
  std::vector<int> group_sizes() const;
  int total_items() const;
  bool uses(Dimension d) const;
  /// Number of elements laid out along `d`: primary.number for primary
  /// dimensions, the largest group for the secondary dimension. Dimensions
  /// outside the structure follow the innermost level.
  int count_along(Dimension d) const;

  friend bool operator==(const DataStructure&, const DataStructure&) = default;
};

struct LayoutDimensionSpec {
  bool stacking = false;
  StackDirection stacking_direction = StackDirection::min;
  Anchor anchor = Anchor::min;
  bool subdividing = false;
  bool flatten_2d = false;
  bool size_uniform = true;
  double size_min = 0;
  double size_max = 0;
  AnchorDistribution anchor_distribute = AnchorDistribution::fixed_value;
  std::optional<double> anchor_interval;
  std::optional<double> anchor_start;

  friend bool operator==(const LayoutDimensionSpec&, const LayoutDimensionSpec&) = default;
};

struct LayoutSpecification {
  std::map<Dimension, LayoutDimensionSpec> dims;
  std::optional<std::vector<ContainerId>> source;
  std::optional<std::vector<ContainerId>> target;

  const LayoutDimensionSpec* find(Dimension d) const {
    auto it = dims.find(d);
    return it == dims.end() ? nullptr : &it->second;
  }

  friend bool operator==(const LayoutSpecification&, const LayoutSpecification&) = default;
};

/// Colors are "#RRGGBB" strings, everything else numeric.
using AttributeValue = std::variant<double, std::string>;

struct NonLayoutAttribute {
  Scale scale = Scale::fix;
  std::optional<AttributeValue> fix;
  std::optional<std::pair<AttributeValue, AttributeValue>> linear;
  std::optional<std::vector<AttributeValue>> options;

  friend bool operator==(const NonLayoutAttribute&, const NonLayoutAttribute&) = default;
};

struct NonLayoutSpecification {
  std::optional<LineType> line_type;
  std::map<StyleKey, NonLayoutAttribute> attributes;

  const NonLayoutAttribute* find(StyleKey k) const {
    auto it = attributes.find(k);
    return it == attributes.end() ? nullptr : &it->second;
  }

  friend bool operator==(const NonLayoutSpecification&, const NonLayoutSpecification&) = default;
};

/// Template containers carry only data_structure and layout_specification.
struct DataSpecification {
  DataStructure data_structure;
  std::optional<MarkSpecification> mark_specification;
  LayoutSpecification layout_specification;
  std::optional<NonLayoutSpecification> non_layout_specification;

  bool is_template_spec() const { return !mark_specification.has_value(); }

  friend bool operator==(const DataSpecification&, const DataSpecification&) = default;
};

struct DslDocument {
  ContainerNode root;
  std::map<ContainerId, DataSpecification> data_specifications;

  friend bool operator==(const DslDocument&, const DslDocument&) = default;
};

// Tree queries.

/// Throws NotFoundError for unknown ids.
const ContainerNode& find_container(const DslDocument& doc, const ContainerId& id);
const ContainerNode* find_node(const ContainerNode& root, const ContainerId& id);
ContainerNode* find_node(ContainerNode& root, const ContainerId& id);
const ContainerNode* find_parent(const ContainerNode& root, const ContainerId& id);

/// Pre-order traversal; the callback receives the node and its parent (null for the root).
template <typename Fn>
void visit_preorder(const ContainerNode& node, Fn&& fn, const ContainerNode* parent = nullptr) {
  fn(node, parent);
  for (const auto& c : node.children) visit_preorder(c, fn, &node);
}

/// Ids of every leaf and template container, in pre-order.
std::vector<ContainerId> spec_owner_ids(const ContainerNode& root);
/// The nearest enclosing template (possibly the id itself), if any.
std::optional<ContainerId> enclosing_template(const ContainerId& id);

}  // namespace recast
