#pragma once

// Resolution of per-dimension layout specifications into extents in the
// normalized [0,100] space of a container, and instantiation of template
// containers into instance boxes.

#include <array>
#include <span>
#include <vector>

#include "recast/dsl.hpp"

namespace recast {

struct Extent {
  double start = 0;
  double end = 100;

  double size() const { return end - start; }
  double mid() const { return (start + end) / 2; }

  friend bool operator==(const Extent&, const Extent&) = default;
};

/// Sizes and flexible positions both read `values`.
std::vector<Extent> resolve_dimension(const LayoutDimensionSpec& spec, int count, std::span<const double> values);

/// Flexible positions read `positions`, data-driven sizes read `sizes`.
std::vector<Extent> resolve_dimension(const LayoutDimensionSpec& spec, int count, std::span<const double> positions,
                                      std::span<const double> sizes);

/// Per-datum inputs produced by datagen. `value` drives sizes; each
/// dimension's channel drives flexible positions along that dimension.
struct ElementValue {
  double value = 0.5;
  std::array<double, 4> channels{0.5, 0.5, 0.5, 0.5};

  friend bool operator==(const ElementValue&, const ElementValue&) = default;
};

/// [group][item]; a 1D list is a list of one-item groups.
using ElementGrid = std::vector<std::vector<ElementValue>>;

/// Extents indexed by index_of(Dimension). Dimensions the layout does not
/// mention span the full [0,100].
using DimensionExtents = std::array<Extent, 4>;
using ExtentGrid = std::vector<std::vector<DimensionExtents>>;

/// Shape of an ElementGrid for a data structure.
std::vector<int> grid_shape(const DataStructure& ds);

/// Resolves every datum of a leaf or template. With `per_slice` set (group
/// link marks), dimensions resolved across groups are resolved once per
/// item index so that each control point of a link reads its own value.
ExtentGrid resolve_grid(const DataStructure& ds, const LayoutSpecification& layout, const ElementGrid& values,
                        bool per_slice = false);

struct InstanceBox {
  int group = 0;
  int item = 0;
  /// In the template container's parent units, same kind as the template frame.
  CoordinateFrame frame;
};

/// Maps normalized extents into a frame expressed in parent units.
CoordinateFrame map_into(const CoordinateFrame& frame, const DimensionExtents& extents);

/// One box per data item, in group-major order.
std::vector<InstanceBox> instantiate_template(const DataSpecification& spec, const CoordinateFrame& template_frame,
                                              const ElementGrid& values);

}  // namespace recast
