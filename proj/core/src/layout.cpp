#include "recast/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "recast/error.hpp"

namespace recast {

namespace {

double clamp100(double v) { return std::clamp(v, 0.0, 100.0); }

Extent clamped(double a, double b) {
  const double s = clamp100(a);
  return {s, std::max(s, clamp100(b))};
}

void check_spec(const LayoutDimensionSpec& spec) {
  if (spec.size_min < 0 || spec.size_max < spec.size_min)
    throw LayoutError("size_range must satisfy 0 <= min <= max");
  if (!spec.stacking && spec.anchor_distribute == AnchorDistribution::uniform_interval &&
      (!spec.anchor_start || !spec.anchor_interval))
    throw LayoutError("uniform_interval needs anchor_start and anchor_interval");
}

double element_size(const LayoutDimensionSpec& spec, double v) {
  if (spec.size_uniform) return spec.size_min;
  return spec.size_min + v * (spec.size_max - spec.size_min);
}

std::vector<Extent> stack(const LayoutDimensionSpec& spec, int count, std::span<const double> sizes_in) {
  std::vector<Extent> out(count);
  if (spec.subdividing) {
    double total = 0;
    for (double v : sizes_in) total += std::max(v, 0.0);
    double at = 0;
    for (int i = 0; i < count; ++i) {
      const double share = total > 0 ? std::max(sizes_in[i], 0.0) / total : 1.0 / count;
      const double next = i + 1 == count ? 100.0 : at + 100.0 * share;
      out[i] = {at, std::max(at, std::min(next, 100.0))};
      at = out[i].end;
    }
    return out;
  }
  std::vector<double> cumulative(count + 1, 0.0);
  for (int i = 0; i < count; ++i) cumulative[i + 1] = cumulative[i] + element_size(spec, sizes_in[i]);
  const double total = cumulative[count];
  for (int i = 0; i < count; ++i) {
    switch (spec.stacking_direction) {
      case StackDirection::min: out[i] = clamped(cumulative[i], cumulative[i + 1]); break;
      case StackDirection::max: out[i] = clamped(100 - cumulative[i + 1], 100 - cumulative[i]); break;
      case StackDirection::middle: {
        const double offset = 50 - total / 2;
        out[i] = clamped(offset + cumulative[i], offset + cumulative[i + 1]);
        break;
      }
    }
  }
  return out;
}

}  // namespace

std::vector<Extent> resolve_dimension(const LayoutDimensionSpec& spec, int count, std::span<const double> values) {
  return resolve_dimension(spec, count, values, values);
}

std::vector<Extent> resolve_dimension(const LayoutDimensionSpec& spec, int count, std::span<const double> positions,
                                      std::span<const double> sizes) {
  if (count < 0 || positions.size() != static_cast<std::size_t>(count) ||
      sizes.size() != static_cast<std::size_t>(count))
    throw LayoutError("expected " + std::to_string(count) + " element values");
  check_spec(spec);
  if (count == 0) return {};
  if (spec.stacking) return stack(spec, count, sizes);

  std::vector<Extent> out(count);
  for (int i = 0; i < count; ++i) {
    const double s = element_size(spec, sizes[i]);
    double p = 0;
    switch (spec.anchor_distribute) {
      case AnchorDistribution::fixed_value: p = spec.anchor_start.value_or(0); break;
      case AnchorDistribution::uniform_interval: p = *spec.anchor_start + i * *spec.anchor_interval; break;
      case AnchorDistribution::flexible: p = positions[i] * 100; break;
    }
    switch (spec.anchor) {
      case Anchor::max: out[i] = clamped(p - s, p); break;
      case Anchor::middle: out[i] = clamped(p - s / 2, p + s / 2); break;
      case Anchor::min:
      case Anchor::stacking_decided: out[i] = clamped(p, p + s); break;
    }
  }
  return out;
}

std::vector<int> grid_shape(const DataStructure& ds) { return ds.group_sizes(); }

ExtentGrid resolve_grid(const DataStructure& ds, const LayoutSpecification& layout, const ElementGrid& values,
                        bool per_slice) {
  const auto shape = grid_shape(ds);
  if (values.size() != shape.size()) throw LayoutError("element grid has the wrong number of groups");
  for (std::size_t g = 0; g < shape.size(); ++g)
    if (values[g].size() != static_cast<std::size_t>(shape[g]))
      throw LayoutError("element grid group " + std::to_string(g) + " has the wrong number of items");

  const int groups = static_cast<int>(shape.size());
  const int max_items = shape.empty() ? 0 : *std::max_element(shape.begin(), shape.end());
  ExtentGrid out(groups);
  for (int g = 0; g < groups; ++g) out[g].assign(shape[g], DimensionExtents{});

  const bool two_d = ds.data_type != DataType::list_1d && ds.secondary.has_value();
  for (const auto& [dim, spec] : layout.dims) {
    const std::size_t k = index_of(dim);
    const auto& pd = ds.primary.dimension;
    const bool in_primary = std::find(pd.begin(), pd.end(), dim) != pd.end();
    const bool in_secondary = two_d && ds.secondary->dimension == dim;

    // Resolution across groups, reading item `slice` of each group.
    auto across_groups = [&](int slice) {
      std::vector<double> pos(groups), size(groups);
      for (int g = 0; g < groups; ++g) {
        if (values[g].empty()) {
          pos[g] = size[g] = 0;
          continue;
        }
        const auto& e = values[g][std::min<std::size_t>(slice, values[g].size() - 1)];
        pos[g] = e.channels[k];
        size[g] = e.value;
      }
      return resolve_dimension(spec, groups, pos, size);
    };

    if (in_primary && in_secondary) {
      const auto outer = across_groups(0);
      for (int g = 0; g < groups; ++g) {
        const double w = outer[g].size() / std::max(shape[g], 1);
        for (int i = 0; i < shape[g]; ++i)
          out[g][i][k] = {outer[g].start + i * w, i + 1 == shape[g] ? outer[g].end : outer[g].start + (i + 1) * w};
      }
    } else if (in_primary || (!in_secondary && !two_d)) {
      if (per_slice) {
        for (int i = 0; i < max_items; ++i) {
          const auto ext = across_groups(i);
          for (int g = 0; g < groups; ++g)
            if (i < shape[g]) out[g][i][k] = ext[g];
        }
      } else {
        const auto ext = across_groups(0);
        for (int g = 0; g < groups; ++g)
          for (int i = 0; i < shape[g]; ++i) out[g][i][k] = ext[g];
      }
    } else {
      for (int g = 0; g < groups; ++g) {
        std::vector<double> pos(shape[g]), size(shape[g]);
        for (int i = 0; i < shape[g]; ++i) {
          pos[i] = values[g][i].channels[k];
          size[i] = values[g][i].value;
        }
        const auto ext = resolve_dimension(spec, shape[g], pos, size);
        for (int i = 0; i < shape[g]; ++i) out[g][i][k] = ext[i];
      }
    }
  }
  return out;
}

CoordinateFrame map_into(const CoordinateFrame& frame, const DimensionExtents& e) {
  auto lerp = [](double a, double b, double t100) {
    if (t100 <= 0) return a;
    if (t100 >= 100) return b;
    return a + (b - a) * (t100 / 100.0);
  };
  if (const auto* c = std::get_if<CartesianFrame>(&frame)) {
    const auto& x = e[index_of(Dimension::x)];
    const auto& y = e[index_of(Dimension::y)];
    return CartesianFrame{lerp(c->x1, c->x2, x.start), lerp(c->y1, c->y2, y.start), lerp(c->x1, c->x2, x.end),
                          lerp(c->y1, c->y2, y.end)};
  }
  const auto& p = std::get<PolarFrame>(frame);
  const auto& r = e[index_of(Dimension::radius)];
  const auto& a = e[index_of(Dimension::angle)];
  return PolarFrame{p.cx, p.cy, lerp(p.r1, p.r2, r.start), lerp(p.r1, p.r2, r.end), lerp(p.a1, p.a2, a.start),
                    lerp(p.a1, p.a2, a.end)};
}

std::vector<InstanceBox> instantiate_template(const DataSpecification& spec, const CoordinateFrame& template_frame,
                                              const ElementGrid& values) {
  const auto& ds = spec.data_structure;
  const auto& layout = spec.layout_specification;
  auto require = [&](Dimension d) {
    if (!layout.find(d))
      throw LayoutError("template structure uses " + std::string(to_string(d)) + " but the layout does not place it");
    if (is_polar_dimension(d) != (kind_of(template_frame) == CoordinateKind::polar))
      throw LayoutError("dimension " + std::string(to_string(d)) + " does not match the template frame kind");
  };
  for (auto d : ds.primary.dimension) require(d);
  if (ds.secondary && ds.data_type != DataType::list_1d) require(ds.secondary->dimension);

  const auto grid = resolve_grid(ds, layout, values);
  std::vector<InstanceBox> out;
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (std::size_t i = 0; i < grid[g].size(); ++i)
      out.push_back({static_cast<int>(g), static_cast<int>(i), map_into(template_frame, grid[g][i])});
  return out;
}

}  // namespace recast
