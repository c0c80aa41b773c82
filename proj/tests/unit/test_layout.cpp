#include <vector>

#include "doctest.h"
#include "recast/error.hpp"
#include "recast/layout.hpp"

using namespace recast;

namespace {

LayoutDimensionSpec stacked(bool subdividing, StackDirection dir = StackDirection::min) {
  LayoutDimensionSpec s;
  s.stacking = true;
  s.subdividing = subdividing;
  s.stacking_direction = dir;
  s.anchor = Anchor::stacking_decided;
  return s;
}

LayoutDimensionSpec uniform(double start, double interval, double size) {
  LayoutDimensionSpec s;
  s.anchor = Anchor::min;
  s.anchor_distribute = AnchorDistribution::uniform_interval;
  s.anchor_start = start;
  s.anchor_interval = interval;
  s.size_uniform = true;
  s.size_min = s.size_max = size;
  return s;
}

void check_extents(const std::vector<Extent>& got, const std::vector<Extent>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].start == doctest::Approx(want[i].start).epsilon(1e-12));
    CHECK(got[i].end == doctest::Approx(want[i].end).epsilon(1e-12));
  }
}

}  // namespace

TEST_CASE("equal subdivision tiles the axis") {
  const std::vector<double> v{0.25, 0.25, 0.25, 0.25};
  check_extents(resolve_dimension(stacked(true), 4, v), {{0, 25}, {25, 50}, {50, 75}, {75, 100}});
}

TEST_CASE("subdivision is proportional and ends exactly at 100") {
  const std::vector<double> v{0.1, 0.2, 0.3};
  const auto e = resolve_dimension(stacked(true), 3, v);
  CHECK(e[0].size() == doctest::Approx(100.0 / 6));
  CHECK(e[2].size() == doctest::Approx(50.0));
  CHECK(e.back().end == 100.0);
  CHECK(e[1].start == e[0].end);
}

TEST_CASE("uniform interval places fixed-size elements") {
  const std::vector<double> v{0.9, 0.1, 0.5};
  check_extents(resolve_dimension(uniform(10, 30, 5), 3, v), {{10, 15}, {40, 45}, {70, 75}});
}

TEST_CASE("middle-direction stacks are centred on 50") {
  auto s = stacked(false, StackDirection::middle);
  s.size_uniform = true;
  s.size_min = s.size_max = 20;
  const std::vector<double> v{0.3, 0.7};
  check_extents(resolve_dimension(s, 2, v), {{30, 50}, {50, 70}});
}

TEST_CASE("max-direction stacks grow down from 100") {
  auto s = stacked(false, StackDirection::max);
  s.size_uniform = true;
  s.size_min = s.size_max = 10;
  const std::vector<double> v{1, 1, 1};
  check_extents(resolve_dimension(s, 3, v), {{90, 100}, {80, 90}, {70, 80}});
}

TEST_CASE("anchors position the element around the anchor point") {
  LayoutDimensionSpec s;
  s.anchor_distribute = AnchorDistribution::fixed_value;
  s.anchor_start = 50;
  s.size_uniform = false;
  s.size_min = 0;
  s.size_max = 40;
  const std::vector<double> v{0.5};
  s.anchor = Anchor::min;
  check_extents(resolve_dimension(s, 1, v), {{50, 70}});
  s.anchor = Anchor::max;
  check_extents(resolve_dimension(s, 1, v), {{30, 50}});
  s.anchor = Anchor::middle;
  check_extents(resolve_dimension(s, 1, v), {{40, 60}});
}

TEST_CASE("flexible positions read the position values and clamp") {
  LayoutDimensionSpec s;
  s.anchor = Anchor::middle;
  s.anchor_distribute = AnchorDistribution::flexible;
  s.size_min = s.size_max = 10;
  const std::vector<double> pos{0.0, 0.5, 1.0};
  const std::vector<double> size{1, 1, 1};
  check_extents(resolve_dimension(s, 3, pos, size), {{0, 5}, {45, 55}, {95, 100}});
}

TEST_CASE("bad inputs raise layout errors") {
  const std::vector<double> v{0.5, 0.5};
  CHECK_THROWS_AS(resolve_dimension(stacked(true), 3, v), LayoutError);
  LayoutDimensionSpec s;
  s.anchor_distribute = AnchorDistribution::uniform_interval;
  CHECK_THROWS_AS(resolve_dimension(s, 2, v), LayoutError);
  s = LayoutDimensionSpec{};
  s.size_min = 10;
  s.size_max = 5;
  CHECK_THROWS_AS(resolve_dimension(s, 2, v), LayoutError);
}

TEST_CASE("a 3x4 subdivided template tiles its frame") {
  DataSpecification spec;
  spec.data_structure.data_type = DataType::matrix_2d;
  spec.data_structure.primary = {3, {Dimension::x}, {}};
  spec.data_structure.secondary = SecondarySize{4, Dimension::y, {}};
  spec.layout_specification.dims[Dimension::x] = stacked(true);
  spec.layout_specification.dims[Dimension::y] = stacked(true);
  const ElementGrid values(3, std::vector<ElementValue>(4, ElementValue{0.5, {0.5, 0.5, 0.5, 0.5}}));
  const auto boxes = instantiate_template(spec, CartesianFrame{10, 20, 70, 80}, values);
  REQUIRE(boxes.size() == 12);
  double area = 0;
  for (const auto& b : boxes) {
    const auto& f = std::get<CartesianFrame>(b.frame);
    CHECK(f.x1 >= 10 - 1e-9);
    CHECK(f.x2 <= 70 + 1e-9);
    area += (f.x2 - f.x1) * (f.y2 - f.y1);
  }
  CHECK(area == doctest::Approx(3600));
  for (std::size_t a = 0; a < boxes.size(); ++a)
    for (std::size_t b = a + 1; b < boxes.size(); ++b) {
      const auto& p = std::get<CartesianFrame>(boxes[a].frame);
      const auto& q = std::get<CartesianFrame>(boxes[b].frame);
      const double ox = std::min(p.x2, q.x2) - std::max(p.x1, q.x1);
      const double oy = std::min(p.y2, q.y2) - std::max(p.y1, q.y1);
      CHECK_FALSE((ox > 1e-9 && oy > 1e-9));
    }
}

TEST_CASE("a single-instance template degenerates to its frame") {
  DataSpecification spec;
  spec.data_structure.primary = {1, {Dimension::angle}, {}};
  spec.layout_specification.dims[Dimension::angle] = stacked(true);
  const ElementGrid values{{ElementValue{}}};
  const PolarFrame frame{0.5, 0.5, 0.2, 0.9, 30, 300};
  const auto boxes = instantiate_template(spec, frame, values);
  REQUIRE(boxes.size() == 1);
  CHECK(boxes[0].frame == CoordinateFrame(frame));
}

TEST_CASE("shared primary and secondary dimension nests groups") {
  DataStructure ds;
  ds.data_type = DataType::matrix_2d;
  ds.primary = {2, {Dimension::x}, {}};
  ds.secondary = SecondarySize{2, Dimension::x, {}};
  LayoutSpecification layout;
  layout.dims[Dimension::x] = uniform(10, 50, 40);
  layout.dims[Dimension::x].flatten_2d = true;
  const ElementGrid values(2, std::vector<ElementValue>(2));
  const auto grid = resolve_grid(ds, layout, values);
  const auto x = index_of(Dimension::x);
  CHECK(grid[0][0][x] == Extent{10, 30});
  CHECK(grid[0][1][x] == Extent{30, 50});
  CHECK(grid[1][0][x] == Extent{60, 80});
  CHECK(grid[1][1][x] == Extent{80, 100});
  // y is not placed: full range.
  CHECK(grid[1][1][index_of(Dimension::y)] == Extent{0, 100});
}

TEST_CASE("per-slice resolution stacks each control point independently") {
  DataStructure ds;
  ds.data_type = DataType::matrix_2d;
  ds.primary = {2, {Dimension::y}, {}};
  ds.secondary = SecondarySize{2, Dimension::x, {}};
  LayoutSpecification layout;
  auto y = stacked(false);
  y.size_uniform = false;
  y.size_min = 0;
  y.size_max = 50;
  layout.dims[Dimension::y] = y;
  const ElementGrid values{{ElementValue{0.2}, ElementValue{1.0}}, {ElementValue{0.4}, ElementValue{0.6}}};
  const auto grid = resolve_grid(ds, layout, values, true);
  const auto k = index_of(Dimension::y);
  CHECK(grid[0][0][k] == Extent{0, 10});
  CHECK(grid[1][0][k] == Extent{10, 30});
  CHECK(grid[0][1][k] == Extent{0, 50});
  CHECK(grid[1][1][k] == Extent{50, 80});
}
