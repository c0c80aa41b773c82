#pragma once

// Scene construction and SVG output.
//
// Pixel space has its origin at the top-left corner with y growing
// downwards. Polar angles are degrees, 0 at 12 o'clock, clockwise:
// a point at angle t and radius r sits at (cx + r sin t, cy - r cos t).

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "recast/datagen.hpp"
#include "recast/dsl.hpp"
#include "recast/layout.hpp"

namespace recast {

struct Canvas {
  double width = 800;
  double height = 600;
};

struct Point {
  double x = 0;
  double y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// A container (or one template instance of it) placed on the canvas.
struct CanvasFrame {
  /// Unique within a scene: the container id, or "<template>[i]" for an
  /// instance, with "/" joining nested instance paths ("0-a[2]/0-a-0").
  std::string key;
  ContainerId id;
  /// Key of the innermost enclosing template instance, if any.
  std::optional<std::string> instance;
  CoordinateKind kind = CoordinateKind::cartesian;

  /// Cartesian: the pixel rectangle. Polar: bounding box of the full circle.
  double px = 0, py = 0, pw = 0, ph = 0;
  /// Polar only: pixel center and radii, angles in degrees.
  double cx = 0, cy = 0, r_inner = 0, r_outer = 0, a_start = 0, a_end = 360;
  /// Cartesian only: the unit range children's frames are written in.
  double ux1 = 0, uy1 = 0, ux2 = 100, uy2 = 100;

  Point polar_point(double angle_deg, double radius) const;
  Point centroid() const;
  friend bool operator==(const CanvasFrame&, const CanvasFrame&) = default;
};

struct RectGeom {
  double x = 0, y = 0, w = 0, h = 0;
  friend bool operator==(const RectGeom&, const RectGeom&) = default;
};
struct CircleGeom {
  double cx = 0, cy = 0, r = 0;
  friend bool operator==(const CircleGeom&, const CircleGeom&) = default;
};
struct ArcGeom {
  double cx = 0, cy = 0, r_inner = 0, r_outer = 0, a_start = 0, a_end = 0;
  friend bool operator==(const ArcGeom&, const ArcGeom&) = default;
};
/// Open or closed polyline through control points. Curves in polar frames
/// arrive here already sampled.
struct PathGeom {
  std::vector<Point> points;
  bool closed = false;
  /// Emit as a monotone cubic through the points instead of straight segments.
  bool smooth = false;
  friend bool operator==(const PathGeom&, const PathGeom&) = default;
};
/// Filled ribbon between an upper and a lower boundary traversed in the
/// same direction. Closed ribbons form a ring.
struct RibbonGeom {
  std::vector<Point> upper;
  std::vector<Point> lower;
  bool closed = false;
  bool smooth = false;
  friend bool operator==(const RibbonGeom&, const RibbonGeom&) = default;
};
/// Quadratic connector between two marks or instances.
struct LinkGeom {
  Point from, control, to;
  friend bool operator==(const LinkGeom&, const LinkGeom&) = default;
};

using Geometry = std::variant<RectGeom, CircleGeom, ArcGeom, PathGeom, RibbonGeom, LinkGeom>;

struct MarkStyle {
  std::string fill = "#4C78A8";
  std::optional<std::string> stroke;
  std::optional<double> stroke_width;
  std::optional<double> opacity;
  std::optional<double> rx, ry;
  LineType line_type = LineType::straight;
  friend bool operator==(const MarkStyle&, const MarkStyle&) = default;
};

struct MarkRecord {
  MarkType mark_type = MarkType::rectangle;
  Geometry geometry;
  MarkStyle style;
  ContainerId container;
  std::string frame_key;
  std::optional<std::string> instance;
  int group_index = 0;
  std::optional<int> item_index;
  /// node_link records may span containers.
  bool is_node_link = false;
  friend bool operator==(const MarkRecord&, const MarkRecord&) = default;
};

struct Layer {
  CanvasFrame frame;
  std::vector<MarkRecord> marks;
};

/// Layers in paint order: container pre-order, template instances expanded
/// in place.
struct Scene {
  double width = 0;
  double height = 0;
  std::vector<Layer> layers;

  std::size_t mark_count() const;
  const Layer* find(std::string_view key) const;
};

/// Frames for every container and template instance, in paint order.
std::vector<CanvasFrame> layout_canvas(const DataProvider& data, const Canvas& canvas);
std::vector<CanvasFrame> layout_canvas(const DslDocument& doc, const Canvas& canvas, Seed seed = 0);

/// Resolves a link endpoint reference to a pixel position.
using EndpointResolver = std::function<std::optional<Point>(const std::string& ref)>;

/// Records for one leaf placed in `frame`. Node-link marks need `endpoints`.
std::vector<MarkRecord> render_marks(const ContainerId& leaf, const DataSpecification& spec, const MockTable& table,
                                     const CanvasFrame& frame, const EndpointResolver& endpoints = {});

/// `threads` > 1 computes leaf records concurrently; output is identical.
Scene build_scene(const DataProvider& data, const Canvas& canvas, int threads = 1);

std::string emit_svg(const Scene& scene);

std::string render_document(const DslDocument& doc, Seed seed, const Canvas& canvas,
                            const std::vector<UserOverride>& overrides = {}, int threads = 1);

/// SVG path data for a geometry (empty for rectangles and circles).
std::string path_data(const Geometry& g);

/// Monotone cubic (Fritsch-Carlson) tangents for samples at t = 0, 1, 2...
std::vector<double> monotone_tangents(const std::vector<double>& ys);

}  // namespace recast
