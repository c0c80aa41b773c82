#pragma once

// Small builders for DSL documents used across the test binaries.

#include <string>
#include <vector>

#include "json.hpp"
#include "recast/dsl_json.hpp"

namespace recast::testing {

using J = nlohmann::ordered_json;

struct Dim {
  bool stacking = false;
  std::string direction = "min";
  std::string anchor = "min";
  bool subdividing = false;
  bool size_uniform = true;
  double size_min = 0;
  double size_max = 0;
  std::string distribute = "fixed_value";
  J interval = nullptr;
  J start = nullptr;

  J json() const {
    return {{"stacking", stacking},     {"stacking_direction", direction}, {"anchor", anchor},
            {"subdividing", subdividing}, {"2d_flatten", false},            {"size_uniform", size_uniform},
            {"size_range", {size_min, size_max}}, {"anchor_distribute", distribute},
            {"anchor_interval", interval}, {"anchor_start", start}};
  }
};

/// Evenly spaced fixed-size slots: `n` slots of `size` every 100/n.
inline Dim slots(int n, double size) {
  Dim d;
  d.size_min = d.size_max = size;
  d.distribute = "uniform_interval";
  d.start = 0;
  d.interval = 100.0 / n;
  return d;
}

/// Value-sized extent anchored at the minimum edge.
inline Dim value_sized(double lo = 0, double hi = 100) {
  Dim d;
  d.size_uniform = false;
  d.size_min = lo;
  d.size_max = hi;
  d.start = 0;
  return d;
}

/// Points spaced evenly from 0 to 100 inclusive.
inline Dim points(int n) {
  Dim d;
  d.distribute = "uniform_interval";
  d.start = 0;
  d.interval = n > 1 ? 100.0 / (n - 1) : 0.0;
  return d;
}

/// Full-span extent subdivided in proportion to values.
inline Dim proportional() {
  Dim d;
  d.stacking = true;
  d.anchor = "stacking_decided";
  d.subdividing = true;
  d.size_uniform = false;
  d.size_max = 100;
  return d;
}

inline Dim full() {
  Dim d;
  d.size_min = d.size_max = 100;
  d.start = 0;
  return d;
}

inline J mark(const std::string& type, const std::string& link = "no_link") {
  return {{"mark_type", type}, {"is_link_mark", link != "no_link"}, {"link_mark_type", link}};
}

inline J structure_1d(int n, const std::string& dim) {
  return {{"data_type", "1D_list"}, {"data_size", {{"primary", {{"number", n}, {"dimension", dim}}}}}};
}

inline J structure_2d(int groups, const std::string& pdim, int items, const std::string& sdim) {
  return {{"data_type", "2D_matrix"},
          {"data_size",
           {{"primary", {{"number", groups}, {"dimension", pdim}}},
            {"secondary", {{"number", items}, {"dimension", sdim}}}}}};
}

inline J cartesian(double x1 = 0, double y1 = 0, double x2 = 100, double y2 = 100) {
  return {{"x1", x1}, {"y1", y1}, {"x2", x2}, {"y2", y2}};
}

inline J polar(double cx = 0.5, double cy = 0.5, double r1 = 0, double r2 = 1, double a1 = 0, double a2 = 360) {
  return {{"cx", cx}, {"cy", cy}, {"r1", r1}, {"r2", r2}, {"a1", a1}, {"a2", a2}};
}

inline J node(const std::string& id, const std::string& kind, J frame, std::vector<J> children = {},
              const std::string& mark_type = "") {
  J n = {{"container_id", id}, {"description", ""}, {"coordinate", kind}, {"coordinate_system", std::move(frame)}};
  n["if_leaf"] = children.empty();
  if (!mark_type.empty()) n["mark_type"] = mark_type;
  if (!children.empty()) n["components"] = children;
  return n;
}

inline J spec(J structure, J mark_spec, J layout, J styles = nullptr) {
  J s = {{"data_structure", std::move(structure)}};
  if (!mark_spec.is_null()) s["mark_specification"] = std::move(mark_spec);
  s["layout_specification"] = std::move(layout);
  if (!styles.is_null()) s["non_layout_specification"] = std::move(styles);
  return s;
}

inline DslDocument build(J root, J specs) {
  root["data_specification"] = std::move(specs);
  return parse_document(root.dump());
}

/// An `n`-bar chart filling a cartesian root.
inline DslDocument bar_chart(int n = 18) {
  return build(node("0", "cartesian", cartesian(), {}, "rectangle"),
               {{"0", spec(structure_1d(n, "x"), mark("rectangle"),
                           {{"x", slots(n, 100.0 / n).json()}, {"y", value_sized().json()}})}});
}

/// A pie of `n` slices filling a polar root.
inline DslDocument pie_chart(int n = 5) {
  return build(node("0", "polar", polar(), {}, "arc"),
               {{"0", spec(structure_1d(n, "angle"), mark("arc"),
                           {{"angle", proportional().json()}, {"radius", full().json()}})}});
}

/// `lines` line series of `k` points each along x.
inline DslDocument line_chart(int lines, int k, bool curve = false) {
  J styles = {{"line_type", curve ? "curve" : "straight"}};
  J m = mark("line", "group_type");
  m["group_link_direction"] = "x";
  return build(node("0", "cartesian", cartesian(), {}, "line"),
               {{"0", spec(structure_2d(lines, "y", k, "x"), m,
                           {{"x", points(k).json()}, {"y", value_sized().json()}}, styles)}});
}

/// A closed radar line of `k` spokes.
inline DslDocument radar_chart(int k, const std::string& mark_type = "line") {
  J m = mark(mark_type, "group_type");
  m["group_link_direction"] = "angle";
  return build(node("0", "polar", polar(), {}, mark_type),
               {{"0", spec(structure_2d(1, "radius", k, "angle"), m,
                           {{"angle", slots(k, 0).json()}, {"radius", value_sized().json()}})}});
}

}  // namespace recast::testing
