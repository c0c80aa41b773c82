#include <cmath>
#include <numbers>
#include <sstream>

#include "recast/dsl_json.hpp"
#include "recast/render.hpp"

namespace recast {

namespace {

std::string num(double v) { return format_number(v); }

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

Point at(double cx, double cy, double angle_deg, double r) {
  const double t = angle_deg * std::numbers::pi / 180.0;
  return {cx + r * std::sin(t), cy - r * std::cos(t)};
}

void move(std::string& d, const Point& p) { d += "M" + num(p.x) + "," + num(p.y); }
void line(std::string& d, const Point& p) { d += "L" + num(p.x) + "," + num(p.y); }

void arc_to(std::string& d, double r, double span, bool sweep, const Point& p) {
  d += "A" + num(r) + "," + num(r) + " 0 " + (span > 180 ? "1" : "0") + "," + (sweep ? "1" : "0") + " " + num(p.x) +
       "," + num(p.y);
}

/// Polyline through `pts`, optionally as monotone cubic segments. The
/// current point must already be pts.front().
void trace(std::string& d, const std::vector<Point>& pts, bool smooth) {
  if (!smooth || pts.size() < 3) {
    for (std::size_t k = 1; k < pts.size(); ++k) line(d, pts[k]);
    return;
  }
  std::vector<double> xs, ys;
  for (const auto& p : pts) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  const auto mx = monotone_tangents(xs);
  const auto my = monotone_tangents(ys);
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    d += "C" + num(xs[k] + mx[k] / 3) + "," + num(ys[k] + my[k] / 3) + " " + num(xs[k + 1] - mx[k + 1] / 3) + "," +
         num(ys[k + 1] - my[k + 1] / 3) + " " + num(xs[k + 1]) + "," + num(ys[k + 1]);
  }
}

std::string arc_path(const ArcGeom& g) {
  std::string d;
  const double span = g.a_end - g.a_start;
  if (span >= 360 - 1e-9) {
    const double mid = g.a_start + 180;
    move(d, at(g.cx, g.cy, g.a_start, g.r_outer));
    arc_to(d, g.r_outer, 180, true, at(g.cx, g.cy, mid, g.r_outer));
    arc_to(d, g.r_outer, 180, true, at(g.cx, g.cy, g.a_start, g.r_outer));
    d += "Z";
    if (g.r_inner > 0) {
      move(d, at(g.cx, g.cy, g.a_start, g.r_inner));
      arc_to(d, g.r_inner, 180, false, at(g.cx, g.cy, mid, g.r_inner));
      arc_to(d, g.r_inner, 180, false, at(g.cx, g.cy, g.a_start, g.r_inner));
      d += "Z";
    }
    return d;
  }
  if (g.r_inner > 0) {
    move(d, at(g.cx, g.cy, g.a_start, g.r_inner));
  } else {
    move(d, {g.cx, g.cy});
  }
  line(d, at(g.cx, g.cy, g.a_start, g.r_outer));
  arc_to(d, g.r_outer, span, true, at(g.cx, g.cy, g.a_end, g.r_outer));
  if (g.r_inner > 0) {
    line(d, at(g.cx, g.cy, g.a_end, g.r_inner));
    arc_to(d, g.r_inner, span, false, at(g.cx, g.cy, g.a_start, g.r_inner));
  }
  d += "Z";
  return d;
}

std::string ribbon_path(const RibbonGeom& g) {
  std::string d;
  if (g.upper.empty()) return d;
  if (g.closed) {
    // Ring: outer loop, then the inner loop in reverse.
    move(d, g.upper.front());
    std::vector<Point> outer = g.upper;
    outer.push_back(g.upper.front());
    trace(d, outer, g.smooth);
    d += "Z";
    std::vector<Point> inner(g.lower.rbegin(), g.lower.rend());
    inner.push_back(inner.front());
    move(d, inner.front());
    trace(d, inner, g.smooth);
    d += "Z";
    return d;
  }
  move(d, g.upper.front());
  trace(d, g.upper, g.smooth);
  std::vector<Point> back(g.lower.rbegin(), g.lower.rend());
  line(d, back.front());
  trace(d, back, g.smooth);
  d += "Z";
  return d;
}

bool needs_evenodd(const Geometry& g) {
  if (const auto* a = std::get_if<ArcGeom>(&g)) return a->r_inner > 0 && a->a_end - a->a_start >= 360 - 1e-9;
  if (const auto* r = std::get_if<RibbonGeom>(&g)) return r->closed;
  return false;
}

bool is_stroked_only(const MarkRecord& m) {
  return std::holds_alternative<LinkGeom>(m.geometry) ||
         (std::holds_alternative<PathGeom>(m.geometry) && m.mark_type == MarkType::line);
}

void write_mark(std::ostringstream& os, const MarkRecord& m) {
  os << "    <";
  if (const auto* r = std::get_if<RectGeom>(&m.geometry)) {
    os << "rect x=\"" << num(r->x) << "\" y=\"" << num(r->y) << "\" width=\"" << num(r->w) << "\" height=\""
       << num(r->h) << "\"";
    if (m.style.rx) os << " rx=\"" << num(*m.style.rx) << "\"";
    if (m.style.ry) os << " ry=\"" << num(*m.style.ry) << "\"";
  } else if (const auto* c = std::get_if<CircleGeom>(&m.geometry)) {
    os << "circle cx=\"" << num(c->cx) << "\" cy=\"" << num(c->cy) << "\" r=\"" << num(c->r) << "\"";
  } else {
    os << "path d=\"" << path_data(m.geometry) << "\"";
    if (needs_evenodd(m.geometry)) os << " fill-rule=\"evenodd\"";
  }

  if (is_stroked_only(m)) {
    os << " fill=\"none\" stroke=\"" << escape(m.style.stroke.value_or(m.style.fill)) << "\" stroke-width=\""
       << num(m.style.stroke_width.value_or(2)) << "\"";
  } else {
    os << " fill=\"" << escape(m.style.fill) << "\"";
    if (m.style.stroke) os << " stroke=\"" << escape(*m.style.stroke) << "\"";
    if (m.style.stroke_width) os << " stroke-width=\"" << num(*m.style.stroke_width) << "\"";
  }
  if (m.style.opacity) os << " opacity=\"" << num(*m.style.opacity) << "\"";

  os << " data-container=\"" << escape(m.container.str()) << "\"";
  if (m.instance) os << " data-instance=\"" << escape(*m.instance) << "\"";
  os << " data-group=\"" << m.group_index << "\"";
  if (m.item_index) os << " data-item=\"" << *m.item_index << "\"";
  os << " data-mark=\"" << to_string(m.mark_type) << "\"/>\n";
}

}  // namespace

std::vector<double> monotone_tangents(const std::vector<double>& ys) {
  const std::size_t n = ys.size();
  std::vector<double> m(n, 0.0);
  if (n < 2) return m;
  std::vector<double> d(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) d[k] = ys[k + 1] - ys[k];
  m[0] = d[0];
  m[n - 1] = d[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k) m[k] = d[k - 1] * d[k] > 0 ? (d[k - 1] + d[k]) / 2 : 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (d[k] == 0) {
      m[k] = m[k + 1] = 0;
      continue;
    }
    const double a = m[k] / d[k];
    const double b = m[k + 1] / d[k];
    const double s = a * a + b * b;
    if (s > 9) {
      const double tau = 3 / std::sqrt(s);
      m[k] = tau * a * d[k];
      m[k + 1] = tau * b * d[k];
    }
  }
  return m;
}

std::string path_data(const Geometry& g) {
  if (const auto* a = std::get_if<ArcGeom>(&g)) return arc_path(*a);
  if (const auto* r = std::get_if<RibbonGeom>(&g)) return ribbon_path(*r);
  std::string d;
  if (const auto* p = std::get_if<PathGeom>(&g)) {
    if (p->points.empty()) return d;
    move(d, p->points.front());
    std::vector<Point> pts = p->points;
    if (p->closed && p->smooth) pts.push_back(pts.front());
    trace(d, pts, p->smooth);
    if (p->closed) d += "Z";
    return d;
  }
  if (const auto* l = std::get_if<LinkGeom>(&g)) {
    move(d, l->from);
    d += "Q" + num(l->control.x) + "," + num(l->control.y) + " " + num(l->to.x) + "," + num(l->to.y);
  }
  return d;
}

std::string emit_svg(const Scene& scene) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(scene.width) << "\" height=\""
     << num(scene.height) << "\" viewBox=\"0 0 " << num(scene.width) << " " << num(scene.height) << "\">\n";
  for (const auto& layer : scene.layers) {
    os << "  <g data-frame=\"" << escape(layer.frame.key) << "\" data-container=\"" << escape(layer.frame.id.str())
       << "\" data-kind=\"" << to_string(layer.frame.kind) << "\"";
    if (layer.marks.empty()) {
      os << "/>\n";
      continue;
    }
    os << ">\n";
    for (const auto& m : layer.marks) write_mark(os, m);
    os << "  </g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace recast
