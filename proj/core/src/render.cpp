#include "recast/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "recast/error.hpp"

namespace recast {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr int kPolarCurveSamples = 12;

Point polar_at(double cx, double cy, double angle_deg, double radius) {
  const double t = angle_deg * kDegToRad;
  return {cx + radius * std::sin(t), cy - radius * std::cos(t)};
}

bool full_turn(double a_start, double a_end) { return a_end - a_start >= 360 - 1e-9; }

// ------------------------------------------------------------------ frames

CanvasFrame root_frame(const ContainerNode& root, const Canvas& canvas) {
  CanvasFrame f;
  f.key = root.id.str();
  f.id = root.id;
  f.kind = kind_of(root.frame);
  if (const auto* c = std::get_if<CartesianFrame>(&root.frame)) {
    if (!(c->x2 > c->x1 && c->y2 > c->y1)) throw Error("root frame has zero area");
    f.px = 0;
    f.py = 0;
    f.pw = canvas.width;
    f.ph = canvas.height;
    f.ux1 = c->x1;
    f.uy1 = c->y1;
    f.ux2 = c->x2;
    f.uy2 = c->y2;
    return f;
  }
  const auto& p = std::get<PolarFrame>(root.frame);
  const double unit = std::min(canvas.width, canvas.height) / 2;
  f.cx = p.cx * canvas.width;
  f.cy = (1 - p.cy) * canvas.height;
  f.r_inner = p.r1 * unit;
  f.r_outer = p.r2 * unit;
  f.a_start = p.a1;
  f.a_end = p.a2;
  return f;
}

/// Places `frame` (written in the parent's units) inside `parent`.
CanvasFrame child_frame(const CanvasFrame& parent, const CoordinateFrame& frame) {
  CanvasFrame f;
  f.kind = kind_of(frame);
  if (parent.kind == CoordinateKind::cartesian) {
    if (!(parent.pw > 0 && parent.ph > 0)) throw Error("container " + parent.key + " has a degenerate pixel frame");
    if (const auto* c = std::get_if<CartesianFrame>(&frame)) {
      const double sx = parent.pw / (parent.ux2 - parent.ux1);
      const double sy = parent.ph / (parent.uy2 - parent.uy1);
      f.px = parent.px + (c->x1 - parent.ux1) * sx;
      f.pw = (c->x2 - c->x1) * sx;
      f.py = parent.py + (parent.uy2 - c->y2) * sy;
      f.ph = (c->y2 - c->y1) * sy;
      // Grandchildren share the units their parent was written in.
      f.ux1 = c->x1;
      f.uy1 = c->y1;
      f.ux2 = c->x2;
      f.uy2 = c->y2;
      return f;
    }
    const auto& p = std::get<PolarFrame>(frame);
    const double unit = std::min(parent.pw, parent.ph) / 2;
    f.cx = parent.px + p.cx * parent.pw;
    f.cy = parent.py + (1 - p.cy) * parent.ph;
    f.r_inner = p.r1 * unit;
    f.r_outer = p.r2 * unit;
    f.a_start = p.a1;
    f.a_end = p.a2;
    return f;
  }
  const auto* p = std::get_if<PolarFrame>(&frame);
  if (!p) throw Error("a cartesian frame cannot be placed inside polar container " + parent.key);
  const double band = parent.r_outer - parent.r_inner;
  const double span = parent.a_end - parent.a_start;
  f.cx = parent.cx;
  f.cy = parent.cy;
  f.r_inner = parent.r_inner + p->r1 * band;
  f.r_outer = parent.r_inner + p->r2 * band;
  f.a_start = parent.a_start + p->a1 / 360 * span;
  f.a_end = parent.a_start + p->a2 / 360 * span;
  return f;
}

void finish_polar(CanvasFrame& f) {
  if (f.kind != CoordinateKind::polar) return;
  f.px = f.cx - f.r_outer;
  f.py = f.cy - f.r_outer;
  f.pw = f.ph = 2 * f.r_outer;
}

class CanvasBuilder {
 public:
  explicit CanvasBuilder(const DataProvider& data) : data_(data), doc_(data.document()) {}

  std::vector<CanvasFrame> run(const Canvas& canvas) {
    if (!(canvas.width > 0 && canvas.height > 0)) throw Error("canvas size must be positive");
    canvas_ = canvas;
    CanvasFrame root = root_frame(doc_.root, canvas);
    finish_polar(root);
    visit(doc_.root, root, "", std::nullopt, nullptr);
    return std::move(out_);
  }

 private:
  void visit(const ContainerNode& n, CanvasFrame f, const std::string& prefix,
             const std::optional<std::string>& instance, const CanvasFrame* parent) {
    f.id = n.id;
    f.key = prefix + n.id.str();
    f.instance = instance;
    out_.push_back(f);
    if (!n.id.is_template()) {
      for (const auto& c : n.children) {
        CanvasFrame cf = child_frame(f, c.frame);
        finish_polar(cf);
        visit(c, cf, prefix, instance, &f);
      }
      return;
    }
    // One placed instance per datum of the template's own table, laid out
    // in the parent's units.
    const auto sit = doc_.data_specifications.find(n.id);
    if (sit == doc_.data_specifications.end()) throw Error("template " + n.id.str() + " has no data specification");
    const auto boxes = instantiate_template(sit->second, n.frame, data_.table(n.id).element_grid());
    for (std::size_t k = 0; k < boxes.size(); ++k) {
      CanvasFrame inst;
      if (parent) {
        inst = child_frame(*parent, boxes[k].frame);
      } else {
        ContainerNode stand_in;
        stand_in.frame = boxes[k].frame;
        inst = root_frame(stand_in, canvas_);
        if (inst.kind == CoordinateKind::cartesian) inst = child_frame(f, boxes[k].frame);
      }
      finish_polar(inst);
      // Children of a template describe one instance in its own [0,100] units.
      inst.ux1 = inst.uy1 = 0;
      inst.ux2 = inst.uy2 = 100;
      inst.id = n.id;
      inst.key = f.key + "[" + std::to_string(k) + "]";
      inst.instance = inst.key;
      out_.push_back(inst);
      for (const auto& c : n.children) {
        CanvasFrame cf = child_frame(inst, c.frame);
        finish_polar(cf);
        visit(c, cf, inst.key + "/", inst.key, &inst);
      }
    }
  }

  const DataProvider& data_;
  const DslDocument& doc_;
  Canvas canvas_;
  std::vector<CanvasFrame> out_;
};

// ------------------------------------------------------------------ marks

MarkStyle style_of(const MockDatum& d, const DataSpecification& spec) {
  MarkStyle s;
  for (const auto& [key, v] : d.styles) {
    const double* num = std::get_if<double>(&v);
    const std::string* str = std::get_if<std::string>(&v);
    switch (key) {
      case StyleKey::fill:
        if (str) s.fill = *str;
        break;
      case StyleKey::stroke:
        if (str) s.stroke = *str;
        break;
      case StyleKey::stroke_width:
        if (num) s.stroke_width = *num;
        break;
      case StyleKey::opacity:
        if (num) s.opacity = *num;
        break;
      case StyleKey::rx:
        if (num) s.rx = *num;
        break;
      case StyleKey::ry:
        if (num) s.ry = *num;
        break;
    }
  }
  if (spec.non_layout_specification && spec.non_layout_specification->line_type)
    s.line_type = *spec.non_layout_specification->line_type;
  return s;
}

/// Normalized extent to pixel mapping for one placed frame.
struct Mapper {
  const CanvasFrame& f;

  double x(double e) const { return f.px + e / 100 * f.pw; }
  double y(double e) const { return f.py + f.ph - e / 100 * f.ph; }
  double radius(double e) const { return f.r_inner + e / 100 * (f.r_outer - f.r_inner); }
  double angle(double e) const { return f.a_start + e / 100 * (f.a_end - f.a_start); }
};

Geometry node_geometry(MarkType mark, const CanvasFrame& f, const DimensionExtents& e) {
  const Mapper m{f};
  const Extent& ex = e[index_of(Dimension::x)];
  const Extent& ey = e[index_of(Dimension::y)];
  const Extent& er = e[index_of(Dimension::radius)];
  const Extent& ea = e[index_of(Dimension::angle)];

  if (f.kind == CoordinateKind::cartesian) {
    const double x0 = m.x(ex.start), x1 = m.x(ex.end);
    const double y0 = m.y(ey.end), y1 = m.y(ey.start);
    switch (mark) {
      case MarkType::circle:
        return CircleGeom{m.x(ex.mid()), m.y(ey.mid()), std::min(x1 - x0, y1 - y0) / 2};
      case MarkType::line:
        if (ex.size() >= ey.size()) return PathGeom{{{x0, m.y(ey.mid())}, {x1, m.y(ey.mid())}}, false, false};
        return PathGeom{{{m.x(ex.mid()), y1}, {m.x(ex.mid()), y0}}, false, false};
      case MarkType::band:
      case MarkType::area:
        return RibbonGeom{{{x0, y0}, {x1, y0}}, {{x0, y1}, {x1, y1}}, false, false};
      case MarkType::rectangle:
      case MarkType::arc:
        return RectGeom{x0, y0, x1 - x0, y1 - y0};
    }
  }

  const double r0 = m.radius(er.start), r1 = m.radius(er.end);
  const double a0 = m.angle(ea.start), a1 = m.angle(ea.end);
  switch (mark) {
    case MarkType::circle: {
      const double rho = m.radius(er.mid());
      const double theta = m.angle(ea.mid());
      const Point c = polar_at(f.cx, f.cy, theta, rho);
      double r = (r1 - r0) / 2;
      const double half = (a1 - a0) / 2;
      if (half < 90) r = std::min(r, rho * std::sin(half * kDegToRad));
      return CircleGeom{c.x, c.y, std::max(r, 0.0)};
    }
    case MarkType::line: {
      const double theta = m.angle(ea.mid());
      return PathGeom{{polar_at(f.cx, f.cy, theta, r0), polar_at(f.cx, f.cy, theta, r1)}, false, false};
    }
    default:
      return ArcGeom{f.cx, f.cy, r0, r1, a0, a1};
  }
}

/// Hermite samples of a parametric curve through (us, vs) at t = 0, 1, ...
void sample_curve(const std::vector<double>& us, const std::vector<double>& vs, std::vector<double>& out_u,
                  std::vector<double>& out_v) {
  const auto mu = monotone_tangents(us);
  const auto mv = monotone_tangents(vs);
  out_u.assign(1, us.front());
  out_v.assign(1, vs.front());
  for (std::size_t k = 0; k + 1 < us.size(); ++k) {
    for (int s = 1; s <= kPolarCurveSamples; ++s) {
      const double t = static_cast<double>(s) / kPolarCurveSamples;
      const double t2 = t * t, t3 = t2 * t;
      const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
      if (s == kPolarCurveSamples) {
        out_u.push_back(us[k + 1]);
        out_v.push_back(vs[k + 1]);
      } else {
        out_u.push_back(h00 * us[k] + h10 * mu[k] + h01 * us[k + 1] + h11 * mu[k + 1]);
        out_v.push_back(h00 * vs[k] + h10 * mv[k] + h01 * vs[k + 1] + h11 * mv[k + 1]);
      }
    }
  }
}

/// Converts an (angle, radius) sequence to pixels, sampling when curved.
std::vector<Point> polar_polyline(const CanvasFrame& f, std::vector<double> angles, std::vector<double> radii,
                                  bool curved, bool closed) {
  if (closed && !angles.empty()) {
    angles.push_back(angles.front() + (f.a_end - f.a_start));
    radii.push_back(radii.front());
  }
  std::vector<double> a = angles, r = radii;
  if (curved && angles.size() > 2) sample_curve(angles, radii, a, r);
  std::vector<Point> out;
  for (std::size_t k = 0; k < a.size(); ++k) out.push_back(polar_at(f.cx, f.cy, a[k], r[k]));
  if (closed && out.size() > 1) out.pop_back();  // the closing segment comes from "Z"
  return out;
}

std::vector<MarkRecord> group_links(const ContainerId& leaf, const DataSpecification& spec, const MockTable& table,
                                    const CanvasFrame& f) {
  const auto& ds = spec.data_structure;
  const auto& mark = *spec.mark_specification;
  const auto grid = resolve_grid(ds, spec.layout_specification, table.element_grid(), true);
  const bool polar = f.kind == CoordinateKind::polar;
  Dimension along = mark.group_link_direction.value_or(
      ds.secondary ? ds.secondary->dimension : (polar ? Dimension::angle : Dimension::x));
  if (is_polar_dimension(along) != polar) along = polar ? Dimension::angle : Dimension::x;
  const Dimension across = polar ? (along == Dimension::angle ? Dimension::radius : Dimension::angle)
                                 : (along == Dimension::x ? Dimension::y : Dimension::x);
  const bool closed = polar && along == Dimension::angle && full_turn(f.a_start, f.a_end);
  const Mapper m{f};
  const auto ka = index_of(along), kc = index_of(across);
  // A line follows the data-bearing edge of each extent: the far edge of a
  // value-sized extent, the middle of a positioned one.
  const LayoutDimensionSpec* cs = spec.layout_specification.find(across);
  auto value_edge = [cs](const Extent& e) {
    if (!cs || cs->size_uniform) return e.mid();
    if (cs->stacking) return cs->stacking_direction == StackDirection::max ? e.start : e.end;
    switch (cs->anchor) {
      case Anchor::max: return e.start;
      case Anchor::middle: return e.mid();
      default: return e.end;
    }
  };

  std::vector<MarkRecord> out;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (grid[g].empty()) continue;
    MarkRecord rec;
    rec.mark_type = mark.mark_type;
    rec.style = style_of(table.groups[g].front(), spec);
    rec.container = leaf;
    rec.frame_key = f.key;
    rec.instance = f.instance;
    rec.group_index = static_cast<int>(g);
    const bool curved = rec.style.line_type == LineType::curve;
    const bool ribbon = mark.mark_type != MarkType::line;

    // Each boundary as (along, across) normalized coordinates.
    std::vector<double> along_mid, lo, hi, mid;
    for (const auto& e : grid[g]) {
      along_mid.push_back(e[ka].mid());
      lo.push_back(e[kc].start);
      hi.push_back(e[kc].end);
      mid.push_back(value_edge(e[kc]));
    }
    auto to_points = [&](const std::vector<double>& across_vals) {
      std::vector<Point> pts;
      if (!polar) {
        for (std::size_t i = 0; i < along_mid.size(); ++i)
          pts.push_back(along == Dimension::x ? Point{m.x(along_mid[i]), m.y(across_vals[i])}
                                              : Point{m.x(across_vals[i]), m.y(along_mid[i])});
        return pts;
      }
      std::vector<double> angles, radii;
      for (std::size_t i = 0; i < along_mid.size(); ++i) {
        const double av = along == Dimension::angle ? along_mid[i] : across_vals[i];
        const double rv = along == Dimension::angle ? across_vals[i] : along_mid[i];
        angles.push_back(m.angle(av));
        radii.push_back(m.radius(rv));
      }
      return polar_polyline(f, angles, radii, curved, closed);
    };
    if (ribbon)
      rec.geometry = RibbonGeom{to_points(hi), to_points(lo), closed, curved && !polar};
    else
      rec.geometry = PathGeom{to_points(mid), closed, curved && !polar};
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

// ------------------------------------------------------------------ public

Point CanvasFrame::polar_point(double angle_deg, double radius) const { return polar_at(cx, cy, angle_deg, radius); }

Point CanvasFrame::centroid() const {
  if (kind == CoordinateKind::cartesian) return {px + pw / 2, py + ph / 2};
  if (full_turn(a_start, a_end) && r_inner == 0) return {cx, cy};
  return polar_point((a_start + a_end) / 2, (r_inner + r_outer) / 2);
}

std::size_t Scene::mark_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.marks.size();
  return n;
}

const Layer* Scene::find(std::string_view key) const {
  for (const auto& l : layers)
    if (l.frame.key == key) return &l;
  return nullptr;
}

std::vector<CanvasFrame> layout_canvas(const DataProvider& data, const Canvas& canvas) {
  return CanvasBuilder(data).run(canvas);
}

std::vector<CanvasFrame> layout_canvas(const DslDocument& doc, const Canvas& canvas, Seed seed) {
  return layout_canvas(DataProvider(doc, seed), canvas);
}

std::vector<MarkRecord> render_marks(const ContainerId& leaf, const DataSpecification& spec, const MockTable& table,
                                     const CanvasFrame& frame, const EndpointResolver& endpoints) {
  if (!spec.mark_specification) return {};
  const auto& mark = *spec.mark_specification;

  if (mark.link_mark_type == LinkMarkType::node_link) {
    std::vector<MarkRecord> out;
    if (!endpoints) return out;
    for (const auto& g : table.groups)
      for (const auto& d : g) {
        if (!d.source || !d.target) continue;
        const auto a = endpoints(*d.source);
        const auto b = endpoints(*d.target);
        if (!a || !b) continue;
        const double dx = b->x - a->x, dy = b->y - a->y;
        const Point mid{(a->x + b->x) / 2, (a->y + b->y) / 2};
        // Normal (-dy, dx) scaled to 10% of the span.
        const Point control{mid.x - 0.1 * dy, mid.y + 0.1 * dx};
        MarkRecord rec;
        rec.mark_type = mark.mark_type;
        rec.geometry = LinkGeom{*a, control, *b};
        rec.style = style_of(d, spec);
        rec.container = leaf;
        rec.frame_key = frame.key;
        rec.instance = frame.instance;
        rec.group_index = d.group_index;
        rec.item_index = d.item_index;
        rec.is_node_link = true;
        out.push_back(std::move(rec));
      }
    return out;
  }

  if (mark.link_mark_type == LinkMarkType::group_type && is_link_capable(mark.mark_type))
    return group_links(leaf, spec, table, frame);

  const auto grid = resolve_grid(spec.data_structure, spec.layout_specification, table.element_grid());
  std::vector<MarkRecord> out;
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (std::size_t i = 0; i < grid[g].size(); ++i) {
      MarkRecord rec;
      rec.mark_type = mark.mark_type;
      rec.geometry = node_geometry(mark.mark_type, frame, grid[g][i]);
      rec.style = style_of(table.groups[g][i], spec);
      rec.container = leaf;
      rec.frame_key = frame.key;
      rec.instance = frame.instance;
      rec.group_index = static_cast<int>(g);
      rec.item_index = static_cast<int>(i);
      out.push_back(std::move(rec));
    }
  return out;
}

namespace {

Point mark_centroid(const MarkRecord& r) {
  return std::visit(
      [](const auto& g) -> Point {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, RectGeom>) {
          return {g.x + g.w / 2, g.y + g.h / 2};
        } else if constexpr (std::is_same_v<G, CircleGeom>) {
          return {g.cx, g.cy};
        } else if constexpr (std::is_same_v<G, ArcGeom>) {
          if (full_turn(g.a_start, g.a_end) && g.r_inner == 0) return {g.cx, g.cy};
          return polar_at(g.cx, g.cy, (g.a_start + g.a_end) / 2, (g.r_inner + g.r_outer) / 2);
        } else if constexpr (std::is_same_v<G, LinkGeom>) {
          return {(g.from.x + g.to.x) / 2, (g.from.y + g.to.y) / 2};
        } else {
          std::vector<Point> pts;
          if constexpr (std::is_same_v<G, PathGeom>) {
            pts = g.points;
          } else {
            pts = g.upper;
            pts.insert(pts.end(), g.lower.begin(), g.lower.end());
          }
          Point c;
          for (const auto& p : pts) {
            c.x += p.x;
            c.y += p.y;
          }
          if (!pts.empty()) {
            c.x /= static_cast<double>(pts.size());
            c.y /= static_cast<double>(pts.size());
          }
          return c;
        }
      },
      r.geometry);
}

bool is_node_link_leaf(const DslDocument& doc, const ContainerId& id) {
  const auto it = doc.data_specifications.find(id);
  return it != doc.data_specifications.end() && it->second.mark_specification &&
         it->second.mark_specification->link_mark_type == LinkMarkType::node_link;
}

template <typename Fn>
void run_parallel(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

Scene build_scene(const DataProvider& data, const Canvas& canvas, int threads) {
  const DslDocument& doc = data.document();
  Scene scene;
  scene.width = canvas.width;
  scene.height = canvas.height;
  for (auto& f : layout_canvas(data, canvas)) scene.layers.push_back({std::move(f), {}});

  auto leaf_spec = [&](const Layer& l) -> const DataSpecification* {
    // Template instance layers carry the template id but no marks.
    if (l.frame.id.is_template()) return nullptr;
    const auto it = doc.data_specifications.find(l.frame.id);
    return it == doc.data_specifications.end() ? nullptr : &it->second;
  };

  std::vector<std::size_t> node_layers, link_layers;
  for (std::size_t i = 0; i < scene.layers.size(); ++i) {
    if (!leaf_spec(scene.layers[i])) continue;
    (is_node_link_leaf(doc, scene.layers[i].frame.id) ? link_layers : node_layers).push_back(i);
  }

  run_parallel(node_layers.size(), threads, [&](std::size_t k) {
    Layer& l = scene.layers[node_layers[k]];
    l.marks = render_marks(l.frame.id, *leaf_spec(l), data.table(l.frame.id), l.frame);
  });

  const EndpointResolver resolve = [&](const std::string& ref) -> std::optional<Point> {
    const auto open = ref.find('[');
    const ContainerId id(ref.substr(0, open));
    if (open == std::string::npos) {
      for (const auto& l : scene.layers)
        if (l.frame.id == id) return l.frame.centroid();
      return std::nullopt;
    }
    const std::string suffix = ref;
    const auto index_text = ref.substr(open + 1, ref.size() - open - 2);
    std::size_t index = 0;
    try {
      index = std::stoul(index_text);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    if (id.is_template()) {
      for (const auto& l : scene.layers) {
        const auto& key = l.frame.key;
        if (key.size() >= suffix.size() && key.compare(key.size() - suffix.size(), suffix.size(), suffix) == 0 &&
            (key.size() == suffix.size() || key[key.size() - suffix.size() - 1] == '/'))
          return l.frame.centroid();
      }
      return std::nullopt;
    }
    for (const auto& l : scene.layers) {
      if (l.frame.id != id) continue;
      if (index < l.marks.size()) return mark_centroid(l.marks[index]);
      return std::nullopt;
    }
    return std::nullopt;
  };

  run_parallel(link_layers.size(), threads, [&](std::size_t k) {
    Layer& l = scene.layers[link_layers[k]];
    l.marks = render_marks(l.frame.id, *leaf_spec(l), data.table(l.frame.id), l.frame, resolve);
  });
  return scene;
}

std::string render_document(const DslDocument& doc, Seed seed, const Canvas& canvas,
                            const std::vector<UserOverride>& overrides, int threads) {
  const DataProvider data(doc, seed, overrides);
  return emit_svg(build_scene(data, canvas, threads));
}

}  // namespace recast
