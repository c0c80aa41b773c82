// Exit-gate checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "json.hpp"
#include "recast/dsl_json.hpp"
#include "recast/edit.hpp"
#include "recast/error.hpp"
#include "recast/eval.hpp"
#include "recast/layout.hpp"
#include "recast/pipeline.hpp"
#include "recast/prompts.hpp"
#include "recast/render.hpp"
#include "recast/validate.hpp"

namespace fs = std::filesystem;
using namespace recast;
using Json = nlohmann::ordered_json;

namespace {

// ------------------------------------------------------------------ pinned limits

constexpr double kRoundTripSeconds = 5;
constexpr double kLayoutSeconds = 30;
constexpr double kRendererSeconds = 60;
constexpr double kReplaySeconds = 10;
constexpr int kLayoutSamples = 20000;
constexpr int kTemplateSamples = 2000;
constexpr double kLayoutTolerance = 1e-9;
constexpr double kClipTolerancePx = 0.5;
constexpr double kTableTolerance = 0.05;
constexpr double kAngleTolerance = 1e-6;
constexpr int kInjectionCases = 20;

const fs::path kData = RECAST_TEST_DATA_DIR;
const fs::path kPromptDir = RECAST_PROMPT_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CorpusDoc {
  std::string name;
  std::string text;
  DslDocument doc;
};

std::vector<CorpusDoc> load_corpus() {
  std::vector<fs::path> files;
  for (const char* group : {"basic", "composite"})
    for (const auto& e : fs::directory_iterator(kData / "corpus" / group))
      if (e.path().string().ends_with(".revis.json")) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<CorpusDoc> out;
  for (const auto& f : files) {
    CorpusDoc d{f.parent_path().filename().string() + "/" + f.filename().string(), slurp(f), {}};
    d.doc = parse_document(d.text);
    out.push_back(std::move(d));
  }
  return out;
}

/// Outcome of one criterion: failure messages (empty means pass) and a
/// short summary.
struct Outcome {
  std::vector<std::string> failures;
  std::string summary;

  void fail(std::string msg) {
    if (failures.size() < 8) failures.push_back(std::move(msg));
    else if (failures.size() == 8) failures.push_back("...");
  }
  void expect(bool ok, const std::string& msg) {
    if (!ok) fail(msg);
  }
};

// ------------------------------------------------------------------ 1. schema round-trip

Outcome schema_round_trip() {
  Outcome o;
  const auto corpus = load_corpus();
  int basic = 0, composite = 0;
  for (const auto& d : corpus) {
    (d.name.starts_with("basic/") ? basic : composite)++;
    const auto report = validate(d.doc);
    o.expect(report.empty(), d.name + ": " + format_report(report));
    const auto text = serialize(d.doc);
    o.expect(text == d.text, d.name + ": serialization differs from the stored bytes");
    o.expect(parse_document(text) == d.doc, d.name + ": reparse differs");
    o.expect(serialize(parse_document(text)) == text, d.name + ": second round trip differs");
  }
  o.expect(basic == 20 && composite == 20,
           "expected 20 basic and 20 composite documents, found " + std::to_string(basic) + " and " +
               std::to_string(composite));
  o.summary = std::to_string(corpus.size()) + " documents";
  return o;
}

// ------------------------------------------------------------------ 2. layout properties

/// Extents computed directly from the resolution rules.
std::vector<Extent> oracle_extents(const LayoutDimensionSpec& s, const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<Extent> out(n);
  auto clamp = [](double a, double b) {
    const double lo = std::clamp(a, 0.0, 100.0);
    return Extent{lo, std::max(lo, std::clamp(b, 0.0, 100.0))};
  };
  auto size_of = [&](double x) { return s.size_uniform ? s.size_min : s.size_min + x * (s.size_max - s.size_min); };
  if (s.stacking && s.subdividing) {
    double total = 0;
    for (double x : v) total += x;
    double at = 0;
    for (int i = 0; i < n; ++i) {
      const double w = total > 0 ? 100 * v[i] / total : 100.0 / n;
      out[i] = {at, i + 1 == n ? 100.0 : std::min(at + w, 100.0)};
      at = out[i].end;
    }
    return out;
  }
  if (s.stacking) {
    double total = 0;
    for (double x : v) total += size_of(x);
    double at = s.stacking_direction == StackDirection::middle ? 50 - total / 2 : 0;
    for (int i = 0; i < n; ++i) {
      const double w = size_of(v[i]);
      out[i] = s.stacking_direction == StackDirection::max ? clamp(100 - at - w, 100 - at) : clamp(at, at + w);
      at += w;
    }
    return out;
  }
  for (int i = 0; i < n; ++i) {
    const double w = size_of(v[i]);
    double p = 0;
    if (s.anchor_distribute == AnchorDistribution::fixed_value) p = s.anchor_start.value_or(0);
    if (s.anchor_distribute == AnchorDistribution::uniform_interval) p = *s.anchor_start + i * *s.anchor_interval;
    if (s.anchor_distribute == AnchorDistribution::flexible) p = v[i] * 100;
    if (s.anchor == Anchor::max) out[i] = clamp(p - w, p);
    else if (s.anchor == Anchor::middle) out[i] = clamp(p - w / 2, p + w / 2);
    else out[i] = clamp(p, p + w);
  }
  return out;
}

bool near(double a, double b, double tol = kLayoutTolerance) { return std::fabs(a - b) <= tol; }

std::string describe(const LayoutDimensionSpec& s, int n) {
  std::ostringstream os;
  os << "n=" << n << " stacking=" << s.stacking << " dir=" << to_string(s.stacking_direction)
     << " anchor=" << to_string(s.anchor) << " subdiv=" << s.subdividing << " uniform=" << s.size_uniform << " size=["
     << s.size_min << "," << s.size_max << "] dist=" << to_string(s.anchor_distribute);
  return os.str();
}

LayoutDimensionSpec random_spec(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0, 1);
  LayoutDimensionSpec s;
  s.stacking = u(rng) < 0.4;
  s.subdividing = s.stacking && u(rng) < 0.5;
  s.stacking_direction = static_cast<StackDirection>(rng() % 3);
  s.anchor = s.stacking ? Anchor::stacking_decided : static_cast<Anchor>(rng() % 3);
  s.size_uniform = u(rng) < 0.5;
  // Stacks whose total fits in [0,100] keep their boundaries exact; a fifth overflow to exercise clamping.
  const double cap = s.stacking && u(rng) < 0.8 ? 100.0 / n : 100.0;
  s.size_max = u(rng) * cap;
  s.size_min = s.size_uniform ? s.size_max : u(rng) * s.size_max;
  if (!s.stacking) {
    s.anchor_distribute = static_cast<AnchorDistribution>(rng() % 3);
    if (s.anchor_distribute == AnchorDistribution::uniform_interval) {
      // Valid specs: start + n * interval <= 100.
      s.anchor_start = u(rng) * 50;
      s.anchor_interval = (100 - *s.anchor_start) / n * (0.05 + 0.95 * u(rng));
    } else if (s.anchor_distribute == AnchorDistribution::fixed_value) {
      s.anchor_start = u(rng) * 100;
    }
  }
  return s;
}

void check_dimension_sample(Outcome& o, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  const int n = 1 + static_cast<int>(rng() % 40);
  const auto s = random_spec(rng, n);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  if (u(rng) < 0.05) std::fill(v.begin(), v.end(), 0.0);  // degenerate subdivision input
  const auto got = resolve_dimension(s, n, v);
  const auto want = oracle_extents(s, v);
  const std::string tag = describe(s, n);

  if (got.size() != static_cast<std::size_t>(n)) return o.fail(tag + ": wrong extent count");
  for (int i = 0; i < n; ++i) {
    // Containment.
    if (!(got[i].start >= -kLayoutTolerance && got[i].start <= got[i].end + kLayoutTolerance &&
          got[i].end <= 100 + kLayoutTolerance))
      return o.fail(tag + ": extent outside [0,100]");
    // Anchor placement and size rules.
    if (!near(got[i].start, want[i].start, 1e-7) || !near(got[i].end, want[i].end, 1e-7))
      return o.fail(tag + ": extent " + std::to_string(i) + " disagrees with the oracle");
  }
  if (s.stacking && s.subdividing) {
    if (!near(got.front().start, 0) || !near(got.back().end, 100)) return o.fail(tag + ": subdivision leaves a gap");
    for (int i = 0; i + 1 < n; ++i)
      if (!near(got[i].end, got[i + 1].start)) return o.fail(tag + ": subdivision is not contiguous");
  }
  if (s.stacking) {
    double sizes = 0;
    for (double x : v) sizes += s.size_uniform ? s.size_min : s.size_min + x * (s.size_max - s.size_min);
    if (s.subdividing || sizes <= 100 - 1e-9) {
      // Consecutive elements share one boundary and never overlap.
      for (int i = 0; i + 1 < n; ++i) {
        const bool shared = s.stacking_direction == StackDirection::max && !s.subdividing
                                ? near(got[i].start, got[i + 1].end)
                                : near(got[i].end, got[i + 1].start);
        if (!shared) return o.fail(tag + ": stacked neighbours do not share a boundary");
      }
    }
    std::vector<Extent> sorted = got;
    std::sort(sorted.begin(), sorted.end(),
              [](auto& a, auto& b) { return std::pair(a.start, a.end) < std::pair(b.start, b.end); });
    for (int i = 0; i + 1 < n; ++i)
      if (sorted[i].end > sorted[i + 1].start + kLayoutTolerance) return o.fail(tag + ": stacked interiors overlap");
  }
  if (!s.stacking && s.anchor_distribute == AnchorDistribution::uniform_interval && *s.anchor_interval > 0) {
    for (int i = 0; i + 1 < n; ++i) {
      const double a = s.anchor == Anchor::max ? got[i].end : s.anchor == Anchor::middle ? got[i].mid() : got[i].start;
      const double b = s.anchor == Anchor::max     ? got[i + 1].end
                       : s.anchor == Anchor::middle ? got[i + 1].mid()
                                                    : got[i + 1].start;
      // Clamped extents lose their anchor; compare only pairs that kept it.
      const double pa = *s.anchor_start + i * *s.anchor_interval, pb = pa + *s.anchor_interval;
      if (!(pb > pa)) return o.fail(tag + ": uniform anchors not increasing");
      if (!near(a, pa, 1e-7) || !near(b, pb, 1e-7)) continue;
      if (a > b + kLayoutTolerance) return o.fail(tag + ": uniform extents out of order");
    }
  }
  // Anchor bounds: fixed anchors sit exactly on anchor_start when nothing clamps.
  if (!s.stacking && s.anchor_distribute == AnchorDistribution::fixed_value) {
    const double p = *s.anchor_start;
    for (const auto& e : got) {
      const bool inside = p - s.size_max >= 0 && p + s.size_max <= 100;
      if (!inside) continue;
      const double pos = s.anchor == Anchor::max ? e.end : s.anchor == Anchor::middle ? e.mid() : e.start;
      if (!near(pos, p, 1e-7)) return o.fail(tag + ": fixed anchor moved");
    }
  }
  // Determinism.
  if (resolve_dimension(s, n, v) != got) o.fail(tag + ": resolution is not deterministic");
}

void check_template_sample(Outcome& o, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  const int p = 1 + static_cast<int>(rng() % 6), q = 1 + static_cast<int>(rng() % 6);
  DataSpecification spec;
  auto& ds = spec.data_structure;
  const bool tile = u(rng) < 0.5;
  ds.data_type = DataType::matrix_2d;
  ds.primary.number = p;
  ds.primary.dimension = {Dimension::x};
  ds.secondary = SecondarySize{q, Dimension::y, std::nullopt};
  auto grid_dim = [&](int n) {
    LayoutDimensionSpec d;
    if (tile) {
      d.stacking = true;
      d.subdividing = true;
      d.anchor = Anchor::stacking_decided;
      d.size_uniform = false;
      d.size_max = 100;
    } else {
      d.anchor_distribute = AnchorDistribution::uniform_interval;
      d.anchor_start = 0;
      d.anchor_interval = 100.0 / n;
      d.size_min = d.size_max = 100.0 / n * (0.3 + 0.7 * u(rng));
    }
    return d;
  };
  spec.layout_specification.dims[Dimension::x] = grid_dim(p);
  spec.layout_specification.dims[Dimension::y] = grid_dim(q);
  const double x1 = u(rng) * 50, y1 = u(rng) * 50;
  const CartesianFrame frame{x1, y1, x1 + 1 + u(rng) * 49, y1 + 1 + u(rng) * 49};

  // Equal values make subdivided grids regular, so boxes tile the frame.
  ElementGrid values(p, std::vector<ElementValue>(q));
  for (auto& g : values)
    for (auto& e : g) e.value = tile ? 1.0 : u(rng);
  const auto boxes = instantiate_template(spec, frame, values);
  if (boxes.size() != static_cast<std::size_t>(p * q)) return o.fail("template: wrong instance count");
  double area = 0;
  for (const auto& b : boxes) {
    const auto& f = std::get<CartesianFrame>(b.frame);
    if (f.x1 < frame.x1 - kLayoutTolerance || f.x2 > frame.x2 + kLayoutTolerance || f.y1 < frame.y1 - kLayoutTolerance ||
        f.y2 > frame.y2 + kLayoutTolerance || f.x1 > f.x2 || f.y1 > f.y2)
      return o.fail("template: instance box escapes the template frame");
    area += (f.x2 - f.x1) * (f.y2 - f.y1);
  }
  const double frame_area = (frame.x2 - frame.x1) * (frame.y2 - frame.y1);
  if (tile && std::fabs(area - frame_area) > 1e-6 * frame_area) o.fail("template: subdivided boxes do not tile the frame");
  if (!tile && area > frame_area * (1 + 1e-9)) o.fail("template: boxes overlap");
}

Outcome layout_properties() {
  Outcome o;
  std::mt19937_64 rng(0x5eed);
  for (int i = 0; i < kLayoutSamples; ++i) check_dimension_sample(o, rng);
  for (int i = 0; i < kTemplateSamples; ++i) check_template_sample(o, rng);

  // Hand-computed cases.
  LayoutDimensionSpec s;
  s.anchor_distribute = AnchorDistribution::uniform_interval;
  s.anchor_start = 10;
  s.anchor_interval = 30;
  s.size_min = s.size_max = 5;
  const std::vector<double> zeros(3, 0.0);
  o.expect(resolve_dimension(s, 3, zeros) == std::vector<Extent>{{10, 15}, {40, 45}, {70, 75}},
           "uniform interval worked example");
  LayoutDimensionSpec mid;
  mid.stacking = true;
  mid.anchor = Anchor::stacking_decided;
  mid.stacking_direction = StackDirection::middle;
  mid.size_min = mid.size_max = 20;
  o.expect(resolve_dimension(mid, 2, std::vector<double>(2, 0.5)) == std::vector<Extent>{{30, 50}, {50, 70}},
           "middle stack worked example");
  o.summary = std::to_string(kLayoutSamples) + " dimension and " + std::to_string(kTemplateSamples) +
              " template samples";
  return o;
}

// ------------------------------------------------------------------ 3. renderer oracles

/// Marks implied by the document alone: per leaf, items (node marks),
/// groups (group links) or assignments (node links), times the instance
/// count of every enclosing template.
std::size_t implied_mark_count(const DslDocument& doc) {
  std::size_t total = 0;
  std::function<void(const ContainerNode&, std::size_t)> walk = [&](const ContainerNode& n, std::size_t copies) {
    const auto it = doc.data_specifications.find(n.id);
    if (n.id.is_template()) copies *= static_cast<std::size_t>(it->second.data_structure.total_items());
    if (n.is_leaf) {
      const auto& s = it->second;
      const auto& m = *s.mark_specification;
      std::size_t per = static_cast<std::size_t>(s.data_structure.total_items());
      const bool link_capable = m.mark_type == MarkType::line || m.mark_type == MarkType::band || m.mark_type == MarkType::area;
      if (m.link_mark_type == LinkMarkType::node_link)
        per = std::min<std::size_t>(per, static_cast<std::size_t>(m.link_number.value_or(0)));
      else if (m.link_mark_type == LinkMarkType::group_type && link_capable)
        per = static_cast<std::size_t>(s.data_structure.primary.number);
      total += per * copies;
    }
    for (const auto& c : n.children) walk(c, copies);
  };
  walk(doc.root, 1);
  return total;
}

std::size_t count_marks(const boost::property_tree::ptree& t) {
  std::size_t n = 0;
  for (const auto& [key, child] : t) {
    if (key == "<xmlattr>") continue;
    if (child.get_child_optional("<xmlattr>.data-mark")) ++n;
    n += count_marks(child);
  }
  return n;
}

bool inside_box(const CanvasFrame& f, double x, double y) {
  return x >= f.px - kClipTolerancePx && x <= f.px + f.pw + kClipTolerancePx && y >= f.py - kClipTolerancePx &&
         y <= f.py + f.ph + kClipTolerancePx;
}

bool inside_ring(const CanvasFrame& f, double x, double y) {
  const double r = std::hypot(x - f.cx, y - f.cy);
  return r >= f.r_inner - kClipTolerancePx && r <= f.r_outer + kClipTolerancePx;
}

bool point_ok(const CanvasFrame& f, const Point& p) {
  return inside_box(f, p.x, p.y) && (f.kind == CoordinateKind::cartesian || inside_ring(f, p.x, p.y));
}

bool clipped(const CanvasFrame& f, const MarkRecord& m) {
  if (m.is_node_link) return true;
  if (const auto* r = std::get_if<RectGeom>(&m.geometry))
    return inside_box(f, r->x, r->y) && inside_box(f, r->x + r->w, r->y + r->h);
  if (const auto* c = std::get_if<CircleGeom>(&m.geometry)) {
    if (!inside_box(f, c->cx - c->r, c->cy - c->r) || !inside_box(f, c->cx + c->r, c->cy + c->r)) return false;
    if (f.kind == CoordinateKind::cartesian) return true;
    const double d = std::hypot(c->cx - f.cx, c->cy - f.cy);
    return d - c->r >= f.r_inner - kClipTolerancePx && d + c->r <= f.r_outer + kClipTolerancePx;
  }
  if (const auto* a = std::get_if<ArcGeom>(&m.geometry)) {
    const double angle_tol = f.r_outer > 0 ? kClipTolerancePx / f.r_outer * 180 / std::numbers::pi : 0;
    return near(a->cx, f.cx, 1e-9) && near(a->cy, f.cy, 1e-9) && a->r_inner >= f.r_inner - kClipTolerancePx &&
           a->r_outer <= f.r_outer + kClipTolerancePx && a->a_start >= f.a_start - angle_tol &&
           a->a_end <= f.a_end + angle_tol && a->r_inner <= a->r_outer && a->a_start <= a->a_end;
  }
  if (const auto* p = std::get_if<PathGeom>(&m.geometry))
    return std::all_of(p->points.begin(), p->points.end(), [&](const Point& q) { return point_ok(f, q); });
  if (const auto* r = std::get_if<RibbonGeom>(&m.geometry))
    return std::all_of(r->upper.begin(), r->upper.end(), [&](const Point& q) { return point_ok(f, q); }) &&
           std::all_of(r->lower.begin(), r->lower.end(), [&](const Point& q) { return point_ok(f, q); });
  return true;
}

bool doubled(const Point& a, const Point& b) { return b.x == 2 * a.x && b.y == 2 * a.y; }

bool doubled(const std::vector<Point>& a, const std::vector<Point>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!doubled(a[i], b[i])) return false;
  return true;
}

bool doubled(const Geometry& a, const Geometry& b) {
  if (a.index() != b.index()) return false;
  if (const auto* r = std::get_if<RectGeom>(&a)) {
    const auto& s = std::get<RectGeom>(b);
    return s.x == 2 * r->x && s.y == 2 * r->y && s.w == 2 * r->w && s.h == 2 * r->h;
  }
  if (const auto* c = std::get_if<CircleGeom>(&a)) {
    const auto& s = std::get<CircleGeom>(b);
    return s.cx == 2 * c->cx && s.cy == 2 * c->cy && s.r == 2 * c->r;
  }
  if (const auto* c = std::get_if<ArcGeom>(&a)) {
    const auto& s = std::get<ArcGeom>(b);
    return s.cx == 2 * c->cx && s.cy == 2 * c->cy && s.r_inner == 2 * c->r_inner && s.r_outer == 2 * c->r_outer &&
           s.a_start == c->a_start && s.a_end == c->a_end;
  }
  if (const auto* p = std::get_if<PathGeom>(&a)) return doubled(p->points, std::get<PathGeom>(b).points);
  if (const auto* r = std::get_if<RibbonGeom>(&a)) {
    const auto& s = std::get<RibbonGeom>(b);
    return doubled(r->upper, s.upper) && doubled(r->lower, s.lower);
  }
  const auto& l = std::get<LinkGeom>(a);
  const auto& s = std::get<LinkGeom>(b);
  return doubled(l.from, s.from) && doubled(l.control, s.control) && doubled(l.to, s.to);
}

bool doubled(const CanvasFrame& a, const CanvasFrame& b) {
  return b.px == 2 * a.px && b.py == 2 * a.py && b.pw == 2 * a.pw && b.ph == 2 * a.ph && b.cx == 2 * a.cx &&
         b.cy == 2 * a.cy && b.r_inner == 2 * a.r_inner && b.r_outer == 2 * a.r_outer && b.a_start == a.a_start &&
         b.a_end == a.a_end;
}

Outcome renderer_oracles() {
  Outcome o;
  std::size_t marks = 0;
  const Canvas base{800, 600}, twice{1600, 1200};
  for (const auto& d : load_corpus()) {
    for (Seed seed : {Seed{0}, Seed{42}}) {
      const std::string tag = d.name + " seed " + std::to_string(seed);
      const DataProvider data(d.doc, seed);
      const Scene scene = build_scene(data, base);
      const std::string svg = emit_svg(scene);

      boost::property_tree::ptree tree;
      std::istringstream in(svg);
      try {
        boost::property_tree::read_xml(in, tree);
      } catch (const std::exception& e) {
        o.fail(tag + ": SVG is not well-formed XML: " + e.what());
        continue;
      }
      const std::size_t expected = implied_mark_count(d.doc);
      const std::size_t elements = count_marks(tree);
      o.expect(elements == expected, tag + ": " + std::to_string(elements) + " mark elements, data structure implies " +
                                         std::to_string(expected));
      o.expect(scene.mark_count() == expected, tag + ": scene mark count differs");
      marks += elements;

      for (const auto& layer : scene.layers)
        for (const auto& m : layer.marks)
          if (!clipped(layer.frame, m)) {
            o.fail(tag + ": a " + std::string(to_string(m.mark_type)) + " mark escapes frame " + layer.frame.key);
            break;
          }

      const Scene big = build_scene(data, twice);
      bool same = big.layers.size() == scene.layers.size();
      for (std::size_t i = 0; same && i < scene.layers.size(); ++i) {
        same = doubled(scene.layers[i].frame, big.layers[i].frame) &&
               scene.layers[i].marks.size() == big.layers[i].marks.size();
        for (std::size_t k = 0; same && k < scene.layers[i].marks.size(); ++k)
          same = doubled(scene.layers[i].marks[k].geometry, big.layers[i].marks[k].geometry);
      }
      o.expect(same, tag + ": doubling the canvas does not double every coordinate");
    }
  }
  o.summary = std::to_string(marks) + " marks checked";
  return o;
}

// ------------------------------------------------------------------ 4. determinism

std::string run_cli(const std::string& args) {
#ifdef RECAST_CLI_PATH
  const std::string cmd = std::string("'") + RECAST_CLI_PATH + "' " + args;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {};
  std::string out;
  char buf[65536];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return WIFEXITED(status) && WEXITSTATUS(status) == 0 ? out : std::string();
#else
  (void)args;
  return {};
#endif
}

Outcome determinism() {
  Outcome o;
  int checks = 0;
  for (const auto& d : load_corpus()) {
    for (Seed seed : {Seed{1}, Seed{2024}}) {
      const Canvas canvas{640, 480};
      const std::string first = render_document(d.doc, seed, canvas);
      for (int run = 0; run < 2; ++run)
        o.expect(render_document(d.doc, seed, canvas) == first, d.name + ": repeated render differs");
      for (int threads : {2, 4, 8})
        o.expect(render_document(d.doc, seed, canvas, {}, threads) == first,
                 d.name + ": render with " + std::to_string(threads) + " threads differs");
      checks += 6;
    }
  }
#ifdef RECAST_CLI_PATH
  // Separate processes, including parallel mark generation.
  const auto doc = (kData / "corpus" / "composite" / "02_linked_panels.revis.json").string();
  const std::string a = run_cli("render '" + doc + "' --seed 9 --width 900 --height 700");
  o.expect(!a.empty(), "cli render failed");
  o.expect(run_cli("render '" + doc + "' --seed 9 --width 900 --height 700") == a, "second cli run differs");
  o.expect(run_cli("render '" + doc + "' --seed 9 --width 900 --height 700 --threads 4") == a,
           "third cli run (4 threads) differs");
  o.expect(a == render_document(parse_document(slurp(doc)), 9, {900, 700}), "cli output differs from the library");
  checks += 4;
#endif
  o.summary = std::to_string(checks) + " comparisons";
  return o;
}

// ------------------------------------------------------------------ 5. eval arithmetic

struct TableRow {
  const char* id;
  double printed;
  int match;
  int mismatch;
};

// Per-chart counts of the basic-chart evaluation table.
constexpr TableRow kTable[] = {
    {"01", 100.0, 18, 0}, {"02", 100.0, 17, 0}, {"03", 100.0, 18, 0}, {"04", 94.4, 17, 1}, {"05", 83.3, 15, 3},
    {"06", 100.0, 18, 0}, {"07", 100.0, 18, 0}, {"08", 100.0, 17, 0}, {"09", 72.2, 13, 5}, {"10", 84.2, 16, 3},
    {"11", 100.0, 19, 0}, {"12", 77.8, 14, 4}, {"13", 94.7, 18, 1}, {"14", 100.0, 17, 0}, {"15", 100.0, 17, 0},
    {"16", 100.0, 18, 0}, {"17", 100.0, 18, 0}, {"18", 94.4, 17, 1}, {"19", 100.0, 13, 0}, {"20", 100.0, 13, 0},
};

const std::map<std::string, std::vector<std::string>> kEnumValues = {
    {"mark_type", {"circle", "arc", "rectangle", "line", "band", "area"}},
    {"link_mark_type", {"no_link", "group_type", "node_link"}},
    {"dimension", {"x", "y", "radius", "angle"}},
    {"group_link_direction", {"x", "y", "radius", "angle"}},
    {"stacking_direction", {"min", "middle", "max"}},
    {"anchor", {"min", "middle", "max", "stacking_decided"}},
    {"anchor_distribute", {"fixed_value", "uniform_interval", "flexible"}},
    {"line_type", {"curve", "straight"}},
};

Json* find_tree_node(Json& node, const std::string& id) {
  if (node.at("container_id") == id) return &node;
  if (node.contains("components"))
    for (auto& c : node["components"])
      if (auto* hit = find_tree_node(c, id)) return hit;
  return nullptr;
}

/// Changes the attribute at `path` to a different value of the same kind.
/// Returns false when the attribute is not a supported mutation target.
bool mutate(Json& doc, const AttributePath& path, std::mt19937_64& rng) {
  std::vector<std::string> parts;
  std::stringstream ss(path.field);
  for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
  if (parts.empty() || parts[0] == "coordinate" || path.field == "data_structure.data_type") return false;

  Json* at = nullptr;
  if (parts[0] == "coordinate_system") {
    at = find_tree_node(doc, path.container.str());
    if (!at) return false;
  } else {
    at = &doc["data_specification"][path.container.str()];
  }
  for (const auto& p : parts) {
    if (!at->is_object() || !at->contains(p)) return false;
    at = &(*at)[p];
  }
  Json& v = *at;
  const std::string& key = parts.back();
  if (v.is_boolean()) {
    v = !v.get<bool>();
  } else if (v.is_number_integer()) {
    v = v.get<long long>() + 1 + static_cast<long long>(rng() % 5);
  } else if (v.is_number()) {
    v = v.get<double>() + 0.25 + static_cast<double>(rng() % 7);
  } else if (v.is_null()) {
    v = 5;
  } else if (v.is_string()) {
    const auto it = kEnumValues.find(key);
    if (it == kEnumValues.end()) return false;
    std::vector<std::string> others;
    for (const auto& e : it->second)
      if (e != v.get<std::string>()) others.push_back(e);
    v = others[rng() % others.size()];
  } else if (v.is_array() && !v.empty() && v[0].is_number()) {
    for (auto& e : v) e = e.get<double>() + 1;
  } else if (v.is_object() && v.contains("scale")) {
    if (v.contains("fix") && v["fix"].is_string()) v["fix"] = v["fix"] == "#123456" ? "#654321" : "#123456";
    else if (v.contains("fix")) v["fix"] = v["fix"].get<double>() + 3;
    else v = Json{{"scale", "fix"}, {"fix", "#123456"}};
  } else {
    return false;
  }
  return true;
}

Outcome eval_arithmetic() {
  Outcome o;
  AccuracyReport report;
  for (const auto& row : kTable) {
    CaseResult c;
    c.name = row.id;
    c.matched = row.match;
    c.mismatched = row.mismatch;
    o.expect(std::fabs(rounded_accuracy(c.matched, c.total()) - row.printed) <= kTableTolerance,
             std::string("row ") + row.id + " gives " + std::to_string(rounded_accuracy(c.matched, c.total())));
    o.expect(std::fabs(c.accuracy() - row.printed) <= kTableTolerance, std::string("row ") + row.id + " unrounded");
    report.cases.push_back(c);
  }
  const auto overall = report.overall();
  o.expect(overall.matched == 331 && overall.total() == 349, "overall counts are not 331/349");
  o.expect(std::fabs(rounded_accuracy(overall.matched, overall.total()) - 94.8) <= kTableTolerance, "overall accuracy");
  const auto reparsed = parse_report_csv(format_report_csv(report));
  o.expect(reparsed.overall().matched == 331 && reparsed.overall().total() == 349, "CSV report round trip");

  // Mismatch injection against a ledger.
  const auto corpus = load_corpus();
  std::mt19937_64 rng(0x1e5);
  int injected = 0;
  for (int k = 0; k < kInjectionCases; ++k) {
    const auto& gt = corpus[static_cast<std::size_t>(k) * corpus.size() / kInjectionCases];
    const auto applicable = applicable_attributes(gt.doc);
    Json doc = Json::parse(gt.text);
    std::set<AttributePath> ledger;
    const int want = static_cast<int>(rng() % 6);
    std::vector<AttributePath> order = applicable;
    std::shuffle(order.begin(), order.end(), rng);
    for (const auto& p : order) {
      if (static_cast<int>(ledger.size()) == want) break;
      if (mutate(doc, p, rng)) ledger.insert(p);
    }
    const std::string name = "inject-" + std::to_string(k) + " (" + gt.name + ")";
    DslDocument generated;
    try {
      generated = parse_document(doc.dump());
    } catch (const ParseError& e) {
      o.fail(name + ": mutated document does not parse: " + e.what());
      continue;
    }
    const auto result = score(gt.doc, generated, name);
    std::set<AttributePath> found;
    for (const auto& m : result.mismatches) found.insert(m.path);
    o.expect(found == ledger, name + ": " + std::to_string(found.size()) + " mismatches reported, ledger has " +
                                  std::to_string(ledger.size()));
    o.expect(result.total() == static_cast<int>(applicable.size()), name + ": applicable count changed");
    o.expect(result.mismatched == static_cast<int>(ledger.size()), name + ": mismatch tally");
    injected += static_cast<int>(ledger.size());
  }
  std::ostringstream s;
  s << "overall " << std::fixed << std::setprecision(1) << rounded_accuracy(overall.matched, overall.total()) << "% ("
    << overall.matched << "/" << overall.total() << "), " << injected << " injected mismatches over "
    << kInjectionCases << " cases";
  o.summary = s.str();
  return o;
}

// ------------------------------------------------------------------ 6. pipeline replay

Outcome pipeline_replay() {
  Outcome o;
  const std::map<PromptId, std::string> pinned{
      {PromptId::mark_parsing, "4aed436d50a7f7c02069acb94cc2e8dddf4944e352b217622c0c8539005ef3cf"},
      {PromptId::step1_structure, "67a8f693e6d730c350a4bef7eb77b30a61428b2719a8b464494bffdb11c1aab2"},
      {PromptId::template_parsing_1, "290b9c45340fd6870c692c0fcdac280b09dbf8a126b96f53ff5f514b19eccfcf"},
      {PromptId::template_parsing_2, "dd13b1fbd867262b33130e317203eba5d08f412f72daab8597712e0ceb59c78d"},
  };
  for (auto id : all_prompts()) {
    const std::string name(to_string(id));
    o.expect(sha256_hex(prompt_text(id)) == pinned.at(id), "embedded prompt " + name + " digest");
    o.expect(sha256_hex(slurp(kPromptDir / (name + ".txt"))) == pinned.at(id), "prompt file " + name + " digest");
  }

  int cases = 0, responses = 0;
  for (const std::string name : {"bar", "small_multiples", "composite"}) {
    const auto dir = kData / "fixtures" / name;
    const std::string expected = slurp(dir / "final.revis.json");
    // An unreachable endpoint: any live request would fail the replay.
    MllmEndpointConfig config;
    config.base_url = "http://127.0.0.1:9";
    config.api_key.clear();
    try {
      o.expect(serialize(replay_fixture_case(dir, config)) == expected, name + ": replayed document differs");
    } catch (const std::exception& e) {
      o.fail(name + ": replay failed: " + e.what());
      continue;
    }
    FixtureTransport fixtures(dir);
    const auto run = run_pipeline(name, read_image(dir / "image.png"), fixtures, config);
    if (run.status != RunStatus::done || !run.document) {
      o.fail(name + ": pipeline run failed: " + run.failure);
      continue;
    }
    o.expect(serialize(*run.document) == expected, name + ": assembled document differs");
    std::size_t recorded = 0;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".txt") ++recorded;
    o.expect(fixtures.served().size() == recorded, name + ": not every recorded response was used");
    responses += static_cast<int>(fixtures.served().size());
    ++cases;
  }
  o.summary = std::to_string(cases) + " cases, " + std::to_string(responses) + " recorded responses, 4 prompt digests";
  return o;
}

// ------------------------------------------------------------------ 7. scenarios

struct ArcSpan {
  double start = 0;
  double extent = 0;
};

double bearing(double x, double y, double cx, double cy) {
  double a = std::atan2(x - cx, cy - y) * 180 / std::numbers::pi;
  if (a < 0) a += 360;
  return a;
}

/// Angular span of every arc path of `container`, keyed by group/item.
std::map<std::string, ArcSpan> arc_spans(const std::string& svg, const std::string& container, double cx, double cy) {
  std::map<std::string, ArcSpan> out;
  const std::regex path_re(R"re(<path d="([^"]*)"[^>]*data-container="([^"]*)"[^>]*data-group="(\d+)"(?: data-item="(\d+)")?)re");
  const std::regex num_re(R"([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), path_re); it != std::sregex_iterator(); ++it) {
    if ((*it)[2] != container) continue;
    const std::string d = (*it)[1];
    // Outer edge: the point after the first L, then the end of the first A.
    const auto l = d.find('L'), a = d.find('A');
    if (l == std::string::npos || a == std::string::npos) continue;
    std::vector<double> lnums, anums;
    const std::string lseg = d.substr(l + 1, a - l - 1);
    const std::string aseg = d.substr(a + 1, d.find_first_of("LZ", a) - a - 1);
    for (auto n = std::sregex_iterator(lseg.begin(), lseg.end(), num_re); n != std::sregex_iterator(); ++n)
      lnums.push_back(std::stod(n->str()));
    for (auto n = std::sregex_iterator(aseg.begin(), aseg.end(), num_re); n != std::sregex_iterator(); ++n)
      anums.push_back(std::stod(n->str()));
    if (lnums.size() != 2 || anums.size() != 7) continue;
    const double s = bearing(lnums[0], lnums[1], cx, cy);
    double e = bearing(anums[5], anums[6], cx, cy);
    double extent = e - s;
    if (extent < 0) extent += 360;
    out[(*it)[3].str() + "/" + (*it)[4].str()] = {s, extent};
  }
  return out;
}

std::size_t instance_layers(const std::string& svg, const std::string& template_id) {
  const std::regex re("<g data-frame=\"" + template_id + R"(\[\d+\]")");
  return static_cast<std::size_t>(std::distance(std::sregex_iterator(svg.begin(), svg.end(), re), std::sregex_iterator()));
}

Outcome scenarios() {
  Outcome o;
  const Canvas canvas{800, 600};
  // Redesign: keep only half of two rings.
  {
    const auto doc = parse_document(slurp(kData / "corpus" / "composite" / "01_concentric_rings.revis.json"));
    DslDocument edited = doc;
    for (const char* id : {"0-1", "0-2"}) {
      auto frame = std::get<PolarFrame>(find_container(edited, ContainerId(id)).frame);
      o.expect(frame.a1 == 0 && frame.a2 == 360, std::string(id) + " does not start as a full ring");
      frame.a1 = 180;
      edited = edit_frame(edited, ContainerId(id), frame);
    }
    o.expect(validate(edited).empty(), "edited rings do not validate");
    const std::string before = render_document(doc, 0, canvas), after = render_document(edited, 0, canvas);
    const double cx = 400, cy = 300;
    for (const char* id : {"0-1", "0-2"}) {
      const auto b = arc_spans(before, id, cx, cy), a = arc_spans(after, id, cx, cy);
      o.expect(!b.empty() && a.size() == b.size(), std::string(id) + ": arc counts differ");
      for (const auto& [key, span] : b) {
        const auto it = a.find(key);
        if (it == a.end()) continue;
        o.expect(std::fabs(it->second.extent - span.extent / 2) <= kAngleTolerance,
                 std::string(id) + " arc " + key + ": extent " + std::to_string(it->second.extent) + " vs " +
                     std::to_string(span.extent));
        o.expect(it->second.start >= 180 - kAngleTolerance && it->second.start + it->second.extent <= 360 + kAngleTolerance,
                 std::string(id) + " arc " + key + " leaves the left half");
      }
    }
    // The untouched scatter keeps its exact markup.
    const std::regex inner(R"re(<circle[^>]*data-container="0-0"[^>]*/>)re");
    auto collect = [&](const std::string& svg) {
      std::vector<std::string> v;
      for (auto it = std::sregex_iterator(svg.begin(), svg.end(), inner); it != std::sregex_iterator(); ++it)
        v.push_back(it->str());
      return v;
    };
    o.expect(collect(before) == collect(after), "0-0 changed although it was not edited");
  }
  // Template reuse: one more column of panels.
  std::size_t added = 0;
  {
    const auto doc = parse_document(slurp(kData / "corpus" / "composite" / "02_linked_panels.revis.json"));
    const auto edited = patch_spec(doc, ContainerId("0-a"), R"({"data_structure":{"data_size":{"primary":{"number":4}}}})");
    o.expect(validate(edited).empty(), "edited template does not validate");
    const std::string before = render_document(doc, 0, canvas), after = render_document(edited, 0, canvas);
    const auto nb = instance_layers(before, "0-a"), na = instance_layers(after, "0-a");
    added = na - nb;
    o.expect(nb == 12 && na == 16, "instance boxes went from " + std::to_string(nb) + " to " + std::to_string(na));
  }
  o.summary = "ring arcs halved; template edit added " + std::to_string(added) + " instance boxes";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_seconds;  // 0 means no runtime limit
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"schema round-trip", kRoundTripSeconds, schema_round_trip},
      {"layout property suite", kLayoutSeconds, layout_properties},
      {"renderer oracles", kRendererSeconds, renderer_oracles},
      {"render determinism", 0, determinism},
      {"eval arithmetic", 0, eval_arithmetic},
      {"pipeline fixture replay", kReplaySeconds, pipeline_replay},
      {"scenario regressions", 0, scenarios},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds)
      o.fail("took " + std::to_string(secs) + "s, limit " + std::to_string(c.limit_seconds) + "s");
    const bool ok = o.failures.empty();
    failed += ok ? 0 : 1;
    std::cout << (ok ? "PASS" : "FAIL") << "  " << c.name << "  (" << o.summary << "; " << std::fixed
              << std::setprecision(2) << secs << "s";
    if (c.limit_seconds > 0) std::cout << " of " << std::setprecision(0) << c.limit_seconds << "s";
    std::cout << ")\n";
    for (const auto& f : o.failures) std::cout << "      " << f << "\n";
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
  return failed == 0 ? 0 : 1;
}
