#include "recast/validate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace recast {

namespace {

constexpr double kEps = 1e-9;

class Checker {
 public:
  explicit Checker(const DslDocument& doc) : doc_(doc) {}

  ValidationReport run() {
    walk(doc_.root, nullptr);
    check_templates_letters();
    check_specs();
    std::stable_sort(report_.entries.begin(), report_.entries.end(), [](const auto& a, const auto& b) {
      if (a.container != b.container) return a.container < b.container;
      if (a.rule != b.rule) return a.rule < b.rule;
      return a.message < b.message;
    });
    return std::move(report_);
  }

 private:
  void error(const ContainerId& id, std::string rule, std::string message) {
    report_.entries.push_back({Severity::error, id, std::move(rule), std::move(message)});
  }
  void warning(const ContainerId& id, std::string rule, std::string message) {
    report_.entries.push_back({Severity::warning, id, std::move(rule), std::move(message)});
  }

  void walk(const ContainerNode& n, const ContainerNode* parent) {
    if (!n.id.well_formed()) error(n.id, "id.format", "malformed container id '" + n.id.str() + "'");
    if (!parent && !n.id.is_root()) error(n.id, "id.format", "root container id must be \"0\"");
    if (parent && !n.id.is_child_of(parent->id))
      error(n.id, "id.child_prefix", "id is not " + parent->id.str() + " plus one segment");
    if (!seen_.insert(n.id).second) error(n.id, "id.unique", "duplicate container id");
    nodes_.emplace(n.id, &n);

    if (n.is_leaf) {
      if (!n.children.empty()) error(n.id, "leaf.consistency", "leaf container has components");
      if (!n.mark_type) error(n.id, "leaf.consistency", "leaf container has no mark_type");
    } else {
      if (n.children.empty()) error(n.id, "leaf.consistency", "non-leaf container has no components");
      if (n.mark_type) error(n.id, "leaf.consistency", "non-leaf container carries a mark_type");
    }
    if (n.id.is_template() && n.is_leaf)
      error(n.id, "template.leaf", "a template container must hold its marks in child containers");

    for (const auto& p : frame_problems(n.frame))
      error(n.id, kind_of(n.frame) == CoordinateKind::cartesian ? "frame.cartesian" : "frame.polar", p);
    if (parent && kind_of(parent->frame) == CoordinateKind::polar && kind_of(n.frame) == CoordinateKind::cartesian)
      error(n.id, "frame.polar_nesting", "a cartesian container cannot be nested inside a polar container");

    for (const auto& c : n.children) walk(c, &n);
  }

  void check_templates_letters() {
    std::map<std::string, std::set<ContainerId>> by_letter;
    for (const auto& [id, node] : nodes_)
      if (id.is_template()) by_letter[std::string(id.last_segment())].insert(id);
    for (const auto& [letter, ids] : by_letter) {
      if (ids.size() < 2) continue;
      for (const auto& id : ids)
        error(id, "template.letters", "template letter '" + letter + "' is used by more than one template");
    }
  }

  void check_specs() {
    for (const auto& [id, node] : nodes_) {
      const bool owner = node->is_leaf || id.is_template();
      const auto it = doc_.data_specifications.find(id);
      if (owner && it == doc_.data_specifications.end())
        error(id, "spec.coverage", "no data specification for this container");
      if (!owner && it != doc_.data_specifications.end())
        error(id, "spec.orphan", "data specification given for a container that is neither a leaf nor a template");
    }
    for (const auto& [id, spec] : doc_.data_specifications) {
      const auto nit = nodes_.find(id);
      if (nit == nodes_.end()) {
        error(id, "spec.orphan", "data specification for an unknown container");
        continue;
      }
      check_spec(*nit->second, spec);
    }
  }

  void check_spec(const ContainerNode& n, const DataSpecification& s) {
    const ContainerId& id = n.id;
    const bool is_template = id.is_template();
    if (is_template) {
      if (s.mark_specification)
        error(id, "spec.template_fields", "template specification must not carry mark_specification");
      if (s.non_layout_specification)
        error(id, "spec.template_fields", "template specification must not carry non_layout_specification");
    } else if (!s.mark_specification) {
      error(id, "spec.template_fields", "leaf specification has no mark_specification");
    }

    check_structure(id, kind_of(n.frame), s.data_structure);

    std::optional<MarkType> mark = n.mark_type;
    if (s.mark_specification) {
      const auto& m = *s.mark_specification;
      check_mark(id, m, s.data_structure);
      if (n.mark_type && *n.mark_type != m.mark_type)
        warning(id, "mark.type_mismatch",
                "mark_type " + std::string(to_string(m.mark_type)) + " disagrees with the tree's " +
                    std::string(to_string(*n.mark_type)));
      if (!mark) mark = m.mark_type;
    }

    check_layout(id, kind_of(n.frame), s, is_template);
    if (s.non_layout_specification && mark) check_styles(id, *mark, *s.non_layout_specification);
  }

  void check_structure(const ContainerId& id, CoordinateKind kind, const DataStructure& ds) {
    if (ds.primary.number < 1) error(id, "data.structure", "primary.number must be at least 1");
    const auto& dims = ds.primary.dimension;
    if (dims.empty() || dims.size() > 2)
      error(id, "data.structure", "primary.dimension must name one dimension or a pair");
    if (dims.size() == 2 && dims[0] == dims[1]) error(id, "data.structure", "primary.dimension pair repeats a dimension");
    auto check_kind = [&](Dimension d) {
      if (is_polar_dimension(d) != (kind == CoordinateKind::polar))
        error(id, "data.dimension_kind",
              "dimension " + std::string(to_string(d)) + " does not belong to a " + std::string(to_string(kind)) +
                  " frame");
    };
    for (auto d : dims) check_kind(d);
    if (ds.secondary) check_kind(ds.secondary->dimension);

    switch (ds.data_type) {
      case DataType::list_1d:
        if (ds.secondary) error(id, "data.structure", "1D_list must not carry a secondary size");
        break;
      case DataType::matrix_2d:
        if (!ds.secondary) {
          error(id, "data.structure", "2D_matrix requires a secondary size");
        } else if (const int* n = std::get_if<int>(&ds.secondary->number)) {
          if (*n < 1) error(id, "data.structure", "secondary.number must be at least 1");
        } else {
          error(id, "data.structure", "2D_matrix requires a scalar secondary.number");
        }
        break;
      case DataType::list_2d:
        if (!ds.secondary) {
          error(id, "data.structure", "2D_list requires a secondary size");
        } else if (const auto* arr = std::get_if<std::vector<int>>(&ds.secondary->number)) {
          if (static_cast<int>(arr->size()) != ds.primary.number)
            error(id, "data.structure",
                  "secondary.number has " + std::to_string(arr->size()) + " entries, primary.number is " +
                      std::to_string(ds.primary.number));
          if (std::any_of(arr->begin(), arr->end(), [](int v) { return v < 1; }))
            error(id, "data.structure", "every secondary.number entry must be at least 1");
        } else {
          error(id, "data.structure", "2D_list requires an array secondary.number");
        }
        break;
    }
  }

  void check_mark(const ContainerId& id, const MarkSpecification& m, const DataStructure& ds) {
    if ((m.link_mark_type == LinkMarkType::no_link) == m.is_link_mark)
      error(id, "mark.link_consistency", "is_link_mark must be false exactly when link_mark_type is no_link");
    if (m.link_mark_type == LinkMarkType::node_link) {
      if (!m.link_number)
        error(id, "mark.link_consistency", "node_link marks require link_number");
      else if (*m.link_number < 0)
        error(id, "mark.link_consistency", "link_number must not be negative");
    }
    if (m.link_mark_type == LinkMarkType::group_type) {
      if (!m.group_link_direction)
        error(id, "mark.link_consistency", "group_type marks require group_link_direction");
      if (!ds.secondary || ds.data_type == DataType::list_1d)
        error(id, "data.group_type_secondary", "group_type links need a 2D structure with a secondary size");
    }
  }

  void check_layout(const ContainerId& id, CoordinateKind kind, const DataSpecification& s, bool is_template) {
    const auto& layout = s.layout_specification;
    for (const auto& [dim, d] : layout.dims) {
      const std::string dn(to_string(dim));
      if (is_polar_dimension(dim) != (kind == CoordinateKind::polar))
        error(id, "layout.dimension_kind",
              "layout dimension " + dn + " is not available in a " + std::string(to_string(kind)) + " frame");
      if (!(d.size_min >= -kEps && d.size_min <= d.size_max + kEps && d.size_max <= 100 + kEps))
        error(id, "layout.size_range", dn + ": size_range must satisfy 0 <= min <= max <= 100");
      if (d.size_uniform && std::fabs(d.size_min - d.size_max) > kEps)
        error(id, "layout.size_uniform", dn + ": size_uniform requires size_range min = max");
      if (d.stacking && d.anchor != Anchor::stacking_decided)
        error(id, "layout.stacking_anchor", dn + ": stacking requires anchor stacking_decided");
      if (d.anchor_start && (*d.anchor_start < -kEps || *d.anchor_start > 100 + kEps))
        error(id, "layout.anchor_bounds", dn + ": anchor_start must lie in [0, 100]");
      if (d.anchor_interval && *d.anchor_interval < 0)
        error(id, "layout.anchor_bounds", dn + ": anchor_interval must not be negative");
      if (d.anchor_distribute == AnchorDistribution::uniform_interval) {
        if (!d.anchor_start || !d.anchor_interval) {
          error(id, "layout.uniform_interval", dn + ": uniform_interval requires anchor_start and anchor_interval");
        } else {
          const int n = s.data_structure.count_along(dim);
          const double end = *d.anchor_start + n * *d.anchor_interval;
          if (end > 100 + kEps) {
            std::ostringstream msg;
            msg << dn << ": anchor_start + " << n << " * anchor_interval = " << end << " exceeds 100";
            error(id, "layout.uniform_interval", msg.str());
          }
        }
      }
    }
    if (is_template) {
      auto need = [&](Dimension dim) {
        if (!layout.find(dim))
          error(id, "layout.missing_dimension",
                "template structure uses " + std::string(to_string(dim)) + " but the layout does not place it");
      };
      for (auto dim : s.data_structure.primary.dimension) need(dim);
      if (s.data_structure.secondary) need(s.data_structure.secondary->dimension);
    }

    const bool node_link = s.mark_specification && s.mark_specification->link_mark_type == LinkMarkType::node_link;
    if ((layout.source || layout.target) && !node_link)
      error(id, "layout.source_target", "source/target are only allowed on node_link marks");
    auto check_refs = [&](const std::optional<std::vector<ContainerId>>& refs, const char* what) {
      if (!refs) return;
      for (const auto& r : *refs) {
        const auto it = nodes_.find(r);
        if (it == nodes_.end() || !(it->second->is_leaf || r.is_template()))
          error(id, "layout.ref_unresolved",
                std::string(what) + " '" + r.str() + "' does not name a leaf or template container");
      }
    };
    check_refs(layout.source, "source");
    check_refs(layout.target, "target");
  }

  void check_styles(const ContainerId& id, MarkType mark, const NonLayoutSpecification& nl) {
    if (nl.line_type && !is_link_capable(mark))
      error(id, "style.line_type", "line_type applies only to line, band and area marks");
    for (const auto& [key, attr] : nl.attributes) {
      const std::string kn(to_string(key));
      if ((key == StyleKey::rx || key == StyleKey::ry) && mark != MarkType::rectangle)
        error(id, "style.rx_ry", kn + " applies only to rectangle marks");

      const bool fix = attr.fix.has_value(), lin = attr.linear.has_value(), opt = attr.options.has_value();
      bool payload_ok = false;
      switch (attr.scale) {
        case Scale::fix: payload_ok = fix && !lin && !opt; break;
        case Scale::linear: payload_ok = lin && !fix && !opt; break;
        default: payload_ok = opt && !fix && !lin && !attr.options->empty(); break;
      }
      if (!payload_ok)
        error(id, "style.payload", kn + ": scale " + std::string(to_string(attr.scale)) +
                                       " requires exactly its own payload field");

      std::vector<const AttributeValue*> values;
      if (attr.fix) values.push_back(&*attr.fix);
      if (attr.linear) {
        values.push_back(&attr.linear->first);
        values.push_back(&attr.linear->second);
      }
      if (attr.options)
        for (const auto& v : *attr.options) values.push_back(&v);

      const bool color_key = key == StyleKey::fill || key == StyleKey::stroke;
      for (const auto* v : values) {
        if (color_key) {
          const auto* s = std::get_if<std::string>(v);
          if (!s || !is_color(*s)) error(id, "style.color", kn + ": colors must be #RRGGBB strings");
          continue;
        }
        const auto* x = std::get_if<double>(v);
        if (!x) {
          error(id, "style.value_type", kn + ": expected a number");
        } else if (key == StyleKey::opacity && (*x < 0 || *x > 1)) {
          error(id, "style.opacity", "opacity values must lie in [0, 1]");
        } else if (*x < 0) {
          error(id, "style.value_type", kn + ": value must not be negative");
        }
      }
    }
  }

  const DslDocument& doc_;
  ValidationReport report_;
  std::set<ContainerId> seen_;
  std::map<ContainerId, const ContainerNode*> nodes_;
};

}  // namespace

std::string_view to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

bool ValidationReport::has_errors() const { return error_count() > 0; }

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.severity == Severity::error; }));
}

std::vector<ValidationEntry> ValidationReport::with_rule(std::string_view rule) const {
  std::vector<ValidationEntry> out;
  for (const auto& e : entries)
    if (e.rule == rule) out.push_back(e);
  return out;
}

std::vector<std::string> frame_problems(const CoordinateFrame& frame) {
  std::vector<std::string> out;
  if (const auto* c = std::get_if<CartesianFrame>(&frame)) {
    if (!(std::isfinite(c->x1) && std::isfinite(c->x2) && std::isfinite(c->y1) && std::isfinite(c->y2)))
      out.emplace_back("cartesian coordinates must be finite");
    if (!(c->x1 < c->x2)) out.emplace_back("cartesian frame requires x1 < x2");
    if (!(c->y1 < c->y2)) out.emplace_back("cartesian frame requires y1 < y2");
    return out;
  }
  const auto& p = std::get<PolarFrame>(frame);
  if (!(std::isfinite(p.cx) && std::isfinite(p.cy))) out.emplace_back("polar center must be finite");
  if (!(p.r1 >= 0 && p.r1 < p.r2 && p.r2 <= 1)) out.emplace_back("polar frame requires 0 <= r1 < r2 <= 1");
  if (!(p.a1 < p.a2)) out.emplace_back("polar frame requires a1 < a2");
  if (!(p.a2 - p.a1 <= 360)) out.emplace_back("polar frame spans more than 360 degrees");
  return out;
}

bool is_color(std::string_view s) {
  if (s.size() != 7 || s[0] != '#') return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
}

std::string format_report(const ValidationReport& report) {
  std::string out;
  for (const auto& e : report.entries) {
    out += to_string(e.severity);
    out += ' ';
    out += e.container.str();
    out += " [";
    out += e.rule;
    out += "] ";
    out += e.message;
    out += '\n';
  }
  return out;
}

ValidationReport validate(const DslDocument& doc) { return Checker(doc).run(); }

}  // namespace recast
