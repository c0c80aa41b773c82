#include "json_codec.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <set>

#include "recast/dsl_json.hpp"
#include "recast/error.hpp"

namespace recast::codec {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& reason) { throw ParseError(path, reason); }

std::string field_path(const std::string& base, std::string_view key) {
  std::string p = base;
  p += '.';
  p += key;
  return p;
}

std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const Json& require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  return j;
}

void reject_unknown(const Json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (auto a : allowed) known = known || it.key() == a;
    if (!known) fail(field_path(path, it.key()), "unknown field");
  }
}

const Json* optional_field(const Json& obj, std::string_view key) {
  auto it = obj.find(std::string(key));
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

const Json& required_field(const Json& obj, std::string_view key, const std::string& path) {
  auto it = obj.find(std::string(key));
  if (it == obj.end() || it->is_null()) fail(field_path(path, key), "missing required field");
  return *it;
}

bool as_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "number is not finite");
  return v;
}

int as_int(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<int>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v) && std::floor(v) == v && std::fabs(v) < 2147483647.0) return static_cast<int>(v);
  }
  fail(path, "expected an integer");
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

template <typename E>
E as_enum(const Json& j, const std::string& path, std::optional<E> (*lookup)(std::string_view), const char* what) {
  const std::string s = as_string(j, path);
  if (auto v = lookup(s)) return *v;
  fail(path, std::string("'") + s + "' is not a valid " + what);
}

AttributeValue as_attribute_value(const Json& j, const std::string& path) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return as_number(j, path);
  fail(path, "expected a number or a color string");
}

Json attribute_value_json(const AttributeValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return number(*d);
  return std::get<std::string>(v);
}

std::vector<Dimension> dimension_list(const Json& j, const std::string& path) {
  std::vector<Dimension> out;
  if (j.is_string()) {
    out.push_back(as_enum<Dimension>(j, path, dimension_from, "dimension"));
    return out;
  }
  if (!j.is_array() || j.empty()) fail(path, "expected a dimension or a non-empty list of dimensions");
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_enum<Dimension>(j[i], index_path(path, i), dimension_from, "dimension"));
  return out;
}

}  // namespace

Json number(double v) {
  if (v == 0) return 0;  // folds -0
  if (std::floor(v) == v && std::fabs(v) < 9007199254740992.0) return static_cast<std::int64_t>(v);
  return v;
}

Json parse_json(std::string_view text, const std::string& path) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    fail(path, std::string("malformed JSON: ") + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- frames

Json frame_to_json(const CoordinateFrame& f) {
  Json j = Json::object();
  if (const auto* c = std::get_if<CartesianFrame>(&f)) {
    j["x1"] = number(c->x1);
    j["y1"] = number(c->y1);
    j["x2"] = number(c->x2);
    j["y2"] = number(c->y2);
  } else {
    const auto& p = std::get<PolarFrame>(f);
    j["cx"] = number(p.cx);
    j["cy"] = number(p.cy);
    j["r1"] = number(p.r1);
    j["r2"] = number(p.r2);
    j["a1"] = number(p.a1);
    j["a2"] = number(p.a2);
  }
  return j;
}

CoordinateFrame frame_from_json(const Json& kind, const Json& system, const std::string& path) {
  const std::string kpath = field_path(path, "coordinate");
  const auto k = as_enum<CoordinateKind>(kind, kpath, coordinate_kind_from, "coordinate kind");
  const std::string spath = field_path(path, "coordinate_system");
  require_object(system, spath);
  auto num = [&](std::string_view key) { return as_number(required_field(system, key, spath), field_path(spath, key)); };
  if (k == CoordinateKind::cartesian) {
    reject_unknown(system, spath, {"x1", "y1", "x2", "y2"});
    return CartesianFrame{num("x1"), num("y1"), num("x2"), num("y2")};
  }
  reject_unknown(system, spath, {"cx", "cy", "r1", "r2", "a1", "a2"});
  return PolarFrame{num("cx"), num("cy"), num("r1"), num("r2"), num("a1"), num("a2")};
}

// ---------------------------------------------------------------- nodes

Json node_to_json(const ContainerNode& n) {
  Json j = Json::object();
  j["container_id"] = n.id.str();
  j["description"] = n.description;
  j["coordinate"] = std::string(to_string(kind_of(n.frame)));
  j["coordinate_system"] = frame_to_json(n.frame);
  j["if_leaf"] = n.is_leaf;
  if (n.mark_type) j["mark_type"] = std::string(to_string(*n.mark_type));
  if (!n.is_leaf || !n.children.empty()) {
    Json comps = Json::array();
    for (const auto& c : n.children) comps.push_back(node_to_json(c));
    j["components"] = std::move(comps);
  }
  return j;
}

ContainerNode node_from_json(const Json& j, const std::string& path, const ParseOptions& opt,
                             std::optional<CoordinateKind> inherited) {
  require_object(j, path);
  reject_unknown(j, path,
                 {"container_id", "description", "coordinate", "coordinate_system", "if_leaf", "mark_type",
                  "components", "data_specification"});
  ContainerNode n;
  n.id = ContainerId(as_string(required_field(j, "container_id", path), field_path(path, "container_id")));
  if (const auto* d = optional_field(j, "description")) n.description = as_string(*d, field_path(path, "description"));

  const Json* system = optional_field(j, "coordinate_system");
  const Json* kind = optional_field(j, "coordinate");
  Json inferred_kind;
  if (!kind && opt.lenient) {
    if (system && system->is_object() && system->contains("r1"))
      inferred_kind = "polar";
    else if (system && system->is_object() && system->contains("x1"))
      inferred_kind = "cartesian";
    else if (inherited)
      inferred_kind = std::string(to_string(*inherited));
    if (!inferred_kind.is_null()) kind = &inferred_kind;
  }
  if (!kind) fail(field_path(path, "coordinate"), "missing required field");
  if (!system) fail(field_path(path, "coordinate_system"), "missing required field");
  n.frame = frame_from_json(*kind, *system, path);

  if (const auto* m = optional_field(j, "mark_type"))
    n.mark_type = as_enum<MarkType>(*m, field_path(path, "mark_type"), mark_type_from, "mark type");

  const Json* comps = optional_field(j, "components");
  if (comps) {
    const std::string cpath = field_path(path, "components");
    if (!comps->is_array()) fail(cpath, "expected an array");
    for (std::size_t i = 0; i < comps->size(); ++i)
      n.children.push_back(node_from_json((*comps)[i], index_path(cpath, i), opt, kind_of(n.frame)));
  }

  if (const auto* leaf = optional_field(j, "if_leaf")) {
    n.is_leaf = as_bool(*leaf, field_path(path, "if_leaf"));
  } else if (opt.lenient) {
    n.is_leaf = n.children.empty() && n.mark_type.has_value();
  } else {
    fail(field_path(path, "if_leaf"), "missing required field");
  }
  return n;
}

// ---------------------------------------------------------------- data specification

namespace {

Json mark_to_json(const MarkSpecification& m) {
  Json j = Json::object();
  j["mark_type"] = std::string(to_string(m.mark_type));
  j["is_link_mark"] = m.is_link_mark;
  j["link_mark_type"] = std::string(to_string(m.link_mark_type));
  if (m.group_link_direction) j["group_link_direction"] = std::string(to_string(*m.group_link_direction));
  if (m.link_number) j["link_number"] = *m.link_number;
  if (m.node_use_once) j["node_use_once"] = *m.node_use_once;
  j["is_width_encoded_data"] = m.is_width_encoded_data;
  if (m.is_fully_connected) j["is_fully_connected"] = *m.is_fully_connected;
  if (m.is_bipartite) j["is_bipartite"] = *m.is_bipartite;
  return j;
}

MarkSpecification mark_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path,
                 {"mark_type", "is_link_mark", "link_mark_type", "group_link_direction", "link_number",
                  "node_use_once", "is_width_encoded_data", "is_fully_connected", "is_bipartite"});
  MarkSpecification m;
  m.mark_type = as_enum<MarkType>(required_field(j, "mark_type", path), field_path(path, "mark_type"), mark_type_from,
                                  "mark type");
  m.is_link_mark = as_bool(required_field(j, "is_link_mark", path), field_path(path, "is_link_mark"));
  m.link_mark_type = as_enum<LinkMarkType>(required_field(j, "link_mark_type", path),
                                           field_path(path, "link_mark_type"), link_mark_type_from, "link mark type");
  if (const auto* v = optional_field(j, "group_link_direction"))
    m.group_link_direction =
        as_enum<Dimension>(*v, field_path(path, "group_link_direction"), dimension_from, "dimension");
  if (const auto* v = optional_field(j, "link_number")) m.link_number = as_int(*v, field_path(path, "link_number"));
  if (const auto* v = optional_field(j, "node_use_once")) m.node_use_once = as_bool(*v, field_path(path, "node_use_once"));
  if (const auto* v = optional_field(j, "is_width_encoded_data"))
    m.is_width_encoded_data = as_bool(*v, field_path(path, "is_width_encoded_data"));
  if (const auto* v = optional_field(j, "is_fully_connected"))
    m.is_fully_connected = as_bool(*v, field_path(path, "is_fully_connected"));
  if (const auto* v = optional_field(j, "is_bipartite")) m.is_bipartite = as_bool(*v, field_path(path, "is_bipartite"));
  return m;
}

Json structure_to_json(const DataStructure& ds) {
  Json j = Json::object();
  j["data_type"] = std::string(to_string(ds.data_type));
  Json size = Json::object();
  Json primary = Json::object();
  primary["number"] = ds.primary.number;
  if (ds.primary.dimension.size() == 1) {
    primary["dimension"] = std::string(to_string(ds.primary.dimension.front()));
  } else {
    Json dims = Json::array();
    for (auto d : ds.primary.dimension) dims.push_back(std::string(to_string(d)));
    primary["dimension"] = std::move(dims);
  }
  if (ds.primary.explanation) primary["explanation"] = *ds.primary.explanation;
  size["primary"] = std::move(primary);
  if (ds.secondary) {
    Json secondary = Json::object();
    if (const int* n = std::get_if<int>(&ds.secondary->number))
      secondary["number"] = *n;
    else
      secondary["number"] = std::get<std::vector<int>>(ds.secondary->number);
    secondary["dimension"] = std::string(to_string(ds.secondary->dimension));
    if (ds.secondary->explanation) secondary["explanation"] = *ds.secondary->explanation;
    size["secondary"] = std::move(secondary);
  }
  j["data_size"] = std::move(size);
  return j;
}

DataStructure structure_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"data_type", "data_size"});
  DataStructure ds;
  ds.data_type = as_enum<DataType>(required_field(j, "data_type", path), field_path(path, "data_type"), data_type_from,
                                   "data type");
  const std::string spath = field_path(path, "data_size");
  const Json& size = require_object(required_field(j, "data_size", path), spath);
  reject_unknown(size, spath, {"primary", "secondary"});

  const std::string ppath = field_path(spath, "primary");
  const Json& primary = require_object(required_field(size, "primary", spath), ppath);
  reject_unknown(primary, ppath, {"number", "dimension", "explanation"});
  ds.primary.number = as_int(required_field(primary, "number", ppath), field_path(ppath, "number"));
  ds.primary.dimension = dimension_list(required_field(primary, "dimension", ppath), field_path(ppath, "dimension"));
  if (const auto* e = optional_field(primary, "explanation"))
    ds.primary.explanation = as_string(*e, field_path(ppath, "explanation"));

  if (const auto* sec = optional_field(size, "secondary")) {
    const std::string qpath = field_path(spath, "secondary");
    require_object(*sec, qpath);
    reject_unknown(*sec, qpath, {"number", "dimension", "explanation"});
    SecondarySize s;
    const Json& num = required_field(*sec, "number", qpath);
    if (num.is_array()) {
      std::vector<int> arr;
      for (std::size_t i = 0; i < num.size(); ++i) arr.push_back(as_int(num[i], index_path(field_path(qpath, "number"), i)));
      s.number = std::move(arr);
    } else {
      s.number = as_int(num, field_path(qpath, "number"));
    }
    const Json& dim = required_field(*sec, "dimension", qpath);
    const auto dims = dimension_list(dim, field_path(qpath, "dimension"));
    if (dims.size() != 1) fail(field_path(qpath, "dimension"), "secondary dimension must be a single dimension");
    s.dimension = dims.front();
    if (const auto* e = optional_field(*sec, "explanation")) s.explanation = as_string(*e, field_path(qpath, "explanation"));
    ds.secondary = std::move(s);
  }
  return ds;
}

Json dimension_spec_to_json(const LayoutDimensionSpec& d) {
  Json j = Json::object();
  j["stacking"] = d.stacking;
  j["stacking_direction"] = std::string(to_string(d.stacking_direction));
  j["anchor"] = std::string(to_string(d.anchor));
  j["subdividing"] = d.subdividing;
  j["2d_flatten"] = d.flatten_2d;
  j["size_uniform"] = d.size_uniform;
  j["size_range"] = Json::array({number(d.size_min), number(d.size_max)});
  j["anchor_distribute"] = std::string(to_string(d.anchor_distribute));
  j["anchor_interval"] = d.anchor_interval ? number(*d.anchor_interval) : Json(nullptr);
  j["anchor_start"] = d.anchor_start ? number(*d.anchor_start) : Json(nullptr);
  return j;
}

LayoutDimensionSpec dimension_spec_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path,
                 {"stacking", "stacking_direction", "anchor", "subdividing", "2d_flatten", "size_uniform",
                  "size_range", "anchor_distribute", "anchor_interval", "anchor_start"});
  LayoutDimensionSpec d;
  d.stacking = as_bool(required_field(j, "stacking", path), field_path(path, "stacking"));
  if (const auto* v = optional_field(j, "stacking_direction"))
    d.stacking_direction =
        as_enum<StackDirection>(*v, field_path(path, "stacking_direction"), stack_direction_from, "stacking direction");
  d.anchor = as_enum<Anchor>(required_field(j, "anchor", path), field_path(path, "anchor"), anchor_from, "anchor");
  if (const auto* v = optional_field(j, "subdividing")) d.subdividing = as_bool(*v, field_path(path, "subdividing"));
  if (const auto* v = optional_field(j, "2d_flatten")) d.flatten_2d = as_bool(*v, field_path(path, "2d_flatten"));
  d.size_uniform = as_bool(required_field(j, "size_uniform", path), field_path(path, "size_uniform"));
  const std::string rpath = field_path(path, "size_range");
  const Json& range = required_field(j, "size_range", path);
  if (!range.is_array() || range.size() != 2) fail(rpath, "expected [min, max]");
  d.size_min = as_number(range[0], index_path(rpath, 0));
  d.size_max = as_number(range[1], index_path(rpath, 1));
  d.anchor_distribute = as_enum<AnchorDistribution>(required_field(j, "anchor_distribute", path),
                                                    field_path(path, "anchor_distribute"), anchor_distribution_from,
                                                    "anchor distribution");
  if (const auto* v = optional_field(j, "anchor_interval")) d.anchor_interval = as_number(*v, field_path(path, "anchor_interval"));
  if (const auto* v = optional_field(j, "anchor_start")) d.anchor_start = as_number(*v, field_path(path, "anchor_start"));
  return d;
}

Json layout_to_json(const LayoutSpecification& l) {
  Json j = Json::object();
  for (auto dim : kAllDimensions) {
    if (const auto* d = l.find(dim)) j[std::string(to_string(dim))] = dimension_spec_to_json(*d);
  }
  auto ids = [](const std::vector<ContainerId>& v) {
    Json a = Json::array();
    for (const auto& id : v) a.push_back(id.str());
    return a;
  };
  if (l.source) j["source"] = ids(*l.source);
  if (l.target) j["target"] = ids(*l.target);
  return j;
}

LayoutSpecification layout_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"x", "y", "radius", "angle", "source", "target"});
  LayoutSpecification l;
  for (auto dim : kAllDimensions) {
    const std::string key(to_string(dim));
    if (const auto* v = optional_field(j, key)) l.dims[dim] = dimension_spec_from_json(*v, field_path(path, key));
  }
  auto ids = [&](std::string_view key) -> std::optional<std::vector<ContainerId>> {
    const auto* v = optional_field(j, key);
    if (!v) return std::nullopt;
    const std::string p = field_path(path, key);
    if (!v->is_array()) fail(p, "expected a list of container ids");
    std::vector<ContainerId> out;
    for (std::size_t i = 0; i < v->size(); ++i) out.emplace_back(as_string((*v)[i], index_path(p, i)));
    return out;
  };
  l.source = ids("source");
  l.target = ids("target");
  return l;
}

Json attribute_to_json(const NonLayoutAttribute& a) {
  Json j = Json::object();
  j["scale"] = std::string(to_string(a.scale));
  if (a.fix) j["fix"] = attribute_value_json(*a.fix);
  if (a.linear) j["linear"] = Json::array({attribute_value_json(a.linear->first), attribute_value_json(a.linear->second)});
  if (a.options) {
    Json opts = Json::array();
    for (const auto& o : *a.options) opts.push_back(attribute_value_json(o));
    j["options"] = std::move(opts);
  }
  return j;
}

NonLayoutAttribute attribute_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"scale", "fix", "linear", "options"});
  NonLayoutAttribute a;
  a.scale = as_enum<Scale>(required_field(j, "scale", path), field_path(path, "scale"), scale_from, "scale");
  if (const auto* v = optional_field(j, "fix")) a.fix = as_attribute_value(*v, field_path(path, "fix"));
  if (const auto* v = optional_field(j, "linear")) {
    const std::string p = field_path(path, "linear");
    if (!v->is_array() || v->size() != 2) fail(p, "expected [low, high]");
    a.linear = std::pair{as_attribute_value((*v)[0], index_path(p, 0)), as_attribute_value((*v)[1], index_path(p, 1))};
  }
  if (const auto* v = optional_field(j, "options")) {
    const std::string p = field_path(path, "options");
    if (!v->is_array()) fail(p, "expected a list");
    std::vector<AttributeValue> opts;
    for (std::size_t i = 0; i < v->size(); ++i) opts.push_back(as_attribute_value((*v)[i], index_path(p, i)));
    a.options = std::move(opts);
  }
  return a;
}

Json non_layout_to_json(const NonLayoutSpecification& n) {
  Json j = Json::object();
  if (n.line_type) j["line_type"] = std::string(to_string(*n.line_type));
  for (auto key : kAllStyleKeys) {
    if (const auto* a = n.find(key)) j[std::string(to_string(key))] = attribute_to_json(*a);
  }
  return j;
}

NonLayoutSpecification non_layout_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"line_type", "stroke_width", "opacity", "fill", "stroke", "rx", "ry"});
  NonLayoutSpecification n;
  if (const auto* v = optional_field(j, "line_type"))
    n.line_type = as_enum<LineType>(*v, field_path(path, "line_type"), line_type_from, "line type");
  for (auto key : kAllStyleKeys) {
    const std::string k(to_string(key));
    if (const auto* v = optional_field(j, k)) n.attributes[key] = attribute_from_json(*v, field_path(path, k));
  }
  return n;
}

}  // namespace

Json spec_to_json(const DataSpecification& s) {
  Json j = Json::object();
  j["data_structure"] = structure_to_json(s.data_structure);
  if (s.mark_specification) j["mark_specification"] = mark_to_json(*s.mark_specification);
  j["layout_specification"] = layout_to_json(s.layout_specification);
  if (s.non_layout_specification) j["non_layout_specification"] = non_layout_to_json(*s.non_layout_specification);
  return j;
}

DataSpecification spec_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"data_structure", "mark_specification", "layout_specification", "non_layout_specification"});
  DataSpecification s;
  s.data_structure = structure_from_json(required_field(j, "data_structure", path), field_path(path, "data_structure"));
  if (const auto* v = optional_field(j, "mark_specification"))
    s.mark_specification = mark_from_json(*v, field_path(path, "mark_specification"));
  if (const auto* v = optional_field(j, "layout_specification"))
    s.layout_specification = layout_from_json(*v, field_path(path, "layout_specification"));
  else
    fail(field_path(path, "layout_specification"), "missing required field");
  if (const auto* v = optional_field(j, "non_layout_specification"))
    s.non_layout_specification = non_layout_from_json(*v, field_path(path, "non_layout_specification"));
  return s;
}

Json document_to_json(const DslDocument& d) {
  Json j = node_to_json(d.root);
  Json specs = Json::object();
  for (const auto& [id, spec] : d.data_specifications) specs[id.str()] = spec_to_json(spec);
  j["data_specification"] = std::move(specs);
  return j;
}

DslDocument document_from_json(const Json& j, const std::string& path, const ParseOptions& opt) {
  DslDocument d;
  d.root = node_from_json(j, path, opt);
  // Only the root may carry data_specification.
  std::function<void(const Json&, const std::string&)> check_nested = [&](const Json& node, const std::string& p) {
    if (const auto* comps = optional_field(node, "components")) {
      for (std::size_t i = 0; i < comps->size(); ++i) {
        const std::string cp = index_path(field_path(p, "components"), i);
        if ((*comps)[i].contains("data_specification"))
          fail(field_path(cp, "data_specification"), "only the root container may carry data_specification");
        check_nested((*comps)[i], cp);
      }
    }
  };
  check_nested(j, path);
  const std::string spath = field_path(path, "data_specification");
  if (const auto* specs = optional_field(j, "data_specification")) {
    require_object(*specs, spath);
    for (auto it = specs->begin(); it != specs->end(); ++it) {
      ContainerId id(it.key());
      if (d.data_specifications.count(id)) fail(field_path(spath, it.key()), "duplicate container id");
      d.data_specifications.emplace(std::move(id), spec_from_json(it.value(), field_path(spath, it.key())));
    }
  }
  return d;
}

}  // namespace recast::codec

namespace recast {

DslDocument parse_document(std::string_view text) {
  return codec::document_from_json(codec::parse_json(text));
}

std::string serialize(const DslDocument& doc) { return codec::dump(codec::document_to_json(doc)); }

std::string canonicalize(std::string_view text) { return serialize(parse_document(text)); }

ContainerNode parse_container_tree(std::string_view text) {
  const auto j = codec::parse_json(text);
  if (j.is_object() && j.contains("data_specification"))
    throw ParseError("$.data_specification", "a bare container tree carries no data_specification");
  return codec::node_from_json(j, "$");
}

std::string serialize_tree(const ContainerNode& root) { return codec::dump(codec::node_to_json(root)); }

DataSpecification parse_data_specification(std::string_view text) {
  return codec::spec_from_json(codec::parse_json(text), "$");
}

std::string serialize_data_specification(const DataSpecification& spec) {
  return codec::dump(codec::spec_to_json(spec));
}

std::string serialize_frame(const CoordinateFrame& frame) { return codec::frame_to_json(frame).dump(); }

CoordinateFrame parse_frame(std::string_view kind, std::string_view coordinate_system_json) {
  return codec::frame_from_json(codec::Json(std::string(kind)), codec::parse_json(coordinate_system_json), "$");
}

std::string format_number(double v) {
  if (v == 0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace recast
