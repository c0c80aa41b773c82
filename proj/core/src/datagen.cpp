#include "recast/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include <boost/tokenizer.hpp>

#include "json_codec.hpp"
#include "recast/dsl_json.hpp"
#include "recast/edit.hpp"
#include "recast/error.hpp"
#include "recast/validate.hpp"

namespace recast {

namespace {

constexpr std::array<std::string_view, 15> kAllowedColumns{
    "value", "x", "y", "radius", "angle", "fill", "stroke", "stroke_width", "opacity", "rx", "ry",
    "source", "target", "group", "item"};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const std::string& key_name(StyleKey k) {
  static const std::map<StyleKey, std::string> names = [] {
    std::map<StyleKey, std::string> m;
    for (auto key : kAllStyleKeys) m[key] = std::string(to_string(key));
    return m;
  }();
  return names.at(k);
}

std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

void check_column(const std::string& name) {
  if (std::find(kAllowedColumns.begin(), kAllowedColumns.end(), name) == kAllowedColumns.end())
    throw DataError("unknown column '" + name + "'");
}

// ------------------------------------------------------------ table parsing

UserRow row_from_json(const codec::Json& j, const std::string& where) {
  if (!j.is_object()) throw DataError(where + ": expected an object per row");
  UserRow row;
  for (auto it = j.begin(); it != j.end(); ++it) {
    check_column(it.key());
    if (it->is_null()) continue;
    if (it->is_number()) {
      row.cells[it.key()] = it->get<double>();
    } else if (it->is_string()) {
      row.cells[it.key()] = it->get<std::string>();
    } else {
      throw DataError(where + "." + it.key() + ": expected a number or a string");
    }
  }
  return row;
}

void note_columns(UserTable& t) {
  std::set<std::string> seen(t.columns.begin(), t.columns.end());
  for (const auto& g : t.groups)
    for (const auto& r : g)
      for (const auto& [k, v] : r.cells)
        if (seen.insert(k).second) t.columns.push_back(k);
}

int as_index(const CellValue& v, const char* what) {
  const double* d = std::get_if<double>(&v);
  if (!d || *d < 0 || std::floor(*d) != *d) throw DataError(std::string(what) + " must be a non-negative integer");
  return static_cast<int>(*d);
}

/// Groups flat rows by their `group` column; rows keep upload order within a
/// group unless an `item` column orders them.
UserTable group_flat_rows(std::vector<UserRow> rows) {
  UserTable t;
  const bool has_group = std::all_of(rows.begin(), rows.end(), [](const UserRow& r) { return r.cells.count("group"); });
  const bool any_group = std::any_of(rows.begin(), rows.end(), [](const UserRow& r) { return r.cells.count("group"); });
  if (any_group && !has_group) throw DataError("the group column must be filled on every row");
  if (!has_group) {
    for (auto& r : rows) t.groups.push_back({std::move(r)});
    return t;
  }
  std::map<int, std::vector<UserRow>> by_group;
  for (auto& r : rows) by_group[as_index(r.cells.at("group"), "group")].push_back(std::move(r));
  for (auto& [g, members] : by_group) {
    if (std::all_of(members.begin(), members.end(), [](const UserRow& r) { return r.cells.count("item"); }))
      std::stable_sort(members.begin(), members.end(), [](const UserRow& a, const UserRow& b) {
        return as_index(a.cells.at("item"), "item") < as_index(b.cells.at("item"), "item");
      });
    t.groups.push_back(std::move(members));
  }
  t.grouped = true;
  return t;
}

UserTable parse_json_table(std::string_view text) {
  codec::Json j;
  try {
    j = codec::Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed JSON table: ") + e.what());
  }
  if (!j.is_array()) throw DataError("a JSON table must be an array");
  const bool nested = !j.empty() && std::all_of(j.begin(), j.end(), [](const auto& e) { return e.is_array(); });
  UserTable t;
  if (nested) {
    for (std::size_t g = 0; g < j.size(); ++g) {
      std::vector<UserRow> group;
      for (std::size_t i = 0; i < j[g].size(); ++i)
        group.push_back(row_from_json(j[g][i], "[" + std::to_string(g) + "][" + std::to_string(i) + "]"));
      t.groups.push_back(std::move(group));
    }
    t.grouped = true;
  } else {
    std::vector<UserRow> rows;
    for (std::size_t i = 0; i < j.size(); ++i) rows.push_back(row_from_json(j[i], "[" + std::to_string(i) + "]"));
    t = group_flat_rows(std::move(rows));
  }
  note_columns(t);
  return t;
}

UserTable parse_csv_table(std::string_view text) {
  using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::string> header;
  std::vector<UserRow> rows;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields;
    try {
      Tokenizer tok(line, boost::escaped_list_separator<char>('\\', ',', '"'));
      fields.assign(tok.begin(), tok.end());
    } catch (const boost::escaped_list_error& e) {
      throw DataError("CSV line " + std::to_string(line_no) + ": " + e.what());
    }
    if (header.empty()) {
      for (auto& f : fields) {
        f.erase(0, f.find_first_not_of(" \t"));
        f.erase(f.find_last_not_of(" \t") + 1);
        check_column(f);
      }
      header = std::move(fields);
      continue;
    }
    if (fields.size() != header.size())
      throw DataError("CSV line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                      " fields");
    UserRow row;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (fields[c].empty()) continue;
      if (auto n = parse_number(fields[c]))
        row.cells[header[c]] = *n;
      else
        row.cells[header[c]] = fields[c];
    }
    rows.push_back(std::move(row));
  }
  if (header.empty()) throw DataError("CSV table has no header row");
  UserTable t = group_flat_rows(std::move(rows));
  t.columns = header;
  note_columns(t);
  return t;
}

// ------------------------------------------------------------ user data helpers

struct Ref {
  ContainerId id;
  std::optional<int> index;
};

std::optional<Ref> parse_ref(std::string_view s) {
  const auto open = s.find('[');
  if (open == std::string_view::npos) return Ref{ContainerId(std::string(s)), std::nullopt};
  if (s.back() != ']') return std::nullopt;
  const auto idx = parse_number(s.substr(open + 1, s.size() - open - 2));
  if (!idx || *idx < 0 || std::floor(*idx) != *idx) return std::nullopt;
  return Ref{ContainerId(std::string(s.substr(0, open))), static_cast<int>(*idx)};
}

/// Addressable marks or instances of a referenced container, or nullopt
/// when it can only be referenced as a whole.
std::optional<int> addressable_count(const DslDocument& doc, const ContainerId& id) {
  const auto it = doc.data_specifications.find(id);
  if (it == doc.data_specifications.end()) return std::nullopt;
  return it->second.data_structure.total_items();
}

void check_ref(const DslDocument& doc, const std::string& text) {
  const auto ref = parse_ref(text);
  if (!ref || !find_node(doc.root, ref->id)) throw DataError("link endpoint '" + text + "' does not resolve");
  if (ref->index) {
    const auto n = addressable_count(doc, ref->id);
    if (!n || *ref->index >= *n) throw DataError("link endpoint '" + text + "' is out of range");
  }
}

void update_structure(DataStructure& ds, const std::vector<int>& shape) {
  const int groups = static_cast<int>(shape.size());
  ds.primary.number = groups;
  if (ds.data_type == DataType::list_1d || !ds.secondary) return;
  const bool equal = std::adjacent_find(shape.begin(), shape.end(), std::not_equal_to<>()) == shape.end();
  if (ds.data_type == DataType::matrix_2d && equal && groups > 0) {
    ds.secondary->number = shape.front();
  } else {
    ds.data_type = DataType::list_2d;
    ds.secondary->number = shape;
  }
}

/// Min-max normalization; a constant column maps to 1. With `keep_unit`,
/// columns already inside [0,1] pass through unchanged.
std::vector<double> normalize(const std::vector<double>& xs, bool keep_unit) {
  if (xs.empty()) return xs;
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  if (keep_unit && *lo >= 0 && *hi <= 1) return xs;
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = *hi == *lo ? 1.0 : (xs[i] - *lo) / (*hi - *lo);
  return out;
}

}  // namespace

// ------------------------------------------------------------------ tables

std::size_t MockTable::row_count() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.size();
  return n;
}

std::vector<int> MockTable::shape() const {
  std::vector<int> s;
  for (const auto& g : groups) s.push_back(static_cast<int>(g.size()));
  return s;
}

ElementGrid MockTable::element_grid() const {
  ElementGrid grid(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (const auto& d : groups[g]) grid[g].push_back(ElementValue{d.value, d.channels});
  return grid;
}

Seed derive_seed(Seed seed, const ContainerId& id) { return splitmix64(seed ^ fnv1a(id.str())); }

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::array<int, 3> parse_color(std::string_view hex) {
  if (!is_color(hex)) throw DataError("not a #RRGGBB color: '" + std::string(hex) + "'");
  std::array<int, 3> rgb{};
  for (int c = 0; c < 3; ++c) std::from_chars(hex.data() + 1 + 2 * c, hex.data() + 3 + 2 * c, rgb[c], 16);
  return rgb;
}

std::string format_color(const std::array<int, 3>& rgb) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out = "#";
  for (int c : rgb) {
    c = std::clamp(c, 0, 255);
    out += kHex[c >> 4];
    out += kHex[c & 15];
  }
  return out;
}

AttributeValue resolve_attribute(const NonLayoutAttribute& attr, int group_index, int item_index, double value,
                                 std::mt19937_64& rng) {
  auto pick = [](const std::vector<AttributeValue>& opts, long long i) -> AttributeValue {
    const auto n = static_cast<long long>(opts.size());
    return opts[static_cast<std::size_t>(((i % n) + n) % n)];
  };
  switch (attr.scale) {
    case Scale::fix:
      if (attr.fix) return *attr.fix;
      break;
    case Scale::linear:
      if (attr.linear) {
        const auto& [lo, hi] = *attr.linear;
        const double t = std::clamp(value, 0.0, 1.0);
        if (std::holds_alternative<double>(lo) && std::holds_alternative<double>(hi)) {
          const double a = std::get<double>(lo), b = std::get<double>(hi);
          return a + t * (b - a);
        }
        if (std::holds_alternative<std::string>(lo) && std::holds_alternative<std::string>(hi)) {
          const auto a = parse_color(std::get<std::string>(lo));
          const auto b = parse_color(std::get<std::string>(hi));
          std::array<int, 3> out{};
          for (int c = 0; c < 3; ++c) out[c] = static_cast<int>(std::lround(a[c] + t * (b[c] - a[c])));
          return format_color(out);
        }
        return lo;
      }
      break;
    case Scale::ordinal_primary:
      if (attr.options && !attr.options->empty()) return pick(*attr.options, group_index);
      break;
    case Scale::ordinal_secondary:
      if (attr.options && !attr.options->empty()) return pick(*attr.options, item_index);
      break;
    case Scale::categorical:
      if (attr.options && !attr.options->empty()) return (*attr.options)[rng() % attr.options->size()];
      break;
  }
  throw DataError("attribute has no payload for scale " + std::string(to_string(attr.scale)));
}

MockTable generate_table(const DataSpecification& spec, Seed seed, const ContainerId& id) {
  std::mt19937_64 rng(derive_seed(seed, id));
  MockTable t;
  const auto shape = spec.data_structure.group_sizes();
  t.groups.resize(shape.size());
  for (std::size_t g = 0; g < shape.size(); ++g) {
    for (int i = 0; i < shape[g]; ++i) {
      MockDatum d;
      d.group_index = static_cast<int>(g);
      d.item_index = i;
      d.value = 0.2 + 0.8 * unit_draw(rng);
      for (auto& c : d.channels) c = unit_draw(rng);
      if (spec.non_layout_specification)
        for (const auto& [key, attr] : spec.non_layout_specification->attributes)
          d.styles[key] = resolve_attribute(attr, d.group_index, i, d.value, rng);
      t.groups[g].push_back(std::move(d));
    }
  }
  return t;
}

// ------------------------------------------------------------------ links

LinkUniverse link_universe(const DslDocument& doc, const LayoutSpecification& layout) {
  auto expand = [&](const std::vector<ContainerId>& ids) {
    std::vector<std::string> out;
    for (const auto& id : ids) {
      if (!find_node(doc.root, id)) throw DataError("link container '" + id.str() + "' does not exist");
      if (const auto n = addressable_count(doc, id)) {
        for (int k = 0; k < *n; ++k) out.push_back(id.str() + "[" + std::to_string(k) + "]");
      } else {
        out.push_back(id.str());
      }
    }
    return out;
  };
  LinkUniverse u;
  const auto& src = layout.source;
  const auto& dst = layout.target;
  u.single_container = !src || !dst || *src == *dst;
  if (src) u.sources = expand(*src);
  if (dst) u.targets = expand(*dst);
  if (u.single_container) {
    if (u.sources.empty()) u.sources = u.targets;
    u.targets = u.sources;
  }
  return u;
}

std::vector<LinkAssignment> generate_link_assignments(const MarkSpecification& mark, const LinkUniverse& universe,
                                                      Seed seed) {
  const int n = mark.link_number.value_or(0);
  if (n <= 0) return {};
  std::mt19937_64 rng(seed);
  std::vector<LinkAssignment> out;
  out.reserve(n);
  if (universe.single_container) {
    const auto m = universe.sources.size();
    if (m < 2) throw DataError("a single-container link needs at least two endpoints");
    for (int k = 0; k < n; ++k) {
      const auto a = rng() % m;
      auto b = rng() % (m - 1);
      if (b >= a) ++b;
      out.push_back({universe.sources[a], universe.sources[b]});
    }
    return out;
  }
  if (universe.sources.empty() || universe.targets.empty()) throw DataError("link universe is empty");
  for (int k = 0; k < n; ++k) {
    const auto a = rng() % universe.sources.size();
    const auto b = rng() % universe.targets.size();
    out.push_back({universe.sources[a], universe.targets[b]});
  }
  return out;
}

// ------------------------------------------------------------------ user data

bool UserTable::has_column(std::string_view name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::size_t UserTable::row_count() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.size();
  return n;
}

UserTable parse_user_table(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) throw DataError("empty table");
  if (text[first] == '[') return parse_json_table(text);
  return parse_csv_table(text);
}

UserDataResult apply_user_data(const DslDocument& doc, const ContainerId& id, const UserTable& upload, Seed seed,
                               const MockTable* base) {
  const auto sit = doc.data_specifications.find(id);
  if (sit == doc.data_specifications.end()) throw NotFoundError("no data specification for " + id.str());
  const DataSpecification& spec = sit->second;
  const auto& ds = spec.data_structure;
  const auto current_shape = ds.group_sizes();
  const bool two_d = ds.data_type != DataType::list_1d && ds.secondary.has_value();

  // Flatten the upload into rows addressed by (group, item) in the new shape.
  std::vector<int> shape;
  std::vector<const UserRow*> rows;
  if (!two_d) {
    for (const auto& g : upload.groups)
      for (const auto& r : g) rows.push_back(&r);
    shape.assign(rows.size(), 1);
  } else if (upload.grouped) {
    for (const auto& g : upload.groups) {
      if (g.empty()) throw DataError("empty group in uploaded table");
      shape.push_back(static_cast<int>(g.size()));
      for (const auto& r : g) rows.push_back(&r);
    }
  } else {
    for (const auto& g : upload.groups)
      for (const auto& r : g) rows.push_back(&r);
    if (rows.size() != static_cast<std::size_t>(ds.total_items()))
      throw DataError("a 2D container needs grouped rows (an array of arrays or a group column)");
    shape = current_shape;
  }
  if (rows.empty()) throw DataError("uploaded table has no rows");

  DslDocument out_doc = doc;
  DataSpecification new_spec = spec;
  MockTable table;
  if (shape == current_shape) {
    table = base ? *base : generate_table(spec, seed, id);
    if (table.shape() != shape) table = generate_table(spec, seed, id);
  } else {
    DataStructure nds = ds;
    update_structure(nds, shape);
    for (auto& [dim, dspec] : new_spec.layout_specification.dims) {
      if (dspec.anchor_distribute != AnchorDistribution::uniform_interval || !dspec.anchor_interval) continue;
      const int before = ds.count_along(dim), after = nds.count_along(dim);
      if (before > 0 && after > 0 && before != after) *dspec.anchor_interval *= static_cast<double>(before) / after;
    }
    new_spec.data_structure = std::move(nds);
    out_doc.data_specifications[id] = new_spec;
    table = generate_table(new_spec, seed, id);
  }

  std::vector<MockDatum*> cells;
  for (auto& g : table.groups)
    for (auto& d : g) cells.push_back(&d);

  auto numeric_column = [&](const std::string& name, bool keep_unit) -> std::optional<std::vector<double>> {
    if (!upload.has_column(name)) return std::nullopt;
    std::vector<double> xs;
    std::vector<std::size_t> at;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto it = rows[r]->cells.find(name);
      if (it == rows[r]->cells.end()) continue;
      const double* v = std::get_if<double>(&it->second);
      if (!v) throw DataError("column '" + name + "' must be numeric");
      xs.push_back(*v);
      at.push_back(r);
    }
    const auto norm = normalize(xs, keep_unit);
    std::vector<double> full(rows.size(), std::nan(""));
    for (std::size_t k = 0; k < at.size(); ++k) full[at[k]] = norm[k];
    return full;
  };

  if (auto col = numeric_column("value", false)) {
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (!std::isnan((*col)[r])) cells[r]->value = (*col)[r];
  }
  for (auto dim : kAllDimensions) {
    if (auto col = numeric_column(std::string(to_string(dim)), true))
      for (std::size_t r = 0; r < rows.size(); ++r)
        if (!std::isnan((*col)[r])) cells[r]->channels[index_of(dim)] = (*col)[r];
  }

  // Linear styles follow the (possibly new) values unless uploaded directly.
  if (new_spec.non_layout_specification) {
    std::mt19937_64 unused(0);
    for (const auto& [key, attr] : new_spec.non_layout_specification->attributes) {
      if (attr.scale != Scale::linear || upload.has_column(key_name(key))) continue;
      for (auto* d : cells) d->styles[key] = resolve_attribute(attr, d->group_index, d->item_index, d->value, unused);
    }
  }

  for (auto key : kAllStyleKeys) {
    const std::string& name = key_name(key);
    if (!upload.has_column(name)) continue;
    const bool color = key == StyleKey::fill || key == StyleKey::stroke;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto it = rows[r]->cells.find(name);
      if (it == rows[r]->cells.end()) continue;
      if (color) {
        const auto* s = std::get_if<std::string>(&it->second);
        if (!s || !is_color(*s)) throw DataError("column '" + name + "' must hold #RRGGBB colors");
      } else {
        const auto* v = std::get_if<double>(&it->second);
        if (!v || *v < 0 || (key == StyleKey::opacity && *v > 1))
          throw DataError("column '" + name + "' holds an out-of-range value");
      }
      cells[r]->styles[key] = it->second;
    }
  }

  for (const char* name : {"source", "target"}) {
    if (!upload.has_column(name)) continue;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto it = rows[r]->cells.find(name);
      if (it == rows[r]->cells.end()) continue;
      const auto* s = std::get_if<std::string>(&it->second);
      if (!s) throw DataError(std::string("column '") + name + "' must hold container references");
      check_ref(out_doc, *s);
      (std::string_view(name) == "source" ? cells[r]->source : cells[r]->target) = *s;
    }
  }
  return {std::move(out_doc), std::move(table)};
}

// ------------------------------------------------------------------ exemplar output

namespace {

std::vector<Dimension> flexible_dims(const DataSpecification& spec) {
  std::vector<Dimension> out;
  for (const auto& [dim, d] : spec.layout_specification.dims)
    if (d.anchor_distribute == AnchorDistribution::flexible && !d.stacking) out.push_back(dim);
  return out;
}

codec::Json datum_json(const MockDatum& d, const std::vector<Dimension>& dims) {
  codec::Json row = codec::Json::object();
  row["group"] = d.group_index;
  row["item"] = d.item_index;
  row["value"] = codec::number(d.value);
  for (auto dim : dims) row[std::string(to_string(dim))] = codec::number(d.channels[index_of(dim)]);
  for (const auto& [key, v] : d.styles) {
    if (const auto* x = std::get_if<double>(&v))
      row[key_name(key)] = codec::number(*x);
    else
      row[key_name(key)] = std::get<std::string>(v);
  }
  if (d.source) row["source"] = *d.source;
  if (d.target) row["target"] = *d.target;
  return row;
}

}  // namespace

std::string table_to_json(const MockTable& table, const DataSpecification& spec) {
  const auto dims = flexible_dims(spec);
  const bool two_d = spec.data_structure.data_type != DataType::list_1d && spec.data_structure.secondary;
  codec::Json out = codec::Json::array();
  for (const auto& g : table.groups) {
    if (two_d) {
      codec::Json group = codec::Json::array();
      for (const auto& d : g) group.push_back(datum_json(d, dims));
      out.push_back(std::move(group));
    } else {
      for (const auto& d : g) out.push_back(datum_json(d, dims));
    }
  }
  return codec::dump(out);
}

std::string table_to_csv(const MockTable& table, const DataSpecification& spec) {
  const auto dims = flexible_dims(spec);
  std::vector<std::string> header{"group", "item", "value"};
  for (auto dim : dims) header.emplace_back(to_string(dim));
  std::set<StyleKey> keys;
  bool links = false;
  for (const auto& g : table.groups)
    for (const auto& d : g) {
      for (const auto& [k, v] : d.styles) keys.insert(k);
      links = links || d.source || d.target;
    }
  for (auto k : keys) header.push_back(key_name(k));
  if (links) {
    header.emplace_back("source");
    header.emplace_back("target");
  }
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  out += '\n';
  for (const auto& g : table.groups)
    for (const auto& d : g) {
      out += std::to_string(d.group_index) + "," + std::to_string(d.item_index) + "," + format_number(d.value);
      for (auto dim : dims) out += "," + format_number(d.channels[index_of(dim)]);
      for (auto k : keys) {
        out += ',';
        const auto it = d.styles.find(k);
        if (it == d.styles.end()) continue;
        if (const auto* x = std::get_if<double>(&it->second))
          out += format_number(*x);
        else
          out += std::get<std::string>(it->second);
      }
      if (links) out += "," + d.source.value_or("") + "," + d.target.value_or("");
      out += '\n';
    }
  return out;
}

// ------------------------------------------------------------------ provider

DataProvider::DataProvider(const DslDocument& doc, Seed seed, const std::vector<UserOverride>& overrides)
    : doc_(doc), seed_(seed) {
  for (const auto& o : overrides) {
    const auto existing = tables_.find(o.container);
    auto result = apply_user_data(doc_, o.container, o.table, seed_,
                                  existing == tables_.end() ? nullptr : &existing->second);
    doc_ = std::move(result.document);
    tables_[o.container] = std::move(result.table);
  }
  for (const auto& [id, spec] : doc_.data_specifications)
    if (!tables_.count(id)) tables_.emplace(id, generate_table(spec, seed_, id));

  for (const auto& [id, spec] : doc_.data_specifications) {
    if (!spec.mark_specification || spec.mark_specification->link_mark_type != LinkMarkType::node_link) continue;
    auto& table = tables_.at(id);
    std::vector<MockDatum*> rows;
    for (auto& g : table.groups)
      for (auto& d : g) rows.push_back(&d);
    const bool all_set = std::all_of(rows.begin(), rows.end(), [](const MockDatum* d) { return d->source && d->target; });
    if (all_set) continue;
    const auto universe = link_universe(doc_, spec.layout_specification);
    if (universe.sources.empty() || (universe.single_container && universe.sources.size() < 2)) continue;
    const auto links = generate_link_assignments(*spec.mark_specification, universe,
                                                 derive_seed(seed_, ContainerId(id.str() + "#links")));
    for (std::size_t k = 0; k < rows.size() && k < links.size(); ++k) {
      if (!rows[k]->source) rows[k]->source = links[k].source;
      if (!rows[k]->target) rows[k]->target = links[k].target;
    }
  }
}

const MockTable& DataProvider::table(const ContainerId& id) const {
  const auto it = tables_.find(id);
  if (it == tables_.end()) throw NotFoundError("no data table for " + id.str());
  return it->second;
}

}  // namespace recast
