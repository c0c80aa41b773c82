#include "recast/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "json_codec.hpp"
#include "recast/dsl_json.hpp"
#include "recast/error.hpp"

namespace recast {

namespace {

using codec::Json;

constexpr const char* kMissing = "<missing>";

/// Flattened, scoreable view of one document: container fields and spec
/// JSON, keyed by container id.
struct DocumentView {
  std::map<ContainerId, Json> nodes;
  std::map<ContainerId, Json> specs;

  explicit DocumentView(const DslDocument& doc) {
    visit_preorder(doc.root, [&](const ContainerNode& n, const ContainerNode*) {
      Json j = Json::object();
      j["coordinate"] = std::string(to_string(kind_of(n.frame)));
      j["coordinate_system"] = codec::frame_to_json(n.frame);
      nodes[n.id] = std::move(j);
    });
    for (const auto& [id, spec] : doc.data_specifications) specs[id] = codec::spec_to_json(spec);
  }
};

const Json* lookup(const Json& root, const std::string& dotted) {
  const Json* cur = &root;
  std::size_t pos = 0;
  while (pos <= dotted.size()) {
    const auto dot = dotted.find('.', pos);
    const std::string key = dotted.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (!cur->is_object()) return nullptr;
    const auto it = cur->find(key);
    if (it == cur->end()) return nullptr;
    cur = &*it;
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return cur;
}

std::string active_payload(const std::string& scale) {
  if (scale == "fix") return "fix";
  if (scale == "linear") return "linear";
  return "options";
}

/// Value compared for one attribute. Style attributes reduce to the scale
/// and the payload that scale reads.
std::optional<Json> attribute_value(const DocumentView& view, const AttributePath& p) {
  const bool spec_field = p.field.rfind("coordinate", 0) != 0;
  const auto& table = spec_field ? view.specs : view.nodes;
  const auto it = table.find(p.container);
  if (it == table.end()) return std::nullopt;
  const Json* v = lookup(it->second, p.field);
  if (!v) return std::nullopt;
  if (p.field.rfind("non_layout_specification.", 0) == 0 && v->is_object()) {
    Json reduced = Json::object();
    const std::string scale = v->value("scale", "");
    reduced["scale"] = scale;
    const std::string payload = active_payload(scale);
    reduced[payload] = v->contains(payload) ? (*v)[payload] : Json(nullptr);
    return reduced;
  }
  return *v;
}

void spec_attributes(const ContainerId& id, const DataSpecification& s, std::vector<AttributePath>& out) {
  auto add = [&](std::string field) { out.push_back({id, std::move(field)}); };

  if (s.mark_specification) {
    const auto& m = *s.mark_specification;
    add("mark_specification.mark_type");
    add("mark_specification.link_mark_type");
    if (m.link_mark_type == LinkMarkType::group_type) add("mark_specification.group_link_direction");
    if (m.link_mark_type == LinkMarkType::node_link) add("mark_specification.link_number");
  }

  add("data_structure.data_type");
  add("data_structure.data_size.primary.dimension");
  if (s.data_structure.secondary) add("data_structure.data_size.secondary.dimension");

  for (const auto& [dim, d] : s.layout_specification.dims) {
    const std::string base = "layout_specification." + std::string(to_string(dim)) + ".";
    add(base + "stacking");
    if (d.stacking) {
      if (!d.subdividing) add(base + "stacking_direction");
      add(base + "subdividing");
    } else {
      add(base + "anchor");
    }
    add(base + "size_uniform");
    add(base + "size_range");
    add(base + "anchor_distribute");
    if (d.anchor_distribute == AnchorDistribution::uniform_interval) add(base + "anchor_interval");
    if (d.anchor_distribute != AnchorDistribution::flexible) add(base + "anchor_start");
  }
  if (s.mark_specification && s.mark_specification->link_mark_type == LinkMarkType::node_link) {
    if (s.layout_specification.source) add("layout_specification.source");
    if (s.layout_specification.target) add("layout_specification.target");
  }

  if (s.non_layout_specification) {
    const auto& n = *s.non_layout_specification;
    const bool path_mark = s.mark_specification && s.mark_specification->mark_type != MarkType::circle &&
                           s.mark_specification->mark_type != MarkType::rectangle &&
                           s.mark_specification->mark_type != MarkType::arc;
    if (path_mark && n.line_type) add("non_layout_specification.line_type");
    for (const auto& [key, attr] : n.attributes) add("non_layout_specification." + std::string(to_string(key)));
  }
}

std::string compact(const Json& j) { return j.dump(); }

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

}  // namespace

std::string AttributePath::str() const { return container.str() + " . " + field; }

double CaseResult::accuracy() const { return total() == 0 ? 100.0 : 100.0 * matched / total(); }

CaseResult AccuracyReport::overall() const {
  CaseResult all;
  all.name = "overall";
  for (const auto& c : cases) {
    all.matched += c.matched;
    all.mismatched += c.mismatched;
  }
  return all;
}

double rounded_accuracy(int matched, int total) {
  if (total == 0) return 100.0;
  // Integer arithmetic keeps the half-up rounding exact: round(1000 m / t) / 10.
  const long long tenths = (2000LL * matched + total) / (2LL * total);
  return static_cast<double>(tenths) / 10.0;
}

std::vector<AttributePath> applicable_attributes(const DslDocument& gt) {
  std::vector<AttributePath> out;
  visit_preorder(gt.root, [&](const ContainerNode& n, const ContainerNode* parent) {
    if (parent) {
      out.push_back({n.id, "coordinate"});
      const Json frame = codec::frame_to_json(n.frame);
      for (const auto& [key, _] : frame.items()) out.push_back({n.id, "coordinate_system." + key});
    }
    const auto it = gt.data_specifications.find(n.id);
    if (it != gt.data_specifications.end()) spec_attributes(n.id, it->second, out);
  });
  return out;
}

CaseResult score(const DslDocument& gt, const DslDocument& generated, const std::string& name) {
  const DocumentView expected(gt);
  const DocumentView actual(generated);
  CaseResult r;
  r.name = name;
  for (const auto& path : applicable_attributes(gt)) {
    const auto want = attribute_value(expected, path);
    const auto got = attribute_value(actual, path);
    if (want && got && *want == *got) {
      ++r.matched;
      continue;
    }
    ++r.mismatched;
    r.mismatches.push_back({path, want ? compact(*want) : kMissing, got ? compact(*got) : kMissing});
  }
  return r;
}

AccuracyReport run_gallery(const std::filesystem::path& dir, int threads, const CaseGenerator& generate) {
  AccuracyReport report;
  if (!std::filesystem::is_directory(dir)) throw NotFoundError("no case directory at " + dir.string());
  std::vector<std::filesystem::path> cases;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_directory()) cases.push_back(e.path());
  std::sort(cases.begin(), cases.end());

  struct Slot {
    std::optional<CaseResult> result;
    std::string error;
  };
  std::vector<Slot> slots(cases.size());
  auto run_one = [&](std::size_t i) {
    const std::string name = cases[i].filename().string();
    try {
      const auto gt = parse_document(read_file(cases[i] / "ground_truth.revis.json"));
      const auto generated = cases[i] / "generated.revis.json";
      if (std::filesystem::exists(generated) || !generate) {
        slots[i].result = score(gt, parse_document(read_file(generated)), name);
      } else {
        slots[i].result = score(gt, generate(cases[i]), name);
      }
    } catch (const std::exception& e) {
      slots[i].error = name + ": " + e.what();
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(cases.size(), 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < cases.size(); ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < cases.size(); i += workers) run_one(i);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& s : slots) {
    if (s.result)
      report.cases.push_back(std::move(*s.result));
    else
      report.load_errors.push_back(std::move(s.error));
  }
  return report;
}

std::string format_report_text(const AccuracyReport& report) {
  std::ostringstream os;
  std::size_t width = 7;
  for (const auto& c : report.cases) width = std::max(width, c.name.size());
  auto row = [&](const std::string& name, const std::string& acc, const std::string& m, const std::string& x,
                 const std::string& t) {
    os << name << std::string(width - name.size() + 2, ' ');
    os << std::string(8 - std::min<std::size_t>(8, acc.size()), ' ') << acc;
    os << std::string(8 - std::min<std::size_t>(8, m.size()), ' ') << m;
    os << std::string(10 - std::min<std::size_t>(10, x.size()), ' ') << x;
    os << std::string(8 - std::min<std::size_t>(8, t.size()), ' ') << t << "\n";
  };
  row("case", "acc(%)", "match", "mismatch", "total");
  for (const auto& c : report.cases)
    row(c.name, fixed1(rounded_accuracy(c.matched, c.total())), std::to_string(c.matched),
        std::to_string(c.mismatched), std::to_string(c.total()));
  const auto all = report.overall();
  row("overall", fixed1(rounded_accuracy(all.matched, all.total())), std::to_string(all.matched),
      std::to_string(all.mismatched), std::to_string(all.total()));
  for (const auto& c : report.cases)
    for (const auto& m : c.mismatches)
      os << "  " << c.name << ": " << m.path.str() << " expected " << m.expected << ", got " << m.actual << "\n";
  for (const auto& e : report.load_errors) os << "  load error: " << e << "\n";
  return os.str();
}

std::string format_report_csv(const AccuracyReport& report) {
  std::ostringstream os;
  os << "case,accuracy,match,mismatch,total\n";
  auto line = [&](const CaseResult& c) {
    os << csv_field(c.name) << "," << fixed1(rounded_accuracy(c.matched, c.total())) << "," << c.matched << ","
       << c.mismatched << "," << c.total() << "\n";
  };
  for (const auto& c : report.cases) line(c);
  line(report.overall());
  return os.str();
}

std::string format_report_json(const AccuracyReport& report) {
  Json j = Json::object();
  j["rubric_version"] = kRubricVersion;
  Json cases = Json::array();
  auto to_json = [](const CaseResult& c) {
    Json o = Json::object();
    o["case"] = c.name;
    o["accuracy"] = rounded_accuracy(c.matched, c.total());
    o["match"] = c.matched;
    o["mismatch"] = c.mismatched;
    o["total"] = c.total();
    Json mm = Json::array();
    for (const auto& m : c.mismatches)
      mm.push_back({{"container", m.path.container.str()},
                    {"attribute", m.path.field},
                    {"expected", m.expected},
                    {"actual", m.actual}});
    o["mismatches"] = std::move(mm);
    return o;
  };
  for (const auto& c : report.cases) cases.push_back(to_json(c));
  j["cases"] = std::move(cases);
  Json overall = to_json(report.overall());
  overall.erase("mismatches");
  j["overall"] = std::move(overall);
  j["load_errors"] = report.load_errors;
  return codec::dump(j);
}

AccuracyReport parse_report_csv(const std::string& csv) {
  AccuracyReport report;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "case,accuracy,match,mismatch,total")
    throw DataError("report CSV: unexpected header");
  std::vector<CaseResult> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    // The name may be quoted; the four numeric fields never are.
    std::vector<std::string> tail;
    std::string rest = line;
    for (int k = 0; k < 4; ++k) {
      const auto comma = rest.rfind(',');
      if (comma == std::string::npos) throw DataError("report CSV: short row: " + line);
      tail.insert(tail.begin(), rest.substr(comma + 1));
      rest.erase(comma);
    }
    if (rest.size() >= 2 && rest.front() == '"') {
      std::string name;
      for (std::size_t i = 1; i + 1 < rest.size(); ++i) {
        name += rest[i];
        if (rest[i] == '"') ++i;
      }
      rest = name;
    }
    CaseResult c;
    c.name = rest;
    try {
      c.matched = std::stoi(tail[1]);
      c.mismatched = std::stoi(tail[2]);
    } catch (const std::exception&) {
      throw DataError("report CSV: bad counts: " + line);
    }
    rows.push_back(std::move(c));
  }
  if (!rows.empty() && rows.back().name == "overall") rows.pop_back();
  report.cases = std::move(rows);
  return report;
}

}  // namespace recast
