#include "recast/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "json_codec.hpp"
#include "recast/dsl_json.hpp"
#include "recast/error.hpp"
#include "recast/prompts.hpp"

namespace recast {

namespace {

using codec::Json;

[[noreturn]] void schema_fail(const std::string& path, const std::string& reason) { throw ParseError(path, reason); }

/// Structural checks shared by the step-1 and step-2 trees.
void check_tree(const ContainerNode& root, const std::string& what) {
  DslDocument doc;
  doc.root = root;
  const auto report = validate(doc);
  for (const auto& e : report.entries) {
    if (e.severity != Severity::error) continue;
    const auto& r = e.rule;
    if (r.rfind("id.", 0) == 0 || r.rfind("leaf.", 0) == 0 || r.rfind("frame.", 0) == 0 ||
        r.rfind("template.", 0) == 0)
      schema_fail("$", what + " container " + e.container.str() + ": " + e.message + " [" + r + "]");
  }
}

bool dimension_fits(Dimension d, CoordinateKind kind) { return is_polar_dimension(d) == (kind == CoordinateKind::polar); }

void check_dimensions(const DataSpecification& s, CoordinateKind kind, const ContainerId& id) {
  const std::string frame = std::string(to_string(kind));
  for (const auto& [d, _] : s.layout_specification.dims)
    if (!dimension_fits(d, kind))
      schema_fail("$.layout_specification." + std::string(to_string(d)),
                  "dimension " + std::string(to_string(d)) + " cannot lay out " + frame + " container " + id.str());
  for (auto d : s.data_structure.primary.dimension)
    if (!dimension_fits(d, kind))
      schema_fail("$.data_structure.data_size.primary.dimension",
                  "dimension " + std::string(to_string(d)) + " does not belong to a " + frame + " frame");
  if (s.data_structure.secondary && !dimension_fits(s.data_structure.secondary->dimension, kind))
    schema_fail("$.data_structure.data_size.secondary.dimension",
                "dimension " + std::string(to_string(s.data_structure.secondary->dimension)) +
                    " does not belong to a " + frame + " frame");
}

const ContainerNode& require_node(const ContainerNode* root, const ContainerId& id) {
  if (!root) throw Error("schema check needs a container tree");
  const ContainerNode* n = find_node(*root, id);
  if (!n) throw NotFoundError("no container " + id.str());
  return *n;
}

Json parse_payload(std::string_view raw) {
  try {
    return codec::parse_json(raw);
  } catch (const ParseError&) {
    return codec::parse_json(strip_framing(raw));
  }
}

CoordinateFrame bbox_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) schema_fail(path, "expected a coordinate_system object");
  const Json kind = j.contains("x1") ? Json("cartesian") : Json("polar");
  return codec::frame_from_json(kind, j, path);
}

Step2Result parse_merge(const Json& j, const SchemaContext& ctx) {
  if (!j.is_object()) schema_fail("$", "expected an object with cleaned_dsl and template_index");
  for (const auto& [key, _] : j.items())
    if (key != "cleaned_dsl" && key != "template_index") schema_fail("$." + key, "unknown field");
  if (!j.contains("cleaned_dsl")) schema_fail("$.cleaned_dsl", "missing");
  if (!j.contains("template_index")) schema_fail("$.template_index", "missing");

  Step2Result r;
  codec::ParseOptions lenient;
  lenient.lenient = true;
  r.cleaned = codec::node_from_json(j["cleaned_dsl"], "$.cleaned_dsl", lenient);
  check_tree(r.cleaned, "cleaned");

  const Json& index = j["template_index"];
  if (!index.is_array()) schema_fail("$.template_index", "expected an array");
  for (std::size_t i = 0; i < index.size(); ++i) {
    const std::string path = "$.template_index[" + std::to_string(i) + "]";
    const Json& e = index[i];
    if (!e.is_object() || !e.contains("template_id") || !e.contains("instance_ids") || !e.contains("instance_bboxes"))
      schema_fail(path, "expected template_id, instance_ids and instance_bboxes");
    TemplateIndexEntry entry;
    if (!e["template_id"].is_string()) schema_fail(path + ".template_id", "expected a string");
    entry.template_id = ContainerId(e["template_id"].get<std::string>());
    if (!e["instance_ids"].is_array() || !e["instance_bboxes"].is_array())
      schema_fail(path, "instance_ids and instance_bboxes must be arrays");
    for (const auto& id : e["instance_ids"]) {
      if (!id.is_string()) schema_fail(path + ".instance_ids", "expected strings");
      entry.instance_ids.emplace_back(id.get<std::string>());
    }
    for (std::size_t k = 0; k < e["instance_bboxes"].size(); ++k)
      entry.instance_bboxes.push_back(
          bbox_from_json(e["instance_bboxes"][k], path + ".instance_bboxes[" + std::to_string(k) + "]"));
    if (entry.instance_ids.size() != entry.instance_bboxes.size() || entry.instance_ids.size() < 2)
      schema_fail(path, "needs at least two instances with one bbox each");

    ContainerNode* tmpl = find_node(r.cleaned, entry.template_id);
    if (!tmpl || !entry.template_id.is_template())
      schema_fail(path + ".template_id", "'" + entry.template_id.str() + "' is not a template in cleaned_dsl");
    for (const auto& id : entry.instance_ids) {
      if (ctx.structure && !find_node(*ctx.structure, id))
        schema_fail(path + ".instance_ids", "'" + id.str() + "' is not a container of the original tree");
      if (find_node(r.cleaned, id))
        schema_fail(path + ".instance_ids", "'" + id.str() + "' was merged but is still in cleaned_dsl");
    }
    for (const auto& b : entry.instance_bboxes)
      if (kind_of(b) != kind_of(tmpl->frame))
        schema_fail(path + ".instance_bboxes", "bbox kind differs from the template frame");

    const CoordinateFrame box = bounding_frame(entry.instance_bboxes);
    if (!(box == tmpl->frame)) {
      r.warnings.push_back("template " + entry.template_id.str() + " frame " + serialize_frame(tmpl->frame) +
                           " replaced by its instances' bounding box " + serialize_frame(box));
      tmpl->frame = box;
    }
    r.template_index.push_back(std::move(entry));
  }
  visit_preorder(r.cleaned, [&](const ContainerNode& n, const ContainerNode*) {
    if (!n.id.is_template()) return;
    const bool indexed = std::any_of(r.template_index.begin(), r.template_index.end(),
                                     [&](const auto& e) { return e.template_id == n.id; });
    if (!indexed) schema_fail("$.template_index", "template " + n.id.str() + " has no index entry");
  });
  return r;
}

DataSpecification parse_template_spec(Json j, const SchemaContext& ctx) {
  if (!j.is_object()) schema_fail("$", "expected an object");
  if (j.contains("container_id")) {
    if (!j["container_id"].is_string() || j["container_id"].get<std::string>() != ctx.target.str())
      schema_fail("$.container_id", "expected \"" + ctx.target.str() + "\"");
    j.erase("container_id");
  }
  DataSpecification s = codec::spec_from_json(j, "$");
  if (s.mark_specification) schema_fail("$.mark_specification", "template specifications carry no marks");
  if (s.non_layout_specification) schema_fail("$.non_layout_specification", "template specifications carry no styles");
  check_dimensions(s, kind_of(require_node(ctx.cleaned, ctx.target).frame), ctx.target);
  return s;
}

DataSpecification parse_leaf_spec(const Json& j, const SchemaContext& ctx, std::vector<std::string>& warnings) {
  DataSpecification s = codec::spec_from_json(j, "$");
  if (!s.mark_specification) schema_fail("$.mark_specification", "missing");
  const ContainerNode& leaf = require_node(ctx.cleaned, ctx.target);
  const bool node_link = s.mark_specification->link_mark_type == LinkMarkType::node_link;
  if (!node_link) check_dimensions(s, kind_of(leaf.frame), ctx.target);
  if (leaf.mark_type && s.mark_specification->mark_type != *leaf.mark_type) {
    warnings.push_back("container " + ctx.target.str() + ": mark_type " +
                       std::string(to_string(s.mark_specification->mark_type)) + " differs from the tree's " +
                       std::string(to_string(*leaf.mark_type)) + "; keeping the tree's");
    s.mark_specification->mark_type = *leaf.mark_type;
  }
  return s;
}

std::vector<ChatMessage> single(std::string prompt, bool with_image) {
  return {ChatMessage{"user", std::move(prompt), with_image}};
}

ParsedOutput call_and_parse(PipelineSession& session, const std::string& label, const std::vector<ChatMessage>& msgs,
                            const ImageInput* image, OutputSchema schema, const SchemaContext& ctx,
                            std::vector<Transcript>& sink) {
  const std::string raw = session.call(label, msgs, image, sink);
  return repair_structured_output(raw, schema, ctx, session, label, msgs, image, sink);
}

}  // namespace

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::pending: return "pending";
    case RunStatus::step1: return "step1";
    case RunStatus::step2: return "step2";
    case RunStatus::step3: return "step3";
    case RunStatus::assembling: return "assembling";
    case RunStatus::done: return "done";
    case RunStatus::failed: return "failed";
  }
  return "";
}

CoordinateFrame bounding_frame(const std::vector<CoordinateFrame>& frames) {
  if (frames.empty()) throw Error("no frames to bound");
  if (const auto* first = std::get_if<CartesianFrame>(&frames.front())) {
    CartesianFrame box = *first;
    for (const auto& f : frames) {
      const auto& c = std::get<CartesianFrame>(f);
      box.x1 = std::min(box.x1, c.x1);
      box.y1 = std::min(box.y1, c.y1);
      box.x2 = std::max(box.x2, c.x2);
      box.y2 = std::max(box.y2, c.y2);
    }
    return box;
  }
  PolarFrame box = std::get<PolarFrame>(frames.front());
  for (const auto& f : frames) {
    const auto& p = std::get<PolarFrame>(f);
    box.r1 = std::min(box.r1, p.r1);
    box.r2 = std::max(box.r2, p.r2);
    box.a1 = std::min(box.a1, p.a1);
    box.a2 = std::max(box.a2, p.a2);
  }
  return box;
}

std::string serialize_template_index(const std::vector<TemplateIndexEntry>& index) {
  Json arr = Json::array();
  for (const auto& e : index) {
    Json o = Json::object();
    o["template_id"] = e.template_id.str();
    Json ids = Json::array();
    for (const auto& id : e.instance_ids) ids.push_back(id.str());
    o["instance_ids"] = std::move(ids);
    Json boxes = Json::array();
    for (const auto& b : e.instance_bboxes) boxes.push_back(codec::frame_to_json(b));
    o["instance_bboxes"] = std::move(boxes);
    arr.push_back(std::move(o));
  }
  return codec::dump(arr);
}

PipelineSession::PipelineSession(ChatTransport& transport, MllmEndpointConfig config, TranscriptStore* store,
                                 std::string run_id)
    : transport_(transport), config_(std::move(config)), store_(store), run_id_(std::move(run_id)) {
  config_.check();
}

std::string PipelineSession::call(const std::string& label, const std::vector<ChatMessage>& messages,
                                  const ImageInput* image, std::vector<Transcript>& sink) {
  ChatRequest req{label, messages, image};
  std::string response = transport_.complete(req);
  Transcript t{label, messages.empty() ? std::string() : messages.back().text, response};
  if (store_) store_->record(run_id_, t);
  sink.push_back(std::move(t));
  return response;
}

std::string strip_framing(std::string_view raw) {
  std::string_view s = raw;
  const auto fence = s.find("```");
  if (fence != std::string_view::npos) {
    const auto body = s.find('\n', fence);
    const auto close = body == std::string_view::npos ? std::string_view::npos : s.find("```", body);
    if (body != std::string_view::npos && close != std::string_view::npos) s = s.substr(body + 1, close - body - 1);
  }
  const auto open = s.find_first_of("{[");
  if (open == std::string_view::npos) return std::string(s);
  const char closer = s[open] == '{' ? '}' : ']';
  const auto end = s.rfind(closer);
  if (end == std::string_view::npos || end < open) return std::string(s.substr(open));
  return std::string(s.substr(open, end - open + 1));
}

ParsedOutput parse_structured_output(std::string_view raw, OutputSchema schema, const SchemaContext& ctx) {
  const Json j = parse_payload(raw);
  ParsedOutput out;
  codec::ParseOptions lenient;
  lenient.lenient = true;
  switch (schema) {
    case OutputSchema::structure:
      out.tree = codec::node_from_json(j, "$", lenient);
      check_tree(*out.tree, "structure");
      break;
    case OutputSchema::template_merge:
      out.merge = parse_merge(j, ctx);
      out.warnings = out.merge->warnings;
      break;
    case OutputSchema::template_spec:
      out.spec = parse_template_spec(j, ctx);
      break;
    case OutputSchema::leaf_spec:
      out.spec = parse_leaf_spec(j, ctx, out.warnings);
      break;
  }
  return out;
}

ParsedOutput repair_structured_output(const std::string& raw, OutputSchema schema, const SchemaContext& ctx,
                                      PipelineSession& session, const std::string& label,
                                      const std::vector<ChatMessage>& request, const ImageInput* image,
                                      std::vector<Transcript>& sink) {
  std::string problem;
  try {
    return parse_structured_output(raw, schema, ctx);
  } catch (const ParseError& e) {
    problem = e.what();
  }
  std::vector<ChatMessage> follow_up = request;
  follow_up.push_back({"assistant", raw, false});
  follow_up.push_back({"user",
                       "Your previous response could not be used:\n" + problem +
                           "\nReply with the corrected JSON only, following the same output schema.",
                       false});
  const std::string repair_label = label + "-repair";
  const std::string second = session.call(repair_label, follow_up, image, sink);
  try {
    return parse_structured_output(second, schema, ctx);
  } catch (const ParseError& e) {
    throw PipelineError(label, "response failed validation after one repair: first: " + problem +
                                   "; second: " + e.what());
  }
}

ContainerNode step1_parse_structure(const ImageInput& image, PipelineSession& session, std::vector<Transcript>& sink) {
  const auto msgs = single(render_prompt(PromptId::step1_structure, {}), true);
  return *call_and_parse(session, "step1", msgs, &image, OutputSchema::structure, {}, sink).tree;
}

Step2Result step2_extract_templates(const ContainerNode& structure, const ImageInput& image, PipelineSession& session,
                                    std::vector<Transcript>& sink) {
  const std::string structure_json = serialize_tree(structure);
  SchemaContext ctx;
  ctx.structure = &structure;
  const auto merge_msgs = single(render_prompt(PromptId::template_parsing_1, {{"structure_result", structure_json}}), false);
  Step2Result result = *call_and_parse(session, "step2a", merge_msgs, nullptr, OutputSchema::template_merge, ctx, sink).merge;

  const std::string cleaned_json = serialize_tree(result.cleaned);
  for (const auto& entry : result.template_index) {
    SchemaContext sctx;
    sctx.target = entry.template_id;
    sctx.structure = &structure;
    sctx.cleaned = &result.cleaned;
    const auto msgs = single(render_prompt(PromptId::template_parsing_2,
                                           {{"structure_result", structure_json},
                                            {"cleaned_dsl", cleaned_json},
                                            {"template_index", serialize_template_index({entry})}}),
                             true);
    const std::string label = "step2b-" + entry.template_id.str();
    result.template_specs[entry.template_id] =
        *call_and_parse(session, label, msgs, &image, OutputSchema::template_spec, sctx, sink).spec;
  }
  return result;
}

DataSpecification step3_parse_leaf(const ContainerNode& cleaned, const ContainerId& leaf, const ImageInput& image,
                                   PipelineSession& session, std::vector<Transcript>& sink,
                                   std::vector<std::string>* warnings) {
  const ContainerNode* node = find_node(cleaned, leaf);
  if (!node) throw NotFoundError("no container " + leaf.str() + " in the cleaned tree");
  if (!node->is_leaf || !node->mark_type) throw Error("container " + leaf.str() + " is not a leaf");
  SchemaContext ctx;
  ctx.target = leaf;
  ctx.cleaned = &cleaned;
  const auto msgs = single(render_prompt(PromptId::mark_parsing, {{"dsl", serialize_tree(cleaned)},
                                                                  {"mark_type", std::string(to_string(*node->mark_type))},
                                                                  {"container_id", leaf.str()}}),
                           true);
  auto parsed = call_and_parse(session, "step3-" + leaf.str(), msgs, &image, OutputSchema::leaf_spec, ctx, sink);
  if (warnings) warnings->insert(warnings->end(), parsed.warnings.begin(), parsed.warnings.end());
  return *parsed.spec;
}

DslDocument assemble(const ContainerNode& cleaned, const std::map<ContainerId, DataSpecification>& template_specs,
                     const std::map<ContainerId, DataSpecification>& leaf_specs) {
  DslDocument doc;
  doc.root = cleaned;
  visit_preorder(cleaned, [&](const ContainerNode& n, const ContainerNode*) {
    if (n.id.is_template()) {
      const auto it = template_specs.find(n.id);
      if (it == template_specs.end()) throw Error("template " + n.id.str() + " has no data specification");
      doc.data_specifications[n.id] = it->second;
    } else if (n.is_leaf) {
      const auto it = leaf_specs.find(n.id);
      if (it == leaf_specs.end()) throw Error("leaf " + n.id.str() + " has no data specification");
      doc.data_specifications[n.id] = it->second;
    }
  });
  return doc;
}

PipelineRun run_pipeline(const std::string& run_id, ImageInput image, ChatTransport& transport,
                         const MllmEndpointConfig& config, TranscriptStore* store, const StatusCallback& on_status) {
  PipelineRun run;
  run.id = run_id;
  run.image = std::move(image);
  auto advance = [&](RunStatus s) {
    run.status = s;
    if (on_status) on_status(run);
  };
  try {
    PipelineSession session(transport, config, store, run_id);
    advance(RunStatus::step1);
    run.structure = step1_parse_structure(run.image, session, run.transcripts);

    advance(RunStatus::step2);
    run.templates = step2_extract_templates(*run.structure, run.image, session, run.transcripts);
    run.warnings = run.templates->warnings;

    advance(RunStatus::step3);
    const ContainerNode& cleaned = run.templates->cleaned;
    std::vector<ContainerId> leaves;
    visit_preorder(cleaned, [&](const ContainerNode& n, const ContainerNode*) {
      if (n.is_leaf) leaves.push_back(n.id);
    });
    std::sort(leaves.begin(), leaves.end());

    struct LeafSlot {
      std::optional<DataSpecification> spec;
      std::vector<Transcript> transcripts;
      std::vector<std::string> warnings;
      std::exception_ptr error;
    };
    std::vector<LeafSlot> slots(leaves.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < leaves.size(); i = next++) {
        try {
          slots[i].spec = step3_parse_leaf(cleaned, leaves[i], run.image, session, slots[i].transcripts,
                                           &slots[i].warnings);
        } catch (...) {
          slots[i].error = std::current_exception();
        }
      }
    };
    const std::size_t workers = std::min<std::size_t>(config.max_parallel, std::max<std::size_t>(leaves.size(), 1));
    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      auto& s = slots[i];
      run.transcripts.insert(run.transcripts.end(), s.transcripts.begin(), s.transcripts.end());
      run.warnings.insert(run.warnings.end(), s.warnings.begin(), s.warnings.end());
      if (s.spec) run.leaf_specs[leaves[i]] = std::move(*s.spec);
    }
    for (auto& s : slots)
      if (s.error) std::rethrow_exception(s.error);

    advance(RunStatus::assembling);
    run.document = assemble(cleaned, run.templates->template_specs, run.leaf_specs);
    run.validation = validate(*run.document);
    advance(RunStatus::done);
  } catch (const std::exception& e) {
    run.failure = e.what();
    advance(RunStatus::failed);
  }
  return run;
}

DslDocument replay_fixture_case(const std::filesystem::path& case_dir, const MllmEndpointConfig& config) {
  FixtureTransport transport(case_dir);
  auto run = run_pipeline(case_dir.filename().string(), read_image(case_dir / "image.png"), transport, config);
  if (run.status != RunStatus::done) throw PipelineError(case_dir.filename().string(), run.failure);
  return std::move(*run.document);
}

}  // namespace recast
