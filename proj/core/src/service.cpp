#include "recast/service.hpp"

#include <openssl/rand.h>

#include <boost/asio/post.hpp>
#include <boost/asio/thread_pool.hpp>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <shared_mutex>
#include <sstream>

#include "httplib.h"
#include "json_codec.hpp"
#include "recast/dsl_json.hpp"
#include "recast/edit.hpp"
#include "recast/error.hpp"
#include "recast/render.hpp"

namespace recast {

namespace {

using Json = codec::Json;

struct HttpError : std::runtime_error {
  HttpError(int status, const std::string& message, Json extra = Json::object())
      : std::runtime_error(message), status(status), extra(std::move(extra)) {}
  int status;
  Json extra;
};

std::string random_id(const char* prefix) {
  unsigned char bytes[12];
  if (RAND_bytes(bytes, sizeof bytes) != 1) throw Error("random id generation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id = prefix;
  for (unsigned char b : bytes) {
    id += kHex[b >> 4];
    id += kHex[b & 0xF];
  }
  return id;
}

Json report_json(const ValidationReport& r) {
  Json arr = Json::array();
  for (const auto& e : r.entries)
    arr.push_back({{"severity", std::string(to_string(e.severity))},
                   {"container", e.container.str()},
                   {"rule", e.rule},
                   {"message", e.message}});
  return arr;
}

Json parse_body(const httplib::Request& req) {
  try {
    return Json::parse(req.body);
  } catch (const Json::parse_error& e) {
    throw HttpError(400, std::string("request body is not JSON: ") + e.what());
  }
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// ------------------------------------------------------------------ sessions

struct Snapshot {
  std::string document;  // canonical text
  std::vector<std::pair<ContainerId, std::string>> overrides;
};

struct Session {
  std::string id;
  DslDocument document;
  Seed seed = 0;
  std::optional<std::string> run_id;
  /// Uploaded tables in upload order, kept as received.
  std::vector<std::pair<ContainerId, std::string>> overrides;
  std::deque<Snapshot> history;
  ValidationReport report;

  std::vector<UserOverride> user_overrides() const {
    std::vector<UserOverride> out;
    for (const auto& [id, text] : overrides) out.push_back({id, parse_user_table(text)});
    return out;
  }
};

Json overrides_json(const std::vector<std::pair<ContainerId, std::string>>& o) {
  Json arr = Json::array();
  for (const auto& [id, text] : o) arr.push_back({{"container", id.str()}, {"table", text}});
  return arr;
}

std::vector<std::pair<ContainerId, std::string>> overrides_from(const Json& arr) {
  std::vector<std::pair<ContainerId, std::string>> out;
  for (const auto& o : arr) out.emplace_back(ContainerId(o.at("container").get<std::string>()), o.at("table").get<std::string>());
  return out;
}

std::string session_to_storage(const Session& s) {
  Json history = Json::array();
  for (const auto& h : s.history) history.push_back({{"document", h.document}, {"overrides", overrides_json(h.overrides)}});
  Json j = {{"session_id", s.id},
            {"seed", s.seed},
            {"run_id", s.run_id ? Json(*s.run_id) : Json()},
            {"document", serialize(s.document)},
            {"overrides", overrides_json(s.overrides)},
            {"history", std::move(history)}};
  return j.dump();
}

Session session_from_storage(const std::string& text) {
  const Json j = Json::parse(text);
  Session s;
  s.id = j.at("session_id").get<std::string>();
  s.seed = j.at("seed").get<Seed>();
  if (!j.at("run_id").is_null()) s.run_id = j.at("run_id").get<std::string>();
  s.document = parse_document(j.at("document").get<std::string>());
  s.overrides = overrides_from(j.at("overrides"));
  for (const auto& h : j.at("history")) s.history.push_back({h.at("document").get<std::string>(), overrides_from(h.at("overrides"))});
  s.report = validate(s.document);
  return s;
}

Json session_json(const Session& s) {
  Json overrides = Json::array();
  for (const auto& [id, _] : s.overrides) overrides.push_back(id.str());
  return {{"session_id", s.id},
          {"seed", s.seed},
          {"run_id", s.run_id ? Json(*s.run_id) : Json()},
          {"document", codec::document_to_json(s.document)},
          {"validation", report_json(s.report)},
          {"overrides", std::move(overrides)},
          {"history_depth", s.history.size()}};
}

struct SessionSlot {
  std::shared_mutex mutex;
  Session session;
};

// ------------------------------------------------------------------ runs

bool terminal(RunStatus s) { return s == RunStatus::done || s == RunStatus::failed; }

std::optional<RunStatus> run_status_from(std::string_view s) {
  for (auto v : {RunStatus::pending, RunStatus::step1, RunStatus::step2, RunStatus::step3, RunStatus::assembling,
                 RunStatus::done, RunStatus::failed})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

struct RunRecord {
  std::string id;
  RunStatus status = RunStatus::pending;
  std::string failure;
  std::vector<std::string> warnings;
  std::optional<DslDocument> document;
  std::optional<ValidationReport> validation;
};

std::string run_to_storage(const RunRecord& r) {
  Json j = {{"run_id", r.id},
            {"status", std::string(to_string(r.status))},
            {"failure", r.failure},
            {"warnings", r.warnings},
            {"document", r.document ? Json(serialize(*r.document)) : Json()}};
  return j.dump();
}

RunRecord run_from_storage(const std::string& text) {
  const Json j = Json::parse(text);
  RunRecord r;
  r.id = j.at("run_id").get<std::string>();
  r.status = run_status_from(j.at("status").get<std::string>()).value_or(RunStatus::failed);
  r.failure = j.at("failure").get<std::string>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  if (!j.at("document").is_null()) {
    r.document = parse_document(j.at("document").get<std::string>());
    r.validation = validate(*r.document);
  }
  return r;
}

Json run_json(const RunRecord& r) {
  Json j = {{"run_id", r.id}, {"status", std::string(to_string(r.status))}, {"warnings", r.warnings}};
  if (!r.failure.empty()) j["failure"] = r.failure;
  if (r.document) j["document"] = codec::document_to_json(*r.document);
  if (r.validation) j["validation"] = report_json(*r.validation);
  return j;
}

// ------------------------------------------------------------------ tree

Json bbox_json(const CanvasFrame& f, const CanvasFrame& parent) {
  auto frac = [](double v, double origin, double extent) { return extent > 0 ? (v - origin) / extent : 0.0; };
  return {{"x", codec::number(frac(f.px, parent.px, parent.pw))},
          {"y", codec::number(frac(f.py, parent.py, parent.ph))},
          {"w", codec::number(parent.pw > 0 ? f.pw / parent.pw : 0.0)},
          {"h", codec::number(parent.ph > 0 ? f.ph / parent.ph : 0.0)}};
}

Json tree_json(const ContainerNode& n, const std::string& prefix, const CanvasFrame* parent,
               const std::map<std::string, const CanvasFrame*>& frames) {
  const std::string key = prefix + n.id.str();
  Json j = {{"id", n.id.str()},
            {"kind", std::string(to_string(kind_of(n.frame)))},
            {"is_template", n.id.is_template()},
            {"is_leaf", n.is_leaf}};
  if (n.mark_type) j["mark_type"] = std::string(to_string(*n.mark_type));
  j["coordinate_system"] = codec::frame_to_json(n.frame);
  const auto it = frames.find(key);
  const CanvasFrame* self = it == frames.end() ? nullptr : it->second;
  j["bbox"] = self && parent ? bbox_json(*self, *parent) : Json();

  // Template children are shown for the first instance.
  std::string child_prefix = prefix;
  const CanvasFrame* child_parent = self;
  if (n.id.is_template()) {
    const auto first = frames.find(key + "[0]");
    child_parent = first == frames.end() ? nullptr : first->second;
    child_prefix = key + "[0]/";
  }
  Json children = Json::array();
  for (const auto& c : n.children) children.push_back(tree_json(c, child_prefix, child_parent, frames));
  j["children"] = std::move(children);
  return j;
}

Canvas canvas_from(const httplib::Request& req) {
  auto dimension = [&](const char* name, double fallback) {
    if (!req.has_param(name)) return fallback;
    double v = 0;
    try {
      v = std::stod(req.get_param_value(name));
    } catch (const std::exception&) {
      throw HttpError(400, std::string(name) + " is not a number");
    }
    if (!(v > 0) || v > kMaxRenderSide)
      throw HttpError(400, std::string(name) + " must lie in (0, " + format_number(kMaxRenderSide) + "]");
    return v;
  };
  return {dimension("width", 800), dimension("height", 600)};
}

}  // namespace

// ------------------------------------------------------------------ config

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  auto integer = [&](const char* name, long long fallback) {
    const auto v = env(name);
    if (!v) return fallback;
    try {
      return std::stoll(*v);
    } catch (const std::exception&) {
      throw Error(std::string(name) + " is not an integer: " + *v);
    }
  };
  if (auto v = env("REVIS_HOST")) c.host = *v;
  c.port = static_cast<int>(integer("REVIS_PORT", c.port));
  if (auto v = env("REVIS_STORAGE")) c.storage_path = *v;
  c.max_upload_bytes = static_cast<std::size_t>(integer("REVIS_MAX_UPLOAD", static_cast<long long>(c.max_upload_bytes)));
  c.workers = static_cast<int>(integer("REVIS_WORKERS", c.workers));
  if (auto v = env("REVIS_CORS_ORIGIN")) c.cors_origin = *v;
  if (auto v = env("REVIS_FIXTURES")) c.fixtures = *v;
  c.endpoint = MllmEndpointConfig::from_env();
  if (c.port < 0 || c.port > 65535) throw Error("REVIS_PORT out of range");
  if (c.workers < 1) throw Error("REVIS_WORKERS must be at least 1");
  return c;
}

// ------------------------------------------------------------------ service

struct Service::Impl {
  ServiceConfig config;
  SqliteStore store;
  httplib::Server server;
  boost::asio::thread_pool pool;

  mutable std::mutex runs_mutex;
  mutable std::condition_variable runs_changed;
  std::map<std::string, RunRecord> runs;

  std::mutex sessions_mutex;
  std::map<std::string, std::shared_ptr<SessionSlot>> sessions;

  explicit Impl(ServiceConfig c)
      : config(std::move(c)), store(config.storage_path), pool(static_cast<std::size_t>(config.workers)) {
    config.endpoint.check();
    routes();
  }

  ~Impl() {
    server.stop();
    pool.join();
  }

  // ---------------------------------------------------------------- runs

  void save_run(const RunRecord& r) {
    store.put("run/" + r.id, run_to_storage(r));
    {
      std::lock_guard lock(runs_mutex);
      runs[r.id] = r;
    }
    runs_changed.notify_all();
  }

  RunRecord load_run(const std::string& id) const {
    {
      std::lock_guard lock(runs_mutex);
      if (auto it = runs.find(id); it != runs.end()) return it->second;
    }
    const auto text = store.get("run/" + id);
    if (!text) throw NotFoundError("no run " + id);
    RunRecord r = run_from_storage(*text);
    if (!terminal(r.status)) {
      r.status = RunStatus::failed;
      r.failure = "interrupted by a service restart";
    }
    return r;
  }

  void execute(const std::string& id, ImageInput image) {
    RunRecord record;
    record.id = id;
    try {
      std::unique_ptr<ChatTransport> transport;
      if (config.fixtures)
        transport = std::make_unique<FixtureTransport>(resolve_fixture_case(*config.fixtures, image));
      else
        transport = std::make_unique<HttpTransport>(config.endpoint);
      const auto run = run_pipeline(id, std::move(image), *transport, config.endpoint, &store, [&](const PipelineRun& r) {
        if (terminal(r.status)) return;
        record.status = r.status;
        save_run(record);
      });
      record.status = run.status;
      record.failure = run.failure;
      record.warnings = run.warnings;
      record.document = run.document;
      record.validation = run.validation;
    } catch (const std::exception& e) {
      record.status = RunStatus::failed;
      record.failure = e.what();
    }
    save_run(record);
  }

  void post_run(const httplib::Request& req, httplib::Response& res) {
    std::string bytes;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("image")) throw HttpError(400, "multipart upload needs an \"image\" part");
      bytes = req.get_file_value("image").content;
    } else {
      bytes = req.body;
    }
    if (bytes.size() > config.max_upload_bytes) throw HttpError(413, "image exceeds the upload limit");
    ImageInput image;
    try {
      image = make_image(std::move(bytes));
    } catch (const DataError& e) {
      throw HttpError(415, e.what());
    }
    if (!config.fixtures && config.endpoint.api_key.empty())
      throw HttpError(503, "live pipeline runs need REVIS_API_KEY (or start the service with fixtures)");
    RunRecord record;
    record.id = random_id("r_");
    save_run(record);
    boost::asio::post(pool, [this, id = record.id, image = std::move(image)]() mutable { execute(id, std::move(image)); });
    send_json(res, 202, {{"run_id", record.id}, {"status", "pending"}});
  }

  // ---------------------------------------------------------------- sessions

  void persist(const Session& s) { store.put("session/" + s.id, session_to_storage(s)); }

  std::shared_ptr<SessionSlot> slot(const std::string& id) {
    std::lock_guard lock(sessions_mutex);
    if (auto it = sessions.find(id); it != sessions.end()) return it->second;
    const auto text = store.get("session/" + id);
    if (!text) throw NotFoundError("no session " + id);
    auto s = std::make_shared<SessionSlot>();
    s->session = session_from_storage(*text);
    sessions[id] = s;
    return s;
  }

  std::string render(const Session& s, const Canvas& canvas, Seed seed) const {
    return render_document(s.document, seed, canvas, s.user_overrides());
  }

  void create_session(const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    if (!body.is_object()) throw HttpError(400, "expected a JSON object");
    Session s;
    s.id = random_id("s_");
    if (body.contains("seed")) {
      if (!body["seed"].is_number_unsigned()) throw HttpError(400, "seed must be a non-negative integer");
      s.seed = body["seed"].get<Seed>();
    }
    try {
      if (body.contains("run_id")) {
        const RunRecord run = load_run(body["run_id"].get<std::string>());
        if (!run.document) throw HttpError(409, "run " + run.id + " has no document (status " +
                                                    std::string(to_string(run.status)) + ")");
        s.document = *run.document;
        s.run_id = run.id;
      } else if (body.contains("document")) {
        s.document = codec::document_from_json(body["document"]);
      } else if (body.contains("dsl") && body["dsl"].is_string()) {
        s.document = parse_document(body["dsl"].get<std::string>());
      } else {
        throw HttpError(400, "give one of run_id, document or dsl");
      }
    } catch (const ParseError& e) {
      throw HttpError(422, e.what(), {{"path", e.path()}});
    }
    s.report = validate(s.document);
    persist(s);
    auto slot = std::make_shared<SessionSlot>();
    slot->session = s;
    {
      std::lock_guard lock(sessions_mutex);
      sessions[s.id] = slot;
    }
    send_json(res, 201, session_json(s));
  }

  /// Validates and renders `next`, then makes it the session state with the
  /// previous state pushed onto the undo history. Leaves the session
  /// untouched on any failure.
  Json commit(Session& s, DslDocument next, std::vector<std::pair<ContainerId, std::string>> overrides) {
    ValidationReport report = validate(next);
    if (report.has_errors()) throw HttpError(422, "edit leaves the document invalid", {{"validation", report_json(report)}});
    // Uploaded tables for containers that no longer exist are dropped.
    std::erase_if(overrides, [&](const auto& o) { return !next.data_specifications.count(o.first); });
    Session candidate = s;
    candidate.document = std::move(next);
    candidate.overrides = std::move(overrides);
    candidate.report = std::move(report);
    std::string svg;
    try {
      svg = render(candidate, Canvas{}, candidate.seed);
    } catch (const Error& e) {
      throw HttpError(422, std::string("edit cannot be rendered: ") + e.what());
    }
    candidate.history.push_back({serialize(s.document), s.overrides});
    while (candidate.history.size() > config.history_depth) candidate.history.pop_front();
    persist(candidate);
    s = std::move(candidate);
    Json out = session_json(s);
    out["svg"] = std::move(svg);
    return out;
  }

  void patch_container(const httplib::Request& req, httplib::Response& res) {
    auto sl = slot(req.matches[1]);
    const ContainerId cid(req.matches[2].str());
    const Json body = parse_body(req);
    if (!body.is_object() || !body.contains("op") || !body["op"].is_string())
      throw HttpError(400, "expected {\"op\": ...}");
    const std::string op = body["op"].get<std::string>();

    std::unique_lock lock(sl->mutex);
    Session& s = sl->session;
    const ContainerNode* target = find_node(s.document.root, cid);
    if (!target) throw NotFoundError("no container " + cid.str());
    auto frame_arg = [&]() -> std::optional<CoordinateFrame> {
      if (!body.contains("coordinate_system")) return std::nullopt;
      const Json kind = body.contains("coordinate") ? body["coordinate"]
                                                    : Json(std::string(to_string(kind_of(target->frame))));
      return codec::frame_from_json(kind, body["coordinate_system"], "$");
    };

    DslDocument next;
    std::optional<ContainerId> new_id;
    try {
      if (op == "frame") {
        const auto frame = frame_arg();
        if (!frame) throw HttpError(400, "frame edits need coordinate_system");
        next = edit_frame(s.document, cid, *frame);
      } else if (op == "spec") {
        if (!body.contains("patch")) throw HttpError(400, "spec edits need a merge patch in \"patch\"");
        next = patch_spec(s.document, cid, body["patch"].dump());
      } else if (op == "duplicate") {
        auto dup = duplicate_container(s.document, cid, frame_arg());
        next = std::move(dup.document);
        new_id = dup.new_id;
      } else if (op == "remove") {
        next = remove_container(s.document, cid);
      } else if (op == "add") {
        if (!body.contains("container") || !body["container"].is_object())
          throw HttpError(400, "add needs a container object");
        Json c = body["container"];
        if (!c.contains("container_id")) c["container_id"] = next_child_id(*target).str();
        codec::ParseOptions lenient;
        lenient.lenient = true;
        ContainerNode node = codec::node_from_json(c, "$.container", lenient);
        std::optional<DataSpecification> spec;
        if (body.contains("data_specification"))
          spec = codec::spec_from_json(body["data_specification"], "$.data_specification");
        new_id = node.id;
        next = add_subcontainer(s.document, cid, std::move(node), spec);
      } else {
        throw HttpError(400, "unknown op \"" + op + "\"");
      }
    } catch (const ParseError& e) {
      throw HttpError(422, e.what(), {{"path", e.path()}});
    }
    Json out = commit(s, std::move(next), s.overrides);
    if (new_id) out["new_id"] = new_id->str();
    send_json(res, 200, out);
  }

  void undo(const httplib::Request& req, httplib::Response& res) {
    auto sl = slot(req.matches[1]);
    std::unique_lock lock(sl->mutex);
    Session& s = sl->session;
    if (s.history.empty()) throw HttpError(409, "nothing to undo");
    Session candidate = s;
    const Snapshot snap = candidate.history.back();
    candidate.history.pop_back();
    candidate.document = parse_document(snap.document);
    candidate.overrides = snap.overrides;
    candidate.report = validate(candidate.document);
    persist(candidate);
    s = std::move(candidate);
    Json out = session_json(s);
    out["svg"] = render(s, Canvas{}, s.seed);
    send_json(res, 200, out);
  }

  void get_data(const httplib::Request& req, httplib::Response& res) {
    auto sl = slot(req.matches[1]);
    const ContainerId cid(req.matches[2].str());
    std::shared_lock lock(sl->mutex);
    const Session& s = sl->session;
    const DataProvider data(s.document, s.seed, s.user_overrides());
    const auto it = data.document().data_specifications.find(cid);
    if (it == data.document().data_specifications.end()) throw NotFoundError("container " + cid.str() + " has no data");
    if (req.get_param_value("format") == "csv") {
      res.set_content(table_to_csv(data.table(cid), it->second), "text/csv");
    } else {
      res.set_content(table_to_json(data.table(cid), it->second), "application/json");
    }
  }

  void put_data(const httplib::Request& req, httplib::Response& res) {
    auto sl = slot(req.matches[1]);
    const ContainerId cid(req.matches[2].str());
    std::unique_lock lock(sl->mutex);
    Session& s = sl->session;
    if (!s.document.data_specifications.count(cid)) throw NotFoundError("container " + cid.str() + " has no data");
    parse_user_table(req.body);  // rejects malformed uploads before anything else
    auto overrides = s.overrides;
    overrides.emplace_back(cid, req.body);
    std::vector<UserOverride> parsed;
    for (const auto& [id, text] : overrides) parsed.push_back({id, parse_user_table(text)});
    const DataProvider data(s.document, s.seed, parsed);
    Json out = commit(s, data.document(), std::move(overrides));
    out["table"] = Json::parse(table_to_json(data.table(cid), data.document().data_specifications.at(cid)));
    send_json(res, 200, out);
  }

  void get_render(const httplib::Request& req, httplib::Response& res) {
    auto sl = slot(req.matches[1]);
    const Canvas canvas = canvas_from(req);
    std::shared_lock lock(sl->mutex);
    Seed seed = sl->session.seed;
    if (req.has_param("seed")) {
      try {
        seed = std::stoull(req.get_param_value("seed"));
      } catch (const std::exception&) {
        throw HttpError(400, "seed is not a non-negative integer");
      }
    }
    res.set_content(render(sl->session, canvas, seed), "image/svg+xml");
  }

  void get_tree(const httplib::Request& req, httplib::Response& res) {
    auto sl = slot(req.matches[1]);
    std::shared_lock lock(sl->mutex);
    const Session& s = sl->session;
    const DataProvider data(s.document, s.seed, s.user_overrides());
    const auto frames = layout_canvas(data, Canvas{});
    std::map<std::string, const CanvasFrame*> by_key;
    for (const auto& f : frames) by_key[f.key] = &f;
    send_json(res, 200, tree_json(s.document.root, "", nullptr, by_key));
  }

  // ---------------------------------------------------------------- routing

  template <typename Handler>
  httplib::Server::Handler guarded(Handler h) {
    return [this, h](const httplib::Request& req, httplib::Response& res) {
      try {
        (this->*h)(req, res);
      } catch (const HttpError& e) {
        Json body = e.extra;
        body["error"] = e.what();
        send_json(res, e.status, body);
      } catch (const NotFoundError& e) {
        send_json(res, 404, {{"error", e.what()}});
      } catch (const ParseError& e) {
        send_json(res, 422, {{"error", e.what()}, {"path", e.path()}});
      } catch (const EditError& e) {
        send_json(res, 422, {{"error", e.what()}});
      } catch (const DataError& e) {
        send_json(res, 422, {{"error", e.what()}});
      } catch (const std::exception& e) {
        send_json(res, 500, {{"error", e.what()}});
      }
    };
  }

  void routes() {
    server.set_payload_max_length(config.max_upload_bytes);
    server.set_default_headers({{"Access-Control-Allow-Origin", config.cors_origin},
                                {"Access-Control-Allow-Methods", "GET, POST, PUT, PATCH, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    const std::string id = "([A-Za-z0-9_]+)";
    const std::string cid = "([0-9a-z-]+)";
    server.Post("/runs", guarded(&Impl::post_run));
    server.Get("/runs/" + id, guarded(&Impl::get_run));
    server.Get("/runs/" + id + "/transcripts", guarded(&Impl::get_transcripts));
    server.Post("/sessions", guarded(&Impl::create_session));
    server.Get("/sessions/" + id, guarded(&Impl::get_session));
    server.Patch("/sessions/" + id + "/containers/" + cid, guarded(&Impl::patch_container));
    server.Post("/sessions/" + id + "/undo", guarded(&Impl::undo));
    server.Get("/sessions/" + id + "/data/" + cid, guarded(&Impl::get_data));
    server.Put("/sessions/" + id + "/data/" + cid, guarded(&Impl::put_data));
    server.Get("/sessions/" + id + "/render", guarded(&Impl::get_render));
    server.Get("/sessions/" + id + "/tree", guarded(&Impl::get_tree));
  }

  void get_run(const httplib::Request& req, httplib::Response& res) { send_json(res, 200, run_json(load_run(req.matches[1]))); }

  void get_transcripts(const httplib::Request& req, httplib::Response& res) {
    const std::string run_id = req.matches[1];
    load_run(run_id);
    Json arr = Json::array();
    for (const auto& t : store.transcripts(run_id))
      arr.push_back({{"label", t.label}, {"request", t.request}, {"response", t.response}});
    send_json(res, 200, arr);
  }

  void get_session(const httplib::Request& req, httplib::Response& res) {
    auto sl = slot(req.matches[1]);
    std::shared_lock lock(sl->mutex);
    send_json(res, 200, session_json(sl->session));
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() = default;

int Service::bind() {
  auto& c = impl_->config;
  if (c.port == 0) {
    const int port = impl_->server.bind_to_any_port(c.host);
    if (port < 0) throw Error("cannot bind " + c.host);
    c.port = port;
  } else if (!impl_->server.bind_to_port(c.host, c.port)) {
    throw Error("cannot bind " + c.host + ":" + std::to_string(c.port));
  }
  return c.port;
}

void Service::listen() {
  if (!impl_->server.listen_after_bind()) throw Error("service stopped with an error");
}

void Service::stop() { impl_->server.stop(); }

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

bool Service::wait_for_run(const std::string& run_id, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(impl_->runs_mutex);
  return impl_->runs_changed.wait_for(lock, timeout, [&] {
    const auto it = impl_->runs.find(run_id);
    return it != impl_->runs.end() && terminal(it->second.status);
  });
}

}  // namespace recast
