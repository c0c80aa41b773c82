#pragma once

// JSON-over-HTTP backend for the interactive editor: pipeline runs,
// editing sessions with server-side undo, user data uploads and renders.
//
// Routes
//   POST   /runs                          image upload (raw body or multipart "image") -> 202 {run_id}
//   GET    /runs/{id}                     status, warnings, document and validation once done
//   GET    /runs/{id}/transcripts         recorded model calls
//   POST   /sessions                      {"run_id"} | {"document"} | {"dsl": "<text>"}, optional "seed"
//   GET    /sessions/{id}                 snapshot
//   PATCH  /sessions/{id}/containers/{cid}  {"op": "frame"|"spec"|"duplicate"|"remove"|"add", ...}
//   POST   /sessions/{id}/undo
//   GET    /sessions/{id}/data/{cid}      exemplar table (JSON, or CSV with ?format=csv)
//   PUT    /sessions/{id}/data/{cid}      user table (JSON or CSV body)
//   GET    /sessions/{id}/render          SVG; optional width, height, seed query parameters
//   GET    /sessions/{id}/tree            container hierarchy with relative boxes

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recast/pipeline.hpp"

namespace recast {

/// Embedded sqlite database holding a key-value table and the transcript
/// log. Thread-safe; ":memory:" gives a private in-memory database.
class SqliteStore : public TranscriptStore {
 public:
  explicit SqliteStore(const std::string& path);
  ~SqliteStore() override;
  SqliteStore(const SqliteStore&) = delete;
  SqliteStore& operator=(const SqliteStore&) = delete;

  void put(std::string_view key, std::string_view value);
  std::optional<std::string> get(std::string_view key) const;
  bool erase(std::string_view key);
  /// Keys starting with `prefix`, sorted.
  std::vector<std::string> keys(std::string_view prefix) const;

  /// Committed before returning.
  void record(const std::string& run_id, const Transcript& t) override;
  std::vector<Transcript> transcripts(const std::string& run_id) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string storage_path = "recast.db";
  std::size_t max_upload_bytes = 20 * 1024 * 1024;
  int workers = 2;
  std::string cors_origin = "*";
  std::size_t history_depth = 100;
  /// Replay recorded responses instead of calling the endpoint. The
  /// directory is either one fixture case or a set of case directories, in
  /// which case the one whose image.png matches the upload is used.
  std::optional<std::filesystem::path> fixtures;
  MllmEndpointConfig endpoint;

  /// REVIS_HOST, REVIS_PORT, REVIS_STORAGE, REVIS_MAX_UPLOAD, REVIS_WORKERS,
  /// REVIS_CORS_ORIGIN, REVIS_FIXTURES, plus the endpoint variables.
  static ServiceConfig from_env();
};

inline constexpr double kMaxRenderSide = 4096;

class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds the listening socket and returns the port.
  int bind();
  /// Serves until stop(). Call bind() first.
  void listen();
  void stop();
  void wait_until_ready() const;

  /// Blocks until the run reaches done or failed; false on timeout.
  bool wait_for_run(const std::string& run_id, std::chrono::milliseconds timeout) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace recast
