#pragma once

// Image to DSL generation in three model-driven steps: container structure,
// template merging (plus one data specification per template), and one data
// specification per leaf. Model calls go through a ChatTransport so runs can
// be replayed from recorded responses.

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "recast/dsl.hpp"
#include "recast/validate.hpp"

namespace recast {

struct MllmEndpointConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-5";
  std::string api_key;
  double timeout_seconds = 600;
  int max_retries = 2;
  int max_parallel = 4;

  /// Overrides defaults from REVIS_BASE_URL, REVIS_MODEL, REVIS_API_KEY,
  /// REVIS_TIMEOUT, REVIS_MAX_RETRIES and REVIS_PARALLEL.
  static MllmEndpointConfig from_env();
  /// Throws Error when timeout <= 0, retries < 0 or parallelism < 1.
  void check() const;
};

struct ImageInput {
  std::string bytes;
  std::string media_type;  // image/png, image/jpeg, image/gif, image/webp
};

/// Sniffs the media type and checks the header is intact. Throws DataError
/// for anything that is not a decodable raster image.
ImageInput make_image(std::string bytes);
ImageInput read_image(const std::filesystem::path& path);

std::string base64_encode(std::string_view data);

struct ChatMessage {
  std::string role;  // "user" or "assistant"
  std::string text;
  /// Attach the run's image to this message.
  bool with_image = false;
};

struct ChatRequest {
  /// Stable call name: "step1", "step2a", "step2b-<template>",
  /// "step3-<leaf>", with "-repair" appended for corrective calls.
  std::string label;
  std::vector<ChatMessage> messages;
  const ImageInput* image = nullptr;
};

class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  /// Returns the assistant text. Throws Error on transport failure.
  virtual std::string complete(const ChatRequest& request) = 0;
};

/// OpenAI-compatible chat-completions endpoint over HTTP(S), retrying
/// connection failures, 429 and 5xx responses with exponential backoff.
class HttpTransport : public ChatTransport {
 public:
  explicit HttpTransport(MllmEndpointConfig config);
  std::string complete(const ChatRequest& request) override;

  /// The JSON body sent for a request (exposed for tests).
  std::string request_body(const ChatRequest& request) const;

 private:
  MllmEndpointConfig config_;
};

/// Replays `<dir>/<label>.txt`. Never touches the network.
class FixtureTransport : public ChatTransport {
 public:
  explicit FixtureTransport(std::filesystem::path dir);
  std::string complete(const ChatRequest& request) override;
  std::vector<std::string> served() const;

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  std::vector<std::string> served_;
};

/// Picks the fixture case for an image: `root` itself when it holds a
/// step1.txt, otherwise the sub-directory whose image.png equals the image
/// bytes. Throws NotFoundError when none does.
std::filesystem::path resolve_fixture_case(const std::filesystem::path& root, const ImageInput& image);

/// Forwards to another transport and saves every response as a fixture.
class RecordingTransport : public ChatTransport {
 public:
  RecordingTransport(ChatTransport& inner, std::filesystem::path dir);
  std::string complete(const ChatRequest& request) override;

 private:
  ChatTransport& inner_;
  std::filesystem::path dir_;
  std::mutex mutex_;
};

struct Transcript {
  std::string label;
  std::string request;  // the final user message text
  std::string response;
  friend bool operator==(const Transcript&, const Transcript&) = default;
};

/// Durable transcript sink; record() returns only once the transcript is
/// stored. Implementations must be thread-safe.
class TranscriptStore {
 public:
  virtual ~TranscriptStore() = default;
  virtual void record(const std::string& run_id, const Transcript& t) = 0;
};

class MemoryTranscriptStore : public TranscriptStore {
 public:
  void record(const std::string& run_id, const Transcript& t) override;
  std::vector<Transcript> transcripts(const std::string& run_id) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::vector<Transcript>> runs_;
};

/// Appends one JSON line per transcript to `<dir>/<run_id>.jsonl`.
class DirectoryTranscriptStore : public TranscriptStore {
 public:
  explicit DirectoryTranscriptStore(std::filesystem::path dir);
  void record(const std::string& run_id, const Transcript& t) override;

 private:
  std::filesystem::path dir_;
  std::mutex mutex_;
};

struct TemplateIndexEntry {
  ContainerId template_id;
  std::vector<ContainerId> instance_ids;
  std::vector<CoordinateFrame> instance_bboxes;
  friend bool operator==(const TemplateIndexEntry&, const TemplateIndexEntry&) = default;
};

/// Bounding box of instance frames (all of one kind).
CoordinateFrame bounding_frame(const std::vector<CoordinateFrame>& frames);

std::string serialize_template_index(const std::vector<TemplateIndexEntry>& index);

enum class RunStatus { pending, step1, step2, step3, assembling, done, failed };
std::string_view to_string(RunStatus s);

/// Everything one model call sequence needs. Transcripts reach the store
/// before their responses are parsed.
class PipelineSession {
 public:
  PipelineSession(ChatTransport& transport, MllmEndpointConfig config, TranscriptStore* store = nullptr,
                  std::string run_id = "run");

  const MllmEndpointConfig& config() const { return config_; }
  const std::string& run_id() const { return run_id_; }

  /// Performs one call and records it in the store and in `sink`.
  std::string call(const std::string& label, const std::vector<ChatMessage>& messages, const ImageInput* image,
                   std::vector<Transcript>& sink);

 private:
  ChatTransport& transport_;
  MllmEndpointConfig config_;
  TranscriptStore* store_;
  std::string run_id_;
};

/// Schemas a model response can be checked against.
enum class OutputSchema { structure, template_merge, template_spec, leaf_spec };

/// Drops markdown fences and any prose around the outermost JSON value.
std::string strip_framing(std::string_view raw);

/// Parses `raw` as `schema` (strictly, then after strip_framing). Throws
/// ParseError describing the first problem. `context` supplies what the
/// schema checks need: the leaf or template id and the trees in play.
struct SchemaContext {
  ContainerId target;
  const ContainerNode* structure = nullptr;  // step-1 tree
  const ContainerNode* cleaned = nullptr;    // step-2 tree
};

struct Step2Result {
  ContainerNode cleaned;
  std::vector<TemplateIndexEntry> template_index;
  std::map<ContainerId, DataSpecification> template_specs;
  std::vector<std::string> warnings;
};

struct ParsedOutput {
  std::optional<ContainerNode> tree;
  std::optional<Step2Result> merge;  // cleaned tree and index only
  std::optional<DataSpecification> spec;
  std::vector<std::string> warnings;
};

ParsedOutput parse_structured_output(std::string_view raw, OutputSchema schema, const SchemaContext& context);

/// Parses a completed call, issuing one corrective follow-up call on
/// failure. Throws PipelineError after the second failure; both transcripts
/// are kept in `sink`.
ParsedOutput repair_structured_output(const std::string& raw, OutputSchema schema, const SchemaContext& context,
                                      PipelineSession& session, const std::string& label,
                                      const std::vector<ChatMessage>& request, const ImageInput* image,
                                      std::vector<Transcript>& sink);

ContainerNode step1_parse_structure(const ImageInput& image, PipelineSession& session,
                                    std::vector<Transcript>& sink);

Step2Result step2_extract_templates(const ContainerNode& structure, const ImageInput& image, PipelineSession& session,
                                    std::vector<Transcript>& sink);

/// Throws Error (before any call) when `leaf` is not a leaf of `cleaned`.
DataSpecification step3_parse_leaf(const ContainerNode& cleaned, const ContainerId& leaf, const ImageInput& image,
                                   PipelineSession& session, std::vector<Transcript>& sink,
                                   std::vector<std::string>* warnings = nullptr);

/// Throws Error naming the first leaf or template without a specification.
DslDocument assemble(const ContainerNode& cleaned, const std::map<ContainerId, DataSpecification>& template_specs,
                     const std::map<ContainerId, DataSpecification>& leaf_specs);

struct PipelineRun {
  std::string id;
  ImageInput image;
  RunStatus status = RunStatus::pending;
  std::string failure;
  std::vector<Transcript> transcripts;
  std::optional<ContainerNode> structure;
  std::optional<Step2Result> templates;
  std::map<ContainerId, DataSpecification> leaf_specs;
  std::vector<std::string> warnings;
  std::optional<DslDocument> document;
  std::optional<ValidationReport> validation;
};

using StatusCallback = std::function<void(const PipelineRun&)>;

/// Runs all steps. Never throws for model or schema failures: the run ends
/// in status failed with the reason recorded. Leaf calls fan out up to
/// config.max_parallel and merge in leaf id order.
PipelineRun run_pipeline(const std::string& run_id, ImageInput image, ChatTransport& transport,
                         const MllmEndpointConfig& config, TranscriptStore* store = nullptr,
                         const StatusCallback& on_status = {});

/// Replays `<case_dir>/image.png` through the recorded responses in
/// `case_dir`. Throws PipelineError when the run fails.
DslDocument replay_fixture_case(const std::filesystem::path& case_dir, const MllmEndpointConfig& config = {});

}  // namespace recast
