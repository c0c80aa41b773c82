#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "recast/error.hpp"
#include "recast/pipeline.hpp"

namespace recast {

namespace {

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

template <typename T>
T env_number(const char* name, T fallback) {
  const auto v = env(name);
  if (!v) return fallback;
  try {
    if constexpr (std::is_integral_v<T>)
      return static_cast<T>(std::stol(*v));
    else
      return static_cast<T>(std::stod(*v));
  } catch (const std::exception&) {
    throw Error(std::string(name) + " is not a number: " + *v);
  }
}

std::uint32_t be32(std::string_view s, std::size_t at) {
  return (std::uint32_t(static_cast<unsigned char>(s[at])) << 24) |
         (std::uint32_t(static_cast<unsigned char>(s[at + 1])) << 16) |
         (std::uint32_t(static_cast<unsigned char>(s[at + 2])) << 8) |
         std::uint32_t(static_cast<unsigned char>(s[at + 3]));
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw NotFoundError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Splits "https://host:port/prefix" into the origin and the path prefix.
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error("endpoint URL needs a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, ""};
  std::string prefix = url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, slash), prefix};
}

}  // namespace

MllmEndpointConfig MllmEndpointConfig::from_env() {
  MllmEndpointConfig c;
  if (auto v = env("REVIS_BASE_URL")) c.base_url = *v;
  if (auto v = env("REVIS_MODEL")) c.model = *v;
  if (auto v = env("REVIS_API_KEY")) c.api_key = *v;
  c.timeout_seconds = env_number("REVIS_TIMEOUT", c.timeout_seconds);
  c.max_retries = env_number("REVIS_MAX_RETRIES", c.max_retries);
  c.max_parallel = env_number("REVIS_PARALLEL", c.max_parallel);
  c.check();
  return c;
}

void MllmEndpointConfig::check() const {
  if (!(timeout_seconds > 0)) throw Error("endpoint timeout must be positive");
  if (max_retries < 0) throw Error("endpoint retries must not be negative");
  if (max_parallel < 1) throw Error("leaf parallelism must be at least 1");
}

ImageInput make_image(std::string bytes) {
  const std::string_view b = bytes;
  ImageInput img;
  if (b.size() >= 24 && b.substr(0, 8) == "\x89PNG\r\n\x1a\n") {
    if (b.substr(12, 4) != "IHDR" || be32(b, 16) == 0 || be32(b, 20) == 0)
      throw DataError("PNG header is damaged");
    img.media_type = "image/png";
  } else if (b.size() >= 4 && static_cast<unsigned char>(b[0]) == 0xFF && static_cast<unsigned char>(b[1]) == 0xD8 &&
             static_cast<unsigned char>(b[2]) == 0xFF) {
    img.media_type = "image/jpeg";
  } else if (b.size() >= 10 && (b.substr(0, 6) == "GIF87a" || b.substr(0, 6) == "GIF89a")) {
    img.media_type = "image/gif";
  } else if (b.size() >= 16 && b.substr(0, 4) == "RIFF" && b.substr(8, 4) == "WEBP") {
    img.media_type = "image/webp";
  } else {
    throw DataError("input is not a PNG, JPEG, GIF or WebP image");
  }
  img.bytes = std::move(bytes);
  return img;
}

ImageInput read_image(const std::filesystem::path& path) { return make_image(read_all(path)); }

std::string base64_encode(std::string_view data) {
  std::string out(4 * ((data.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(data.data()), static_cast<int>(data.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

// ------------------------------------------------------------------ http

HttpTransport::HttpTransport(MllmEndpointConfig config) : config_(std::move(config)) { config_.check(); }

std::string HttpTransport::request_body(const ChatRequest& request) const {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    nlohmann::json content = nlohmann::json::array();
    content.push_back({{"type", "text"}, {"text", m.text}});
    if (m.with_image && request.image) {
      const std::string url = "data:" + request.image->media_type + ";base64," + base64_encode(request.image->bytes);
      content.push_back({{"type", "image_url"}, {"image_url", {{"url", url}}}});
    }
    messages.push_back({{"role", m.role}, {"content", std::move(content)}});
  }
  return nlohmann::json{{"model", config_.model}, {"messages", std::move(messages)}}.dump();
}

std::string HttpTransport::complete(const ChatRequest& request) {
  const auto [origin, prefix] = split_url(config_.base_url);
  httplib::Client client(origin);
  const auto seconds = static_cast<time_t>(config_.timeout_seconds);
  const auto micros = static_cast<time_t>((config_.timeout_seconds - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
  const std::string body = request_body(request);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(250LL << (attempt - 1)));
    const auto res = client.Post(prefix + "/chat/completions", headers, body, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) throw PipelineError(request.label, "HTTP " + std::to_string(res->status) + ": " + res->body);
    try {
      const auto j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw PipelineError(request.label, std::string("unexpected response shape: ") + e.what());
    }
  }
  throw PipelineError(request.label, "endpoint unavailable after " + std::to_string(config_.max_retries + 1) +
                                         " attempts (" + last_error + ")");
}

// ------------------------------------------------------------------ fixtures

FixtureTransport::FixtureTransport(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string FixtureTransport::complete(const ChatRequest& request) {
  const auto path = dir_ / (request.label + ".txt");
  if (!std::filesystem::exists(path)) throw NotFoundError("no recorded response for " + request.label + " in " + dir_.string());
  std::string text = read_all(path);
  std::lock_guard lock(mutex_);
  served_.push_back(request.label);
  return text;
}

std::vector<std::string> FixtureTransport::served() const {
  std::lock_guard lock(mutex_);
  return served_;
}

std::filesystem::path resolve_fixture_case(const std::filesystem::path& root, const ImageInput& image) {
  if (std::filesystem::exists(root / "step1.txt")) return root;
  if (!std::filesystem::is_directory(root)) throw NotFoundError("no fixture directory at " + root.string());
  std::vector<std::filesystem::path> cases;
  for (const auto& e : std::filesystem::directory_iterator(root))
    if (e.is_directory() && std::filesystem::exists(e.path() / "image.png")) cases.push_back(e.path());
  std::sort(cases.begin(), cases.end());
  for (const auto& c : cases)
    if (read_all(c / "image.png") == image.bytes) return c;
  throw NotFoundError("no fixture case in " + root.string() + " matches the image");
}

RecordingTransport::RecordingTransport(ChatTransport& inner, std::filesystem::path dir)
    : inner_(inner), dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::string RecordingTransport::complete(const ChatRequest& request) {
  std::string text = inner_.complete(request);
  std::lock_guard lock(mutex_);
  std::ofstream(dir_ / (request.label + ".txt"), std::ios::binary) << text;
  return text;
}

// ------------------------------------------------------------------ stores

void MemoryTranscriptStore::record(const std::string& run_id, const Transcript& t) {
  std::lock_guard lock(mutex_);
  runs_[run_id].push_back(t);
}

std::vector<Transcript> MemoryTranscriptStore::transcripts(const std::string& run_id) const {
  std::lock_guard lock(mutex_);
  const auto it = runs_.find(run_id);
  return it == runs_.end() ? std::vector<Transcript>{} : it->second;
}

DirectoryTranscriptStore::DirectoryTranscriptStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

void DirectoryTranscriptStore::record(const std::string& run_id, const Transcript& t) {
  const std::string line =
      nlohmann::json{{"label", t.label}, {"request", t.request}, {"response", t.response}}.dump() + "\n";
  std::lock_guard lock(mutex_);
  std::ofstream out(dir_ / (run_id + ".jsonl"), std::ios::binary | std::ios::app);
  out << line;
  out.flush();
  if (!out) throw Error("cannot write transcript for run " + run_id);
}

}  // namespace recast
