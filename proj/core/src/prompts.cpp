#include "recast/prompts.hpp"

#include <openssl/evp.h>

#include <algorithm>

#include "recast/error.hpp"

namespace recast {

namespace detail {
extern const std::string_view prompt_step1_structure;
extern const std::string_view prompt_template_parsing_1;
extern const std::string_view prompt_template_parsing_2;
extern const std::string_view prompt_mark_parsing;
}  // namespace detail

namespace {

struct PromptInfo {
  std::string_view text;
  std::vector<std::string> slots;
  bool brace_escaped;
};

const PromptInfo& info(PromptId id) {
  static const PromptInfo step1{detail::prompt_step1_structure, {}, false};
  static const PromptInfo merge{detail::prompt_template_parsing_1, {"structure_result"}, true};
  static const PromptInfo template_spec{
      detail::prompt_template_parsing_2, {"structure_result", "cleaned_dsl", "template_index"}, false};
  static const PromptInfo mark{detail::prompt_mark_parsing, {"dsl", "mark_type", "container_id"}, false};
  switch (id) {
    case PromptId::step1_structure: return step1;
    case PromptId::template_parsing_1: return merge;
    case PromptId::template_parsing_2: return template_spec;
    case PromptId::mark_parsing: return mark;
  }
  throw Error("unknown prompt");
}

}  // namespace

std::string_view to_string(PromptId id) {
  switch (id) {
    case PromptId::step1_structure: return "step1_structure";
    case PromptId::template_parsing_1: return "template_parsing_1";
    case PromptId::template_parsing_2: return "template_parsing_2";
    case PromptId::mark_parsing: return "mark_parsing";
  }
  return "";
}

std::vector<PromptId> all_prompts() {
  return {PromptId::step1_structure, PromptId::template_parsing_1, PromptId::template_parsing_2,
          PromptId::mark_parsing};
}

std::string_view prompt_text(PromptId id) { return info(id).text; }

std::vector<std::string> prompt_slots(PromptId id) { return info(id).slots; }

std::string render_prompt(PromptId id, const std::map<std::string, std::string>& values) {
  const PromptInfo& p = info(id);
  for (const auto& [name, _] : values)
    if (std::find(p.slots.begin(), p.slots.end(), name) == p.slots.end())
      throw Error(std::string(to_string(id)) + " has no slot {" + name + "}");
  for (const auto& slot : p.slots)
    if (!values.count(slot)) throw Error(std::string(to_string(id)) + " needs a value for {" + slot + "}");

  std::string out;
  out.reserve(p.text.size());
  const std::string_view t = p.text;
  std::size_t i = 0;
  while (i < t.size()) {
    if (t[i] == '{') {
      if (p.brace_escaped && i + 1 < t.size() && t[i + 1] == '{') {
        out += '{';
        i += 2;
        continue;
      }
      const auto close = t.find('}', i);
      if (close != std::string_view::npos) {
        const auto it = values.find(std::string(t.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    } else if (t[i] == '}' && p.brace_escaped && i + 1 < t.size() && t[i + 1] == '}') {
      out += '}';
      i += 2;
      continue;
    }
    out += t[i++];
  }
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int k = 0; k < len; ++k) {
    out += kHex[digest[k] >> 4];
    out += kHex[digest[k] & 0xF];
  }
  return out;
}

}  // namespace recast
