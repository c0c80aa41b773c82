#pragma once

// The four prompt templates driving image-to-DSL generation, embedded in
// the library at build time.

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace recast {

enum class PromptId { step1_structure, template_parsing_1, template_parsing_2, mark_parsing };

std::string_view to_string(PromptId id);
std::vector<PromptId> all_prompts();

/// Template text exactly as stored.
std::string_view prompt_text(PromptId id);

/// Slot names the template accepts, e.g. {"structure_result"}.
std::vector<std::string> prompt_slots(PromptId id);

/// Substitutes `{name}` for every slot. Every slot must be supplied and no
/// others. Templates that escape literal braces by doubling them get
/// `{{`/`}}` collapsed after substitution; substituted values are never
/// collapsed.
std::string render_prompt(PromptId id, const std::map<std::string, std::string>& values);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

}  // namespace recast
