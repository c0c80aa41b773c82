#pragma once

// Canonical text form of the DSL: UTF-8 JSON with the field names used by
// the MLLM prompts. Unknown fields are rejected. Canonical output uses
// schema key order, two-space indentation, integral numbers without a
// fractional part and lowercase enum spellings.

#include <string>
#include <string_view>

#include "recast/dsl.hpp"

namespace recast {

/// Throws ParseError carrying the JSON path of the first problem.
DslDocument parse_document(std::string_view text);

std::string serialize(const DslDocument& doc);

/// serialize(parse_document(text)).
std::string canonicalize(std::string_view text);

/// A bare container tree, as emitted by the structure-parsing step.
ContainerNode parse_container_tree(std::string_view text);
std::string serialize_tree(const ContainerNode& root);

DataSpecification parse_data_specification(std::string_view text);
std::string serialize_data_specification(const DataSpecification& spec);

std::string serialize_frame(const CoordinateFrame& frame);
CoordinateFrame parse_frame(std::string_view kind, std::string_view coordinate_system_json);

/// Shortest round-trip decimal form; integral values print without ".0".
std::string format_number(double v);

}  // namespace recast
