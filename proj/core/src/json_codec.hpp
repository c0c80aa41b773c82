#pragma once

// nlohmann::ordered_json conversions for the DSL model. Internal to the
// recast libraries; public entry points live in dsl_json.hpp.

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "recast/dsl.hpp"

namespace recast::codec {

using Json = nlohmann::ordered_json;

struct ParseOptions {
  /// Accept MLLM-style omissions: missing if_leaf (inferred from
  /// components), missing coordinate kind (inferred from coordinate_system
  /// keys), components on leaves given as [] or null.
  bool lenient = false;
};

Json number(double v);

Json frame_to_json(const CoordinateFrame& f);
Json node_to_json(const ContainerNode& n);
Json spec_to_json(const DataSpecification& s);
Json document_to_json(const DslDocument& d);

CoordinateFrame frame_from_json(const Json& kind, const Json& system, const std::string& path);
ContainerNode node_from_json(const Json& j, const std::string& path, const ParseOptions& opt = {},
                             std::optional<CoordinateKind> inherited = std::nullopt);
DataSpecification spec_from_json(const Json& j, const std::string& path);
DslDocument document_from_json(const Json& j, const std::string& path = "$", const ParseOptions& opt = {});

Json parse_json(std::string_view text, const std::string& path = "$");
std::string dump(const Json& j);

}  // namespace recast::codec
