#pragma once

// Structural edits used during redesign. Every function takes the document
// by const reference and returns a new one; on failure it throws EditError
// (or NotFoundError for unknown ids) and the input is untouched.

#include <optional>
#include <string_view>

#include "recast/dsl.hpp"

namespace recast {

/// Replaces one container's frame. The frame kind may only change for
/// direct children of a cartesian root.
DslDocument edit_frame(const DslDocument& doc, const ContainerId& id, const CoordinateFrame& new_frame);

struct DuplicateResult {
  DslDocument document;
  ContainerId new_id;
};

/// Deep-copies the subtree rooted at `id` as a new last sibling. Plain
/// containers get the smallest unused integer segment; templates get the
/// first letter not yet used by any template in the document. Spec entries
/// and source/target references inside the subtree are remapped.
DuplicateResult duplicate_container(const DslDocument& doc, const ContainerId& id,
                                    const std::optional<CoordinateFrame>& new_frame = std::nullopt);

/// Removes a subtree and every spec entry keyed inside it.
DslDocument remove_container(const DslDocument& doc, const ContainerId& id);

/// Appends `node` under `parent_id`. An empty node id is replaced by the
/// next free integer segment; the same applies to id-less descendants.
DslDocument add_subcontainer(const DslDocument& doc, const ContainerId& parent_id, ContainerNode node,
                             const std::optional<DataSpecification>& spec = std::nullopt);

/// Applies an RFC 7386 JSON merge patch to the canonical JSON of the
/// container's data specification (an empty object if it has none yet).
DslDocument patch_spec(const DslDocument& doc, const ContainerId& id, std::string_view merge_patch_json);

DslDocument set_spec(const DslDocument& doc, const ContainerId& id, const DataSpecification& spec);

/// Smallest unused non-negative integer segment among `parent`'s children.
ContainerId next_child_id(const ContainerNode& parent);

}  // namespace recast
