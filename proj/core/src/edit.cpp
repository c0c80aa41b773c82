#include "recast/edit.hpp"

#include <algorithm>
#include <set>

#include "json_codec.hpp"
#include "recast/error.hpp"
#include "recast/validate.hpp"

namespace recast {

namespace {

void require_valid_frame(const CoordinateFrame& frame) {
  const auto problems = frame_problems(frame);
  if (!problems.empty()) throw EditError(problems.front());
}

bool contains_cartesian(const ContainerNode& n) {
  if (kind_of(n.frame) == CoordinateKind::cartesian) return true;
  return std::any_of(n.children.begin(), n.children.end(), contains_cartesian);
}

void rebase_subtree(ContainerNode& n, const ContainerId& from, const ContainerId& to) {
  n.id = n.id.rebase(from, to);
  for (auto& c : n.children) rebase_subtree(c, from, to);
}

void collect_ids(const ContainerNode& n, std::set<ContainerId>& out) {
  out.insert(n.id);
  for (const auto& c : n.children) collect_ids(c, out);
}

ContainerNode& mutable_node(DslDocument& doc, const ContainerId& id) {
  if (auto* n = find_node(doc.root, id)) return *n;
  throw NotFoundError("container not found: " + id.str());
}

ContainerNode& mutable_parent(DslDocument& doc, const ContainerId& id) {
  const auto* p = find_parent(doc.root, id);
  if (!p) throw EditError("container " + id.str() + " has no parent");
  return *const_cast<ContainerNode*>(p);
}

std::string unused_template_letter(const ContainerNode& root) {
  std::set<char> used;
  visit_preorder(root, [&](const ContainerNode& n, const ContainerNode*) {
    if (n.id.is_template()) used.insert(n.id.last_segment().front());
  });
  for (char c = 'a'; c <= 'z'; ++c)
    if (!used.count(c)) return std::string(1, c);
  throw EditError("all 26 template letters are in use");
}

void assign_missing_ids(ContainerNode& n) {
  for (auto& c : n.children) {
    if (c.id.empty()) c.id = next_child_id(n);
    assign_missing_ids(c);
  }
}

}  // namespace

ContainerId next_child_id(const ContainerNode& parent) {
  std::set<std::string> used;
  for (const auto& c : parent.children) used.insert(std::string(c.id.last_segment()));
  for (int i = 0;; ++i)
    if (!used.count(std::to_string(i))) return parent.id.child(std::to_string(i));
}

DslDocument edit_frame(const DslDocument& doc, const ContainerId& id, const CoordinateFrame& new_frame) {
  require_valid_frame(new_frame);
  DslDocument out = doc;
  ContainerNode& node = mutable_node(out, id);
  if (kind_of(node.frame) != kind_of(new_frame)) {
    const ContainerNode* parent = find_parent(out.root, id);
    const bool allowed = parent && parent->id.is_root() && kind_of(parent->frame) == CoordinateKind::cartesian;
    if (!allowed)
      throw EditError("frame kind of " + id.str() + " can only change for direct children of a cartesian root");
    if (kind_of(new_frame) == CoordinateKind::polar &&
        std::any_of(node.children.begin(), node.children.end(), contains_cartesian))
      throw EditError("a polar frame on " + id.str() + " would enclose cartesian containers");
  }
  node.frame = new_frame;
  return out;
}

DuplicateResult duplicate_container(const DslDocument& doc, const ContainerId& id,
                                    const std::optional<CoordinateFrame>& new_frame) {
  if (id.is_root()) throw EditError("the root container cannot be duplicated");
  if (new_frame) require_valid_frame(*new_frame);
  DslDocument out = doc;
  const ContainerNode& original = find_container(doc, id);
  ContainerNode& parent = mutable_parent(out, id);

  const ContainerId new_id =
      id.is_template() ? parent.id.child(unused_template_letter(out.root)) : next_child_id(parent);

  ContainerNode copy = original;
  rebase_subtree(copy, id, new_id);
  if (new_frame) {
    if (kind_of(*new_frame) != kind_of(original.frame))
      throw EditError("a duplicate keeps the frame kind of its original");
    copy.frame = *new_frame;
  }

  auto remap = [&](std::optional<std::vector<ContainerId>>& refs) {
    if (!refs) return;
    for (auto& r : *refs)
      if (r.within(id)) r = r.rebase(id, new_id);
  };
  for (const auto& [sid, spec] : doc.data_specifications) {
    if (!sid.within(id)) continue;
    DataSpecification s = spec;
    remap(s.layout_specification.source);
    remap(s.layout_specification.target);
    out.data_specifications.emplace(sid.rebase(id, new_id), std::move(s));
  }
  parent.children.push_back(std::move(copy));
  return {std::move(out), new_id};
}

DslDocument remove_container(const DslDocument& doc, const ContainerId& id) {
  if (id.is_root()) throw EditError("the root container cannot be removed");
  find_container(doc, id);
  DslDocument out = doc;
  ContainerNode& parent = mutable_parent(out, id);
  if (parent.children.size() == 1)
    throw EditError("cannot remove " + id.str() + ": it is the only component of " + parent.id.str());
  parent.children.erase(std::remove_if(parent.children.begin(), parent.children.end(),
                                       [&](const ContainerNode& c) { return c.id == id; }),
                        parent.children.end());
  for (auto it = out.data_specifications.begin(); it != out.data_specifications.end();) {
    if (it->first.within(id))
      it = out.data_specifications.erase(it);
    else
      ++it;
  }
  return out;
}

DslDocument add_subcontainer(const DslDocument& doc, const ContainerId& parent_id, ContainerNode node,
                             const std::optional<DataSpecification>& spec) {
  DslDocument out = doc;
  ContainerNode& parent = mutable_node(out, parent_id);
  if (parent.is_leaf) throw EditError("cannot add a component to leaf container " + parent_id.str());
  if (kind_of(parent.frame) == CoordinateKind::polar && contains_cartesian(node))
    throw EditError("a cartesian container cannot be nested inside polar container " + parent_id.str());
  require_valid_frame(node.frame);

  if (node.id.empty()) node.id = next_child_id(parent);
  assign_missing_ids(node);
  if (!node.id.is_child_of(parent_id))
    throw EditError("id " + node.id.str() + " is not a child id of " + parent_id.str());

  std::set<ContainerId> existing, incoming;
  collect_ids(out.root, existing);
  collect_ids(node, incoming);
  for (const auto& i : incoming)
    if (existing.count(i)) throw EditError("container id " + i.str() + " already exists");

  if (spec) out.data_specifications[node.id] = *spec;
  parent.children.push_back(std::move(node));
  return out;
}

DslDocument patch_spec(const DslDocument& doc, const ContainerId& id, std::string_view merge_patch_json) {
  find_container(doc, id);
  const auto it = doc.data_specifications.find(id);
  codec::Json base = it == doc.data_specifications.end() ? codec::Json::object() : codec::spec_to_json(it->second);
  codec::Json patch;
  try {
    patch = codec::parse_json(merge_patch_json, "$patch");
  } catch (const ParseError& e) {
    throw EditError(e.what());
  }
  base.merge_patch(patch);
  DataSpecification spec;
  try {
    spec = codec::spec_from_json(base, "$.data_specification." + id.str());
  } catch (const ParseError& e) {
    throw EditError(e.what());
  }
  return set_spec(doc, id, spec);
}

DslDocument set_spec(const DslDocument& doc, const ContainerId& id, const DataSpecification& spec) {
  find_container(doc, id);
  DslDocument out = doc;
  out.data_specifications[id] = spec;
  return out;
}

}  // namespace recast
