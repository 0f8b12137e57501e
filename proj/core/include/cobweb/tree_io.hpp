#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "cobweb/cobweb_tree.hpp"

namespace cobweb {

inline constexpr int kTreeFormatVersion = 1;

// Canonical JSON document for a tree. Nodes appear depth-first (root, then
// children in order); nominal counts are keyed by symbol name in sorted
// order; continuous statistics are written as {n, mean, std} plus the exact
// m2 so that a reloaded tree behaves bit-for-bit like the original.
// Identical trees always produce identical bytes.
std::string tree_to_json(const CobwebTree& tree);

// Throws DataError on malformed documents or an unsupported formatVersion.
// Documents without "m2" reconstruct it as std^2 * n.
CobwebTree tree_from_json(std::string_view document);

using NodeLabeler = std::function<std::string(const CobwebTree&, const ConceptNode&)>;

// "id N | count C | top-3 attribute=value probabilities"; continuous-only
// nodes list their first three attribute means instead.
std::string default_node_label(const CobwebTree& tree, const ConceptNode& node);

// Graphviz digraph with one record node per concept and one edge per
// parent-child link.
std::string to_dot(const CobwebTree& tree, std::string_view graph_name,
                   const NodeLabeler& labeler = default_node_label);

}  // namespace cobweb
