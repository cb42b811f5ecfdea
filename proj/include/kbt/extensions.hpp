#pragma once

#include <set>
#include <string>

#include "kbt/tree.hpp"

namespace kbt {

// A named set of disabled subtrees.
struct Style
{
    std::string name;
    std::set<NodeId> disabled;
};

// Removes every disabled subtree from its parent. Surviving nodes keep their
// ids. Throws StyleError for unknown ids, a disabled root, or a child list
// (or parallel threshold) that pruning would invalidate.
KBTree apply_style(const KBTree& t, const Style& s);

// Negation-free equivalent of t: negations are pushed to the leaves, swapping
// Sequence and Fallback on the way down.
KBTree push_down_negations(const KBTree& t);

// t with the subtree at `node` replaced by s. Nodes from s get fresh ids.
KBTree substitute_subtree(const KBTree& t, NodeId node, const KBTree& s);

// Counts nodes of the given decorator kind.
std::size_t count_decorators(const KBTree& t, DecoratorKind kind);

} // namespace kbt
