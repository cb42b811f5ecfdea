#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "kbt/asm.hpp"
#include "kbt/condition.hpp"
#include "kbt/return_rule.hpp"
#include "kbt/value.hpp"

namespace kbt {

// Stable identifier of a node inside one KBTree. Zero means "not yet
// assigned"; KBTree assigns fresh ids in pre-order.
struct NodeId
{
    std::uint32_t value = 0;

    bool assigned() const { return value != 0; }
    friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct ActionLeaf
{
    ActionRef ref;
    ReturnRule returns;
};

// Returns Success when the proposition holds and Failure otherwise.
struct ConditionLeaf
{
    ActionId name;
    ConditionExpr proposition;
};

// The *_i operator: ticks children left to right while they return `handled`.
// Sequence handles Success, Fallback handles Failure.
struct ControlNode
{
    ValueName handled;
    std::vector<NodePtr> children;
    // Remembers children that returned `handled` until the node itself
    // returns a value of the tree's value set.
    bool memory = false;
};

enum class DecoratorKind
{
    negation,
    run_until_success,
    run_n_times,
    custom,
};

struct DecoratorNode
{
    DecoratorKind kind = DecoratorKind::negation;
    unsigned times = 0;                          // run_n_times
    std::map<ReturnValue, ReturnValue> policy;   // custom
    NodePtr child;
};

struct ParallelNode
{
    unsigned threshold = 1; // M: successes needed
    std::vector<NodePtr> children;
};

struct UtilityNode
{
    std::vector<NodePtr> children;
    std::vector<ScoreRule> scores; // one per child
};

struct Node
{
    NodeId id;
    std::variant<ActionLeaf, ConditionLeaf, ControlNode, DecoratorNode, ParallelNode, UtilityNode> body;

    bool is_leaf() const;
    // Children in tick order (empty for leaves).
    std::vector<NodePtr> children() const;
};

// Builders. They validate local structure only; value-set checks happen
// when the node becomes part of a KBTree.
NodePtr action(ActionId id, ReturnRule returns = {});
NodePtr action(const std::string& id, ReturnRule returns = {});
NodePtr action(ActionRef ref, ReturnRule returns);
NodePtr condition(const std::string& name, ConditionExpr proposition);
NodePtr control(ValueName handled, std::vector<NodePtr> children, bool memory = false);
NodePtr sequence(std::vector<NodePtr> children);
NodePtr fallback(std::vector<NodePtr> children);
NodePtr memory_sequence(std::vector<NodePtr> children);
NodePtr memory_fallback(std::vector<NodePtr> children);
NodePtr negation(NodePtr child);
NodePtr run_until_success(NodePtr child);
NodePtr run_n_times(unsigned n, NodePtr child);
NodePtr custom_decorator(std::map<ReturnValue, ReturnValue> policy, NodePtr child);
NodePtr parallel(unsigned threshold, std::vector<NodePtr> children);
NodePtr utility(std::vector<NodePtr> children, std::vector<ScoreRule> scores);
// Action leaf whose selection, when chosen, is the embedded ASM's selection.
NodePtr embed_asm_as_action(AsmPtr m, ReturnRule returns, ActionId id, std::string name = {}, std::string kind = {});

// Copy of n with `children` in place of its children (same id).
NodePtr with_children(const Node& n, std::vector<NodePtr> children);
// Deep copy with every id cleared.
NodePtr strip_ids(const NodePtr& n);
// Merges a non-memory *_i child directly into a non-memory *_i parent.
NodePtr flatten(const NodePtr& n);

// Every value the subtree rooted at n can return (a superset is fine).
std::set<ReturnValue> possible_values(const Node& n);

// A k-BT: an ordered tree of *_i control nodes over action and condition
// leaves, plus the extension nodes. Immutable; copies share structure.
class KBTree : public Asm
{
public:
    KBTree(ValueSet values, NodePtr root);

    const ValueSet& values() const noexcept { return values_; }
    const NodePtr& root() const noexcept { return root_; }

    const Node* find(NodeId id) const;
    std::vector<const Node*> preorder() const;
    std::size_t size() const { return index_.size(); }
    NodeId max_id() const;
    // Contains memory nodes or stateful decorators.
    bool has_node_state() const;

    std::unique_ptr<Session> start() const override;
    std::string_view kind() const override { return "tree"; }

private:
    ValueSet values_;
    NodePtr root_;
    std::map<NodeId, const Node*> index_;
};

using KBTreePtr = std::shared_ptr<const KBTree>;

struct NodeResult
{
    ReturnValue value;
    // The leaf that was reached, or a latched decorator.
    const Node* selected = nullptr;
};

// Per-run mutable state of memory nodes and decorators, keyed by node id.
class TickContext
{
public:
    std::map<std::size_t, NodeResult> remembered(NodeId memory_node) const;
    void remember(NodeId memory_node, std::size_t child, NodeResult r);
    unsigned ticks_delivered(NodeId decorator) const;
    bool latched(NodeId decorator) const { return latched_.count(decorator) != 0; }
    bool empty() const { return memory_.empty() && ticks_.empty() && latched_.empty(); }

private:
    friend class Ticker;
    std::map<NodeId, std::map<std::size_t, NodeResult>> memory_;
    std::map<NodeId, unsigned> ticks_;
    std::set<NodeId> latched_;
};

struct Visit
{
    NodeId node;
    ReturnValue value;
};

struct UtilityScores
{
    NodeId node;
    std::vector<long> scores;          // in original child order
    std::vector<std::size_t> order;    // children indices as tried
};

struct TickOutcome
{
    // value is what the root returned; handled is relative to the tree's ValueSet
    Selection selection;
    NodeId selected;
    // Nodes in the order they were ticked, with what each returned.
    std::vector<Visit> visited;
    std::vector<UtilityScores> utility;
};

// Stateless tick (a fresh context is used for any stateful node).
TickOutcome tick(const KBTree& t, const InputState& x);
TickOutcome tick(const KBTree& t, const InputState& x, TickContext& ctx);
// Ticks the subtree rooted at `node` as if it were the root.
TickOutcome tick_subtree(const KBTree& t, NodeId node, const InputState& x, TickContext& ctx);

std::string to_string(DecoratorKind k);

} // namespace kbt
