#pragma once

#include <memory>
#include <string>
#include <vector>

#include "kbt/tree.hpp"

namespace kbt {

// Write to a hidden variable, applied after every tick.
struct BlackboardRule
{
    enum class Trigger
    {
        selected,      // `action` was the selected leaf
        returned,      // an `action` leaf returned `value` during the tick
        root_returned, // the root returned `value`
        condition,     // `when` holds on the tick's input
    };

    std::string variable;
    int assign = 0;
    Trigger trigger = Trigger::condition;
    ActionId action;
    ReturnValue value;
    ConditionExpr when;

    bool fires(const KBTree& t, const TickOutcome& out, const InputState& x) const;
};

// A tree that reads and writes an internal blackboard of hidden variables.
// Hidden values are merged into every input before the tick; rules run in
// order afterwards, so a later rule overrides an earlier one.
class BlackboardTree : public Asm
{
public:
    BlackboardTree(KBTreePtr tree, std::vector<VariableDecl> variables, std::vector<BlackboardRule> rules);

    const KBTreePtr& tree() const noexcept { return tree_; }
    const std::vector<VariableDecl>& variables() const noexcept { return variables_; }
    const std::vector<BlackboardRule>& rules() const noexcept { return rules_; }

    std::unique_ptr<Session> start() const override;
    std::string_view kind() const override { return "blackboard"; }

private:
    KBTreePtr tree_;
    std::vector<VariableDecl> variables_;
    std::vector<BlackboardRule> rules_;
};

std::string to_string(const BlackboardRule& r);

} // namespace kbt
