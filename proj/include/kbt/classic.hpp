#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "kbt/asm.hpp"
#include "kbt/condition.hpp"
#include "kbt/tree.hpp"

namespace kbt {

// ---- Finite state machine (Moore) -------------------------------------------

struct FsmTransition
{
    std::string from;
    ConditionExpr guard;
    std::string to;
};

class Fsm : public Asm
{
public:
    // labels must cover every state; transitions must reference known states.
    Fsm(std::vector<std::string> states, std::string initial, std::vector<FsmTransition> transitions,
        std::map<std::string, ActionRef> labels);

    const std::vector<std::string>& states() const noexcept { return states_; }
    const std::string& initial() const noexcept { return initial_; }
    const std::vector<FsmTransition>& transitions() const noexcept { return transitions_; }
    const ActionRef& label(const std::string& state) const;
    bool has_state(const std::string& s) const;

    std::unique_ptr<Session> start() const override;
    std::string_view kind() const override { return "fsm"; }

private:
    std::vector<std::string> states_;
    std::string initial_;
    std::vector<FsmTransition> transitions_;
    std::map<std::string, ActionRef> labels_;
};

using FsmPtr = std::shared_ptr<const Fsm>;

// Settles under x: applies triggered transitions until none fires. Self
// loops never fire. Throws CycleError when a state is revisited and Error
// when two guards of one state hold at once.
std::pair<std::string, Selection> fsm_step(const Fsm& f, const std::string& q, const InputState& x);

// Rejects states with two guards that can hold together, by enumerating the
// declared domains of the guard variables. Domains missing a variable, or
// products larger than `cap`, skip the state.
void validate_disjoint(const Fsm& f, const std::vector<VariableDecl>& domains, std::size_t cap = 1'000'000);

// ---- Decision tree -----------------------------------------------------------

struct DtNode;
using DtPtr = std::shared_ptr<const DtNode>;

struct DtNode
{
    // Internal node when if_true is set.
    ConditionExpr test;
    DtPtr if_true;
    DtPtr if_false;
    ActionRef leaf;
    LeafKind leaf_kind = LeafKind::action;

    bool is_leaf() const { return !if_true; }
};

DtPtr dt_leaf(ActionRef a, LeafKind kind = LeafKind::action);
DtPtr dt_leaf(const std::string& action);
DtPtr dt_branch(ConditionExpr test, DtPtr if_true, DtPtr if_false);

class DecisionTree : public Asm
{
public:
    explicit DecisionTree(DtPtr root);

    const DtPtr& root() const noexcept { return root_; }
    std::size_t size() const;

    std::unique_ptr<Session> start() const override;
    std::string_view kind() const override { return "dt"; }

private:
    DtPtr root_;
};

// Descends from the root; the leaf's action with an unhandled value.
Selection dt_select(const DecisionTree& d, const InputState& x);
const DtNode& dt_leaf_for(const DecisionTree& d, const InputState& x);

// ---- Teleo-reactive program --------------------------------------------------

struct TrRule
{
    ConditionExpr when;
    ActionRef action;
};

class TeleoReactive : public Asm
{
public:
    explicit TeleoReactive(std::vector<TrRule> rules);

    const std::vector<TrRule>& rules() const noexcept { return rules_; }
    // Last condition is the literal true.
    bool has_catch_all() const;

    std::unique_ptr<Session> start() const override;
    std::string_view kind() const override { return "tr"; }

private:
    std::vector<TrRule> rules_;
};

// First rule whose condition holds; NoRuleError when none does.
Selection tr_select(const TeleoReactive& t, const InputState& x);
std::size_t tr_rule_index(const TeleoReactive& t, const InputState& x);

// ---- Conversions -------------------------------------------------------------

inline const ValueName& precond_false_value()
{
    static const ValueName v{"PrecondFalse"};
    return v;
}

// The 1-valued tree *PrecondFalse[a_1', ..., a_n'] where a_i' returns
// PrecondFalse when k_i fails.
KBTree tr_to_kbt(const TeleoReactive& t);

// Decision tree with the same selected action on every input. Accepts trees
// without memory nodes, decorators, parallel or utility nodes.
DecisionTree bt_to_dt(const KBTree& t);

} // namespace kbt
