#include "kbt/blackboard.hpp"

#include <algorithm>

#include "kbt/error.hpp"

namespace kbt {

bool BlackboardRule::fires(const KBTree& t, const TickOutcome& out, const InputState& x) const
{
    switch (trigger) {
    case Trigger::selected:
        return out.selection.action == action;
    case Trigger::returned:
        return std::any_of(out.visited.begin(), out.visited.end(), [&](const Visit& v) {
            const auto* a = std::get_if<ActionLeaf>(&t.find(v.node)->body);
            return a && a->ref.id == action && v.value == value;
        });
    case Trigger::root_returned:
        return out.selection.value == value;
    case Trigger::condition:
        return when.evaluate(x);
    }
    return false;
}

BlackboardTree::BlackboardTree(KBTreePtr tree, std::vector<VariableDecl> variables, std::vector<BlackboardRule> rules)
    : tree_(std::move(tree)), variables_(std::move(variables)), rules_(std::move(rules))
{
    if (!tree_)
        throw ConstructionError("blackboard needs a tree");
    for (const auto& r : rules_) {
        auto it = std::find_if(variables_.begin(), variables_.end(),
                               [&](const VariableDecl& d) { return d.name == r.variable; });
        if (it == variables_.end())
            throw ConstructionError("blackboard rule writes undeclared variable '" + r.variable + "'");
        if (r.assign < it->lo || r.assign > it->hi)
            throw ConstructionError("blackboard rule writes " + std::to_string(r.assign) + " outside the domain of '" +
                                    r.variable + "'");
    }
}

namespace {

class BlackboardSession final : public Session
{
public:
    explicit BlackboardSession(const BlackboardTree& b) : bb_(&b)
    {
        for (const auto& d : b.variables())
            memory_.set(d.name, d.initial, Visibility::hidden);
    }

    Selection step(const InputState& x) override
    {
        const InputState in = x.merged(memory_);
        const KBTree& t = *bb_->tree();
        TickOutcome out = tick(t, in, ctx_);
        Selection sel = out.selection;
        if (const auto* a = std::get_if<ActionLeaf>(&t.find(out.selected)->body)) {
            if (auto inner = delegates_.step(out.selected.value, a->ref, in)) {
                sel.action = inner->action;
                sel.kind = inner->kind;
            }
        }
        delegates_.end_step();
        for (const auto& r : bb_->rules())
            if (r.fires(t, out, in))
                memory_.set(r.variable, r.assign, Visibility::hidden);
        return sel;
    }

    std::unique_ptr<Session> clone() const override { return std::make_unique<BlackboardSession>(*this); }

private:
    const BlackboardTree* bb_;
    InputState memory_;
    TickContext ctx_;
    DelegateSlots delegates_;
};

} // namespace

std::unique_ptr<Session> BlackboardTree::start() const
{
    return std::make_unique<BlackboardSession>(*this);
}

std::string to_string(const BlackboardRule& r)
{
    std::string head = "set " + r.variable + " = " + std::to_string(r.assign) + " when ";
    switch (r.trigger) {
    case BlackboardRule::Trigger::selected:
        return head + "selected " + r.action.str();
    case BlackboardRule::Trigger::returned:
        return head + r.action.str() + " returned " + to_string(r.value);
    case BlackboardRule::Trigger::root_returned:
        return head + "root returned " + to_string(r.value);
    case BlackboardRule::Trigger::condition:
        return head + to_string(r.when);
    }
    return head;
}

} // namespace kbt
