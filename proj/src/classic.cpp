#include "kbt/classic.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "kbt/error.hpp"

namespace kbt {

namespace {

Selection unhandled(const ActionRef& a, LeafKind kind = LeafKind::action)
{
    return Selection{a.id, std::nullopt, false, kind};
}

std::optional<Selection> delegate_or(DelegateSlots& slots, std::size_t slot, const ActionRef& ref,
                                     const InputState& x)
{
    return slots.step(slot, ref, x);
}

} // namespace

// ---- FSM ---------------------------------------------------------------------

Fsm::Fsm(std::vector<std::string> states, std::string initial, std::vector<FsmTransition> transitions,
         std::map<std::string, ActionRef> labels)
    : states_(std::move(states)), initial_(std::move(initial)), transitions_(std::move(transitions)),
      labels_(std::move(labels))
{
    if (states_.empty())
        throw ConstructionError("FSM needs at least one state");
    std::set<std::string> seen;
    for (const auto& s : states_)
        if (!seen.insert(s).second)
            throw ConstructionError("duplicate FSM state '" + s + "'");
    if (!has_state(initial_))
        throw ConstructionError("initial state '" + initial_ + "' is not a state");
    for (const auto& t : transitions_) {
        if (!has_state(t.from))
            throw ConstructionError("transition from unknown state '" + t.from + "'");
        if (!has_state(t.to))
            throw ConstructionError("transition to unknown state '" + t.to + "'");
    }
    for (const auto& s : states_)
        if (!labels_.count(s))
            throw ConstructionError("state '" + s + "' has no label");
    for (const auto& [s, l] : labels_)
        if (!has_state(s))
            throw ConstructionError("label for unknown state '" + s + "'");
}

bool Fsm::has_state(const std::string& s) const
{
    return std::find(states_.begin(), states_.end(), s) != states_.end();
}

const ActionRef& Fsm::label(const std::string& state) const
{
    auto it = labels_.find(state);
    if (it == labels_.end())
        throw Error("unknown FSM state '" + state + "'");
    return it->second;
}

namespace {

const FsmTransition* triggered(const Fsm& f, const std::string& q, const InputState& x)
{
    const FsmTransition* hit = nullptr;
    for (const auto& t : f.transitions()) {
        if (t.from != q || t.to == q || !t.guard.evaluate(x))
            continue;
        if (hit && hit->to != t.to)
            throw Error("overlapping guards in state '" + q + "' at " + to_string(x) + ": '" + to_string(hit->guard) +
                        "' and '" + to_string(t.guard) + "'");
        hit = &t;
    }
    return hit;
}

} // namespace

std::pair<std::string, Selection> fsm_step(const Fsm& f, const std::string& q, const InputState& x)
{
    if (!f.has_state(q))
        throw Error("unknown FSM state '" + q + "'");
    std::vector<std::string> path{q};
    std::string cur = q;
    while (const FsmTransition* t = triggered(f, cur, x)) {
        cur = t->to;
        auto again = std::find(path.begin(), path.end(), cur);
        if (again != path.end()) {
            std::vector<std::string> loop(again, path.end());
            loop.push_back(cur);
            std::string text;
            for (const auto& s : loop)
                text += (text.empty() ? "" : " -> ") + s;
            throw CycleError(loop, "FSM transition cycle under " + to_string(x) + ": " + text);
        }
        path.push_back(cur);
    }
    return {cur, unhandled(f.label(cur))};
}

void validate_disjoint(const Fsm& f, const std::vector<VariableDecl>& domains, std::size_t cap)
{
    std::map<std::string, const VariableDecl*> by_name;
    for (const auto& d : domains)
        by_name[d.name] = &d;
    for (const auto& q : f.states()) {
        std::vector<const FsmTransition*> out;
        std::set<std::string> vars;
        for (const auto& t : f.transitions()) {
            if (t.from != q || t.to == q)
                continue;
            out.push_back(&t);
            vars.merge(t.guard.variables());
        }
        if (out.size() < 2)
            continue;
        std::vector<const VariableDecl*> axes;
        std::size_t total = 1;
        bool enumerable = true;
        for (const auto& v : vars) {
            auto it = by_name.find(v);
            if (it == by_name.end()) {
                enumerable = false;
                break;
            }
            axes.push_back(it->second);
            total *= static_cast<std::size_t>(it->second->hi - it->second->lo + 1);
            if (total > cap) {
                enumerable = false;
                break;
            }
        }
        if (!enumerable)
            continue;
        std::vector<int> cur;
        for (const auto* a : axes)
            cur.push_back(a->lo);
        for (std::size_t n = 0; n < total; ++n) {
            InputState x;
            for (std::size_t i = 0; i < axes.size(); ++i)
                x.set(axes[i]->name, cur[i]);
            const FsmTransition* first = nullptr;
            for (const auto* t : out) {
                if (!t->guard.evaluate(x))
                    continue;
                if (first && first->to != t->to)
                    throw ConstructionError("state '" + q + "' has overlapping guards '" + to_string(first->guard) +
                                            "' and '" + to_string(t->guard) + "' (both hold at " + to_string(x) + ")");
                first = t;
            }
            for (std::size_t i = axes.size(); i-- > 0;) {
                if (++cur[i] <= axes[i]->hi)
                    break;
                cur[i] = axes[i]->lo;
            }
        }
    }
}

namespace {

class FsmSession final : public Session
{
public:
    explicit FsmSession(const Fsm& f) : fsm_(&f), state_(f.initial()) {}

    Selection step(const InputState& x) override
    {
        auto [next, sel] = fsm_step(*fsm_, state_, x);
        state_ = next;
        const auto& states = fsm_->states();
        const auto slot = static_cast<std::size_t>(std::find(states.begin(), states.end(), state_) - states.begin());
        if (auto inner = delegate_or(delegates_, slot, fsm_->label(state_), x))
            sel = *inner;
        delegates_.end_step();
        return sel;
    }

    std::unique_ptr<Session> clone() const override { return std::make_unique<FsmSession>(*this); }

private:
    const Fsm* fsm_;
    std::string state_;
    DelegateSlots delegates_;
};

} // namespace

std::unique_ptr<Session> Fsm::start() const
{
    return std::make_unique<FsmSession>(*this);
}

// ---- Decision tree -----------------------------------------------------------

DtPtr dt_leaf(ActionRef a, LeafKind kind)
{
    auto n = std::make_shared<DtNode>();
    n->leaf = std::move(a);
    n->leaf_kind = kind;
    return n;
}

DtPtr dt_leaf(const std::string& action)
{
    return dt_leaf(ActionRef(ActionId(action)));
}

DtPtr dt_branch(ConditionExpr test, DtPtr if_true, DtPtr if_false)
{
    if (!if_true || !if_false)
        throw ConstructionError("decision node needs two children");
    auto n = std::make_shared<DtNode>();
    n->test = std::move(test);
    n->if_true = std::move(if_true);
    n->if_false = std::move(if_false);
    return n;
}

DecisionTree::DecisionTree(DtPtr root) : root_(std::move(root))
{
    if (!root_)
        throw ConstructionError("decision tree needs a root");
}

std::size_t DecisionTree::size() const
{
    std::function<std::size_t(const DtNode&)> count = [&](const DtNode& n) -> std::size_t {
        return n.is_leaf() ? 1 : 1 + count(*n.if_true) + count(*n.if_false);
    };
    return count(*root_);
}

const DtNode& dt_leaf_for(const DecisionTree& d, const InputState& x)
{
    const DtNode* n = d.root().get();
    while (!n->is_leaf())
        n = n->test.evaluate(x) ? n->if_true.get() : n->if_false.get();
    return *n;
}

Selection dt_select(const DecisionTree& d, const InputState& x)
{
    const DtNode& leaf = dt_leaf_for(d, x);
    return unhandled(leaf.leaf, leaf.leaf_kind);
}

namespace {

class DtSession final : public Session
{
public:
    explicit DtSession(const DecisionTree& d) : dt_(&d) {}

    Selection step(const InputState& x) override
    {
        const DtNode& leaf = dt_leaf_for(*dt_, x);
        Selection sel = unhandled(leaf.leaf, leaf.leaf_kind);
        if (auto inner = delegate_or(delegates_, reinterpret_cast<std::size_t>(&leaf), leaf.leaf, x))
            sel = *inner;
        delegates_.end_step();
        return sel;
    }

    std::unique_ptr<Session> clone() const override { return std::make_unique<DtSession>(*this); }

private:
    const DecisionTree* dt_;
    DelegateSlots delegates_;
};

} // namespace

std::unique_ptr<Session> DecisionTree::start() const
{
    return std::make_unique<DtSession>(*this);
}

// ---- Teleo-reactive ----------------------------------------------------------

TeleoReactive::TeleoReactive(std::vector<TrRule> rules) : rules_(std::move(rules))
{
    if (rules_.empty())
        throw ConstructionError("teleo-reactive program needs at least one rule");
}

bool TeleoReactive::has_catch_all() const
{
    const auto& last = rules_.back().when;
    return last.kind() == ConditionExpr::Kind::literal && last.literal_value();
}

std::size_t tr_rule_index(const TeleoReactive& t, const InputState& x)
{
    const auto& rules = t.rules();
    for (std::size_t i = 0; i < rules.size(); ++i)
        if (rules[i].when.evaluate(x))
            return i;
    throw NoRuleError("no teleo-reactive condition holds at " + to_string(x));
}

Selection tr_select(const TeleoReactive& t, const InputState& x)
{
    return unhandled(t.rules()[tr_rule_index(t, x)].action);
}

namespace {

class TrSession final : public Session
{
public:
    explicit TrSession(const TeleoReactive& t) : tr_(&t) {}

    Selection step(const InputState& x) override
    {
        const std::size_t i = tr_rule_index(*tr_, x);
        Selection sel = unhandled(tr_->rules()[i].action);
        if (auto inner = delegate_or(delegates_, i, tr_->rules()[i].action, x))
            sel = *inner;
        delegates_.end_step();
        return sel;
    }

    std::unique_ptr<Session> clone() const override { return std::make_unique<TrSession>(*this); }

private:
    const TeleoReactive* tr_;
    DelegateSlots delegates_;
};

} // namespace

std::unique_ptr<Session> TeleoReactive::start() const
{
    return std::make_unique<TrSession>(*this);
}

// ---- Conversions -------------------------------------------------------------

KBTree tr_to_kbt(const TeleoReactive& t)
{
    std::vector<NodePtr> children;
    for (const auto& r : t.rules())
        children.push_back(action(r.action, ReturnRule({{!r.when, precond_false_value()}}, std::nullopt)));
    return KBTree(ValueSet({precond_false_value()}), control(precond_false_value(), std::move(children)));
}

namespace {

// Continuation receiving a subtree's return value and selected leaf.
using Cont = std::function<DtPtr(const ReturnValue&, const DtPtr&)>;

DtPtr compile(const Node& n, const Cont& k)
{
    if (const auto* a = std::get_if<ActionLeaf>(&n.body)) {
        const DtPtr leaf = dt_leaf(a->ref);
        DtPtr out = k(a->returns.fallback(), leaf);
        const auto& clauses = a->returns.clauses();
        for (auto it = clauses.rbegin(); it != clauses.rend(); ++it)
            out = dt_branch(it->when, k(it->value, leaf), out);
        return out;
    }
    if (const auto* c = std::get_if<ConditionLeaf>(&n.body)) {
        const DtPtr leaf = dt_leaf(ActionRef(c->name), LeafKind::condition);
        return dt_branch(c->proposition, k(success_value(), leaf), k(failure_value(), leaf));
    }
    if (const auto* c = std::get_if<ControlNode>(&n.body)) {
        if (c->memory)
            throw ConstructionError("cannot convert a memory node to a decision tree");
        std::function<DtPtr(std::size_t)> from = [&](std::size_t j) -> DtPtr {
            return compile(*c->children[j], [&, j](const ReturnValue& v, const DtPtr& leaf) {
                if (v == c->handled && j + 1 < c->children.size())
                    return from(j + 1);
                return k(v, leaf);
            });
        };
        return from(0);
    }
    throw ConstructionError("cannot convert decorator, parallel or utility nodes to a decision tree");
}

} // namespace

DecisionTree bt_to_dt(const KBTree& t)
{
    return DecisionTree(compile(*t.root(), [](const ReturnValue&, const DtPtr& leaf) { return leaf; }));
}

} // namespace kbt
