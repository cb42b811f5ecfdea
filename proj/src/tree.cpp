#include "kbt/tree.hpp"

#include <algorithm>
#include <numeric>

#include "kbt/error.hpp"

namespace kbt {

namespace {

template <class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

void require_children(const std::vector<NodePtr>& children, const char* what)
{
    if (children.empty())
        throw ConstructionError(std::string(what) + " node needs at least one child");
    for (const auto& c : children)
        if (!c)
            throw ConstructionError(std::string(what) + " node has a null child");
}

} // namespace

bool Node::is_leaf() const
{
    return std::holds_alternative<ActionLeaf>(body) || std::holds_alternative<ConditionLeaf>(body);
}

std::vector<NodePtr> Node::children() const
{
    return std::visit(overloaded{
                          [](const ActionLeaf&) { return std::vector<NodePtr>{}; },
                          [](const ConditionLeaf&) { return std::vector<NodePtr>{}; },
                          [](const ControlNode& c) { return c.children; },
                          [](const DecoratorNode& d) { return std::vector<NodePtr>{d.child}; },
                          [](const ParallelNode& p) { return p.children; },
                          [](const UtilityNode& u) { return u.children; },
                      },
                      body);
}

NodePtr action(ActionId id, ReturnRule returns)
{
    return make(Node{{}, ActionLeaf{ActionRef(std::move(id)), std::move(returns)}});
}

NodePtr action(const std::string& id, ReturnRule returns)
{
    return action(ActionId(id), std::move(returns));
}

NodePtr action(ActionRef ref, ReturnRule returns)
{
    return make(Node{{}, ActionLeaf{std::move(ref), std::move(returns)}});
}

NodePtr condition(const std::string& name, ConditionExpr proposition)
{
    return make(Node{{}, ConditionLeaf{ActionId(name), std::move(proposition)}});
}

NodePtr control(ValueName handled, std::vector<NodePtr> children, bool memory)
{
    require_children(children, "control");
    return make(Node{{}, ControlNode{std::move(handled), std::move(children), memory}});
}

NodePtr sequence(std::vector<NodePtr> children) { return control(success_value(), std::move(children)); }
NodePtr fallback(std::vector<NodePtr> children) { return control(failure_value(), std::move(children)); }
NodePtr memory_sequence(std::vector<NodePtr> children) { return control(success_value(), std::move(children), true); }
NodePtr memory_fallback(std::vector<NodePtr> children) { return control(failure_value(), std::move(children), true); }

namespace {

NodePtr decorator(DecoratorNode d)
{
    if (!d.child)
        throw ConstructionError("decorator needs a child");
    return make(Node{{}, std::move(d)});
}

} // namespace

NodePtr negation(NodePtr child)
{
    return decorator(DecoratorNode{DecoratorKind::negation, 0, {}, std::move(child)});
}

NodePtr run_until_success(NodePtr child)
{
    return decorator(DecoratorNode{DecoratorKind::run_until_success, 0, {}, std::move(child)});
}

NodePtr run_n_times(unsigned n, NodePtr child)
{
    if (n == 0)
        throw ConstructionError("run-n-times needs a positive count");
    return decorator(DecoratorNode{DecoratorKind::run_n_times, n, {}, std::move(child)});
}

NodePtr custom_decorator(std::map<ReturnValue, ReturnValue> policy, NodePtr child)
{
    return decorator(DecoratorNode{DecoratorKind::custom, 0, std::move(policy), std::move(child)});
}

NodePtr parallel(unsigned threshold, std::vector<NodePtr> children)
{
    require_children(children, "parallel");
    if (threshold < 1 || threshold > children.size())
        throw ConstructionError("parallel threshold must satisfy 1 <= M <= N (M=" + std::to_string(threshold) +
                                ", N=" + std::to_string(children.size()) + ")");
    return make(Node{{}, ParallelNode{threshold, std::move(children)}});
}

NodePtr utility(std::vector<NodePtr> children, std::vector<ScoreRule> scores)
{
    require_children(children, "utility");
    if (scores.size() != children.size())
        throw ConstructionError("utility node needs exactly one score rule per child");
    return make(Node{{}, UtilityNode{std::move(children), std::move(scores)}});
}

NodePtr embed_asm_as_action(AsmPtr m, ReturnRule returns, ActionId id, std::string name, std::string kind)
{
    if (!m)
        throw ConstructionError("cannot embed a null ASM");
    if (kind.empty())
        kind = std::string(m->kind());
    if (name.empty())
        name = id.str();
    return make(Node{{}, ActionLeaf{ActionRef(std::move(id), std::move(m), std::move(name), std::move(kind)),
                                    std::move(returns)}});
}

NodePtr with_children(const Node& n, std::vector<NodePtr> children)
{
    Node copy = n;
    std::visit(overloaded{
                   [](ActionLeaf&) {},
                   [](ConditionLeaf&) {},
                   [&](ControlNode& c) { c.children = std::move(children); },
                   [&](DecoratorNode& d) { d.child = children.at(0); },
                   [&](ParallelNode& p) { p.children = std::move(children); },
                   [&](UtilityNode& u) { u.children = std::move(children); },
               },
               copy.body);
    return make(std::move(copy));
}

NodePtr strip_ids(const NodePtr& n)
{
    std::vector<NodePtr> kids;
    for (const auto& c : n->children())
        kids.push_back(strip_ids(c));
    Node copy = *with_children(*n, std::move(kids));
    copy.id = NodeId{};
    return make(std::move(copy));
}

NodePtr flatten(const NodePtr& n)
{
    std::vector<NodePtr> kids;
    const auto* self = std::get_if<ControlNode>(&n->body);
    for (const auto& c : n->children()) {
        NodePtr fc = flatten(c);
        const auto* child = std::get_if<ControlNode>(&fc->body);
        if (self && !self->memory && child && !child->memory && child->handled == self->handled)
            kids.insert(kids.end(), child->children.begin(), child->children.end());
        else
            kids.push_back(std::move(fc));
    }
    if (n->is_leaf())
        return n;
    return with_children(*n, std::move(kids));
}

std::set<ReturnValue> possible_values(const Node& n)
{
    auto swap_sf = [](const ReturnValue& v) -> ReturnValue {
        if (v == success_value())
            return failure_value();
        if (v == failure_value())
            return success_value();
        return v;
    };
    return std::visit(
        overloaded{
            [](const ActionLeaf& a) { return a.returns.possible_values(); },
            [](const ConditionLeaf&) { return std::set<ReturnValue>{success_value(), failure_value()}; },
            [](const ControlNode& c) {
                std::set<ReturnValue> out;
                for (std::size_t i = 0; i < c.children.size(); ++i) {
                    auto vs = possible_values(*c.children[i]);
                    if (i + 1 < c.children.size())
                        vs.erase(c.handled);
                    out.merge(vs);
                }
                return out;
            },
            [&](const DecoratorNode& d) {
                auto vs = possible_values(*d.child);
                std::set<ReturnValue> out;
                switch (d.kind) {
                case DecoratorKind::negation:
                    for (const auto& v : vs)
                        out.insert(swap_sf(v));
                    break;
                case DecoratorKind::run_until_success:
                case DecoratorKind::run_n_times:
                    out = vs;
                    out.insert(success_value());
                    break;
                case DecoratorKind::custom:
                    for (const auto& v : vs) {
                        auto it = d.policy.find(v);
                        if (it != d.policy.end())
                            out.insert(it->second);
                    }
                    break;
                }
                return out;
            },
            [](const ParallelNode&) {
                return std::set<ReturnValue>{success_value(), failure_value(), std::nullopt};
            },
            [](const UtilityNode& u) {
                std::set<ReturnValue> out;
                for (const auto& c : u.children)
                    out.merge(possible_values(*c));
                return out;
            },
        },
        n.body);
}

namespace {

class TreeBuilder
{
public:
    explicit TreeBuilder(const ValueSet& values) : values_(values) {}

    NodePtr build(const NodePtr& root)
    {
        collect(*root);
        return rebuild(*root);
    }

private:
    void collect(const Node& n)
    {
        if (n.id.assigned())
            next_ = std::max(next_, n.id.value + 1);
        for (const auto& c : n.children())
            collect(*c);
    }

    NodePtr rebuild(const Node& n)
    {
        validate(n);
        Node copy = n;
        if (!copy.id.assigned() || !used_.insert(copy.id).second) {
            copy.id = NodeId{next_++};
            used_.insert(copy.id);
        }
        std::vector<NodePtr> kids;
        for (const auto& c : n.children())
            kids.push_back(rebuild(*c));
        Node out = *with_children(copy, std::move(kids));
        return make(std::move(out));
    }

    void need_success_failure(const char* what) const
    {
        if (!values_.has_success_failure())
            throw ConstructionError(std::string(what) + " requires Success and Failure in the tree's value set");
    }

    void validate(const Node& n) const
    {
        std::visit(overloaded{
                       [](const ActionLeaf&) {},
                       [&](const ConditionLeaf&) { need_success_failure("a condition leaf"); },
                       [&](const ControlNode& c) {
                           if (!values_.contains(c.handled))
                               throw ConstructionError("control node handles '" + c.handled.str() +
                                                       "', which is not in the tree's value set");
                       },
                       [&](const DecoratorNode& d) {
                           switch (d.kind) {
                           case DecoratorKind::negation:
                               need_success_failure("a negation decorator");
                               break;
                           case DecoratorKind::run_until_success:
                           case DecoratorKind::run_n_times:
                               if (!values_.contains(success_value()))
                                   throw ConstructionError("this decorator requires Success in the value set");
                               break;
                           case DecoratorKind::custom:
                               for (const auto& v : possible_values(*d.child))
                                   if (!d.policy.count(v))
                                       throw ConstructionError("custom decorator policy has no entry for child value '" +
                                                               to_string(v) + "'");
                               break;
                           }
                       },
                       [&](const ParallelNode&) { need_success_failure("a parallel node"); },
                       [](const UtilityNode&) {},
                   },
                   n.body);
    }

    const ValueSet& values_;
    std::uint32_t next_ = 1;
    std::set<NodeId> used_;
};

void index_tree(const Node& n, std::map<NodeId, const Node*>& index)
{
    index.emplace(n.id, &n);
    for (const auto& c : n.children())
        index_tree(*c, index);
}

void preorder_walk(const Node& n, std::vector<const Node*>& out)
{
    out.push_back(&n);
    for (const auto& c : n.children())
        preorder_walk(*c, out);
}

} // namespace

KBTree::KBTree(ValueSet values, NodePtr root) : values_(std::move(values))
{
    if (!root)
        throw ConstructionError("tree needs a root");
    if (values_.k() == 0)
        throw ConstructionError("tree needs a non-empty value set");
    root_ = TreeBuilder(values_).build(root);
    index_tree(*root_, index_);
}

const Node* KBTree::find(NodeId id) const
{
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : it->second;
}

std::vector<const Node*> KBTree::preorder() const
{
    std::vector<const Node*> out;
    preorder_walk(*root_, out);
    return out;
}

NodeId KBTree::max_id() const
{
    return index_.rbegin()->first;
}

bool KBTree::has_node_state() const
{
    for (const auto& [id, n] : index_) {
        if (const auto* c = std::get_if<ControlNode>(&n->body); c && c->memory)
            return true;
        if (const auto* d = std::get_if<DecoratorNode>(&n->body);
            d && (d->kind == DecoratorKind::run_until_success || d->kind == DecoratorKind::run_n_times))
            return true;
    }
    return false;
}

std::map<std::size_t, NodeResult> TickContext::remembered(NodeId memory_node) const
{
    auto it = memory_.find(memory_node);
    return it == memory_.end() ? std::map<std::size_t, NodeResult>{} : it->second;
}

void TickContext::remember(NodeId memory_node, std::size_t child, NodeResult r)
{
    memory_[memory_node][child] = r;
}

unsigned TickContext::ticks_delivered(NodeId decorator) const
{
    auto it = ticks_.find(decorator);
    return it == ticks_.end() ? 0u : it->second;
}

class Ticker
{
public:
    Ticker(const KBTree& tree, const InputState& x, TickContext& ctx) : tree_(tree), x_(x), ctx_(ctx) {}

    TickOutcome run(const Node& root)
    {
        NodeResult r = tick(root);
        TickOutcome out;
        out.selected = r.selected->id;
        out.selection = selection_of(r);
        out.visited = std::move(visits_);
        out.utility = std::move(utility_);
        return out;
    }

private:
    Selection selection_of(const NodeResult& r) const
    {
        Selection s;
        s.value = r.value;
        s.handled = tree_.values().contains(r.value);
        std::visit(overloaded{
                       [&](const ActionLeaf& a) {
                           s.action = a.ref.id;
                           s.kind = LeafKind::action;
                       },
                       [&](const ConditionLeaf& c) {
                           s.action = c.name;
                           s.kind = LeafKind::condition;
                       },
                       [&](const auto&) {
                           s.action = noop_action();
                           s.kind = LeafKind::latched;
                       },
                   },
                   r.selected->body);
        return s;
    }

    NodeResult tick(const Node& n)
    {
        const std::size_t slot = visits_.size();
        visits_.push_back(Visit{n.id, std::nullopt});
        NodeResult r = std::visit([&](const auto& body) { return tick_body(n, body); }, n.body);
        visits_[slot].value = r.value;
        return r;
    }

    NodeResult tick_body(const Node& n, const ActionLeaf& a) { return {a.returns.evaluate(x_), &n}; }

    NodeResult tick_body(const Node& n, const ConditionLeaf& c)
    {
        return {c.proposition.evaluate(x_) ? success_value() : failure_value(), &n};
    }

    NodeResult tick_body(const Node& n, const ControlNode& c)
    {
        const ReturnValue handled = c.handled;
        const std::size_t last = c.children.size() - 1;
        if (!c.memory) {
            for (std::size_t i = 0;; ++i) {
                NodeResult r = tick(*c.children[i]);
                if (r.value != handled || i == last)
                    return r;
            }
        }

        auto& memory = ctx_.memory_[n.id];
        NodeResult r;
        for (std::size_t i = 0; i <= last; ++i) {
            if (auto it = memory.find(i); it != memory.end()) {
                r = it->second;
                continue;
            }
            r = tick(*c.children[i]);
            if (r.value != handled)
                break;
            memory[i] = r;
        }
        if (tree_.values().contains(r.value))
            ctx_.memory_.erase(n.id);
        return r;
    }

    NodeResult tick_body(const Node& n, const DecoratorNode& d)
    {
        switch (d.kind) {
        case DecoratorKind::negation: {
            NodeResult r = tick(*d.child);
            if (r.value == success_value())
                r.value = failure_value();
            else if (r.value == failure_value())
                r.value = success_value();
            return r;
        }
        case DecoratorKind::run_until_success: {
            if (ctx_.latched_.count(n.id))
                return {success_value(), &n};
            NodeResult r = tick(*d.child);
            if (r.value == success_value())
                ctx_.latched_.insert(n.id);
            return r;
        }
        case DecoratorKind::run_n_times: {
            unsigned& count = ctx_.ticks_[n.id];
            if (count >= d.times)
                return {success_value(), &n};
            ++count;
            return tick(*d.child);
        }
        case DecoratorKind::custom: {
            NodeResult r = tick(*d.child);
            auto it = d.policy.find(r.value);
            if (it == d.policy.end())
                throw Error("custom decorator has no policy entry for '" + to_string(r.value) + "'");
            r.value = it->second;
            return r;
        }
        }
        throw Error("unknown decorator kind");
    }

    NodeResult tick_body(const Node&, const ParallelNode& p)
    {
        std::vector<NodeResult> rs;
        rs.reserve(p.children.size());
        for (const auto& c : p.children)
            rs.push_back(tick(*c));
        const auto n = static_cast<unsigned>(rs.size());
        const auto successes = static_cast<unsigned>(
            std::count_if(rs.begin(), rs.end(), [](const NodeResult& r) { return r.value == success_value(); }));
        const auto failures = static_cast<unsigned>(
            std::count_if(rs.begin(), rs.end(), [](const NodeResult& r) { return r.value == failure_value(); }));
        auto leftmost = [&](auto pred) {
            return *std::find_if(rs.begin(), rs.end(), pred);
        };
        if (successes >= p.threshold) {
            NodeResult r = leftmost([](const NodeResult& r) { return r.value == success_value(); });
            return {success_value(), r.selected};
        }
        if (failures >= n - p.threshold + 1) {
            NodeResult r = leftmost([](const NodeResult& r) { return r.value == failure_value(); });
            return {failure_value(), r.selected};
        }
        NodeResult r = leftmost([](const NodeResult& r) {
            return r.value != success_value() && r.value != failure_value();
        });
        return {std::nullopt, r.selected};
    }

    NodeResult tick_body(const Node& n, const UtilityNode& u)
    {
        UtilityScores scores{n.id, {}, {}};
        for (const auto& rule : u.scores)
            scores.scores.push_back(rule.evaluate(x_));
        scores.order.resize(u.children.size());
        std::iota(scores.order.begin(), scores.order.end(), std::size_t{0});
        std::stable_sort(scores.order.begin(), scores.order.end(),
                         [&](std::size_t a, std::size_t b) { return scores.scores[a] > scores.scores[b]; });
        const auto order = scores.order;
        utility_.push_back(std::move(scores));
        NodeResult r;
        for (std::size_t k = 0; k < order.size(); ++k) {
            r = tick(*u.children[order[k]]);
            if (r.value != failure_value())
                break;
        }
        return r;
    }

    const KBTree& tree_;
    const InputState& x_;
    TickContext& ctx_;
    std::vector<Visit> visits_;
    std::vector<UtilityScores> utility_;
};

TickOutcome tick(const KBTree& t, const InputState& x)
{
    TickContext scratch;
    return tick(t, x, scratch);
}

TickOutcome tick(const KBTree& t, const InputState& x, TickContext& ctx)
{
    return Ticker(t, x, ctx).run(*t.root());
}

TickOutcome tick_subtree(const KBTree& t, NodeId node, const InputState& x, TickContext& ctx)
{
    const Node* n = t.find(node);
    if (!n)
        throw Error("no node with id " + std::to_string(node.value));
    return Ticker(t, x, ctx).run(*n);
}

namespace {

class TreeSession final : public Session
{
public:
    explicit TreeSession(const KBTree& tree) : tree_(&tree) {}

    Selection step(const InputState& x) override
    {
        TickOutcome out = tick(*tree_, x, ctx_);
        Selection s = out.selection;
        if (const auto* a = std::get_if<ActionLeaf>(&tree_->find(out.selected)->body)) {
            if (auto inner = delegates_.step(out.selected.value, a->ref, x)) {
                s.action = inner->action;
                s.kind = inner->kind;
            }
        }
        delegates_.end_step();
        return s;
    }

    std::unique_ptr<Session> clone() const override { return std::make_unique<TreeSession>(*this); }

private:
    const KBTree* tree_;
    TickContext ctx_;
    DelegateSlots delegates_;
};

} // namespace

std::unique_ptr<Session> KBTree::start() const
{
    return std::make_unique<TreeSession>(*this);
}

std::string to_string(DecoratorKind k)
{
    switch (k) {
    case DecoratorKind::negation: return "negation";
    case DecoratorKind::run_until_success: return "until_success";
    case DecoratorKind::run_n_times: return "times";
    case DecoratorKind::custom: return "map";
    }
    return "?";
}

} // namespace kbt
