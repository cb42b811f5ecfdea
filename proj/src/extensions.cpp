#include "kbt/extensions.hpp"

#include <algorithm>

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

std::string id_text(NodeId id) { return "#" + std::to_string(id.value); }

NodePtr prune(const NodePtr& n, const Style& s)
{
    if (n->is_leaf())
        return n;
    std::vector<NodePtr> kids;
    std::vector<std::size_t> kept;
    const auto children = n->children();
    for (std::size_t i = 0; i < children.size(); ++i) {
        if (s.disabled.count(children[i]->id))
            continue;
        kids.push_back(prune(children[i], s));
        kept.push_back(i);
    }
    if (kids.empty())
        throw StyleError("style '" + s.name + "' disables every child of node " + id_text(n->id));
    if (const auto* p = std::get_if<ParallelNode>(&n->body); p && p->threshold > kids.size())
        throw StyleError("style '" + s.name + "' leaves parallel node " + id_text(n->id) + " with fewer than " +
                         std::to_string(p->threshold) + " children");
    NodePtr out = with_children(*n, std::move(kids));
    if (const auto* u = std::get_if<UtilityNode>(&out->body)) {
        Node copy = *out;
        auto& body = std::get<UtilityNode>(copy.body);
        std::vector<ScoreRule> scores;
        for (auto i : kept)
            scores.push_back(u->scores[i]);
        body.scores = std::move(scores);
        return std::make_shared<const Node>(std::move(copy));
    }
    return out;
}

ReturnValue swap_sf(const ReturnValue& v)
{
    if (v == success_value())
        return failure_value();
    if (v == failure_value())
        return success_value();
    return v;
}

NodePtr push(const NodePtr& n, bool negated)
{
    auto unsupported = [&](const std::string& what) -> NodePtr {
        throw ConstructionError("cannot push a negation through " + what + " node " + id_text(n->id));
    };
    auto recurse = [&](bool neg) {
        std::vector<NodePtr> kids;
        for (const auto& c : n->children())
            kids.push_back(push(c, neg));
        return kids;
    };
    return std::visit(
        overloaded{
            [&](const ActionLeaf& a) -> NodePtr {
                if (!negated)
                    return n;
                Node copy = *n;
                std::get<ActionLeaf>(copy.body).returns = a.returns.with_success_failure_swapped();
                return std::make_shared<const Node>(std::move(copy));
            },
            [&](const ConditionLeaf& c) -> NodePtr {
                if (!negated)
                    return n;
                Node copy = *n;
                std::get<ConditionLeaf>(copy.body).proposition = !c.proposition;
                return std::make_shared<const Node>(std::move(copy));
            },
            [&](const ControlNode& c) -> NodePtr {
                if (!negated)
                    return with_children(*n, recurse(false));
                if (c.handled != success_value() && c.handled != failure_value())
                    return unsupported("*" + c.handled.str());
                Node copy = *with_children(*n, recurse(true));
                std::get<ControlNode>(copy.body).handled = *swap_sf(c.handled);
                return std::make_shared<const Node>(std::move(copy));
            },
            [&](const DecoratorNode& d) -> NodePtr {
                if (d.kind == DecoratorKind::negation)
                    return push(d.child, !negated);
                if (negated)
                    return unsupported(to_string(d.kind));
                return with_children(*n, recurse(false));
            },
            [&](const ParallelNode& p) -> NodePtr {
                if (!negated)
                    return with_children(*n, recurse(false));
                Node copy = *with_children(*n, recurse(true));
                std::get<ParallelNode>(copy.body).threshold =
                    static_cast<unsigned>(p.children.size()) - p.threshold + 1;
                return std::make_shared<const Node>(std::move(copy));
            },
            [&](const UtilityNode&) -> NodePtr {
                if (negated)
                    return unsupported("utility");
                return with_children(*n, recurse(false));
            },
        },
        n->body);
}

NodePtr replace(const NodePtr& n, NodeId target, const NodePtr& with)
{
    if (n->id == target)
        return with;
    if (n->is_leaf())
        return n;
    std::vector<NodePtr> kids;
    for (const auto& c : n->children())
        kids.push_back(replace(c, target, with));
    return with_children(*n, std::move(kids));
}

} // namespace

KBTree apply_style(const KBTree& t, const Style& s)
{
    for (const auto& id : s.disabled)
        if (!t.find(id))
            throw StyleError("style '" + s.name + "' disables unknown node " + id_text(id));
    if (s.disabled.count(t.root()->id))
        throw StyleError("style '" + s.name + "' disables the root");
    return KBTree(t.values(), prune(t.root(), s));
}

KBTree push_down_negations(const KBTree& t)
{
    return KBTree(t.values(), push(t.root(), false));
}

KBTree substitute_subtree(const KBTree& t, NodeId node, const KBTree& s)
{
    if (!t.find(node))
        throw ConstructionError("no node " + id_text(node) + " to substitute");
    for (const auto& v : s.values().values())
        if (!t.values().contains(v))
            throw ConstructionError("substituted tree handles '" + v.str() + "', which the host tree does not");
    return KBTree(t.values(), replace(t.root(), node, strip_ids(s.root())));
}

std::size_t count_decorators(const KBTree& t, DecoratorKind kind)
{
    const auto nodes = t.preorder();
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [&](const Node* n) {
        const auto* d = std::get_if<DecoratorNode>(&n->body);
        return d && d->kind == kind;
    }));
}

} // namespace kbt
