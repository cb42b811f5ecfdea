#include <algorithm>
#include <functional>
#include <sstream>

#include "kbt/analysis.hpp"
#include "kbt/error.hpp"

namespace kbt {

namespace {

std::string quoted(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

std::string leaf_label(const ActionRef& a)
{
    if (!a.embeds())
        return a.id.str();
    return a.id.str() + "\n[" + a.delegate_kind + " " + a.delegate_name + "]";
}

std::string node_label(const Node& n)
{
    if (const auto* a = std::get_if<ActionLeaf>(&n.body))
        return leaf_label(a->ref);
    if (const auto* c = std::get_if<ConditionLeaf>(&n.body))
        return c->name.str() + "\n" + to_string(c->proposition);
    if (const auto* c = std::get_if<ControlNode>(&n.body)) {
        std::string op;
        if (c->handled == success_value())
            op = "→";
        else if (c->handled == failure_value())
            op = "?";
        else
            op = "*" + c->handled.str();
        return c->memory ? "mem " + op : op;
    }
    if (const auto* d = std::get_if<DecoratorNode>(&n.body)) {
        switch (d->kind) {
        case DecoratorKind::negation: return "!";
        case DecoratorKind::run_until_success: return "until_success";
        case DecoratorKind::run_n_times: return "times(" + std::to_string(d->times) + ")";
        case DecoratorKind::custom: {
            std::string s = "map";
            for (const auto& [from, to] : d->policy)
                s += "\n" + to_string(from) + " -> " + to_string(to);
            return s;
        }
        }
    }
    if (const auto* p = std::get_if<ParallelNode>(&n.body))
        return "par(" + std::to_string(p->threshold) + ")";
    return "utility";
}

const char* node_shape(const Node& n)
{
    if (std::holds_alternative<ActionLeaf>(n.body))
        return "box";
    if (std::holds_alternative<ConditionLeaf>(n.body))
        return "ellipse";
    return "plaintext";
}

void tree_body(std::ostringstream& out, const KBTree& t, const std::string& prefix)
{
    for (const Node* n : t.preorder())
        out << "  " << prefix << n->id.value << " [label=" << quoted(node_label(*n)) << ", shape=" << node_shape(*n)
            << "];\n";
    for (const Node* n : t.preorder()) {
        const auto kids = n->children();
        for (std::size_t i = 0; i < kids.size(); ++i)
            out << "  " << prefix << n->id.value << " -> " << prefix << kids[i]->id.value << " [label=" << (i + 1)
                << "];\n";
    }
}

std::string header(const std::string& name)
{
    return "digraph " + quoted(name) + " {\n  node [fontname=\"Helvetica\"];\n";
}

} // namespace

std::string export_dot(const KBTree& t, const std::string& name)
{
    std::ostringstream out;
    out << header(name);
    out << "  // values:";
    for (const auto& v : t.values().values())
        out << ' ' << v.str();
    out << "\n";
    tree_body(out, t, "n");
    out << "}\n";
    return out.str();
}

std::string export_dot(const BlackboardTree& b, const std::string& name)
{
    std::ostringstream out;
    out << header(name);
    tree_body(out, *b.tree(), "n");
    out << "  blackboard [shape=note, label=" << quoted([&] {
        std::string s = "blackboard";
        for (const auto& r : b.rules())
            s += "\n" + to_string(r);
        return s;
    }()) << "];\n";
    out << "}\n";
    return out.str();
}

std::string export_dot(const Fsm& f, const std::string& name)
{
    std::ostringstream out;
    out << header(name);
    out << "  rankdir=LR;\n  start [shape=point];\n";
    const auto& states = f.states();
    auto index = [&](const std::string& s) {
        return std::find(states.begin(), states.end(), s) - states.begin();
    };
    for (std::size_t i = 0; i < states.size(); ++i)
        out << "  s" << i << " [shape=circle, label=" << quoted(states[i] + "\n" + leaf_label(f.label(states[i])))
            << "];\n";
    out << "  start -> s" << index(f.initial()) << ";\n";
    for (const auto& t : f.transitions())
        out << "  s" << index(t.from) << " -> s" << index(t.to) << " [label=" << quoted(to_string(t.guard)) << "];\n";
    out << "}\n";
    return out.str();
}

std::string export_dot(const DecisionTree& d, const std::string& name)
{
    std::ostringstream out;
    out << header(name);
    std::size_t next = 0;
    std::function<std::size_t(const DtNode&)> emit = [&](const DtNode& n) -> std::size_t {
        const std::size_t id = next++;
        if (n.is_leaf()) {
            out << "  d" << id << " [shape=box, label=" << quoted(leaf_label(n.leaf)) << "];\n";
            return id;
        }
        out << "  d" << id << " [shape=diamond, label=" << quoted(to_string(n.test)) << "];\n";
        const std::size_t yes = emit(*n.if_true);
        const std::size_t no = emit(*n.if_false);
        out << "  d" << id << " -> d" << yes << " [label=\"true\"];\n";
        out << "  d" << id << " -> d" << no << " [label=\"false\"];\n";
        return id;
    };
    emit(*d.root());
    out << "}\n";
    return out.str();
}

std::string export_dot(const TeleoReactive& t, const std::string& name)
{
    std::ostringstream out;
    out << header(name);
    const auto& rules = t.rules();
    for (std::size_t i = 0; i < rules.size(); ++i) {
        out << "  r" << i << " [shape=record, label="
            << quoted(std::to_string(i + 1) + ": " + to_string(rules[i].when) + " -> " + leaf_label(rules[i].action))
            << "];\n";
    }
    for (std::size_t i = 1; i < rules.size(); ++i)
        out << "  r" << (i - 1) << " -> r" << i << " [label=\"else\"];\n";
    out << "}\n";
    return out.str();
}

std::string export_dot(const Asm& m, const std::string& name)
{
    if (const auto* t = dynamic_cast<const KBTree*>(&m))
        return export_dot(*t, name);
    if (const auto* f = dynamic_cast<const Fsm*>(&m))
        return export_dot(*f, name);
    if (const auto* d = dynamic_cast<const DecisionTree*>(&m))
        return export_dot(*d, name);
    if (const auto* r = dynamic_cast<const TeleoReactive*>(&m))
        return export_dot(*r, name);
    if (const auto* b = dynamic_cast<const BlackboardTree*>(&m))
        return export_dot(*b, name);
    throw Error("no DOT export for ASM kind '" + std::string(m.kind()) + "'");
}

} // namespace kbt
