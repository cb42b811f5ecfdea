#include <sstream>

#include "kbt/dsl.hpp"

namespace kbt {

namespace {

enum class Ctx
{
    top,
    in_fallback,
    in_sequence,
    in_unary,
};

std::string join(const std::vector<std::string>& parts, const char* sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += sep;
        out += parts[i];
    }
    return out;
}

std::string score_text(const ScoreRule& s)
{
    std::vector<std::string> parts;
    for (const auto& c : s.clauses())
        parts.push_back(to_string(c.when) + " : " + std::to_string(c.score));
    parts.push_back(std::to_string(s.fallback()));
    return "score {" + join(parts, ", ") + "}";
}

std::string fmt(const TreeExpr& e, Ctx ctx)
{
    using K = TreeExpr::Kind;
    auto list = [&] {
        std::vector<std::string> parts;
        for (const auto& c : e.children)
            parts.push_back(fmt(c, Ctx::top));
        return "[" + join(parts, ", ") + "]";
    };
    switch (e.kind) {
    case K::leaf:
        return e.name;
    case K::control: {
        const bool seq = e.name == "Success";
        const bool infix = !e.memory && (seq || e.name == "Failure") && e.children.size() >= 2;
        if (!infix) {
            std::string head = e.memory ? "mem" : "";
            if (e.memory && seq)
                head += "->";
            else if (e.memory && e.name == "Failure")
                head += "?";
            else
                head += "*" + e.name;
            return head + list();
        }
        std::vector<std::string> parts;
        for (const auto& c : e.children)
            parts.push_back(fmt(c, seq ? Ctx::in_sequence : Ctx::in_fallback));
        std::string s = join(parts, seq ? " -> " : " ? ");
        const bool parens = ctx == Ctx::in_unary || ctx == Ctx::in_sequence || (ctx == Ctx::in_fallback && !seq);
        return parens ? "(" + s + ")" : s;
    }
    case K::negation:
        return "!" + fmt(e.children[0], Ctx::in_unary);
    case K::until_success:
        return "until_success(" + fmt(e.children[0], Ctx::top) + ")";
    case K::times:
        return "times(" + std::to_string(e.count) + ")(" + fmt(e.children[0], Ctx::top) + ")";
    case K::map: {
        std::vector<std::string> parts;
        for (const auto& [from, to] : e.policy)
            parts.push_back(from + " -> " + to);
        return "map{" + join(parts, ", ") + "}(" + fmt(e.children[0], Ctx::top) + ")";
    }
    case K::parallel:
        return "par(" + std::to_string(e.count) + ")" + list();
    case K::utility: {
        std::vector<std::string> parts;
        for (std::size_t i = 0; i < e.children.size(); ++i) {
            std::string s = fmt(e.children[i], Ctx::top);
            const ScoreRule& r = e.scores[i];
            if (!r.clauses().empty() || r.fallback() != 0)
                s += " " + score_text(r);
            parts.push_back(std::move(s));
        }
        return "utility[" + join(parts, ", ") + "]";
    }
    }
    return "?";
}

TreeExpr to_expr(const Node& n)
{
    TreeExpr e;
    using K = TreeExpr::Kind;
    for (const auto& c : n.children())
        e.children.push_back(to_expr(*c));
    if (const auto* a = std::get_if<ActionLeaf>(&n.body)) {
        e.kind = K::leaf;
        e.name = a->ref.id.str();
    } else if (const auto* c = std::get_if<ConditionLeaf>(&n.body)) {
        e.kind = K::leaf;
        e.name = c->name.str();
    } else if (const auto* c = std::get_if<ControlNode>(&n.body)) {
        e.kind = K::control;
        e.name = c->handled.str();
        e.memory = c->memory;
    } else if (const auto* d = std::get_if<DecoratorNode>(&n.body)) {
        switch (d->kind) {
        case DecoratorKind::negation: e.kind = K::negation; break;
        case DecoratorKind::run_until_success: e.kind = K::until_success; break;
        case DecoratorKind::run_n_times:
            e.kind = K::times;
            e.count = d->times;
            break;
        case DecoratorKind::custom:
            e.kind = K::map;
            for (const auto& [from, to] : d->policy)
                e.policy.emplace_back(to_string(from), to_string(to));
            break;
        }
    } else if (const auto* p = std::get_if<ParallelNode>(&n.body)) {
        e.kind = K::parallel;
        e.count = p->threshold;
    } else if (const auto* u = std::get_if<UtilityNode>(&n.body)) {
        e.kind = K::utility;
        e.scores = u->scores;
    }
    return e;
}

std::string var_text(const VariableDecl& v)
{
    std::string s = v.visibility == Visibility::hidden ? "hidden var " : "var ";
    s += v.name + ": ";
    s += v.is_bool() ? std::string("bool") : std::to_string(v.lo) + ".." + std::to_string(v.hi);
    if (v.visibility == Visibility::hidden && v.initial != 0)
        s += " = " + std::to_string(v.initial);
    return s;
}

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string dt_text(const DtExpr& e, bool nested_then)
{
    if (e.branches.empty())
        return e.action;
    std::string s = "if (" + to_string(e.test) + ") " + dt_text(e.branches[0], true) + " else " +
                    dt_text(e.branches[1], false);
    return nested_then ? "(" + s + ")" : s;
}

std::string world_arg_text(const WorldArg& a)
{
    if (const int* v = std::get_if<int>(&a.value))
        return std::to_string(*v);
    if (const auto* s = std::get_if<std::string>(&a.value))
        return a.quoted ? quote(*s) : *s;
    std::vector<std::string> items;
    for (const auto& s : std::get<std::vector<std::string>>(a.value))
        items.push_back(a.quoted ? quote(s) : s);
    return "[" + join(items, ", ") + "]";
}

struct Formatter
{
    const Model& m;
    std::ostringstream out;

    void operator()(const ValuesDecl& d) { out << "values [" << join(d.values, ", ") << "]\n"; }
    void operator()(const VarDecl& d) { out << var_text(d.var) << "\n"; }

    void operator()(const ActionDecl& d)
    {
        out << "action " << d.name;
        if (!d.embeds.empty())
            out << " embeds " << d.embeds;
        if (d.returns == ReturnRule{}) {
            out << "\n";
            return;
        }
        out << " {\n";
        for (const auto& c : d.returns.clauses())
            out << "  returns " << c.value.str() << " when " << to_string(c.when) << "\n";
        if (d.returns.fallback())
            out << "  returns " << d.returns.fallback()->str() << "\n";
        out << "}\n";
    }

    void operator()(const CondDecl& d) { out << "cond " << d.name << " = " << to_string(d.expr) << "\n"; }

    void operator()(const TreeDecl& d)
    {
        out << "tree " << d.name;
        if (!d.values.empty())
            out << " : [" << join(d.values, ", ") << "]";
        out << " = " << format_tree_expr(d.body) << "\n";
    }

    void operator()(const FsmDecl& d)
    {
        out << "fsm " << d.name << " {\n  init " << d.initial << "\n";
        for (const auto& e : d.edges)
            out << "  " << e.from << " -[" << to_string(e.guard) << "]-> " << e.to << "\n";
        for (const auto& [state, target] : d.labels) {
            out << "  label " << state << ": ";
            if (m.has_asm(target))
                out << m.asm_named(target)->kind() << " ";
            out << target << "\n";
        }
        out << "}\n";
    }

    void operator()(const DtDecl& d) { out << "dt " << d.name << " = " << dt_text(d.body, false) << "\n"; }

    void operator()(const TrDecl& d)
    {
        out << "tr " << d.name << " {\n";
        for (const auto& [c, a] : d.rules)
            out << "  " << to_string(c) << " -> " << a << "\n";
        out << "}\n";
    }

    void operator()(const BlackboardDecl& d)
    {
        out << "blackboard " << d.name << " over " << d.tree << " {\n";
        for (const auto& r : d.rules)
            out << "  " << to_string(r) << "\n";
        out << "}\n";
    }

    void operator()(const StyleDecl& d)
    {
        std::vector<std::string> ids;
        for (auto id : d.disabled)
            ids.push_back(std::to_string(id));
        out << "style " << d.name << " of " << d.tree << " disables [" << join(ids, ", ") << "]\n";
    }

    void operator()(const AlphabetDecl& d)
    {
        out << "alphabet " << d.name << " {\n";
        for (const auto& [var, vals] : d.axes) {
            std::vector<std::string> items;
            for (int v : vals)
                items.push_back(std::to_string(v));
            out << "  " << var << " in [" << join(items, ", ") << "]\n";
        }
        out << "}\n";
    }

    void operator()(const StackDecl& d)
    {
        out << "stack " << d.name << " {\n";
        for (const auto& [layer, target] : d.layers)
            out << "  layer " << layer << " = " << target << "\n";
        out << "}\n";
    }

    void operator()(const WorldDecl& d)
    {
        std::vector<std::string> args;
        for (const auto& [k, v] : d.args)
            args.push_back(k + ": " + world_arg_text(v));
        out << "world " << d.name << " = " << d.kind << "(" << join(args, ", ") << ")\n";
    }
};

} // namespace

std::string format_tree_expr(const TreeExpr& e)
{
    return fmt(e, Ctx::top);
}

std::string format_tree(const KBTree& t)
{
    return format_tree_expr(flattened(to_expr(*t.root())));
}

std::string format_model(const Model& m)
{
    Formatter f{m, {}};
    std::size_t prev = SIZE_MAX;
    for (const auto& d : m.declarations()) {
        if (prev != SIZE_MAX && d.body.index() != prev)
            f.out << "\n";
        prev = d.body.index();
        std::visit(f, d.body);
    }
    return f.out.str();
}

} // namespace kbt
