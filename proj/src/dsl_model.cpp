#include <algorithm>
#include <functional>

#include "dsl_syntax.hpp"

namespace kbt {

bool operator==(const BlackboardDecl& a, const BlackboardDecl& b)
{
    if (a.name != b.name || a.tree != b.tree || a.rules.size() != b.rules.size())
        return false;
    for (std::size_t i = 0; i < a.rules.size(); ++i) {
        const auto& x = a.rules[i];
        const auto& y = b.rules[i];
        if (x.variable != y.variable || x.assign != y.assign || x.trigger != y.trigger)
            return false;
        using T = BlackboardRule::Trigger;
        if ((x.trigger == T::selected || x.trigger == T::returned) && x.action != y.action)
            return false;
        if ((x.trigger == T::returned || x.trigger == T::root_returned) && x.value != y.value)
            return false;
        if (x.trigger == T::condition && !(x.when == y.when))
            return false;
    }
    return true;
}

bool operator==(const Model& a, const Model& b)
{
    if (a.decls_.size() != b.decls_.size())
        return false;
    for (std::size_t i = 0; i < a.decls_.size(); ++i)
        if (!(a.decls_[i].body == b.decls_[i].body))
            return false;
    return true;
}

TreeExpr flattened(TreeExpr e)
{
    std::vector<TreeExpr> kids;
    for (auto& c : e.children) {
        TreeExpr fc = flattened(std::move(c));
        const bool merge = e.kind == TreeExpr::Kind::control && !e.memory && fc.kind == TreeExpr::Kind::control &&
                           !fc.memory && fc.name == e.name;
        if (merge)
            for (auto& g : fc.children)
                kids.push_back(std::move(g));
        else
            kids.push_back(std::move(fc));
    }
    e.children = std::move(kids);
    return e;
}

namespace {

struct BuildError
{
    SourceLocation location;
    std::string message;
};

// Raised when a declaration depends on one that already failed.
struct Dependent
{
};

using LeafResolver = std::function<NodePtr(const std::string& name, const ValueSet& host)>;

ReturnValue value_of(const std::string& token)
{
    return token == "~" ? ReturnValue{} : ReturnValue{ValueName(token)};
}

NodePtr build_node(const TreeExpr& e, const ValueSet& values, const LeafResolver& leaf)
{
    using K = TreeExpr::Kind;
    std::vector<NodePtr> kids;
    for (const auto& c : e.children)
        kids.push_back(build_node(c, values, leaf));
    switch (e.kind) {
    case K::leaf:
        return leaf(e.name, values);
    case K::control:
        if (e.name == "~")
            throw ConstructionError("a control node cannot handle the unhandled value '~'");
        return control(ValueName(e.name), std::move(kids), e.memory);
    case K::negation:
        return negation(kids.at(0));
    case K::until_success:
        return run_until_success(kids.at(0));
    case K::times:
        return run_n_times(e.count, kids.at(0));
    case K::parallel:
        return parallel(e.count, std::move(kids));
    case K::utility:
        return utility(std::move(kids), e.scores);
    case K::map: {
        std::map<ReturnValue, ReturnValue> policy;
        std::optional<std::string> wildcard;
        for (const auto& [from, to] : e.policy) {
            if (from == "_") {
                if (wildcard)
                    throw ConstructionError("map policy has two '_' entries");
                wildcard = to;
                continue;
            }
            if (to == "_")
                throw ConstructionError("'_' as a target needs '_' as the source");
            if (!policy.emplace(value_of(from), value_of(to)).second)
                throw ConstructionError("map policy maps '" + from + "' twice");
        }
        for (const auto& v : possible_values(*kids.at(0))) {
            if (policy.count(v))
                continue;
            if (!wildcard)
                throw ConstructionError("map policy has no entry for child value '" + to_string(v) + "'");
            policy.emplace(v, *wildcard == "_" ? v : value_of(*wildcard));
        }
        return custom_decorator(std::move(policy), kids.at(0));
    }
    }
    throw ConstructionError("unknown tree expression");
}

} // namespace

class ModelBuilder
{
public:
    ModelBuilder(Model& m, std::vector<Diagnostic>& diags) : m_(m), diags_(diags) {}

    void build()
    {
        collect();
        for (const auto& d : m_.decls_)
            guarded(d, [&] { build_decl(d); });
    }

private:
    enum class State
    {
        pending,
        building,
        done,
        failed,
    };

    struct Entry
    {
        const Declaration* decl = nullptr;
        State state = State::pending;
    };

    void error(SourceLocation loc, std::string msg) { diags_.push_back({loc, std::move(msg)}); }

    template <class F>
    void guarded(const Declaration& d, F&& f)
    {
        try {
            f();
        } catch (const BuildError& e) {
            error(e.location, e.message);
        } catch (const ParseError& e) {
            for (const auto& x : e.diagnostics())
                diags_.push_back(x);
        } catch (const Error& e) {
            error(d.location, e.what());
        } catch (const Dependent&) {
        }
    }

    void collect()
    {
        bool have_values = false;
        for (const auto& d : m_.decls_) {
            guarded(d, [&] {
                if (const auto* v = std::get_if<ValuesDecl>(&d.body)) {
                    if (have_values)
                        throw BuildError{d.location, "duplicate 'values' declaration"};
                    have_values = true;
                    std::vector<ValueName> names;
                    for (const auto& s : v->values) {
                        if (s == "~")
                            throw BuildError{d.location, "'~' is not a value name"};
                        names.emplace_back(s);
                    }
                    m_.values_ = ValueSet(std::move(names));
                    return;
                }
                if (const auto* v = std::get_if<VarDecl>(&d.body)) {
                    for (const auto& existing : m_.variables_)
                        if (existing.name == v->var.name)
                            throw BuildError{d.location, "duplicate variable '" + v->var.name + "'"};
                    m_.variables_.push_back(v->var);
                    return;
                }
                const std::string& name = std::visit(
                    [](const auto& b) -> const std::string& {
                        if constexpr (requires { b.name; })
                            return b.name;
                        else
                            throw Error("unnamed declaration");
                    },
                    d.body);
                if (!entries_.emplace(name, Entry{&d}).second)
                    throw BuildError{d.location, "duplicate declaration of '" + name + "'"};
            });
        }
    }

    const Entry* find(const std::string& name) const
    {
        auto it = entries_.find(name);
        return it == entries_.end() ? nullptr : &it->second;
    }

    static bool is_asm_decl(const Declaration& d)
    {
        return std::holds_alternative<TreeDecl>(d.body) || std::holds_alternative<FsmDecl>(d.body) ||
               std::holds_alternative<DtDecl>(d.body) || std::holds_alternative<TrDecl>(d.body) ||
               std::holds_alternative<BlackboardDecl>(d.body) || std::holds_alternative<StyleDecl>(d.body);
    }

    static bool is_tree_decl(const Declaration& d)
    {
        return std::holds_alternative<TreeDecl>(d.body) || std::holds_alternative<StyleDecl>(d.body);
    }

    AsmPtr resolve_asm(const std::string& name, SourceLocation where)
    {
        auto it = entries_.find(name);
        if (it == entries_.end())
            throw BuildError{where, "unknown model '" + name + "'"};
        Entry& e = it->second;
        if (!is_asm_decl(*e.decl))
            throw BuildError{where, "'" + name + "' is not a tree, fsm, dt, tr, blackboard or style"};
        switch (e.state) {
        case State::done:
            return m_.asms_.at(name);
        case State::failed:
            throw Dependent{};
        case State::building:
            throw BuildError{where, "cyclic reference through '" + name + "'"};
        case State::pending:
            break;
        }
        e.state = State::building;
        bool ok = false;
        guarded(*e.decl, [&] {
            AsmPtr built = build_asm(*e.decl);
            m_.asms_[name] = std::move(built);
            m_.asm_order_.push_back(name);
            ok = true;
        });
        e.state = ok ? State::done : State::failed;
        if (!ok)
            throw Dependent{};
        return m_.asms_.at(name);
    }

    ActionRef action_ref(const std::string& name, SourceLocation where)
    {
        const Entry* e = find(name);
        if (!e)
            throw BuildError{where, "unknown action '" + name + "'"};
        if (const auto* a = std::get_if<ActionDecl>(&e->decl->body)) {
            if (a->embeds.empty())
                return ActionRef(ActionId(name));
            AsmPtr inner = resolve_asm(a->embeds, e->decl->location);
            return ActionRef(ActionId(name), inner, a->embeds, std::string(inner->kind()));
        }
        if (is_asm_decl(*e->decl)) {
            AsmPtr inner = resolve_asm(name, where);
            return ActionRef(ActionId(name), inner, name, std::string(inner->kind()));
        }
        throw BuildError{where, "'" + name + "' is not an action or model"};
    }

    NodePtr leaf(const std::string& name, const ValueSet& host, SourceLocation where)
    {
        const Entry* e = find(name);
        if (!e)
            throw BuildError{where, "unknown action, condition or model '" + name + "'"};
        if (const auto* c = std::get_if<CondDecl>(&e->decl->body))
            return condition(name, c->expr);
        if (const auto* a = std::get_if<ActionDecl>(&e->decl->body)) {
            check_rule_values(a->returns, e->decl->location, name);
            if (a->embeds.empty())
                return action(ActionId(name), a->returns);
            return action(action_ref(name, where), a->returns);
        }
        if (is_tree_decl(*e->decl)) {
            auto sub = std::dynamic_pointer_cast<const KBTree>(resolve_asm(name, where));
            for (const auto& v : sub->values().values())
                if (!host.contains(v))
                    throw BuildError{where, "subtree '" + name + "' handles '" + v.str() +
                                                "', which the enclosing tree does not"};
            return strip_ids(sub->root());
        }
        if (is_asm_decl(*e->decl))
            return action(action_ref(name, where), ReturnRule{});
        throw BuildError{where, "'" + name + "' cannot be used as a tree leaf"};
    }

    void check_rule_values(const ReturnRule& r, SourceLocation where, const std::string& action)
    {
        for (const auto& v : r.possible_values())
            if (v && !m_.values_.contains(*v))
                throw BuildError{where, "action '" + action + "' returns undeclared value '" + v->str() + "'"};
    }

    ValueSet value_set(const std::vector<std::string>& names, SourceLocation where)
    {
        if (names.empty())
            return m_.values_;
        std::vector<ValueName> out;
        for (const auto& n : names) {
            if (n == "~" || !m_.values_.contains(ValueName(n)))
                throw BuildError{where, "undeclared value '" + n + "'"};
            out.emplace_back(n);
        }
        return ValueSet(std::move(out));
    }

    const VariableDecl* variable(const std::string& name) const
    {
        for (const auto& v : m_.variables_)
            if (v.name == name)
                return &v;
        return nullptr;
    }

    AsmPtr build_asm(const Declaration& d)
    {
        const SourceLocation at = d.location;
        if (const auto* t = std::get_if<TreeDecl>(&d.body)) {
            const ValueSet vs = value_set(t->values, at);
            LeafResolver r = [&](const std::string& n, const ValueSet& host) { return leaf(n, host, at); };
            return std::make_shared<const KBTree>(vs, build_node(t->body, vs, r));
        }
        if (const auto* s = std::get_if<StyleDecl>(&d.body)) {
            const Entry* e = find(s->tree);
            if (!e || !is_tree_decl(*e->decl))
                throw BuildError{at, "style '" + s->name + "' needs a tree, found '" + s->tree + "'"};
            auto tree = std::dynamic_pointer_cast<const KBTree>(resolve_asm(s->tree, at));
            Style style{s->name, {}};
            for (auto id : s->disabled)
                style.disabled.insert(NodeId{id});
            return std::make_shared<const KBTree>(apply_style(*tree, style));
        }
        if (const auto* f = std::get_if<FsmDecl>(&d.body)) {
            std::vector<std::string> states;
            auto add = [&](const std::string& s) {
                if (std::find(states.begin(), states.end(), s) == states.end())
                    states.push_back(s);
            };
            add(f->initial);
            for (const auto& e : f->edges) {
                add(e.from);
                add(e.to);
            }
            std::map<std::string, ActionRef> labels;
            for (const auto& [state, target] : f->labels) {
                add(state);
                if (!labels.emplace(state, action_ref(target, at)).second)
                    throw BuildError{at, "state '" + state + "' has two labels"};
            }
            std::vector<FsmTransition> transitions;
            for (const auto& e : f->edges)
                transitions.push_back({e.from, e.guard, e.to});
            auto fsm = std::make_shared<const Fsm>(states, f->initial, std::move(transitions), std::move(labels));
            validate_disjoint(*fsm, m_.variables_);
            return fsm;
        }
        if (const auto* t = std::get_if<DtDecl>(&d.body)) {
            std::function<DtPtr(const DtExpr&)> conv = [&](const DtExpr& e) -> DtPtr {
                if (e.branches.empty())
                    return dt_leaf(action_ref(e.action, at));
                return dt_branch(e.test, conv(e.branches[0]), conv(e.branches[1]));
            };
            return std::make_shared<const DecisionTree>(conv(t->body));
        }
        if (const auto* t = std::get_if<TrDecl>(&d.body)) {
            std::vector<TrRule> rules;
            for (const auto& [c, a] : t->rules)
                rules.push_back({c, action_ref(a, at)});
            auto tr = std::make_shared<const TeleoReactive>(std::move(rules));
            if (!tr->has_catch_all())
                m_.warnings_.push_back(std::to_string(at.line) + ":" + std::to_string(at.column) +
                                       ": teleo-reactive program '" + t->name + "' has no catch-all rule");
            return tr;
        }
        if (const auto* b = std::get_if<BlackboardDecl>(&d.body)) {
            const Entry* e = find(b->tree);
            if (!e || !is_tree_decl(*e->decl))
                throw BuildError{at, "blackboard '" + b->name + "' needs a tree, found '" + b->tree + "'"};
            auto tree = std::dynamic_pointer_cast<const KBTree>(resolve_asm(b->tree, at));
            std::vector<VariableDecl> vars;
            for (const auto& r : b->rules) {
                const VariableDecl* v = variable(r.variable);
                if (!v)
                    throw BuildError{at, "blackboard writes undeclared variable '" + r.variable + "'"};
                if (v->visibility != Visibility::hidden)
                    throw BuildError{at, "blackboard variable '" + r.variable + "' must be declared hidden"};
                if (std::none_of(vars.begin(), vars.end(), [&](const VariableDecl& x) { return x.name == v->name; }))
                    vars.push_back(*v);
                if (r.value && !m_.values_.contains(*r.value))
                    throw BuildError{at, "undeclared value '" + r.value->str() + "'"};
            }
            return std::make_shared<const BlackboardTree>(tree, std::move(vars), b->rules);
        }
        throw BuildError{at, "not a model declaration"};
    }

    void build_decl(const Declaration& d)
    {
        const SourceLocation at = d.location;
        if (const auto* a = std::get_if<ActionDecl>(&d.body)) {
            check_rule_values(a->returns, at, a->name);
            for (const auto& v : a->returns.variables())
                if (!variable(v))
                    throw BuildError{at, "unknown variable '" + v + "'"};
            if (!a->embeds.empty())
                resolve_asm(a->embeds, at);
            return;
        }
        if (is_asm_decl(d)) {
            resolve_asm(std::visit([](const auto& b) -> std::string {
                            if constexpr (requires { b.name; })
                                return b.name;
                            else
                                return {};
                        },
                                   d.body),
                        at);
            return;
        }
        if (const auto* a = std::get_if<AlphabetDecl>(&d.body)) {
            for (const auto& [var, vals] : a->axes) {
                const VariableDecl* v = variable(var);
                if (!v)
                    throw BuildError{at, "unknown variable '" + var + "'"};
                if (v->visibility == Visibility::hidden)
                    throw BuildError{at, "alphabet '" + a->name + "' ranges over hidden variable '" + var + "'"};
                for (int x : vals)
                    if (x < v->lo || x > v->hi)
                        throw BuildError{at, "value " + std::to_string(x) + " is outside the domain of '" + var + "'"};
            }
            m_.alphabets_.emplace(a->name, InputAlphabet::product(a->axes));
            return;
        }
        if (const auto* s = std::get_if<StackDecl>(&d.body)) {
            std::vector<Layer> layers;
            for (const auto& [layer, target] : s->layers)
                layers.push_back({layer, resolve_asm(target, at)});
            m_.stacks_.emplace(s->name, ControllerStack(std::move(layers)));
            return;
        }
        if (const auto* w = std::get_if<WorldDecl>(&d.body)) {
            m_.worlds_.emplace(w->name, make_world(*w, at));
            return;
        }
    }

    std::shared_ptr<const World> make_world(const WorldDecl& w, SourceLocation at)
    {
        std::map<std::string, const WorldArg*> args;
        for (const auto& [k, v] : w.args)
            if (!args.emplace(k, &v).second)
                throw BuildError{at, "duplicate world argument '" + k + "'"};
        std::set<std::string> used;
        auto integer = [&](const std::string& key, int fallback) {
            auto it = args.find(key);
            if (it == args.end())
                return fallback;
            used.insert(key);
            if (const int* v = std::get_if<int>(&it->second->value))
                return *v;
            throw BuildError{at, "world argument '" + key + "' must be an integer"};
        };
        auto word = [&](const std::string& key, const std::string& fallback) {
            auto it = args.find(key);
            if (it == args.end())
                return fallback;
            used.insert(key);
            if (const auto* v = std::get_if<std::string>(&it->second->value))
                return *v;
            throw BuildError{at, "world argument '" + key + "' must be a name"};
        };
        auto list = [&](const std::string& key, std::vector<std::string> fallback) {
            auto it = args.find(key);
            if (it == args.end())
                return fallback;
            used.insert(key);
            if (const auto* v = std::get_if<std::vector<std::string>>(&it->second->value))
                return *v;
            throw BuildError{at, "world argument '" + key + "' must be a list"};
        };
        std::shared_ptr<const World> out;
        if (w.kind == "battery") {
            BatteryConfig c;
            c.battery = integer("battery", c.battery);
            c.drain = integer("drain", c.drain);
            c.charge = integer("charge", c.charge);
            c.idle_drain = integer("idle", c.idle_drain);
            c.tasks = list("tasks", c.tasks);
            c.track_recharging = integer("track_recharging", 0) != 0;
            out = std::make_shared<const BatteryWorld>(c);
        } else if (w.kind == "grid") {
            Pose p;
            p.x = integer("x", 1);
            p.y = integer("y", 1);
            p.heading = parse_heading(word("heading", "E"));
            out = std::make_shared<const GridWorld>(list("map", {}), p);
        } else if (w.kind == "door") {
            DoorConfig c;
            c.locked = integer("locked", 1) != 0;
            const int k = integer("knowledge", 2);
            if (k < 0 || k > 2)
                throw BuildError{at, "knowledge must be 0, 1 or 2"};
            c.knowledge = static_cast<Knowledge>(k);
            c.has_key = integer("has_key", 0) != 0;
            c.room = integer("room", 0);
            out = std::make_shared<const DoorWorld>(c);
        } else {
            throw BuildError{at, "unknown world kind '" + w.kind + "' (expected battery, grid or door)"};
        }
        for (const auto& [k, v] : args)
            if (!used.count(k))
                throw BuildError{at, "unknown argument '" + k + "' for a " + w.kind + " world"};
        return out;
    }

    Model& m_;
    std::vector<Diagnostic>& diags_;
    std::map<std::string, Entry> entries_;
};

// ---- Model accessors ---------------------------------------------------------

std::vector<std::string> Model::asm_names() const
{
    std::vector<std::string> out;
    for (const auto& d : decls_)
        std::visit(
            [&](const auto& b) {
                if constexpr (requires { b.name; })
                    if (asms_.count(b.name))
                        out.push_back(b.name);
            },
            d.body);
    return out;
}

AsmPtr Model::asm_named(const std::string& name) const
{
    auto it = asms_.find(name);
    if (it == asms_.end())
        throw Error("no tree, fsm, dt, tr, blackboard or style named '" + name + "'");
    return it->second;
}

namespace {

template <class T>
std::shared_ptr<const T> typed(const Model& m, const std::string& name, const char* what)
{
    auto p = std::dynamic_pointer_cast<const T>(m.asm_named(name));
    if (!p)
        throw Error("'" + name + "' is not " + what);
    return p;
}

} // namespace

KBTreePtr Model::tree(const std::string& name) const { return typed<KBTree>(*this, name, "a tree"); }
FsmPtr Model::fsm(const std::string& name) const { return typed<Fsm>(*this, name, "an fsm"); }
std::shared_ptr<const DecisionTree> Model::dt(const std::string& name) const
{
    return typed<DecisionTree>(*this, name, "a decision tree");
}
std::shared_ptr<const TeleoReactive> Model::tr(const std::string& name) const
{
    return typed<TeleoReactive>(*this, name, "a teleo-reactive program");
}
std::shared_ptr<const BlackboardTree> Model::blackboard(const std::string& name) const
{
    return typed<BlackboardTree>(*this, name, "a blackboard");
}

InputAlphabet Model::alphabet(const std::string& name) const
{
    auto it = alphabets_.find(name);
    if (it == alphabets_.end())
        throw Error("no alphabet named '" + name + "'");
    return it->second;
}

ControllerStack Model::stack(const std::string& name) const
{
    auto it = stacks_.find(name);
    if (it != stacks_.end())
        return it->second;
    if (has_asm(name))
        return ControllerStack({{name, asm_named(name)}});
    throw Error("no stack or model named '" + name + "'");
}

std::unique_ptr<World> Model::world(const std::string& name) const
{
    auto it = worlds_.find(name);
    if (it == worlds_.end())
        throw Error("no world named '" + name + "'");
    return it->second->clone();
}

std::vector<std::string> Model::world_names() const
{
    std::vector<std::string> out;
    for (const auto& d : decls_)
        if (const auto* w = std::get_if<WorldDecl>(&d.body))
            out.push_back(w->name);
    return out;
}

Model parse_model(std::string_view text)
{
    dsl::Parser parser(dsl::lex(text));
    std::vector<Diagnostic> diags;
    Model m;
    m.decls_ = parser.declarations(diags);
    if (diags.empty())
        ModelBuilder(m, diags).build();
    if (!diags.empty())
        throw ParseError(std::move(diags));
    return m;
}

KBTree infix_compose(std::string_view expr, const ValueSet& values)
{
    dsl::Parser parser(dsl::lex(expr));
    TreeExpr e;
    try {
        e = parser.tree_only();
    } catch (const dsl::SyntaxError& err) {
        throw ParseError({{err.location, err.message}});
    }
    LeafResolver r = [](const std::string& n, const ValueSet&) { return action(ActionId(n)); };
    return KBTree(values, build_node(e, values, r));
}

} // namespace kbt
