#include "dsl_syntax.hpp"

#include <array>
#include <cctype>

namespace kbt::dsl {

namespace {

const std::array<std::string_view, 13> decl_keywords{"values", "var",   "hidden", "action",    "cond",
                                                     "tree",   "fsm",   "dt",     "tr",        "blackboard",
                                                     "style",  "stack", "world"};

bool is_decl_keyword(std::string_view w)
{
    for (auto k : decl_keywords)
        if (k == w)
            return true;
    return w == "alphabet";
}

const std::array<std::string_view, 6> two_char{"->", "..", "==", "!=", "<=", ">="};
const std::string_view one_char = "?*!()[]{},;:<>=-~";

} // namespace

std::vector<Token> lex(std::string_view text)
{
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        const char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '#' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
            while (i < text.size() && text[i] != '\n')
                advance(1);
            continue;
        }
        Token t;
        t.location = {line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            t.kind = Tok::ident;
            t.text = std::string(text.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
                ++j;
            t.kind = Tok::integer;
            t.text = std::string(text.substr(i, j - i));
            if (t.text.size() > 9)
                throw ParseError({{t.location, "integer literal too large"}});
            t.number = std::stoi(t.text);
            advance(j - i);
        } else if (c == '"') {
            std::string s;
            std::size_t j = i + 1;
            for (;;) {
                if (j >= text.size() || text[j] == '\n')
                    throw ParseError({{t.location, "unterminated string literal"}});
                if (text[j] == '"')
                    break;
                if (text[j] == '\\' && j + 1 < text.size())
                    ++j;
                s += text[j++];
            }
            t.kind = Tok::string;
            t.text = std::move(s);
            advance(j + 1 - i);
        } else {
            t.kind = Tok::punct;
            for (auto p : two_char)
                if (text.substr(i, 2) == p)
                    t.text = std::string(p);
            if (t.text.empty() && one_char.find(c) != std::string_view::npos)
                t.text = std::string(1, c);
            if (t.text.empty())
                throw ParseError({{t.location, std::string("unexpected character '") + c + "'"}});
            advance(t.text.size());
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.location = {line, col};
    out.push_back(end);
    return out;
}

// ---- Token helpers -----------------------------------------------------------

const Token& Parser::peek(std::size_t ahead) const
{
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
}

Token Parser::next()
{
    Token t = peek();
    if (pos_ < tokens_.size() - 1)
        ++pos_;
    return t;
}

bool Parser::at(std::string_view w, std::size_t ahead) const
{
    const Token& t = peek(ahead);
    return (t.kind == Tok::punct || t.kind == Tok::ident) && t.text == w;
}

bool Parser::accept(std::string_view w)
{
    if (!at(w))
        return false;
    next();
    return true;
}

void Parser::fail(const std::string& msg) const
{
    const Token& t = peek();
    const std::string found = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
    throw SyntaxError{t.location, msg + ", found " + found};
}

void Parser::expect(std::string_view w)
{
    if (!accept(w))
        fail("expected '" + std::string(w) + "'");
}

std::string Parser::ident(const char* what)
{
    if (peek().kind != Tok::ident)
        fail(std::string("expected ") + what);
    return next().text;
}

int Parser::integer()
{
    const bool negative = accept("-");
    if (peek().kind != Tok::integer)
        fail("expected an integer");
    const int v = next().number;
    return negative ? -v : v;
}

std::vector<std::string> Parser::name_list()
{
    std::vector<std::string> out;
    expect("[");
    if (!at("]")) {
        do
            out.push_back(value_token());
        while (accept(","));
    }
    expect("]");
    return out;
}

// ---- Conditions --------------------------------------------------------------

ConditionExpr Parser::condition()
{
    std::vector<ConditionExpr> parts{cond_and()};
    while (accept("or"))
        parts.push_back(cond_and());
    return parts.size() == 1 ? parts[0] : ConditionExpr::any_of(std::move(parts));
}

ConditionExpr Parser::cond_and()
{
    std::vector<ConditionExpr> parts{cond_not()};
    while (accept("and"))
        parts.push_back(cond_not());
    return parts.size() == 1 ? parts[0] : ConditionExpr::all_of(std::move(parts));
}

ConditionExpr Parser::cond_not()
{
    if (accept("not"))
        return ConditionExpr::negate(cond_not());
    return cond_atom();
}

ConditionExpr Parser::cond_atom()
{
    if (accept("(")) {
        ConditionExpr e = condition();
        expect(")");
        return e;
    }
    if (accept("true"))
        return ConditionExpr::literal(true);
    if (accept("false"))
        return ConditionExpr::literal(false);
    const Token name = peek();
    const std::string var = ident("a condition");
    static const std::array<std::pair<std::string_view, CompareOp>, 7> ops{{{"==", CompareOp::eq},
                                                                             {"=", CompareOp::eq},
                                                                             {"!=", CompareOp::ne},
                                                                             {"<=", CompareOp::le},
                                                                             {"<", CompareOp::lt},
                                                                             {">=", CompareOp::ge},
                                                                             {">", CompareOp::gt}}};
    for (const auto& [sym, op] : ops) {
        if (accept(sym)) {
            if (!variables.count(var))
                throw SyntaxError{name.location, "unknown variable '" + var + "'"};
            return ConditionExpr::compare(var, op, integer());
        }
    }
    if (auto it = conditions_.find(var); it != conditions_.end())
        return it->second;
    if (!variables.count(var))
        throw SyntaxError{name.location, "unknown variable or condition '" + var + "'"};
    return ConditionExpr::truthy(var);
}

// ---- Actions -----------------------------------------------------------------

std::string Parser::value_token()
{
    if (accept("~"))
        return "~";
    return ident("a value name");
}

ReturnRule Parser::returns_block()
{
    std::vector<ReturnRule::Clause> clauses;
    ReturnValue fallback;
    bool has_default = false;
    expect("{");
    while (!accept("}")) {
        if (accept(";"))
            continue;
        if (has_default)
            fail("a bare 'returns' must be the last rule");
        expect("returns");
        const std::string v = value_token();
        if (accept("when")) {
            if (v == "~")
                fail("the unhandled value '~' can only be the default");
            clauses.push_back({condition(), ValueName(v)});
        } else {
            has_default = true;
            fallback = v == "~" ? ReturnValue{} : ReturnValue{ValueName(v)};
        }
    }
    return ReturnRule(std::move(clauses), std::move(fallback));
}

// ---- Tree expressions --------------------------------------------------------

TreeExpr Parser::tree_expr()
{
    std::vector<TreeExpr> parts{tree_seq()};
    while (accept("?"))
        parts.push_back(tree_seq());
    if (parts.size() == 1)
        return parts[0];
    TreeExpr e;
    e.kind = TreeExpr::Kind::control;
    e.name = "Failure";
    e.children = std::move(parts);
    return e;
}

TreeExpr Parser::tree_seq()
{
    std::vector<TreeExpr> parts{tree_unary()};
    while (accept("->"))
        parts.push_back(tree_unary());
    if (parts.size() == 1)
        return parts[0];
    TreeExpr e;
    e.kind = TreeExpr::Kind::control;
    e.name = "Success";
    e.children = std::move(parts);
    return e;
}

TreeExpr Parser::tree_unary()
{
    if (accept("!")) {
        TreeExpr e;
        e.kind = TreeExpr::Kind::negation;
        e.children.push_back(tree_unary());
        return e;
    }
    return tree_primary();
}

std::vector<TreeExpr> Parser::tree_list()
{
    std::vector<TreeExpr> out;
    expect("[");
    if (at("]"))
        fail("a control node needs at least one child");
    do
        out.push_back(tree_expr());
    while (accept(","));
    expect("]");
    return out;
}

ScoreRule Parser::score_rule()
{
    std::vector<ScoreRule::Clause> clauses;
    long fallback = 0;
    expect("{");
    for (;;) {
        if (peek().kind == Tok::integer || (at("-") && peek(1).kind == Tok::integer)) {
            fallback = integer();
            expect("}");
            break;
        }
        ConditionExpr c = condition();
        expect(":");
        clauses.push_back({c, integer()});
        if (accept("}"))
            break;
        expect(",");
    }
    return ScoreRule(std::move(clauses), fallback);
}

TreeExpr Parser::tree_primary()
{
    TreeExpr e;
    if (accept("(")) {
        e = tree_expr();
        expect(")");
        return e;
    }
    if (accept("*")) {
        e.kind = TreeExpr::Kind::control;
        e.name = value_token();
        e.children = tree_list();
        return e;
    }
    if (at("mem") && (at("->", 1) || at("?", 1) || at("*", 1))) {
        next();
        e.kind = TreeExpr::Kind::control;
        e.memory = true;
        if (accept("->"))
            e.name = "Success";
        else if (accept("?"))
            e.name = "Failure";
        else {
            expect("*");
            e.name = value_token();
        }
        e.children = tree_list();
        return e;
    }
    if (at("par") && at("(", 1)) {
        next();
        expect("(");
        const int m = integer();
        if (m < 1)
            fail("parallel threshold must be positive");
        expect(")");
        e.kind = TreeExpr::Kind::parallel;
        e.count = static_cast<unsigned>(m);
        e.children = tree_list();
        return e;
    }
    if (at("until_success") && at("(", 1)) {
        next();
        expect("(");
        e.kind = TreeExpr::Kind::until_success;
        e.children.push_back(tree_expr());
        expect(")");
        return e;
    }
    if (at("times") && at("(", 1)) {
        next();
        expect("(");
        const int n = integer();
        if (n < 1)
            fail("times needs a positive count");
        expect(")");
        expect("(");
        e.kind = TreeExpr::Kind::times;
        e.count = static_cast<unsigned>(n);
        e.children.push_back(tree_expr());
        expect(")");
        return e;
    }
    if (at("map") && at("{", 1)) {
        next();
        expect("{");
        e.kind = TreeExpr::Kind::map;
        do {
            std::string from = value_token();
            expect("->");
            std::string to = value_token();
            e.policy.emplace_back(std::move(from), std::move(to));
        } while (accept(","));
        expect("}");
        expect("(");
        e.children.push_back(tree_expr());
        expect(")");
        return e;
    }
    if (at("utility") && at("[", 1)) {
        next();
        expect("[");
        e.kind = TreeExpr::Kind::utility;
        do {
            e.children.push_back(tree_expr());
            e.scores.push_back(accept("score") ? score_rule() : ScoreRule{});
        } while (accept(","));
        expect("]");
        return e;
    }
    e.kind = TreeExpr::Kind::leaf;
    e.name = ident("a tree expression");
    return e;
}

TreeExpr Parser::tree_only()
{
    TreeExpr e = flattened(tree_expr());
    if (peek().kind != Tok::end)
        fail("unexpected text after the tree expression");
    return e;
}

// ---- Decision trees and worlds -----------------------------------------------

DtExpr Parser::dt_expr()
{
    DtExpr e;
    if (accept("(")) {
        e = dt_expr();
        expect(")");
        return e;
    }
    if (accept("if")) {
        expect("(");
        e.test = condition();
        expect(")");
        DtExpr yes = dt_expr();
        expect("else");
        DtExpr no = dt_expr();
        e.branches = {std::move(yes), std::move(no)};
        return e;
    }
    e.action = ident("an action or 'if'");
    return e;
}

WorldArg Parser::world_arg()
{
    WorldArg a;
    if (accept("[")) {
        std::vector<std::string> items;
        if (!at("]")) {
            do {
                if (peek().kind == Tok::string) {
                    a.quoted = true;
                    items.push_back(next().text);
                } else {
                    items.push_back(ident("a list item"));
                }
            } while (accept(","));
        }
        expect("]");
        a.value = std::move(items);
        return a;
    }
    if (peek().kind == Tok::string) {
        a.quoted = true;
        a.value = next().text;
        return a;
    }
    if (peek().kind == Tok::ident) {
        a.value = next().text;
        return a;
    }
    a.value = integer();
    return a;
}

// ---- Declarations ------------------------------------------------------------

Declaration Parser::declaration()
{
    Declaration d;
    d.location = peek().location;
    const std::string kw = ident("a declaration");

    if (kw == "values") {
        d.body = ValuesDecl{name_list()};
    } else if (kw == "var" || kw == "hidden") {
        VariableDecl v;
        if (kw == "hidden") {
            expect("var");
            v.visibility = Visibility::hidden;
        }
        v.name = ident("a variable name");
        expect(":");
        if (accept("bool")) {
            v.lo = 0;
            v.hi = 1;
        } else {
            v.lo = integer();
            expect("..");
            v.hi = integer();
            if (v.hi < v.lo)
                throw SyntaxError{d.location, "empty domain for variable '" + v.name + "'"};
        }
        if (accept("=")) {
            if (v.visibility != Visibility::hidden)
                fail("only hidden variables have an initial value");
            v.initial = integer();
        }
        variables.insert(v.name);
        d.body = VarDecl{v};
    } else if (kw == "action") {
        ActionDecl a;
        a.name = ident("an action name");
        if (accept("embeds"))
            a.embeds = ident("an embedded model name");
        if (at("{"))
            a.returns = returns_block();
        d.body = std::move(a);
    } else if (kw == "cond") {
        CondDecl c;
        c.name = ident("a condition name");
        expect("=");
        c.expr = condition();
        conditions_[c.name] = c.expr;
        d.body = std::move(c);
    } else if (kw == "tree") {
        TreeDecl t;
        t.name = ident("a tree name");
        if (accept(":"))
            t.values = name_list();
        expect("=");
        t.body = flattened(tree_expr());
        d.body = std::move(t);
    } else if (kw == "fsm") {
        FsmDecl f;
        f.name = ident("an FSM name");
        expect("{");
        while (!accept("}")) {
            if (accept(";"))
                continue;
            if (accept("init")) {
                if (!f.initial.empty())
                    fail("duplicate 'init'");
                f.initial = ident("a state name");
            } else if (accept("label")) {
                std::string state = ident("a state name");
                expect(":");
                const std::string first = ident("a label");
                static const std::set<std::string> kinds{"tree", "fsm", "dt", "tr", "blackboard", "style"};
                std::string target = first;
                if (kinds.count(first) && peek().kind == Tok::ident && !at("label", 0) && !at("init", 0) &&
                    !at("-", 1))
                    target = ident("a model name");
                f.labels.emplace_back(std::move(state), std::move(target));
            } else {
                FsmDecl::Edge e;
                e.from = ident("'init', 'label' or a transition");
                expect("-");
                expect("[");
                e.guard = condition();
                expect("]");
                expect("->");
                e.to = ident("a state name");
                f.edges.push_back(std::move(e));
            }
        }
        if (f.initial.empty())
            throw SyntaxError{d.location, "FSM '" + f.name + "' has no 'init' state"};
        d.body = std::move(f);
    } else if (kw == "dt") {
        DtDecl t;
        t.name = ident("a decision tree name");
        expect("=");
        t.body = dt_expr();
        d.body = std::move(t);
    } else if (kw == "tr") {
        TrDecl t;
        t.name = ident("a teleo-reactive program name");
        expect("{");
        while (!accept("}")) {
            if (accept(";"))
                continue;
            ConditionExpr c = condition();
            expect("->");
            t.rules.emplace_back(std::move(c), ident("an action"));
        }
        d.body = std::move(t);
    } else if (kw == "blackboard") {
        BlackboardDecl b;
        b.name = ident("a blackboard name");
        expect("over");
        b.tree = ident("a tree name");
        expect("{");
        while (!accept("}")) {
            if (accept(";"))
                continue;
            expect("set");
            BlackboardRule r;
            r.variable = ident("a variable");
            expect("=");
            r.assign = integer();
            expect("when");
            using T = BlackboardRule::Trigger;
            if (accept("selected")) {
                r.trigger = T::selected;
                r.action = ActionId(ident("an action"));
            } else if (at("root") && at("returned", 1)) {
                next();
                next();
                r.trigger = T::root_returned;
                const std::string v = value_token();
                r.value = v == "~" ? ReturnValue{} : ReturnValue{ValueName(v)};
            } else if (peek().kind == Tok::ident && at("returned", 1)) {
                r.trigger = T::returned;
                r.action = ActionId(next().text);
                next();
                const std::string v = value_token();
                r.value = v == "~" ? ReturnValue{} : ReturnValue{ValueName(v)};
            } else {
                r.trigger = T::condition;
                r.when = condition();
            }
            b.rules.push_back(std::move(r));
        }
        d.body = std::move(b);
    } else if (kw == "style") {
        StyleDecl s;
        s.name = ident("a style name");
        expect("of");
        s.tree = ident("a tree name");
        expect("disables");
        expect("[");
        if (!at("]")) {
            do {
                const int id = integer();
                if (id < 1)
                    fail("node ids start at 1");
                s.disabled.push_back(static_cast<unsigned>(id));
            } while (accept(","));
        }
        expect("]");
        d.body = std::move(s);
    } else if (kw == "alphabet") {
        AlphabetDecl a;
        a.name = ident("an alphabet name");
        expect("{");
        while (!accept("}")) {
            if (accept(";"))
                continue;
            const Token vt = peek();
            std::string var = ident("a variable");
            if (!variables.count(var))
                throw SyntaxError{vt.location, "unknown variable '" + var + "'"};
            expect("in");
            std::vector<int> vals;
            if (accept("[")) {
                do
                    vals.push_back(integer());
                while (accept(","));
                expect("]");
            } else {
                const int lo = integer();
                expect("..");
                const int hi = integer();
                for (int v = lo; v <= hi; ++v)
                    vals.push_back(v);
            }
            a.axes.emplace_back(std::move(var), std::move(vals));
        }
        d.body = std::move(a);
    } else if (kw == "stack") {
        StackDecl s;
        s.name = ident("a stack name");
        expect("{");
        while (!accept("}")) {
            if (accept(";"))
                continue;
            expect("layer");
            std::string layer = ident("a layer name");
            expect("=");
            s.layers.emplace_back(std::move(layer), ident("a model name"));
        }
        d.body = std::move(s);
    } else if (kw == "world") {
        WorldDecl w;
        w.name = ident("a world name");
        expect("=");
        w.kind = ident("a world kind");
        expect("(");
        if (!at(")")) {
            do {
                std::string key = ident("an argument name");
                expect(":");
                w.args.emplace_back(std::move(key), world_arg());
            } while (accept(","));
        }
        expect(")");
        d.body = std::move(w);
    } else {
        pos_--;
        fail("expected a declaration");
    }
    return d;
}

std::vector<Declaration> Parser::declarations(std::vector<Diagnostic>& diagnostics)
{
    std::vector<Declaration> out;
    while (peek().kind != Tok::end) {
        if (accept(";"))
            continue;
        const std::size_t start = pos_;
        try {
            out.push_back(declaration());
        } catch (const SyntaxError& e) {
            diagnostics.push_back({e.location, e.message});
            // Resume at the next declaration keyword that starts a line.
            if (pos_ == start)
                next();
            while (peek().kind != Tok::end) {
                const Token& t = peek();
                const Token& prev = tokens_[pos_ - 1];
                if (t.kind == Tok::ident && is_decl_keyword(t.text) && t.location.line != prev.location.line)
                    break;
                next();
            }
        } catch (const ConstructionError& e) {
            diagnostics.push_back({tokens_[start].location, e.what()});
            while (peek().kind != Tok::end && !(peek().kind == Tok::ident && is_decl_keyword(peek().text) &&
                                                peek().location.line != tokens_[pos_ - 1].location.line))
                next();
        }
    }
    return out;
}

} // namespace kbt::dsl
