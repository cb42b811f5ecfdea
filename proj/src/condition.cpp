#include "kbt/condition.hpp"

#include <cassert>

#include "kbt/error.hpp"

namespace kbt {

struct ConditionExpr::Node
{
    Kind kind = Kind::literal;
    bool literal = true;
    std::string variable;
    CompareOp op = CompareOp::eq;
    int rhs = 0;
    std::vector<ConditionExpr> operands;
};

const char* symbol(CompareOp op)
{
    switch (op) {
    case CompareOp::eq: return "==";
    case CompareOp::ne: return "!=";
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
    }
    return "?";
}

ConditionExpr::ConditionExpr() : ConditionExpr(literal(true)) {}

ConditionExpr::ConditionExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

ConditionExpr ConditionExpr::literal(bool value)
{
    static const auto t = std::make_shared<const Node>(Node{Kind::literal, true, {}, {}, 0, {}});
    static const auto f = std::make_shared<const Node>(Node{Kind::literal, false, {}, {}, 0, {}});
    return ConditionExpr(value ? t : f);
}

ConditionExpr ConditionExpr::compare(std::string variable, CompareOp op, int rhs)
{
    if (variable.empty())
        throw ConstructionError("comparison needs a variable name");
    return ConditionExpr(std::make_shared<const Node>(Node{Kind::compare, false, std::move(variable), op, rhs, {}}));
}

ConditionExpr ConditionExpr::truthy(std::string variable)
{
    if (variable.empty())
        throw ConstructionError("condition needs a variable name");
    return ConditionExpr(std::make_shared<const Node>(Node{Kind::truthy, false, std::move(variable), {}, 0, {}}));
}

ConditionExpr ConditionExpr::negate(ConditionExpr e)
{
    return ConditionExpr(std::make_shared<const Node>(Node{Kind::negation, false, {}, {}, 0, {std::move(e)}}));
}

ConditionExpr ConditionExpr::all_of(std::vector<ConditionExpr> es)
{
    if (es.size() == 1)
        return es.front();
    if (es.empty())
        return literal(true);
    return ConditionExpr(std::make_shared<const Node>(Node{Kind::conjunction, false, {}, {}, 0, std::move(es)}));
}

ConditionExpr ConditionExpr::any_of(std::vector<ConditionExpr> es)
{
    if (es.size() == 1)
        return es.front();
    if (es.empty())
        return literal(false);
    return ConditionExpr(std::make_shared<const Node>(Node{Kind::disjunction, false, {}, {}, 0, std::move(es)}));
}

bool ConditionExpr::evaluate(const InputState& x) const
{
    const Node& n = *node_;
    switch (n.kind) {
    case Kind::literal:
        return n.literal;
    case Kind::truthy:
        return x.at(n.variable) != 0;
    case Kind::compare: {
        const int lhs = x.at(n.variable);
        switch (n.op) {
        case CompareOp::eq: return lhs == n.rhs;
        case CompareOp::ne: return lhs != n.rhs;
        case CompareOp::lt: return lhs < n.rhs;
        case CompareOp::le: return lhs <= n.rhs;
        case CompareOp::gt: return lhs > n.rhs;
        case CompareOp::ge: return lhs >= n.rhs;
        }
        return false;
    }
    case Kind::negation:
        return !n.operands.front().evaluate(x);
    case Kind::conjunction:
        for (const auto& e : n.operands)
            if (!e.evaluate(x))
                return false;
        return true;
    case Kind::disjunction:
        for (const auto& e : n.operands)
            if (e.evaluate(x))
                return true;
        return false;
    }
    return false;
}

std::set<std::string> ConditionExpr::variables() const
{
    std::set<std::string> out;
    if (!node_->variable.empty())
        out.insert(node_->variable);
    for (const auto& e : node_->operands)
        out.merge(e.variables());
    return out;
}

ConditionExpr::Kind ConditionExpr::kind() const { return node_->kind; }
bool ConditionExpr::literal_value() const { return node_->literal; }
const std::string& ConditionExpr::variable() const { return node_->variable; }
CompareOp ConditionExpr::op() const { return node_->op; }
int ConditionExpr::rhs() const { return node_->rhs; }
const std::vector<ConditionExpr>& ConditionExpr::operands() const { return node_->operands; }

bool operator==(const ConditionExpr& a, const ConditionExpr& b)
{
    if (a.node_ == b.node_)
        return true;
    const auto& x = *a.node_;
    const auto& y = *b.node_;
    if (x.kind != y.kind)
        return false;
    switch (x.kind) {
    case ConditionExpr::Kind::literal:
        return x.literal == y.literal;
    case ConditionExpr::Kind::truthy:
        return x.variable == y.variable;
    case ConditionExpr::Kind::compare:
        return x.variable == y.variable && x.op == y.op && x.rhs == y.rhs;
    default:
        return x.operands == y.operands;
    }
}

ConditionExpr operator!(const ConditionExpr& e) { return ConditionExpr::negate(e); }
ConditionExpr operator&&(const ConditionExpr& a, const ConditionExpr& b) { return ConditionExpr::all_of({a, b}); }
ConditionExpr operator||(const ConditionExpr& a, const ConditionExpr& b) { return ConditionExpr::any_of({a, b}); }

namespace {

void render(const ConditionExpr& e, std::string& out);

void render_operand(const ConditionExpr& e, bool parens, std::string& out)
{
    if (parens)
        out += '(';
    render(e, out);
    if (parens)
        out += ')';
}

void render(const ConditionExpr& e, std::string& out)
{
    using K = ConditionExpr::Kind;
    switch (e.kind()) {
    case K::literal:
        out += e.literal_value() ? "true" : "false";
        return;
    case K::truthy:
        out += e.variable();
        return;
    case K::compare:
        out += e.variable();
        out += ' ';
        out += symbol(e.op());
        out += ' ';
        out += std::to_string(e.rhs());
        return;
    case K::negation: {
        const auto& inner = e.operands().front();
        out += "not ";
        render_operand(inner, inner.kind() == K::conjunction || inner.kind() == K::disjunction, out);
        return;
    }
    case K::conjunction:
    case K::disjunction: {
        const bool conj = e.kind() == K::conjunction;
        bool first = true;
        for (const auto& op : e.operands()) {
            if (!first)
                out += conj ? " and " : " or ";
            first = false;
            const bool parens = op.kind() == K::disjunction || (conj && op.kind() == K::conjunction);
            render_operand(op, parens, out);
        }
        return;
    }
    }
}

} // namespace

std::string to_string(const ConditionExpr& e)
{
    std::string out;
    render(e, out);
    return out;
}

bool evaluate_condition(const ConditionExpr& c, const InputState& x)
{
    return c.evaluate(x);
}

} // namespace kbt
