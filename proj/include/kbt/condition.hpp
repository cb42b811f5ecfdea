#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "kbt/input.hpp"

namespace kbt {

enum class CompareOp
{
    eq,
    ne,
    lt,
    le,
    gt,
    ge,
};

const char* symbol(CompareOp op);

// Immutable boolean expression over integer variable comparisons.
class ConditionExpr
{
public:
    enum class Kind
    {
        literal,
        compare,
        truthy, // bare variable: non-zero
        negation,
        conjunction,
        disjunction,
    };

    ConditionExpr(); // the true literal

    static ConditionExpr literal(bool value);
    static ConditionExpr compare(std::string variable, CompareOp op, int rhs);
    static ConditionExpr truthy(std::string variable);
    static ConditionExpr negate(ConditionExpr e);
    static ConditionExpr all_of(std::vector<ConditionExpr> es);
    static ConditionExpr any_of(std::vector<ConditionExpr> es);

    bool evaluate(const InputState& x) const;
    std::set<std::string> variables() const;

    Kind kind() const;
    bool literal_value() const;
    const std::string& variable() const;
    CompareOp op() const;
    int rhs() const;
    const std::vector<ConditionExpr>& operands() const;

    friend bool operator==(const ConditionExpr& a, const ConditionExpr& b);

private:
    struct Node;
    explicit ConditionExpr(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

ConditionExpr operator!(const ConditionExpr& e);
ConditionExpr operator&&(const ConditionExpr& a, const ConditionExpr& b);
ConditionExpr operator||(const ConditionExpr& a, const ConditionExpr& b);

// Model-language rendering: `battery < 10 and not door == 1`.
std::string to_string(const ConditionExpr& e);

bool evaluate_condition(const ConditionExpr& c, const InputState& x);

} // namespace kbt
