#pragma once

#include <set>
#include <utility>
#include <vector>

#include "kbt/condition.hpp"
#include "kbt/value.hpp"

namespace kbt {

// Maps any input to the value an action returns there. The first matching
// clause wins; the fallback makes the rule total.
class ReturnRule
{
public:
    struct Clause
    {
        ConditionExpr when;
        ValueName value;
        friend bool operator==(const Clause&, const Clause&) = default;
    };

    ReturnRule() = default; // always the anonymous unhandled value
    ReturnRule(std::vector<Clause> clauses, ReturnValue fallback);

    static ReturnRule constant(ReturnValue v) { return ReturnRule({}, std::move(v)); }

    ReturnValue evaluate(const InputState& x) const;
    // Every value the rule can produce, fallback included.
    std::set<ReturnValue> possible_values() const;
    std::set<std::string> variables() const;
    ReturnRule with_success_failure_swapped() const;

    const std::vector<Clause>& clauses() const noexcept { return clauses_; }
    const ReturnValue& fallback() const noexcept { return fallback_; }

    friend bool operator==(const ReturnRule&, const ReturnRule&) = default;

private:
    std::vector<Clause> clauses_;
    ReturnValue fallback_;
};

// Integer analogue of ReturnRule used to score utility-node children.
class ScoreRule
{
public:
    struct Clause
    {
        ConditionExpr when;
        long score = 0;
        friend bool operator==(const Clause&, const Clause&) = default;
    };

    ScoreRule() = default;
    ScoreRule(std::vector<Clause> clauses, long fallback) : clauses_(std::move(clauses)), fallback_(fallback) {}

    long evaluate(const InputState& x) const;

    const std::vector<Clause>& clauses() const noexcept { return clauses_; }
    long fallback() const noexcept { return fallback_; }

    friend bool operator==(const ScoreRule&, const ScoreRule&) = default;

private:
    std::vector<Clause> clauses_;
    long fallback_ = 0;
};

} // namespace kbt
