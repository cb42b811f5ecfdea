#include "kbt/return_rule.hpp"

namespace kbt {

ReturnRule::ReturnRule(std::vector<Clause> clauses, ReturnValue fallback)
    : clauses_(std::move(clauses)), fallback_(std::move(fallback))
{
}

ReturnValue ReturnRule::evaluate(const InputState& x) const
{
    for (const auto& c : clauses_)
        if (c.when.evaluate(x))
            return c.value;
    return fallback_;
}

std::set<ReturnValue> ReturnRule::possible_values() const
{
    std::set<ReturnValue> out;
    for (const auto& c : clauses_)
        out.insert(c.value);
    out.insert(fallback_);
    return out;
}

std::set<std::string> ReturnRule::variables() const
{
    std::set<std::string> out;
    for (const auto& c : clauses_)
        out.merge(c.when.variables());
    return out;
}

namespace {

ValueName swapped(const ValueName& v)
{
    if (v == success_value())
        return failure_value();
    if (v == failure_value())
        return success_value();
    return v;
}

} // namespace

ReturnRule ReturnRule::with_success_failure_swapped() const
{
    ReturnRule out = *this;
    for (auto& c : out.clauses_)
        c.value = swapped(c.value);
    if (out.fallback_)
        out.fallback_ = swapped(*out.fallback_);
    return out;
}

long ScoreRule::evaluate(const InputState& x) const
{
    for (const auto& c : clauses_)
        if (c.when.evaluate(x))
            return c.score;
    return fallback_;
}

} // namespace kbt
