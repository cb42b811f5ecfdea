#include "kbt/input.hpp"

#include <algorithm>
#include <sstream>

#include "kbt/error.hpp"

namespace kbt {

InputState::InputState(std::initializer_list<std::pair<const std::string, int>> bindings)
    : values_(bindings)
{
}

void InputState::set(const std::string& name, int value, Visibility vis)
{
    values_[name] = value;
    if (vis == Visibility::hidden)
        hidden_.insert(name);
    else
        hidden_.erase(name);
}

std::optional<int> InputState::get(const std::string& name) const
{
    auto it = values_.find(name);
    if (it == values_.end())
        return std::nullopt;
    return it->second;
}

int InputState::at(const std::string& name) const
{
    auto it = values_.find(name);
    if (it == values_.end())
        throw EvaluationError(name, "unbound variable '" + name + "'");
    return it->second;
}

InputState InputState::visible_part() const
{
    InputState out;
    for (const auto& [k, v] : values_)
        if (!is_hidden(k))
            out.values_.emplace(k, v);
    return out;
}

InputState InputState::merged(const InputState& other) const
{
    InputState out = *this;
    for (const auto& [k, v] : other.values_)
        out.set(k, v, other.is_hidden(k) ? Visibility::hidden : Visibility::visible);
    return out;
}

std::string to_string(const InputState& x)
{
    std::ostringstream out;
    out << '{';
    bool first = true;
    for (const auto& [k, v] : x.bindings()) {
        if (!first)
            out << ", ";
        first = false;
        if (x.is_hidden(k))
            out << '#';
        out << k << ':' << v;
    }
    out << '}';
    return out.str();
}

std::string to_string(const History& h)
{
    std::string out = "[";
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (i)
            out += ", ";
        out += to_string(h[i]);
    }
    return out + "]";
}

InputAlphabet::InputAlphabet(std::vector<InputState> states) : states_(std::move(states))
{
    if (states_.empty())
        throw ConstructionError("input alphabet must not be empty");
    std::vector<InputState> sorted = states_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ConstructionError("input alphabet contains duplicate states");
    for (const auto& x : states_)
        if (x.visible_part() != x)
            throw ConstructionError("input alphabet may only bind visible variables");
}

InputAlphabet InputAlphabet::product(const std::vector<std::pair<std::string, std::vector<int>>>& axes)
{
    std::vector<InputState> states{InputState{}};
    for (const auto& [name, values] : axes) {
        if (values.empty())
            throw ConstructionError("alphabet axis '" + name + "' has no values");
        std::vector<InputState> next;
        next.reserve(states.size() * values.size());
        for (const auto& partial : states)
            for (int v : values) {
                InputState x = partial;
                x.set(name, v);
                next.push_back(std::move(x));
            }
        states = std::move(next);
    }
    return InputAlphabet(std::move(states));
}

std::size_t InputAlphabet::index_of(const InputState& x) const
{
    auto it = std::find(states_.begin(), states_.end(), x);
    if (it == states_.end())
        throw Error("input " + to_string(x) + " is not in the alphabet");
    return static_cast<std::size_t>(it - states_.begin());
}

} // namespace kbt
