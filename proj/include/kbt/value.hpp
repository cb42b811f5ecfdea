#pragma once

#include <compare>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kbt/error.hpp"

namespace kbt {

// Non-empty identifier tagged by what it names, so an action cannot be
// passed where a value is expected.
template <typename Tag>
class Name
{
public:
    Name() = default;
    explicit Name(std::string s) : name_(std::move(s))
    {
        if (name_.empty())
            throw ConstructionError("identifier must not be empty");
    }

    const std::string& str() const noexcept { return name_; }
    bool empty() const noexcept { return name_.empty(); }

    friend auto operator<=>(const Name&, const Name&) = default;
    friend bool operator==(const Name&, const Name&) = default;

private:
    std::string name_;
};

struct ActionTag {};
struct ValueTag {};

using ActionId = Name<ActionTag>;
using ValueName = Name<ValueTag>;

// A value produced by a tick. std::nullopt is the anonymous value that no
// structure handles (what classical trees call Running).
using ReturnValue = std::optional<ValueName>;

inline const ValueName& success_value()
{
    static const ValueName v{"Success"};
    return v;
}

inline const ValueName& failure_value()
{
    static const ValueName v{"Failure"};
    return v;
}

// The command a world receives when a selection has no actuation.
inline const ActionId& noop_action()
{
    static const ActionId a{"NoOp"};
    return a;
}

std::string to_string(const ReturnValue& v);

// Ordered list of the k values a tree has control nodes for.
class ValueSet
{
public:
    ValueSet() = default;
    explicit ValueSet(std::vector<ValueName> values);

    static ValueSet classic(); // {Success, Failure}

    const std::vector<ValueName>& values() const noexcept { return values_; }
    std::size_t k() const noexcept { return values_.size(); }
    bool contains(const ValueName& v) const;
    bool contains(const ReturnValue& v) const { return v && contains(*v); }
    bool has_success_failure() const;

    friend bool operator==(const ValueSet&, const ValueSet&) = default;

private:
    std::vector<ValueName> values_;
};

enum class LeafKind
{
    action,
    condition,
    // A stateful decorator answered without ticking its child.
    latched,
};

struct Selection
{
    ActionId action;
    ReturnValue value;
    // value is inside the selecting structure's ValueSet
    bool handled = false;
    LeafKind kind = LeafKind::action;

    friend bool operator==(const Selection&, const Selection&) = default;
};

// "Recharge/~" for an anonymous unhandled value, "Unlock/~Unknown" for a
// named unhandled one, "A/Success" for a handled one.
std::string to_string(const Selection& s);

} // namespace kbt

template <typename Tag>
struct std::hash<kbt::Name<Tag>>
{
    std::size_t operator()(const kbt::Name<Tag>& n) const noexcept
    {
        return std::hash<std::string>{}(n.str());
    }
};
