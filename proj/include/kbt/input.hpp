#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace kbt {

enum class Visibility
{
    visible,
    // Not part of the observable environment. Hidden variables model
    // implicit memory and are never enumerated by the checkers.
    hidden,
};

// Snapshot of named integer variables (booleans are 0/1).
class InputState
{
public:
    InputState() = default;
    InputState(std::initializer_list<std::pair<const std::string, int>> bindings);

    void set(const std::string& name, int value, Visibility vis = Visibility::visible);
    bool binds(const std::string& name) const { return values_.count(name) != 0; }
    std::optional<int> get(const std::string& name) const;
    // Throws EvaluationError naming the variable when unbound.
    int at(const std::string& name) const;
    bool is_hidden(const std::string& name) const { return hidden_.count(name) != 0; }

    const std::map<std::string, int>& bindings() const noexcept { return values_; }
    InputState visible_part() const;
    // Copy of *this with every binding of other added (other wins on clashes).
    InputState merged(const InputState& other) const;

    friend bool operator==(const InputState&, const InputState&) = default;
    friend auto operator<=>(const InputState&, const InputState&) = default;

private:
    std::map<std::string, int> values_;
    std::set<std::string> hidden_;
};

// "{battery:5, door:0}"; hidden variables are prefixed with '#'.
std::string to_string(const InputState& x);

struct VariableDecl
{
    std::string name;
    int lo = 0;
    int hi = 1;
    Visibility visibility = Visibility::visible;
    // Starting value of a hidden variable (ignored for visible ones).
    int initial = 0;

    bool is_bool() const { return lo == 0 && hi == 1; }
    friend bool operator==(const VariableDecl&, const VariableDecl&) = default;
};

using History = std::vector<InputState>;

std::string to_string(const History& h);

// Finite, non-empty list of pairwise distinct visible input states.
class InputAlphabet
{
public:
    explicit InputAlphabet(std::vector<InputState> states);

    // Cartesian product of the listed per-variable values; the last
    // variable varies fastest.
    static InputAlphabet product(const std::vector<std::pair<std::string, std::vector<int>>>& axes);

    const std::vector<InputState>& states() const noexcept { return states_; }
    std::size_t size() const noexcept { return states_.size(); }
    std::size_t index_of(const InputState& x) const;

private:
    std::vector<InputState> states_;
};

} // namespace kbt
