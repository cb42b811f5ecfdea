#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kbt/asm.hpp"
#include "kbt/blackboard.hpp"
#include "kbt/classic.hpp"
#include "kbt/tree.hpp"

namespace kbt {

struct CheckOptions
{
    // Largest number of histories enumerated before giving up on exhaustive search.
    std::size_t budget = 1'000'000;
    // Random histories to draw instead of enumerating. Requires seed.
    std::optional<std::size_t> samples;
    std::optional<std::uint64_t> seed;
    // check_equivalence only: also compare return values.
    bool compare_values = false;
};

struct ReactivenessReport
{
    struct Witness
    {
        History first;
        History second;
        Selection first_selection;
        Selection second_selection;
    };

    bool reactive = true;
    std::optional<Witness> witness;
    std::size_t bound = 0;
    std::size_t histories = 0;
    bool exhaustive = true;
};

struct EquivalenceReport
{
    struct Witness
    {
        History history;
        Selection first;
        Selection second;
    };

    bool equivalent = true;
    std::optional<Witness> witness;
    std::size_t bound = 0;
    std::size_t histories = 0;
    bool exhaustive = true;
};

// Searches histories of length 1..max_len over the alphabet for two that end
// in the same input but select different actions. Shorter histories are
// explored first, so a witness is as short as the search allows.
ReactivenessReport check_reactive(const Asm& m, const InputAlphabet& a, std::size_t max_len,
                                  const CheckOptions& opts = {});

// Compares selected actions of m1 and m2 on every history up to max_len.
EquivalenceReport check_equivalence(const Asm& m1, const Asm& m2, const InputAlphabet& a, std::size_t max_len,
                                    const CheckOptions& opts = {});

// Number of histories of length 1..max_len: sum of |a|^l.
std::size_t history_count(std::size_t alphabet, std::size_t max_len);

// Replays the witness with run_asm and confirms the divergence.
bool replays(const Asm& m, const ReactivenessReport::Witness& w);
bool replays(const Asm& m1, const Asm& m2, const EquivalenceReport::Witness& w, bool compare_values = false);

// Adjacent pairs with a different action.
std::size_t count_switches(const std::vector<Selection>& trace);

std::string to_string(const ReactivenessReport& r);
std::string to_string(const EquivalenceReport& r);

// Deterministic Graphviz text.
std::string export_dot(const KBTree& t, const std::string& name = "tree");
std::string export_dot(const Fsm& f, const std::string& name = "fsm");
std::string export_dot(const DecisionTree& d, const std::string& name = "dt");
std::string export_dot(const TeleoReactive& t, const std::string& name = "tr");
std::string export_dot(const BlackboardTree& b, const std::string& name = "blackboard");
// Dispatches on the dynamic kind; throws Error for unsupported ASMs.
std::string export_dot(const Asm& m, const std::string& name);

} // namespace kbt
