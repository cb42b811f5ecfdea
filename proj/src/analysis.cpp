#include "kbt/analysis.hpp"

#include <map>
#include <random>

#include "kbt/error.hpp"

namespace kbt {

std::size_t history_count(std::size_t alphabet, std::size_t max_len)
{
    std::size_t total = 0;
    std::size_t level = 1;
    for (std::size_t l = 0; l < max_len; ++l) {
        if (level > SIZE_MAX / std::max<std::size_t>(alphabet, 1))
            return SIZE_MAX;
        level *= alphabet;
        if (total > SIZE_MAX - level)
            return SIZE_MAX;
        total += level;
    }
    return total;
}

namespace {

void require_bounds(const InputAlphabet& a, std::size_t max_len)
{
    if (max_len < 1)
        throw Error("history length bound must be at least 1");
    if (a.size() < 1)
        throw Error("alphabet must not be empty");
}

// Returns false when exhaustive search is not allowed and sampling is off.
bool use_exhaustive(const InputAlphabet& a, std::size_t max_len, const CheckOptions& opts)
{
    if (opts.samples) {
        if (!opts.seed)
            throw Error("sampling needs an explicit seed");
        return false;
    }
    const std::size_t n = history_count(a.size(), max_len);
    if (n > opts.budget)
        throw BudgetError(std::to_string(a.size()) + "^" + std::to_string(max_len) + " histories exceed the budget of " +
                          std::to_string(opts.budget) + "; enable sampling with a seed");
    return true;
}

// Calls visit(history, selections...) for every history in breadth-first
// order, stepping one cloned session per ASM. Stops when visit returns true.
template <class Visit>
std::size_t enumerate(const std::vector<const Asm*>& ms, const InputAlphabet& a, std::size_t max_len, Visit&& visit)
{
    struct Entry
    {
        std::vector<std::unique_ptr<Session>> sessions;
        History history;
    };
    std::vector<Entry> frontier(1);
    for (const auto* m : ms)
        frontier[0].sessions.push_back(m->start());
    std::size_t count = 0;
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<Entry> next;
        for (const auto& e : frontier) {
            for (std::size_t i = 0; i < a.size(); ++i) {
                Entry child;
                child.history = e.history;
                child.history.push_back(a.states()[i]);
                std::vector<Selection> sels;
                for (const auto& s : e.sessions) {
                    child.sessions.push_back(s->clone());
                    sels.push_back(child.sessions.back()->step(a.states()[i]));
                }
                ++count;
                if (visit(child.history, i, sels))
                    return count;
                if (len < max_len)
                    next.push_back(std::move(child));
            }
        }
        frontier = std::move(next);
    }
    return count;
}

template <class Visit>
std::size_t sample(const std::vector<const Asm*>& ms, const InputAlphabet& a, std::size_t max_len,
                   const CheckOptions& opts, Visit&& visit)
{
    std::mt19937_64 rng(*opts.seed);
    std::uniform_int_distribution<std::size_t> pick_len(1, max_len);
    std::uniform_int_distribution<std::size_t> pick_input(0, a.size() - 1);
    std::size_t count = 0;
    for (std::size_t n = 0; n < *opts.samples; ++n) {
        const std::size_t len = pick_len(rng);
        std::vector<std::unique_ptr<Session>> sessions;
        for (const auto* m : ms)
            sessions.push_back(m->start());
        History h;
        for (std::size_t l = 0; l < len; ++l) {
            const std::size_t i = pick_input(rng);
            h.push_back(a.states()[i]);
            std::vector<Selection> sels;
            for (auto& s : sessions)
                sels.push_back(s->step(a.states()[i]));
            ++count;
            if (visit(h, i, sels))
                return count;
        }
    }
    return count;
}

bool same(const Selection& a, const Selection& b, bool compare_values)
{
    return a.action == b.action && (!compare_values || a.value == b.value);
}

} // namespace

ReactivenessReport check_reactive(const Asm& m, const InputAlphabet& a, std::size_t max_len, const CheckOptions& opts)
{
    require_bounds(a, max_len);
    ReactivenessReport report;
    report.bound = max_len;
    report.exhaustive = use_exhaustive(a, max_len, opts);
    std::map<std::size_t, std::pair<History, Selection>> first;
    auto visit = [&](const History& h, std::size_t last, const std::vector<Selection>& sels) {
        auto [it, fresh] = first.try_emplace(last, h, sels[0]);
        if (fresh || it->second.second.action == sels[0].action)
            return false;
        report.reactive = false;
        report.witness = ReactivenessReport::Witness{it->second.first, h, it->second.second, sels[0]};
        return true;
    };
    const std::vector<const Asm*> ms{&m};
    report.histories = report.exhaustive ? enumerate(ms, a, max_len, visit) : sample(ms, a, max_len, opts, visit);
    return report;
}

EquivalenceReport check_equivalence(const Asm& m1, const Asm& m2, const InputAlphabet& a, std::size_t max_len,
                                    const CheckOptions& opts)
{
    require_bounds(a, max_len);
    EquivalenceReport report;
    report.bound = max_len;
    report.exhaustive = use_exhaustive(a, max_len, opts);
    auto visit = [&](const History& h, std::size_t, const std::vector<Selection>& sels) {
        if (same(sels[0], sels[1], opts.compare_values))
            return false;
        report.equivalent = false;
        report.witness = EquivalenceReport::Witness{h, sels[0], sels[1]};
        return true;
    };
    const std::vector<const Asm*> ms{&m1, &m2};
    report.histories = report.exhaustive ? enumerate(ms, a, max_len, visit) : sample(ms, a, max_len, opts, visit);
    return report;
}

bool replays(const Asm& m, const ReactivenessReport::Witness& w)
{
    if (w.first.empty() || w.second.empty() || !(w.first.back() == w.second.back()))
        return false;
    const Selection s1 = run_asm(m, w.first);
    const Selection s2 = run_asm(m, w.second);
    return s1 == w.first_selection && s2 == w.second_selection && s1.action != s2.action;
}

bool replays(const Asm& m1, const Asm& m2, const EquivalenceReport::Witness& w, bool compare_values)
{
    if (w.history.empty())
        return false;
    const Selection s1 = run_asm(m1, w.history);
    const Selection s2 = run_asm(m2, w.history);
    return s1 == w.first && s2 == w.second && !same(s1, s2, compare_values);
}

std::size_t count_switches(const std::vector<Selection>& trace)
{
    std::size_t n = 0;
    for (std::size_t i = 1; i < trace.size(); ++i)
        if (trace[i].action != trace[i - 1].action)
            ++n;
    return n;
}

std::string to_string(const ReactivenessReport& r)
{
    std::string mode = r.exhaustive ? "exhaustive" : "sampled";
    std::string out = (r.reactive ? "reactive" : "non-reactive");
    out += " (" + mode + ", max length " + std::to_string(r.bound) + ", " + std::to_string(r.histories) +
           " histories)";
    if (r.witness) {
        out += "\n  " + to_string(r.witness->first) + " -> " + to_string(r.witness->first_selection);
        out += "\n  " + to_string(r.witness->second) + " -> " + to_string(r.witness->second_selection);
    }
    return out;
}

std::string to_string(const EquivalenceReport& r)
{
    std::string mode = r.exhaustive ? "exhaustive" : "sampled";
    std::string out = (r.equivalent ? "equivalent" : "distinguished");
    out += " (" + mode + ", max length " + std::to_string(r.bound) + ", " + std::to_string(r.histories) +
           " histories)";
    if (r.witness) {
        out += "\n  " + to_string(r.witness->history);
        out += "\n  first:  " + to_string(r.witness->first);
        out += "\n  second: " + to_string(r.witness->second);
    }
    return out;
}

} // namespace kbt
