// Prints one PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "kbt/analysis.hpp"
#include "kbt/dsl.hpp"
#include "kbt/error.hpp"
#include "kbt/scenarios.hpp"
#include "support/oracles.hpp"

using namespace kbt;

namespace {

struct Verdict
{
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& why)
    {
        if (!cond && ok) {
            ok = false;
            detail = why;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1 ---------------------------------------------------------------------------
Verdict bt_correspondence()
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    oracle::BtGen gen(1, 3);
    const auto alphabet = oracle::bool_alphabet(3);
    std::size_t trees = 0;
    std::size_t cases = 0;
    while (trees < 1000) {
        const auto bt = gen.tree(15);
        if (oracle::count(*bt) > 15)
            continue;
        ++trees;
        const KBTree t(ValueSet::classic(), oracle::to_node(*bt));
        for (const auto& x : alphabet.states()) {
            ++cases;
            const auto expected = oracle::run(*bt, x);
            const auto got = tick(t, x).selection;
            v.require(got.action.str() == expected.last_leaf && got.value == oracle::to_value(expected.status),
                      "disagreement at tree " + std::to_string(trees) + " input " + to_string(x));
        }
    }
    const double s = seconds_since(t0);
    v.require(s < 10.0, "took " + std::to_string(s) + " s");
    if (v.ok)
        v.detail = std::to_string(trees) + " trees x 8 inputs, " + std::to_string(cases) + " agree, " +
                   std::to_string(s).substr(0, 5) + " s";
    return v;
}

// 2 ---------------------------------------------------------------------------
Verdict tr_is_one_bt()
{
    Verdict v;
    std::mt19937_64 rng(2);
    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    const auto alphabet = oracle::bool_alphabet(3);
    std::size_t covered = 0;
    std::size_t uncovered = 0;
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<TrRule> rules;
        const int n = 1 + pick(6);
        for (int i = 0; i < n; ++i)
            rules.push_back({oracle::random_condition(rng, 3), ActionRef(ActionId("a" + std::to_string(pick(4))))});
        if (pick(2))
            rules.back().when = ConditionExpr::literal(true);
        const TeleoReactive tr(rules);
        const KBTree t = tr_to_kbt(tr);
        for (const auto& x : alphabet.states()) {
            const Selection got = tick(t, x).selection;
            try {
                const Selection want = tr_select(tr, x);
                ++covered;
                v.require(got.action == want.action && !got.handled, "mismatch on " + to_string(x));
            } catch (const NoRuleError&) {
                // No rule holds: every child reports PrecondFalse.
                ++uncovered;
                v.require(got.handled && got.value == precond_false_value(), "uncovered input selected a rule");
            }
        }
    }
    if (v.ok)
        v.detail = "500 programs, " + std::to_string(covered) + " selections agree, " + std::to_string(uncovered) +
                   " inputs with no rule return PrecondFalse";
    return v;
}

// 3 ---------------------------------------------------------------------------
Verdict reactiveness()
{
    Verdict v;
    std::mt19937_64 rng(3);
    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    const auto alphabet = oracle::bool_alphabet(3);
    std::size_t memoryless = 0;

    oracle::BtGen gen(3, 3, true);
    for (int i = 0; i < 40; ++i) {
        auto node = oracle::to_node(*gen.tree(12));
        // Wrap some trees in stateless extension nodes.
        if (i % 4 == 1)
            node = parallel(1, {node, oracle::to_node(*gen.tree(4))});
        if (i % 4 == 2)
            node = utility({node, oracle::to_node(*gen.tree(4))},
                           {ScoreRule({{ConditionExpr::compare("v0", CompareOp::eq, 1), 5}}, 1), ScoreRule({}, 3)});
        const KBTree t(ValueSet::classic(), node);
        v.require(check_reactive(t, alphabet, 3).reactive, "memoryless tree flagged");
        ++memoryless;
    }
    std::function<DtPtr(int)> grow = [&](int depth) -> DtPtr {
        if (depth > 2 || pick(3) == 0)
            return dt_leaf("A" + std::to_string(pick(4)));
        return dt_branch(oracle::random_condition(rng, 3), grow(depth + 1), grow(depth + 1));
    };
    for (int i = 0; i < 20; ++i) {
        const DecisionTree d(grow(0));
        v.require(check_reactive(d, alphabet, 3).reactive, "decision tree flagged");
        ++memoryless;
    }
    for (int i = 0; i < 20; ++i) {
        std::vector<TrRule> rules;
        for (int r = 0; r < 3; ++r)
            rules.push_back({oracle::random_condition(rng, 3), ActionRef(ActionId("a" + std::to_string(r)))});
        rules.push_back({ConditionExpr::literal(true), ActionRef(ActionId("a3"))});
        const TeleoReactive tr(rules);
        v.require(check_reactive(tr, alphabet, 3).reactive, "TR flagged");
        v.require(check_reactive(tr_to_kbt(tr), alphabet, 3).reactive, "1-BT flagged");
        memoryless += 2;
    }

    const Model chat = bundled_model("chattering");
    const Model mem = bundled_model("memory");
    const Model ext = bundled_model("extensions");
    const auto small = chat.alphabet("BatterySmall");
    const auto results = InputAlphabet::product({{"r1", {0, 1, 2}}, {"r2", {0, 1}}, {"r3", {0}}});
    const auto grips = ext.alphabet("Grips");
    struct Fixture
    {
        const char* name;
        AsmPtr m;
        const InputAlphabet* a;
    };
    const std::vector<Fixture> stateful{
        {"Latch", chat.asm_named("Latch"), &small},
        {"Moded", chat.asm_named("Moded"), &small},
        {"MemSeq", mem.asm_named("MemSeq"), &results},
        {"Retry", ext.asm_named("Retry"), &grips},
        {"Twice", ext.asm_named("Twice"), &grips},
    };
    std::string witnesses;
    for (const auto& f : stateful) {
        v.require(f.a->size() <= 8, "alphabet too large");
        const auto r = check_reactive(*f.m, *f.a, 3);
        v.require(!r.reactive && r.witness && r.exhaustive, std::string(f.name) + " not flagged");
        if (r.witness) {
            v.require(replays(*f.m, *r.witness), std::string(f.name) + " witness does not replay");
            witnesses += std::string(witnesses.empty() ? "" : ", ") + f.name + " (" +
                         std::to_string(std::max(r.witness->first.size(), r.witness->second.size())) + " steps)";
        }
    }
    if (v.ok)
        v.detail = std::to_string(memoryless) + " memoryless ASMs reactive at L=3; witnesses replay for " + witnesses;
    return v;
}

// 4 ---------------------------------------------------------------------------
Verdict memory_emulation()
{
    Verdict v;
    const Model m = bundled_model("memory");
    const auto r = check_equivalence(*m.asm_named("MemSeq"), *m.asm_named("Flags"), m.alphabet("Results"), 4);
    v.require(r.exhaustive, "search was not exhaustive");
    v.require(r.equivalent, to_string(r));
    if (v.ok)
        v.detail = "equivalent on all " + std::to_string(r.histories) + " histories up to length 4";
    return v;
}

// 5 ---------------------------------------------------------------------------
Verdict chattering()
{
    Verdict v;
    const auto open = run_chattering_scripted(40);
    const auto closed = run_chattering(40);
    for (const auto* run : {&open, &closed}) {
        v.require(run->reactive_switches >= 10, "Flat switched only " + std::to_string(run->reactive_switches));
        v.require(run->layered_switches <= 2, "Moded switched " + std::to_string(run->layered_switches));
    }
    // The closed-loop battery hovers in 9..11 under Flat.
    for (const auto& s : closed.reactive.steps)
        v.require(s.input.at("battery") >= 9 && s.input.at("battery") <= 11, "battery left 9..11");
    if (v.ok)
        v.detail = "scripted 11/9: Flat " + std::to_string(open.reactive_switches) + " vs Moded " +
                   std::to_string(open.layered_switches) + "; closed loop: Flat " +
                   std::to_string(closed.reactive_switches) + " vs Moded " + std::to_string(closed.layered_switches);
    return v;
}

// 6 ---------------------------------------------------------------------------
Verdict wall_following()
{
    Verdict v;
    const auto s = wall_follow_scenario();
    const SimTrace r = run_walk(s, s.reactive, 50);
    const WalkReport rr = analyse_walk(*s.world, r);
    v.require(rr.repeated_pose.has_value(), "reactive agent never revisits a pose");
    if (rr.repeated_pose) {
        const auto [a, b] = *rr.repeated_pose;
        v.require(b <= 50, "revisit after 50 steps");
        // Replay the walk on a fresh world and compare the full windows.
        GridWorld w = *s.world;
        std::vector<std::vector<std::vector<int>>> windows{w.window()};
        for (const auto& st : r.steps) {
            w.step(st.command);
            windows.push_back(w.window());
        }
        v.require(windows[a] == windows[b], "observations differ at the return pose");
        if (v.ok)
            v.detail = "reactive: step " + std::to_string(b) + " repeats step " + std::to_string(a) +
                       " (25-cell match), " + std::to_string(rr.wall_cells_visited) + "/" +
                       std::to_string(rr.wall_cells) + " wall cells";
    }
    v.require(!rr.completed_at, "reactive agent completed the perimeter");

    const SimTrace f = run_walk(s, s.fsm, 200, true);
    const WalkReport fr = analyse_walk(*s.world, f);
    v.require(fr.completed_at && *fr.completed_at <= 200, "FSM agent did not complete within 200 steps");
    v.require(fr.wall_cells_visited == fr.wall_cells, "FSM agent missed wall cells");
    if (v.ok)
        v.detail += "; FSM: back at start after " + std::to_string(*fr.completed_at) + " steps, " +
                    std::to_string(fr.wall_cells_visited) + "/" + std::to_string(fr.wall_cells) + " wall cells";
    return v;
}

// 7 ---------------------------------------------------------------------------
Verdict door()
{
    Verdict v;
    const auto d = door_scenario();
    const auto beliefs = d.model.alphabet("Beliefs");
    std::size_t unknown = 0;
    for (const auto& x : beliefs.states()) {
        if (x.at("knowledge") != 2)
            continue;
        ++unknown;
        v.require(tick(*d.handling, x).selection.action.str() != "Unlock", "handling tree selects Unlock");
        v.require(tick(*d.ignoring, x).selection.action.str() == "Unlock", "ignoring tree skips Unlock");
    }
    // Closed loop in the door world until knowledge is resolved.
    const SimTrace t = simulate(*d.world, d.model.stack("HandlingStack"), SimOptions{10, {}, {}, {}});
    for (const auto& s : t.steps)
        if (s.input.at("knowledge") == 2)
            v.require(s.command.str() != "Unlock", "handling stack issued Unlock while uncertain");
    for (const auto& tree : {d.handling, d.ignoring}) {
        const auto r = check_reactive(*tree, beliefs, 3);
        v.require(r.reactive && r.exhaustive, "door tree flagged non-reactive");
    }
    if (v.ok)
        v.detail = std::to_string(unknown) + " uncertain states: handling never Unlock, ignoring always Unlock; "
                   "both reactive over " + std::to_string(beliefs.size()) + " states at L=3";
    return v;
}

// 8 ---------------------------------------------------------------------------
Verdict de_morgan()
{
    Verdict v;
    oracle::BtGen gen(8, 3, true);
    const auto alphabet = oracle::bool_alphabet(3);
    CheckOptions opts;
    opts.compare_values = true;
    std::size_t negations = 0;
    for (int i = 0; i < 200; ++i) {
        const KBTree t(ValueSet::classic(), negation(oracle::to_node(*gen.tree(12))));
        negations += count_decorators(t, DecoratorKind::negation);
        const KBTree p = push_down_negations(t);
        v.require(count_decorators(p, DecoratorKind::negation) == 0, "negation survived");
        const auto r = check_equivalence(t, p, alphabet, 2, opts);
        v.require(r.equivalent && r.exhaustive, "trace differs: " + to_string(r));
    }
    if (v.ok)
        v.detail = "200 trees, " + std::to_string(negations) + " negations removed, traces equal with values";
    return v;
}

// 9 ---------------------------------------------------------------------------
Verdict parallel_thresholds()
{
    Verdict v;
    using oracle::Status;
    const Status statuses[] = {Status::success, Status::failure, Status::running};
    std::size_t combos = 0;
    for (unsigned n = 1; n <= 4; ++n) {
        std::vector<std::pair<std::string, std::vector<int>>> axes;
        std::vector<NodePtr> kids;
        for (unsigned i = 0; i < n; ++i) {
            const std::string var = "c" + std::to_string(i);
            axes.push_back({var, {0, 1, 2}});
            kids.push_back(action("P" + std::to_string(i),
                                  ReturnRule({{ConditionExpr::compare(var, CompareOp::eq, 0), success_value()},
                                              {ConditionExpr::compare(var, CompareOp::eq, 1), failure_value()}},
                                             std::nullopt)));
        }
        const auto all = InputAlphabet::product(axes);
        for (unsigned m = 1; m <= n; ++m) {
            const KBTree t(ValueSet::classic(), parallel(m, kids));
            for (const auto& x : all.states()) {
                std::vector<Status> kv;
                for (unsigned i = 0; i < n; ++i)
                    kv.push_back(statuses[x.at("c" + std::to_string(i))]);
                ++combos;
                v.require(tick(t, x).selection.value == oracle::parallel_value(kv, m),
                          "N=" + std::to_string(n) + " M=" + std::to_string(m) + " at " + to_string(x));
            }
        }
    }
    if (v.ok)
        v.detail = std::to_string(combos) + " (N, M, child values) combinations match the counting oracle";
    return v;
}

// 10 --------------------------------------------------------------------------
Verdict determinism()
{
    Verdict v;
    std::size_t models = 0;
    std::size_t dots = 0;
    std::size_t traces = 0;
    for (const auto& name : bundled_models()) {
        const Model m = bundled_model(name);
        const std::string text = format_model(m);
        const Model again = parse_model(text);
        v.require(again == m, name + " does not round trip");
        v.require(format_model(again) == text, name + " format is not stable");
        ++models;
        for (const auto& a : m.asm_names()) {
            v.require(export_dot(*m.asm_named(a), a) == export_dot(*again.asm_named(a), a), "dot differs for " + a);
            ++dots;
        }
        for (const auto& w : m.world_names()) {
            for (const auto& decl : m.declarations()) {
                const auto* s = std::get_if<StackDecl>(&decl.body);
                if (!s)
                    continue;
                SimOptions opts{60, 42, {}, {}};
                std::string first;
                std::string second;
                try {
                    first = to_jsonl(simulate(*m.world(w), m.stack(s->name), opts));
                    second = to_jsonl(simulate(*again.world(w), again.stack(s->name), opts));
                } catch (const Error&) {
                    continue; // stack and world do not fit together
                }
                v.require(!first.empty() && first == second, "trace differs for " + s->name);
                ++traces;
            }
        }
    }
    if (v.ok)
        v.detail = std::to_string(models) + " fixtures round trip; " + std::to_string(dots) + " DOT exports and " +
                   std::to_string(traces) + " seeded traces byte-identical";
    return v;
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"k-BT/BT correspondence", bt_correspondence},
        {"TR = 1-BT", tr_is_one_bt},
        {"reactiveness", reactiveness},
        {"memory-node emulation", memory_emulation},
        {"chattering", chattering},
        {"wall following", wall_following},
        {"door", door},
        {"De Morgan", de_morgan},
        {"parallel thresholds", parallel_thresholds},
        {"tooling determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = Verdict{false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %2zu %s: %s\n", v.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
        failed += !v.ok;
    }
    return failed == 0 ? 0 : 1;
}
