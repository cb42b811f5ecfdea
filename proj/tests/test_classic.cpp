#include "doctest.h"

#include <random>

#include "kbt/analysis.hpp"
#include "kbt/classic.hpp"
#include "kbt/dsl.hpp"
#include "kbt/error.hpp"
#include "support/oracles.hpp"

using namespace kbt;

namespace {

ConditionExpr eq(const char* v, int n) { return ConditionExpr::compare(v, CompareOp::eq, n); }

Fsm moded()
{
    return Fsm({"OtherTask", "Recharging"}, "OtherTask",
               {{"OtherTask", ConditionExpr::compare("battery", CompareOp::lt, 10), "Recharging"},
                {"Recharging", eq("battery", 100), "OtherTask"}},
               {{"OtherTask", ActionRef(ActionId("OtherTask"))}, {"Recharging", ActionRef(ActionId("Recharge"))}});
}

} // namespace

TEST_CASE("fsm stays put when no guard holds")
{
    const Fsm f = moded();
    const auto [q, s] = fsm_step(f, "OtherTask", InputState{{"battery", 50}});
    CHECK(q == "OtherTask");
    CHECK(s.action.str() == "OtherTask");
}

TEST_CASE("moded machine latches recharging")
{
    const Fsm f = moded();
    const auto [q, s] = fsm_step(f, "OtherTask", InputState{{"battery", 5}});
    CHECK(q == "Recharging");
    CHECK(s.action.str() == "Recharge");
    CHECK(run_asm(f, {InputState{{"battery", 5}}, InputState{{"battery", 50}}}).action.str() == "Recharge");
    CHECK(run_asm(f, {InputState{{"battery", 5}}, InputState{{"battery", 100}}}).action.str() == "OtherTask");
}

TEST_CASE("fsm chains settle in one step")
{
    const Fsm f({"q1", "q2", "q3"}, "q1", {{"q1", eq("go", 1), "q2"}, {"q2", eq("go", 1), "q3"}},
                {{"q1", ActionRef(ActionId("A1"))}, {"q2", ActionRef(ActionId("A2"))}, {"q3", ActionRef(ActionId("A3"))}});
    // Fixpoint oracle: keep following enabled edges by hand.
    std::string q = "q1";
    for (int i = 0; i < 5; ++i)
        for (const auto& t : f.transitions())
            if (t.from == q && t.guard.evaluate(InputState{{"go", 1}})) {
                q = t.to;
                break;
            }
    const auto [state, sel] = fsm_step(f, "q1", InputState{{"go", 1}});
    CHECK(state == q);
    CHECK(sel.action.str() == "A3");
}

TEST_CASE("fsm cycles are reported")
{
    const Fsm f({"a", "b"}, "a", {{"a", eq("go", 1), "b"}, {"b", eq("go", 1), "a"}},
                {{"a", ActionRef(ActionId("A"))}, {"b", ActionRef(ActionId("B"))}});
    try {
        (void)fsm_step(f, "a", InputState{{"go", 1}});
        FAIL("expected a cycle");
    } catch (const CycleError& e) {
        CHECK(e.loop().size() >= 2);
    }
}

TEST_CASE("fsm self loops terminate")
{
    const Fsm f({"a"}, "a", {{"a", ConditionExpr::literal(true), "a"}}, {{"a", ActionRef(ActionId("A"))}});
    CHECK(fsm_step(f, "a", InputState{}).first == "a");
}

TEST_CASE("fsm validation")
{
    CHECK_THROWS_AS(Fsm({"a"}, "b", {}, {{"a", ActionRef(ActionId("A"))}}), ConstructionError);
    CHECK_THROWS_AS(Fsm({"a"}, "a", {{"a", eq("x", 1), "z"}}, {{"a", ActionRef(ActionId("A"))}}), ConstructionError);
    CHECK_THROWS_AS(Fsm({"a", "b"}, "a", {}, {{"a", ActionRef(ActionId("A"))}}), ConstructionError);

    const Fsm overlap({"a", "b", "c"}, "a",
                      {{"a", ConditionExpr::compare("x", CompareOp::gt, 1), "b"},
                       {"a", ConditionExpr::compare("x", CompareOp::lt, 5), "c"}},
                      {{"a", ActionRef(ActionId("A"))}, {"b", ActionRef(ActionId("B"))}, {"c", ActionRef(ActionId("C"))}});
    CHECK_THROWS_AS(validate_disjoint(overlap, {{"x", 0, 9}}), ConstructionError);
    CHECK_THROWS(fsm_step(overlap, "a", InputState{{"x", 3}}));
    CHECK_NOTHROW(validate_disjoint(moded(), {{"battery", 0, 100}}));
}

TEST_CASE("decision trees")
{
    CHECK(dt_select(DecisionTree(dt_leaf("A")), InputState{}).action.str() == "A");
    const DecisionTree d(dt_branch(ConditionExpr::compare("battery", CompareOp::lt, 10), dt_leaf("Recharge"),
                                   dt_leaf("OtherTask")));
    CHECK(dt_select(d, InputState{{"battery", 3}}).action.str() == "Recharge");
    CHECK(dt_select(d, InputState{{"battery", 30}}).action.str() == "OtherTask");
    CHECK_FALSE(dt_select(d, InputState{{"battery", 3}}).handled);
    CHECK(d.size() == 3);
}

TEST_CASE("random decision trees agree with path enumeration")
{
    std::mt19937_64 rng(3);
    const auto alphabet = oracle::bool_alphabet(3);
    std::function<DtPtr(int, int&)> grow = [&](int depth, int& leaves) -> DtPtr {
        if (depth > 3 || std::uniform_int_distribution<int>(0, 2)(rng) == 0)
            return dt_leaf("A" + std::to_string(leaves++));
        auto t = grow(depth + 1, leaves);
        auto f = grow(depth + 1, leaves);
        return dt_branch(oracle::random_condition(rng, 3), t, f);
    };
    for (int trial = 0; trial < 200; ++trial) {
        int leaves = 0;
        const DecisionTree d(grow(0, leaves));
        for (const auto& x : alphabet.states()) {
            std::size_t hits = 0;
            const auto expected = oracle::dt_by_paths(d, x, &hits);
            REQUIRE(hits == 1);
            REQUIRE(dt_select(d, x).action.str() == *expected);
        }
    }
}

TEST_CASE("teleo-reactive programs")
{
    const TeleoReactive catch_all({{ConditionExpr::literal(true), ActionRef(ActionId("A"))}});
    CHECK(tr_select(catch_all, InputState{}).action.str() == "A");
    CHECK(catch_all.has_catch_all());

    const TeleoReactive two({{eq("k1", 1), ActionRef(ActionId("a1"))}, {eq("k2", 1), ActionRef(ActionId("a2"))}});
    CHECK(tr_select(two, InputState{{"k1", 0}, {"k2", 1}}).action.str() == "a2");
    CHECK(tr_select(two, InputState{{"k1", 1}, {"k2", 1}}).action.str() == "a1");
    CHECK_THROWS_AS(tr_select(two, InputState{{"k1", 0}, {"k2", 0}}), NoRuleError);
    CHECK_FALSE(two.has_catch_all());
    CHECK_THROWS_AS(TeleoReactive({}), ConstructionError);
}

TEST_CASE("teleo-reactive programs as one-valued trees")
{
    const TeleoReactive one({{eq("k1", 1), ActionRef(ActionId("a1"))}});
    const KBTree t1 = tr_to_kbt(one);
    CHECK(t1.values().k() == 1);
    CHECK(t1.values().values().front() == precond_false_value());
    CHECK(tick(t1, InputState{{"k1", 1}}).selection.action.str() == "a1");

    std::mt19937_64 rng(5);
    const auto alphabet = oracle::bool_alphabet(3);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<TrRule> rules;
        for (int i = 0; i < 4; ++i)
            rules.push_back({oracle::random_condition(rng, 3), ActionRef(ActionId("a" + std::to_string(i)))});
        rules.push_back({ConditionExpr::literal(true), ActionRef(ActionId("a4"))});
        const TeleoReactive tr(rules);
        const KBTree t = tr_to_kbt(tr);
        for (const auto& x : alphabet.states())
            REQUIRE(tick(t, x).selection.action == tr_select(tr, x).action);
    }
}

TEST_CASE("behaviour trees as decision trees")
{
    const KBTree leaf = infix_compose("A");
    CHECK(DecisionTree(bt_to_dt(leaf)).size() == 1);

    oracle::BtGen gen(21, 3);
    const auto alphabet = oracle::bool_alphabet(3);
    for (int trial = 0; trial < 200; ++trial) {
        const KBTree t(ValueSet::classic(), oracle::to_node(*gen.tree(12)));
        const DecisionTree d = bt_to_dt(t);
        for (const auto& x : alphabet.states())
            REQUIRE(dt_select(d, x).action == tick(t, x).selection.action);
    }
    const KBTree mem(ValueSet::classic(), memory_sequence({action("A"), action("B")}));
    CHECK_THROWS(bt_to_dt(mem));
}

TEST_CASE("classic architectures are reactive, the moded machine is not")
{
    const auto alphabet = InputAlphabet::product({{"battery", {5, 50, 100}}});
    const DecisionTree d(dt_branch(ConditionExpr::compare("battery", CompareOp::lt, 10), dt_leaf("R"), dt_leaf("O")));
    CHECK(check_reactive(d, alphabet, 3).reactive);
    const TeleoReactive tr({{ConditionExpr::compare("battery", CompareOp::lt, 10), ActionRef(ActionId("R"))},
                            {ConditionExpr::literal(true), ActionRef(ActionId("O"))}});
    CHECK(check_reactive(tr, alphabet, 3).reactive);
    const Fsm f = moded();
    const auto r = check_reactive(f, alphabet, 3);
    REQUIRE_FALSE(r.reactive);
    REQUIRE(r.witness);
    CHECK(std::max(r.witness->first.size(), r.witness->second.size()) == 2);
    CHECK(replays(f, *r.witness));
}
