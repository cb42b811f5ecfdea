#include "doctest.h"

#include "kbt/classic.hpp"
#include "kbt/error.hpp"
#include "kbt/tree.hpp"

using namespace kbt;

TEST_CASE("names reject empty identifiers")
{
    CHECK_THROWS_AS(ActionId(""), ConstructionError);
    CHECK_THROWS_AS(ValueName(""), ConstructionError);
    CHECK(ActionId("A").str() == "A");
}

TEST_CASE("value sets")
{
    CHECK_THROWS_AS(ValueSet(std::vector<ValueName>{}), ConstructionError);
    CHECK_THROWS_AS(ValueSet({ValueName("S"), ValueName("S")}), ConstructionError);
    const ValueSet v = ValueSet::classic();
    CHECK(v.k() == 2);
    CHECK(v.contains(success_value()));
    CHECK_FALSE(v.contains(ReturnValue{}));
    CHECK(v.has_success_failure());
}

TEST_CASE("selection rendering")
{
    CHECK(to_string(Selection{ActionId("Recharge"), std::nullopt, false}) == "Recharge/~");
    CHECK(to_string(Selection{ActionId("Unlock"), ValueName("Unknown"), false}) == "Unlock/~Unknown");
    CHECK(to_string(Selection{ActionId("A"), success_value(), true}) == "A/Success");
}

TEST_CASE("condition evaluation")
{
    const auto low = ConditionExpr::compare("battery", CompareOp::lt, 10);
    CHECK(evaluate_condition(low, InputState{{"battery", 5}}));
    CHECK_FALSE(evaluate_condition(low, InputState{{"battery", 10}}));
    CHECK(evaluate_condition(ConditionExpr::literal(true), InputState{}));

    // Truth table of battery=100 and not door=1.
    const auto c = ConditionExpr::compare("battery", CompareOp::eq, 100) &&
                   !ConditionExpr::compare("door", CompareOp::eq, 1);
    for (int b : {0, 100})
        for (int d : {0, 1}) {
            const bool expected = (b == 100) && !(d == 1);
            CHECK(evaluate_condition(c, InputState{{"battery", b}, {"door", d}}) == expected);
        }
}

TEST_CASE("unbound variables name the variable")
{
    const auto c = ConditionExpr::compare("battery", CompareOp::lt, 10);
    try {
        (void)c.evaluate(InputState{{"door", 1}});
        FAIL("expected an evaluation error");
    } catch (const EvaluationError& e) {
        CHECK(e.variable() == "battery");
    }
}

TEST_CASE("condition text")
{
    const auto a = ConditionExpr::compare("a", CompareOp::eq, 1);
    const auto b = ConditionExpr::compare("b", CompareOp::ge, 2);
    const auto c = ConditionExpr::truthy("c");
    CHECK(to_string(a && !(b || c)) == "a == 1 and not (b >= 2 or c)");
    CHECK(to_string((a || b) && c) == "(a == 1 or b >= 2) and c");
    CHECK(a.variables() == std::set<std::string>{"a"});
}

TEST_CASE("input states")
{
    InputState x{{"a", 1}};
    x.set("h", 3, Visibility::hidden);
    CHECK(x.is_hidden("h"));
    CHECK(x.visible_part() == InputState{{"a", 1}});
    const InputState y = x.merged(InputState{{"a", 2}});
    CHECK(y.at("a") == 2);
    CHECK(y.is_hidden("h"));
    CHECK(to_string(x) == "{a:1, #h:3}");
}

TEST_CASE("alphabets")
{
    const auto a = InputAlphabet::product({{"x", {0, 1}}, {"y", {0, 1, 2}}});
    CHECK(a.size() == 6);
    CHECK(a.states()[1] == InputState{{"x", 0}, {"y", 1}});
    CHECK(a.index_of(InputState{{"x", 1}, {"y", 2}}) == 5);
    CHECK_THROWS_AS(InputAlphabet(std::vector<InputState>{}), ConstructionError);
    CHECK_THROWS_AS(InputAlphabet({InputState{{"x", 0}}, InputState{{"x", 0}}}), ConstructionError);
}

TEST_CASE("return rules take the first matching clause")
{
    const ReturnRule r({{ConditionExpr::compare("k", CompareOp::eq, 1), success_value()},
                        {ConditionExpr::compare("k", CompareOp::ge, 1), failure_value()}},
                       std::nullopt);
    CHECK(r.evaluate(InputState{{"k", 1}}) == success_value());
    CHECK(r.evaluate(InputState{{"k", 2}}) == failure_value());
    CHECK(r.evaluate(InputState{{"k", 0}}) == std::nullopt);
    CHECK(r.possible_values().size() == 3);
    const auto s = r.with_success_failure_swapped();
    CHECK(s.evaluate(InputState{{"k", 1}}) == failure_value());
    CHECK(s.evaluate(InputState{{"k", 0}}) == std::nullopt);
}

TEST_CASE("run_asm and trace_asm")
{
    const DecisionTree d(dt_leaf("A"));
    const History h{InputState{{"x", 0}}};
    const Selection s = run_asm(d, h);
    CHECK(s.action.str() == "A");
    CHECK_FALSE(s.handled);
    CHECK_FALSE(s.value.has_value());

    const KBTree t(ValueSet::classic(), fallback({sequence({condition("Low", ConditionExpr::compare("x", CompareOp::lt, 1)),
                                                             action("Go")}),
                                                   action("Wait")}));
    const History h3{InputState{{"x", 0}}, InputState{{"x", 1}}, InputState{{"x", 0}}};
    const auto tr = trace_asm(t, h3);
    REQUIRE(tr.size() == 3);
    CHECK(tr.back() == run_asm(t, h3));
    for (std::size_t i = 0; i < h3.size(); ++i)
        CHECK(tr[i] == run_asm(t, History(h3.begin(), h3.begin() + static_cast<long>(i) + 1)));
    // Two histories ending in the same input.
    CHECK(run_asm(t, {InputState{{"x", 1}}, InputState{{"x", 0}}}) == run_asm(t, {InputState{{"x", 0}}}));
    CHECK_THROWS(run_asm(t, History{}));
}
