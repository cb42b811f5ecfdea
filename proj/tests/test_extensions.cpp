#include "doctest.h"

#include <random>

#include "kbt/analysis.hpp"
#include "kbt/dsl.hpp"
#include "kbt/error.hpp"
#include "kbt/extensions.hpp"
#include "support/oracles.hpp"

using namespace kbt;

namespace {

ConditionExpr eq(const char* v, int n) { return ConditionExpr::compare(v, CompareOp::eq, n); }

ReturnRule by_var(const char* v)
{
    return ReturnRule({{eq(v, 1), success_value()}, {eq(v, 2), failure_value()}}, std::nullopt);
}

std::vector<Selection> run_steps(const KBTree& t, const std::vector<InputState>& xs)
{
    auto s = t.start();
    std::vector<Selection> out;
    for (const auto& x : xs)
        out.push_back(s->step(x));
    return out;
}

} // namespace

TEST_CASE("memory sequence remembers successes")
{
    const KBTree t(ValueSet::classic(), memory_sequence({action("A1", by_var("r1")), action("A2", by_var("r2"))}));
    TickContext ctx;
    // A1 succeeds, A2 runs: A1 is remembered.
    auto out = tick(t, InputState{{"r1", 1}, {"r2", 0}}, ctx);
    CHECK(out.selection.action.str() == "A2");
    CHECK(ctx.remembered(t.root()->id).size() == 1);
    // A1 would now fail, but it is skipped.
    out = tick(t, InputState{{"r1", 2}, {"r2", 0}}, ctx);
    CHECK(out.selection.action.str() == "A2");
    // Both succeed: the node returns Success and forgets.
    out = tick(t, InputState{{"r1", 2}, {"r2", 1}}, ctx);
    CHECK(out.selection.value == success_value());
    CHECK(ctx.empty());
    out = tick(t, InputState{{"r1", 2}, {"r2", 1}}, ctx);
    CHECK(out.selection.action.str() == "A1");
}

TEST_CASE("memory fallback remembers failures and clears on any handled value")
{
    const KBTree t(ValueSet::classic(), memory_fallback({action("A1", by_var("r1")), action("A2", by_var("r2"))}));
    TickContext ctx;
    tick(t, InputState{{"r1", 2}, {"r2", 0}}, ctx);
    CHECK_FALSE(ctx.empty());
    const auto out = tick(t, InputState{{"r1", 1}, {"r2", 1}}, ctx);
    CHECK(out.selection.action.str() == "A2");
    CHECK(ctx.empty());
}

TEST_CASE("memory nodes are not reactive")
{
    const KBTree t(ValueSet::classic(), memory_sequence({action("A1", by_var("r1")), action("A2", by_var("r2"))}));
    const auto alphabet = InputAlphabet::product({{"r1", {0, 1, 2}}, {"r2", {0, 1, 2}}});
    const auto r = check_reactive(t, alphabet, 2);
    REQUIRE_FALSE(r.reactive);
    CHECK(replays(t, *r.witness));
}

TEST_CASE("negation")
{
    const KBTree unh(ValueSet::classic(), negation(action("A")));
    CHECK(tick(unh, InputState{}).selection.value == std::nullopt);
    const KBTree f(ValueSet::classic(), negation(action("A", ReturnRule::constant(failure_value()))));
    CHECK(tick(f, InputState{}).selection.value == success_value());
    CHECK(tick(f, InputState{}).selection.action.str() == "A");
}

TEST_CASE("run until success latches")
{
    const KBTree t(ValueSet::classic(), run_until_success(action("Grab", by_var("g"))));
    std::vector<InputState> xs;
    for (int g : {2, 0, 1, 2, 2, 0})
        xs.push_back(InputState{{"g", g}});
    const auto sel = run_steps(t, xs);
    CHECK(sel[0].value == failure_value());
    CHECK(sel[1].value == std::nullopt);
    CHECK(sel[2].value == success_value());
    CHECK(sel[2].action.str() == "Grab");
    for (std::size_t i = 3; i < sel.size(); ++i) {
        CHECK(sel[i].value == success_value());
        CHECK(sel[i].kind == LeafKind::latched);
        CHECK(sel[i].action == noop_action());
    }
}

TEST_CASE("run n times counts delivered ticks")
{
    const KBTree t(ValueSet::classic(), run_n_times(2, action("A", ReturnRule::constant(failure_value()))));
    const std::vector<InputState> xs(6, InputState{});
    const auto sel = run_steps(t, xs);
    // Counter oracle: the first n ticks reach the child.
    for (std::size_t i = 0; i < sel.size(); ++i)
        CHECK(sel[i].value == (i < 2 ? failure_value() : success_value()));
    CHECK_THROWS_AS(run_n_times(0, action("A")), ConstructionError);
}

TEST_CASE("custom decorators map values")
{
    const KBTree t(ValueSet::classic(),
                   custom_decorator({{failure_value(), success_value()},
                                     {success_value(), success_value()},
                                     {std::nullopt, failure_value()}},
                                    action("A", by_var("v"))));
    CHECK(tick(t, InputState{{"v", 2}}).selection.value == success_value());
    CHECK(tick(t, InputState{{"v", 0}}).selection.value == failure_value());
    CHECK_THROWS_AS(KBTree(ValueSet::classic(), custom_decorator({{success_value(), failure_value()}},
                                                                 action("A", by_var("v")))),
                    ConstructionError);
}

TEST_CASE("parallel thresholds against the counting oracle")
{
    using oracle::Status;
    const std::vector<Status> statuses{Status::success, Status::failure, Status::running};
    for (unsigned n = 1; n <= 3; ++n)
        for (unsigned m = 1; m <= n; ++m) {
            std::vector<NodePtr> kids;
            std::vector<std::pair<std::string, std::vector<int>>> axes;
            for (unsigned i = 0; i < n; ++i) {
                const std::string v = "c" + std::to_string(i);
                kids.push_back(action("P" + std::to_string(i),
                                      ReturnRule({{ConditionExpr::compare(v, CompareOp::eq, 0), success_value()},
                                                  {ConditionExpr::compare(v, CompareOp::eq, 1), failure_value()}},
                                                 std::nullopt)));
                axes.push_back({v, {0, 1, 2}});
            }
            const KBTree t(ValueSet::classic(), parallel(m, kids));
            const auto alphabet = InputAlphabet::product(axes);
            for (const auto& x : alphabet.states()) {
                std::vector<Status> kidsv;
                for (unsigned i = 0; i < n; ++i)
                    kidsv.push_back(statuses[static_cast<std::size_t>(x.at("c" + std::to_string(i)))]);
                const auto out = tick(t, x);
                REQUIRE(out.selection.value == oracle::parallel_value(kidsv, m));
                CHECK(out.visited.size() == n + 1);
            }
        }
}

TEST_CASE("parallel examples")
{
    const KBTree one(ValueSet::classic(), parallel(1, {action("A", ReturnRule::constant(failure_value()))}));
    CHECK(tick(one, InputState{}).selection.value == failure_value());
    const KBTree two(ValueSet::classic(),
                     parallel(1, {action("A", ReturnRule::constant(success_value())), action("B")}));
    const auto out = tick(two, InputState{});
    CHECK(out.selection.value == success_value());
    CHECK(out.selection.action.str() == "A");
}

TEST_CASE("parallel ignores child order")
{
    const auto s = ReturnRule::constant(success_value());
    const auto f = ReturnRule::constant(failure_value());
    const KBTree a(ValueSet::classic(), parallel(2, {action("A", s), action("B", f), action("C")}));
    const KBTree b(ValueSet::classic(), parallel(2, {action("C"), action("A", s), action("B", f)}));
    CHECK(tick(a, InputState{}).selection.value == tick(b, InputState{}).selection.value);
}

TEST_CASE("utility node re-sorts its children")
{
    const auto fail = ReturnRule::constant(failure_value());
    const KBTree tie(ValueSet::classic(), utility({action("A", fail), action("B")}, {ScoreRule({}, 1), ScoreRule({}, 1)}));
    CHECK(tick(tie, InputState{}).selection.action.str() == "B");

    const KBTree scored(ValueSet::classic(),
                        utility({action("A"), action("B")}, {ScoreRule({}, 3), ScoreRule({}, 7)}));
    const auto out = tick(scored, InputState{});
    CHECK(out.selection.action.str() == "B");
    REQUIRE(out.utility.size() == 1);
    CHECK(out.utility[0].scores == std::vector<long>{3, 7});
    CHECK(out.utility[0].order == std::vector<std::size_t>{1, 0});

    const KBTree dyn(ValueSet::classic(),
                     utility({action("Eat"), action("Sleep")},
                             {ScoreRule({{eq("hunger", 1), 9}}, 1), ScoreRule({}, 5)}));
    CHECK(tick(dyn, InputState{{"hunger", 1}}).selection.action.str() == "Eat");
    CHECK(tick(dyn, InputState{{"hunger", 0}}).selection.action.str() == "Sleep");
    CHECK(check_reactive(dyn, InputAlphabet::product({{"hunger", {0, 1}}}), 3).reactive);
    CHECK_THROWS_AS(utility({action("A")}, {}), ConstructionError);
}

TEST_CASE("styles prune subtrees")
{
    const KBTree t = infix_compose("(Near -> Attack) ? (Near -> Flee) ? Patrol");
    CHECK(format_tree(apply_style(t, Style{"none", {}})) == format_tree(t));
    const KBTree brave = apply_style(t, Style{"Brave", {NodeId{5}}});
    CHECK(format_tree(brave) == "Near -> Attack ? Patrol");
    // Surviving ids are stable, so the style applies again to its own output.
    CHECK(brave.find(NodeId{2}) != nullptr);
    CHECK_THROWS_AS(apply_style(t, Style{"bad", {NodeId{99}}}), StyleError);
    CHECK_THROWS_AS(apply_style(t, Style{"root", {NodeId{1}}}), StyleError);
    CHECK_THROWS_AS(apply_style(t, Style{"empty", {NodeId{3}, NodeId{4}}}), StyleError);
    const KBTree again = apply_style(brave, Style{"Brave", {NodeId{2}}});
    CHECK(format_tree(again) == "*Failure[Patrol]");
}

TEST_CASE("style switching is not reactive, fixed styles are")
{
    const Model m = parse_model(R"(
values [Success, Failure]
var enemy: bool
var hurt: bool
action Attack
action Flee
action Patrol
cond EnemyNear = enemy == 1
tree Behaviour = (EnemyNear -> Attack) ? (EnemyNear -> Flee) ? Patrol
style Brave of Behaviour disables [5]
style Timid of Behaviour disables [2]
fsm Moods {
  init Brave
  Brave -[hurt == 1 and enemy == 1]-> Timid
  Timid -[hurt == 0 and enemy == 0]-> Brave
  label Brave: style Brave
  label Timid: style Timid
}
alphabet Threats {
  enemy in 0..1
  hurt in 0..1
}
)");
    const auto a = m.alphabet("Threats");
    CHECK(check_reactive(*m.asm_named("Brave"), a, 3).reactive);
    CHECK(check_reactive(*m.asm_named("Timid"), a, 3).reactive);
    const auto r = check_reactive(*m.asm_named("Moods"), a, 3);
    REQUIRE_FALSE(r.reactive);
    CHECK(replays(*m.asm_named("Moods"), *r.witness));
}

TEST_CASE("pushing negations down")
{
    const auto rule = by_var("v0");
    const KBTree leaf(ValueSet::classic(), negation(action("A", rule)));
    const KBTree pushed = push_down_negations(leaf);
    CHECK(count_decorators(pushed, DecoratorKind::negation) == 0);
    const auto& a = std::get<ActionLeaf>(pushed.root()->body);
    CHECK(a.returns == rule.with_success_failure_swapped());

    const auto alphabet = InputAlphabet::product({{"v0", {0, 1, 2}}, {"v1", {0, 1, 2}}});
    CheckOptions opts;
    opts.compare_values = true;
    const KBTree seq(ValueSet::classic(), negation(sequence({action("A", by_var("v0")), action("B", by_var("v1"))})));
    const KBTree demorgan(ValueSet::classic(),
                          fallback({negation(action("A", by_var("v0"))), negation(action("B", by_var("v1")))}));
    CHECK(check_equivalence(seq, demorgan, alphabet, 1, opts).equivalent);
    CHECK(check_equivalence(seq, push_down_negations(seq), alphabet, 1, opts).equivalent);

    const KBTree twice(ValueSet::classic(), negation(negation(action("A", by_var("v0")))));
    CHECK(check_equivalence(twice, KBTree(ValueSet::classic(), action("A", by_var("v0"))), alphabet, 1, opts).equivalent);

    // A negated memory sequence becomes a memory fallback over negated children.
    const KBTree mem(ValueSet::classic(),
                     negation(memory_sequence({action("A", by_var("v0")), action("B", by_var("v1"))})));
    const KBTree mem_pushed = push_down_negations(mem);
    CHECK(count_decorators(mem_pushed, DecoratorKind::negation) == 0);
    CHECK(check_equivalence(mem, mem_pushed, alphabet, 3, opts).equivalent);

    const KBTree latch(ValueSet::classic(), negation(run_until_success(action("A", by_var("v0")))));
    CHECK_THROWS_AS(push_down_negations(latch), ConstructionError);
}

TEST_CASE("random negation pushing keeps traces")
{
    oracle::BtGen gen(99, 3, true);
    const auto alphabet = oracle::bool_alphabet(3);
    CheckOptions opts;
    opts.compare_values = true;
    for (int trial = 0; trial < 50; ++trial) {
        const KBTree t(ValueSet::classic(), oracle::to_node(*gen.tree(12)));
        const KBTree p = push_down_negations(t);
        CHECK(count_decorators(p, DecoratorKind::negation) == 0);
        CHECK(check_equivalence(t, p, alphabet, 2, opts).equivalent);
    }
}
