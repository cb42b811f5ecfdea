#include "doctest.h"

#include <set>

#include "kbt/analysis.hpp"
#include "kbt/dsl.hpp"
#include "kbt/error.hpp"
#include "kbt/scenarios.hpp"
#include "kbt/world.hpp"

using namespace kbt;

namespace {

AsmPtr tree_of(const char* expr)
{
    return std::make_shared<KBTree>(infix_compose(expr));
}

std::vector<std::string> room()
{
    return {
        "#######",
        "#.....#",
        "#.....#",
        "#######",
    };
}

} // namespace

TEST_CASE("battery dynamics")
{
    BatteryWorld w(BatteryConfig{50, 1, 5, 1, {"OtherTask"}, false});
    w.step(ActionId("OtherTask"));
    CHECK(w.battery() == 49);
    w.step(ActionId("Recharge"));
    CHECK(w.battery() == 54);
    w.step(noop_action());
    CHECK(w.battery() == 53);
    CHECK_THROWS(w.step(ActionId("Dance")));

    BatteryWorld full(BatteryConfig{99, 1, 5, 1, {"OtherTask"}, false});
    full.step(ActionId("Recharge"));
    CHECK(full.battery() == 100);
    BatteryWorld empty(BatteryConfig{0, 1, 5, 1, {"OtherTask"}, false});
    empty.step(ActionId("OtherTask"));
    CHECK(empty.battery() == 0);
}

TEST_CASE("battery changes by one of the configured rates")
{
    const Model m = bundled_model("chattering");
    const auto w = m.world("Hover");
    const SimTrace t = simulate(*w, m.stack("Layered"), SimOptions{60, {}, {}, {}});
    int prev = dynamic_cast<BatteryWorld&>(*w).battery();
    for (const auto& s : t.steps) {
        const int now = s.world.at("battery");
        const int d = now - prev;
        CHECK((d == -1 || d == 2 || now == 100 || now == 0));
        prev = now;
    }
}

TEST_CASE("grid observation")
{
    GridWorld g(room(), Pose{1, 1, Heading::east});
    const auto win = g.window();
    REQUIRE(win.size() == 5);
    for (const auto& row : win)
        CHECK(row.size() == 5);
    CHECK(win[2][2] == static_cast<int>(Cell::agent));
    // Right of an east-facing agent is south: (1, 2) is empty, (1, 3) is wall.
    CHECK(win[2][3] == static_cast<int>(Cell::empty));
    CHECK(win[2][4] == static_cast<int>(Cell::wall));
    // Left is north: (1, 0) wall, (1, -1) outside.
    CHECK(win[2][1] == static_cast<int>(Cell::wall));
    CHECK(win[2][0] == static_cast<int>(Cell::outside));
    CHECK(g.observe().at(cell_variable(0, 1)) == static_cast<int>(Cell::empty));
    CHECK(g.observe().bindings().size() == 25);

    // The same pose on the same walls gives the same observation.
    GridWorld h(room(), Pose{3, 1, Heading::west});
    h.step(ActionId("StepForward"));
    h.step(ActionId("StepForward"));
    h.step(ActionId("TurnLeft"));
    h.step(ActionId("TurnLeft"));
    CHECK(h.pose() == g.pose());
    CHECK(h.window() == g.window());
}

TEST_CASE("grid moves")
{
    GridWorld g(room(), Pose{5, 1, Heading::east});
    g.step(ActionId("StepForward"));
    CHECK(g.pose().x == 5); // blocked by the wall
    g.step(ActionId("TurnRight"));
    CHECK(g.pose().heading == Heading::south);
    g.step(ActionId("StepForward"));
    CHECK(g.pose().y == 2);
    CHECK_THROWS_AS(GridWorld(room(), Pose{0, 0, Heading::east}), ConstructionError);
    CHECK(g.wall_adjacent_cells().size() == 10);
}

TEST_CASE("noop keeps a static grid unchanged")
{
    const GridWorld g(room(), Pose{2, 1, Heading::north});
    const SimTrace t = simulate(g, ControllerStack({{"Top", tree_of("NoOp")}}), SimOptions{5, {}, {}, {}});
    REQUIRE(t.steps.size() == 5);
    for (const auto& s : t.steps) {
        CHECK(s.command == noop_action());
        CHECK(s.world.at("x") == 2);
        CHECK(s.world.at("y") == 1);
    }
}

TEST_CASE("door knowledge changes only through actions")
{
    DoorWorld d(DoorConfig{true, Knowledge::unknown, false, 0});
    d.step(ActionId("FetchKey"));
    CHECK(d.knowledge() == Knowledge::unknown);
    CHECK(d.has_key());
    d.step(ActionId("Probe"));
    CHECK(d.knowledge() == Knowledge::locked);
    d.step(ActionId("Unlock"));
    CHECK(d.knowledge() == Knowledge::unlocked);
    CHECK_FALSE(d.locked());
    d.step(ActionId("GoThrough"));
    CHECK(d.room() == 1);
}

TEST_CASE("controller stacks")
{
    CHECK_THROWS_AS(ControllerStack({}), ConstructionError);
    const Model m = bundled_model("chattering");
    const auto stack = m.stack("Layers");
    CHECK(stack.layers().size() == 2);
    const SimTrace t = simulate(*m.world("Hover"), stack, SimOptions{5, {}, {}, {}});
    REQUIRE(t.steps.size() == 5);
    REQUIRE(t.steps[0].path.size() == 2);
    CHECK(t.steps[0].path[0].second.action.str() == "TaskLayer");
    CHECK(t.steps[0].command.str() == "OtherTask");

    // A layer that names itself or a higher layer does not resolve.
    const ControllerStack loop({{"Top", tree_of("Top")}});
    CHECK_THROWS_AS(simulate(*m.world("Hover"), loop, SimOptions{1, {}, {}, {}}), StackError);
    const ControllerStack bad({{"Top", tree_of("Dance")}});
    CHECK_THROWS(simulate(*m.world("Hover"), bad, SimOptions{1, {}, {}, {}}));
}

TEST_CASE("the top layer interrupts from the injected step on")
{
    const Model m = bundled_model("chattering");
    const auto world = m.world("Hover");
    SimOptions plain{30, {}, {}, {}};
    const SimTrace base = simulate(*world, m.stack("Layers"), plain);
    for (std::size_t t : {3u, 12u, 20u}) {
        SimOptions opts = plain;
        opts.observe_override = [t](std::size_t step, const InputState&) -> std::optional<InputState> {
            if (step == t)
                return InputState{{"battery", 5}};
            return std::nullopt;
        };
        const SimTrace changed = simulate(*world, m.stack("Layers"), opts);
        for (std::size_t i = 0; i < t; ++i)
            CHECK(changed.steps[i].path == base.steps[i].path);
        // The top layer reacts on the very step.
        CHECK(changed.steps[t].path.front().second.action.str() == "Recharge");
        CHECK(changed.steps[t].path.size() == 1);
    }
}

TEST_CASE("simulation is deterministic")
{
    const Model m = bundled_model("chattering");
    SimOptions opts{40, 5, {}, {}};
    const auto a = to_jsonl(simulate(*m.world("Hover"), m.stack("Reactive"), opts));
    const auto b = to_jsonl(simulate(*m.world("Hover"), m.stack("Reactive"), opts));
    CHECK(a == b);
    CHECK(std::count(a.begin(), a.end(), '\n') == 40);
    CHECK(a.rfind("{\"step\":0", 0) == 0);
}

TEST_CASE("chattering")
{
    const auto closed = run_chattering(40);
    CHECK(closed.reactive_switches >= 10);
    CHECK(closed.layered_switches <= 2);
    const auto open = run_chattering_scripted(40);
    CHECK(open.reactive_switches >= 10);
    CHECK(open.layered_switches <= 2);
    // The flat tree alternates on 11, 9, 11, 9.
    const auto sel = open.reactive.selections();
    CHECK(sel[0].action.str() == "OtherTask");
    CHECK(sel[1].action.str() == "Recharge");
    CHECK(sel[2].action.str() == "OtherTask");
}

TEST_CASE("recharging persists until full")
{
    const Model m = bundled_model("chattering");
    const SimTrace t = simulate(*m.world("Hover"), m.stack("Layered"), SimOptions{120, {}, {}, {}});
    bool charging = false;
    for (const auto& s : t.steps) {
        if (charging && s.input.at("battery") < 100)
            CHECK(s.command.str() == "Recharge");
        if (s.command.str() == "Recharge")
            charging = true;
        if (s.input.at("battery") == 100)
            charging = false;
    }
}

TEST_CASE("wall following")
{
    const auto s = wall_follow_scenario();
    const SimTrace r = run_walk(s, s.reactive, 50);
    const WalkReport rr = analyse_walk(*s.world, r);
    REQUIRE(rr.repeated_pose);
    CHECK(rr.repeated_pose->second <= 50);
    CHECK_FALSE(rr.completed_at);

    const SimTrace f = run_walk(s, s.fsm, 200, true);
    const WalkReport fr = analyse_walk(*s.world, f);
    REQUIRE(fr.completed_at);
    CHECK(*fr.completed_at <= 200);
    CHECK(fr.wall_cells_visited == fr.wall_cells);
    CHECK(f.stopped == "perimeter complete");
}

TEST_CASE("door scenario")
{
    const auto d = door_scenario();
    const auto x = d.world->observe();
    CHECK(tick(*d.handling, x).selection.action.str() == "Probe");
    CHECK(tick(*d.ignoring, x).selection.action.str() == "Unlock");
    CHECK_FALSE(tick(*d.ignoring, x).selection.handled);

    InputState known = x;
    known.set("knowledge", 1);
    known.set("room", 1);
    CHECK(tick(*d.handling, known).selection.action.str() == "GoThrough");
}
