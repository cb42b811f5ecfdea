#include "kbt/scenarios.hpp"

#include <set>

#include "kbt/models_embedded.hpp"

namespace kbt {

std::vector<std::string> bundled_models()
{
    std::vector<std::string> out;
    for (const auto& [name, text] : embedded::models)
        out.emplace_back(name);
    return out;
}

std::string_view bundled_model_text(std::string_view name)
{
    for (const auto& [n, text] : embedded::models)
        if (n == name)
            return text;
    throw Error("no bundled model '" + std::string(name) + "'");
}

Model bundled_model(std::string_view name)
{
    return parse_model(bundled_model_text(name));
}

// ---- Battery -----------------------------------------------------------------

namespace {

ChatteringRun run_pair(const Model& m, const World& w, std::size_t steps)
{
    SimOptions opts;
    opts.steps = steps;
    ChatteringRun out;
    out.reactive = simulate(w, m.stack("Reactive"), opts);
    out.layered = simulate(w, m.stack("Layered"), opts);
    out.reactive_switches = count_switches(out.reactive.selections());
    out.layered_switches = count_switches(out.layered.selections());
    return out;
}

} // namespace

ChatteringRun run_chattering(std::size_t steps)
{
    const Model m = bundled_model("chattering");
    return run_pair(m, *m.world("Hover"), steps);
}

ChatteringRun run_chattering_scripted(std::size_t steps)
{
    const Model m = bundled_model("chattering");
    std::vector<InputState> script;
    for (std::size_t i = 0; i < steps; ++i)
        script.push_back(InputState{{"battery", i % 2 == 0 ? 11 : 9}});
    const ScriptedWorld w(std::move(script), {{"battery", 0, 100, Visibility::visible, 0}},
                        {ActionId("Recharge"), ActionId("OtherTask")});
    return run_pair(m, w, steps);
}

// ---- Grid --------------------------------------------------------------------

WallFollowScenario wall_follow_scenario()
{
    WallFollowScenario s;
    s.model = bundled_model("wall_follow");
    auto w = s.model.world("Room");
    s.world.reset(dynamic_cast<GridWorld*>(w.release()));
    s.reactive = s.model.asm_named("Reactive");
    s.fsm = s.model.asm_named("Follower");
    return s;
}

namespace {

Pose pose_of(const std::map<std::string, int>& summary)
{
    return Pose{summary.at("x"), summary.at("y"), static_cast<Heading>(summary.at("heading"))};
}

} // namespace

WalkReport analyse_walk(const GridWorld& start, const SimTrace& trace)
{
    WalkReport r;
    r.poses.push_back(start.pose());
    for (const auto& s : trace.steps)
        r.poses.push_back(pose_of(s.world));

    const auto wall = start.wall_adjacent_cells();
    const std::set<std::pair<int, int>> targets(wall.begin(), wall.end());
    r.wall_cells = targets.size();
    std::set<std::pair<int, int>> seen;
    std::map<Pose, std::size_t> first_pose;
    for (std::size_t i = 0; i < r.poses.size(); ++i) {
        const Pose& p = r.poses[i];
        if (targets.count({p.x, p.y}))
            seen.insert({p.x, p.y});
        if (!r.completed_at && i > 0 && seen.size() == targets.size() && p.x == start.pose().x &&
            p.y == start.pose().y)
            r.completed_at = i;
        auto [it, fresh] = first_pose.emplace(p, i);
        if (!fresh && !r.repeated_pose)
            r.repeated_pose = {{it->second, i}};
    }
    r.wall_cells_visited = seen.size();

    std::vector<std::string> rows;
    for (int y = 0; y < start.height(); ++y) {
        std::string row;
        for (int x = 0; x < start.width(); ++x) {
            const Cell c = start.cell(x, y);
            row += c == Cell::wall ? '#' : c == Cell::marker ? 'm' : '.';
        }
        rows.push_back(std::move(row));
    }
    std::vector<std::vector<std::vector<int>>> obs;
    for (const Pose& p : r.poses)
        obs.push_back(GridWorld(rows, p).window());
    for (std::size_t j = 1; j < obs.size() && !r.repeated_observation; ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (obs[i] == obs[j] && !(r.poses[i] == r.poses[j])) {
                r.repeated_observation = {{i, j}};
                break;
            }
    return r;
}

SimTrace run_walk(const WallFollowScenario& s, const AsmPtr& controller, std::size_t steps, bool stop_when_complete)
{
    SimOptions opts;
    opts.steps = steps;
    if (stop_when_complete) {
        const auto wall = s.world->wall_adjacent_cells();
        auto targets = std::make_shared<std::set<std::pair<int, int>>>(wall.begin(), wall.end());
        auto seen = std::make_shared<std::set<std::pair<int, int>>>();
        const Pose start = s.world->pose();
        if (targets->count({start.x, start.y}))
            seen->insert({start.x, start.y});
        opts.stop = [targets, seen, start](const World& w, std::size_t) -> std::string {
            const Pose p = dynamic_cast<const GridWorld&>(w).pose();
            if (targets->count({p.x, p.y}))
                seen->insert({p.x, p.y});
            if (seen->size() == targets->size() && p.x == start.x && p.y == start.y)
                return "perimeter complete";
            return {};
        };
    }
    return simulate(*s.world, ControllerStack({{"Top", controller}}), opts);
}

// ---- Door --------------------------------------------------------------------

DoorScenario door_scenario()
{
    DoorScenario s;
    s.model = bundled_model("door");
    auto w = s.model.world("Door");
    s.world.reset(dynamic_cast<DoorWorld*>(w.release()));
    s.handling = s.model.tree("Handling");
    s.ignoring = s.model.tree("Ignoring");
    return s;
}

} // namespace kbt
