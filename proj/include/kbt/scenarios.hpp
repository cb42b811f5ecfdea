#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kbt/dsl.hpp"

namespace kbt {

// Bundled model files, by stem ("chattering", "memory", "door",
// "wall_follow", "extensions").
std::vector<std::string> bundled_models();
std::string_view bundled_model_text(std::string_view name);
Model bundled_model(std::string_view name);

// ---- Battery -----------------------------------------------------------------

struct ChatteringRun
{
    SimTrace reactive;
    SimTrace layered;
    std::size_t reactive_switches = 0;
    std::size_t layered_switches = 0;
};

// Flat and Moded in the hovering battery world, closed loop.
ChatteringRun run_chattering(std::size_t steps = 40);
// Same controllers on a scripted battery reading alternating 11, 9, 11, ...
ChatteringRun run_chattering_scripted(std::size_t steps = 40);

// ---- Grid --------------------------------------------------------------------

struct WallFollowScenario
{
    Model model;
    std::unique_ptr<GridWorld> world;
    AsmPtr reactive;
    AsmPtr fsm;
};

WallFollowScenario wall_follow_scenario();

struct WalkReport
{
    std::vector<Pose> poses; // poses[i] is the pose before step i; one extra at the end
    // First step revisiting an earlier (position, heading): {earlier, later}.
    std::optional<std::pair<std::size_t, std::size_t>> repeated_pose;
    // First pair of steps with equal 25-cell observations at different poses.
    std::optional<std::pair<std::size_t, std::size_t>> repeated_observation;
    // Step after which every wall-adjacent cell was visited and the agent
    // stood on its start cell again.
    std::optional<std::size_t> completed_at;
    std::size_t wall_cells = 0;
    std::size_t wall_cells_visited = 0;
};

WalkReport analyse_walk(const GridWorld& start, const SimTrace& trace);
SimTrace run_walk(const WallFollowScenario& s, const AsmPtr& controller, std::size_t steps,
                  bool stop_when_complete = false);

// ---- Door --------------------------------------------------------------------

struct DoorScenario
{
    Model model;
    std::unique_ptr<DoorWorld> world;
    KBTreePtr handling;
    KBTreePtr ignoring;
};

DoorScenario door_scenario();

} // namespace kbt
