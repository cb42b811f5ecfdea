#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kbt/asm.hpp"

namespace kbt {

// Steppable environment. Worlds are mutable; simulate() works on a clone.
class World
{
public:
    virtual ~World() = default;

    virtual InputState observe() const = 0;
    // Throws Error for commands outside commands().
    virtual void step(const ActionId& command) = 0;
    virtual std::vector<ActionId> commands() const = 0;
    // Domains of the observed variables.
    virtual std::vector<VariableDecl> variables() const = 0;
    // Small integer summary of the full state, for traces.
    virtual std::map<std::string, int> summary() const = 0;
    virtual std::unique_ptr<World> clone() const = 0;
    virtual std::string kind() const = 0;

    virtual void reseed(std::uint64_t) {}
    bool accepts(const ActionId& command) const;
};

// ---- Battery -----------------------------------------------------------------

struct BatteryConfig
{
    int battery = 50;
    int drain = 1;      // per step while a task runs
    int charge = 5;     // per step while recharging
    int idle_drain = 1; // per NoOp step
    std::vector<std::string> tasks{"OtherTask"};
    // Exposes a hidden `recharging` flag: set by Recharge, cleared at 100.
    bool track_recharging = false;
};

class BatteryWorld final : public World
{
public:
    explicit BatteryWorld(BatteryConfig cfg = {});

    int battery() const noexcept { return battery_; }
    const BatteryConfig& config() const noexcept { return cfg_; }

    InputState observe() const override;
    void step(const ActionId& command) override;
    std::vector<ActionId> commands() const override;
    std::vector<VariableDecl> variables() const override;
    std::map<std::string, int> summary() const override;
    std::unique_ptr<World> clone() const override { return std::make_unique<BatteryWorld>(*this); }
    std::string kind() const override { return "battery"; }

private:
    BatteryConfig cfg_;
    int battery_;
    bool recharging_ = false;
};

// ---- Grid --------------------------------------------------------------------

enum class Heading
{
    north,
    east,
    south,
    west,
};

enum class Cell
{
    empty = 0,
    wall = 1,
    agent = 2,
    marker = 3,
    outside = 4,
};

struct Pose
{
    int x = 0;
    int y = 0;
    Heading heading = Heading::east;
    friend auto operator<=>(const Pose&, const Pose&) = default;
};

Heading turned_right(Heading h);
Heading turned_left(Heading h);
char heading_letter(Heading h);
Heading parse_heading(const std::string& s);

// Variable holding the cell `forward` ahead and `right` to the right of the
// agent, e.g. cell_f1_r0 or cell_fn1_r1 (n marks a negative offset).
std::string cell_variable(int forward, int right);

class GridWorld final : public World
{
public:
    // Rows top to bottom: '#' wall, '.' empty, 'm' marker. x grows to the
    // right, y grows downwards.
    GridWorld(std::vector<std::string> rows, Pose start);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    const Pose& pose() const noexcept { return pose_; }
    const Pose& start_pose() const noexcept { return start_; }
    Cell cell(int x, int y) const;
    // The 5x5 window in the agent frame, indexed [forward+2][right+2].
    std::vector<std::vector<int>> window() const;
    // Free cells 4-adjacent to a wall.
    std::vector<std::pair<int, int>> wall_adjacent_cells() const;

    InputState observe() const override;
    void step(const ActionId& command) override;
    std::vector<ActionId> commands() const override;
    std::vector<VariableDecl> variables() const override;
    std::map<std::string, int> summary() const override;
    std::unique_ptr<World> clone() const override { return std::make_unique<GridWorld>(*this); }
    std::string kind() const override { return "grid"; }

private:
    std::vector<std::string> rows_;
    int width_ = 0;
    int height_ = 0;
    Pose start_;
    Pose pose_;
};

// ---- Door --------------------------------------------------------------------

enum class Knowledge
{
    locked = 0,
    unlocked = 1,
    unknown = 2,
};

struct DoorConfig
{
    bool locked = true;
    Knowledge knowledge = Knowledge::unknown;
    bool has_key = false;
    int room = 0;
};

// Commands: Unlock, Probe, GoThrough, FetchKey, NoOp. Knowledge changes
// only through Unlock and Probe.
class DoorWorld final : public World
{
public:
    explicit DoorWorld(DoorConfig cfg = {});

    bool locked() const noexcept { return locked_; }
    Knowledge knowledge() const noexcept { return knowledge_; }
    bool has_key() const noexcept { return has_key_; }
    int room() const noexcept { return room_; }

    InputState observe() const override;
    void step(const ActionId& command) override;
    std::vector<ActionId> commands() const override;
    std::vector<VariableDecl> variables() const override;
    std::map<std::string, int> summary() const override;
    std::unique_ptr<World> clone() const override { return std::make_unique<DoorWorld>(*this); }
    std::string kind() const override { return "door"; }

private:
    bool locked_;
    Knowledge knowledge_;
    bool has_key_;
    int room_;
};

// ---- Scripted ----------------------------------------------------------------

// Replays a fixed observation sequence (the last one repeats) and accepts any
// command. Useful for open-loop scenarios.
class ScriptedWorld final : public World
{
public:
    ScriptedWorld(std::vector<InputState> script, std::vector<VariableDecl> variables,
                  std::vector<ActionId> commands = {});

    InputState observe() const override;
    void step(const ActionId& command) override;
    std::vector<ActionId> commands() const override { return commands_; }
    std::vector<VariableDecl> variables() const override { return variables_; }
    std::map<std::string, int> summary() const override;
    std::unique_ptr<World> clone() const override { return std::make_unique<ScriptedWorld>(*this); }
    std::string kind() const override { return "scripted"; }

private:
    std::vector<InputState> script_;
    std::vector<VariableDecl> variables_;
    std::vector<ActionId> commands_;
    std::size_t index_ = 0;
};

// ---- Controller stack --------------------------------------------------------

struct Layer
{
    std::string name;
    AsmPtr controller;
};

// Ordered layers, top first. A selection naming a lower layer hands the same
// input to that layer; anything else is a world command. Layers that were
// not consulted in a step restart from their initial state.
class ControllerStack
{
public:
    explicit ControllerStack(std::vector<Layer> layers);

    const std::vector<Layer>& layers() const noexcept { return layers_; }
    std::optional<std::size_t> layer_index(const std::string& name) const;

private:
    std::vector<Layer> layers_;
};

struct SimStep
{
    std::size_t step = 0;
    InputState input;
    // Selection of every consulted layer, top first.
    std::vector<std::pair<std::string, Selection>> path;
    ActionId command;
    std::map<std::string, int> world; // after the step
};

struct SimTrace
{
    std::string world_kind;
    std::optional<std::uint64_t> seed;
    std::vector<SimStep> steps;
    std::string stopped; // reason when a stop condition fired

    std::vector<Selection> selections() const; // resolved selection per step
    std::vector<ActionId> commands() const;
};

struct SimOptions
{
    std::size_t steps = 100;
    std::optional<std::uint64_t> seed;
    // Replaces the observation at a step before the stack sees it.
    std::function<std::optional<InputState>(std::size_t step, const InputState& observed)> observe_override;
    // Checked after each step; a non-empty reason ends the run.
    std::function<std::string(const World& w, std::size_t step)> stop;
};

SimTrace simulate(const World& w, const ControllerStack& c, const SimOptions& opts);

// One JSON object per step, fields in a fixed order.
std::string to_jsonl(const SimTrace& t);

} // namespace kbt
