#include "kbt/world.hpp"

#include <algorithm>
#include <json.hpp>

#include "kbt/error.hpp"

namespace kbt {

bool World::accepts(const ActionId& command) const
{
    const auto cs = commands();
    return std::find(cs.begin(), cs.end(), command) != cs.end();
}

namespace {

[[noreturn]] void reject(const World& w, const ActionId& command)
{
    throw Error(w.kind() + " world does not accept command '" + command.str() + "'");
}

std::vector<ActionId> ids(std::initializer_list<const char*> names)
{
    std::vector<ActionId> out;
    for (const char* n : names)
        out.emplace_back(n);
    return out;
}

} // namespace

// ---- Battery -----------------------------------------------------------------

BatteryWorld::BatteryWorld(BatteryConfig cfg) : cfg_(std::move(cfg)), battery_(std::clamp(cfg_.battery, 0, 100))
{
    if (cfg_.drain < 0 || cfg_.charge < 0 || cfg_.idle_drain < 0)
        throw ConstructionError("battery rates must not be negative");
}

InputState BatteryWorld::observe() const
{
    InputState x;
    x.set("battery", battery_);
    if (cfg_.track_recharging)
        x.set("recharging", recharging_ ? 1 : 0, Visibility::hidden);
    return x;
}

void BatteryWorld::step(const ActionId& command)
{
    if (!accepts(command))
        reject(*this, command);
    if (command.str() == "Recharge") {
        battery_ = std::min(100, battery_ + cfg_.charge);
        recharging_ = battery_ < 100;
    } else if (command == noop_action()) {
        battery_ = std::max(0, battery_ - cfg_.idle_drain);
    } else {
        battery_ = std::max(0, battery_ - cfg_.drain);
    }
}

std::vector<ActionId> BatteryWorld::commands() const
{
    auto out = ids({"Recharge", "NoOp"});
    for (const auto& t : cfg_.tasks)
        out.emplace_back(t);
    return out;
}

std::vector<VariableDecl> BatteryWorld::variables() const
{
    std::vector<VariableDecl> out{{"battery", 0, 100, Visibility::visible, 0}};
    if (cfg_.track_recharging)
        out.push_back({"recharging", 0, 1, Visibility::hidden, 0});
    return out;
}

std::map<std::string, int> BatteryWorld::summary() const
{
    std::map<std::string, int> out{{"battery", battery_}};
    if (cfg_.track_recharging)
        out["recharging"] = recharging_ ? 1 : 0;
    return out;
}

// ---- Grid --------------------------------------------------------------------

namespace {

std::pair<int, int> delta(Heading h)
{
    switch (h) {
    case Heading::north: return {0, -1};
    case Heading::east: return {1, 0};
    case Heading::south: return {0, 1};
    case Heading::west: return {-1, 0};
    }
    return {0, 0};
}

} // namespace

Heading turned_right(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 1) % 4); }
Heading turned_left(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 3) % 4); }

char heading_letter(Heading h) { return "NESW"[static_cast<int>(h)]; }

Heading parse_heading(const std::string& s)
{
    if (s == "N" || s == "north")
        return Heading::north;
    if (s == "E" || s == "east")
        return Heading::east;
    if (s == "S" || s == "south")
        return Heading::south;
    if (s == "W" || s == "west")
        return Heading::west;
    throw ConstructionError("unknown heading '" + s + "'");
}

std::string cell_variable(int forward, int right)
{
    auto part = [](int v) { return v < 0 ? "n" + std::to_string(-v) : std::to_string(v); };
    return "cell_f" + part(forward) + "_r" + part(right);
}

GridWorld::GridWorld(std::vector<std::string> rows, Pose start) : rows_(std::move(rows)), start_(start), pose_(start)
{
    if (rows_.empty() || rows_[0].empty())
        throw ConstructionError("grid map must not be empty");
    height_ = static_cast<int>(rows_.size());
    width_ = static_cast<int>(rows_[0].size());
    for (const auto& r : rows_) {
        if (static_cast<int>(r.size()) != width_)
            throw ConstructionError("grid rows must have equal length");
        for (char c : r)
            if (c != '#' && c != '.' && c != 'm')
                throw ConstructionError(std::string("unknown grid cell '") + c + "'");
    }
    if (cell(start.x, start.y) == Cell::wall || cell(start.x, start.y) == Cell::outside)
        throw ConstructionError("agent must start on a free cell");
}

Cell GridWorld::cell(int x, int y) const
{
    if (x < 0 || y < 0 || x >= width_ || y >= height_)
        return Cell::outside;
    switch (rows_[y][x]) {
    case '#': return Cell::wall;
    case 'm': return Cell::marker;
    default: return Cell::empty;
    }
}

std::vector<std::vector<int>> GridWorld::window() const
{
    const auto [fx, fy] = delta(pose_.heading);
    const auto [rx, ry] = delta(turned_right(pose_.heading));
    std::vector<std::vector<int>> out(5, std::vector<int>(5));
    for (int f = -2; f <= 2; ++f) {
        for (int r = -2; r <= 2; ++r) {
            const Cell c = (f == 0 && r == 0) ? Cell::agent
                                              : cell(pose_.x + f * fx + r * rx, pose_.y + f * fy + r * ry);
            out[f + 2][r + 2] = static_cast<int>(c);
        }
    }
    return out;
}

std::vector<std::pair<int, int>> GridWorld::wall_adjacent_cells() const
{
    std::vector<std::pair<int, int>> out;
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            if (cell(x, y) == Cell::wall || cell(x, y) == Cell::outside)
                continue;
            for (Heading h : {Heading::north, Heading::east, Heading::south, Heading::west}) {
                const auto [dx, dy] = delta(h);
                if (cell(x + dx, y + dy) == Cell::wall) {
                    out.emplace_back(x, y);
                    break;
                }
            }
        }
    }
    return out;
}

InputState GridWorld::observe() const
{
    InputState x;
    const auto w = window();
    for (int f = -2; f <= 2; ++f)
        for (int r = -2; r <= 2; ++r)
            x.set(cell_variable(f, r), w[f + 2][r + 2]);
    return x;
}

void GridWorld::step(const ActionId& command)
{
    const std::string& c = command.str();
    if (c == "StepForward") {
        const auto [dx, dy] = delta(pose_.heading);
        const Cell next = cell(pose_.x + dx, pose_.y + dy);
        if (next != Cell::wall && next != Cell::outside) {
            pose_.x += dx;
            pose_.y += dy;
        }
    } else if (c == "TurnLeft") {
        pose_.heading = turned_left(pose_.heading);
    } else if (c == "TurnRight") {
        pose_.heading = turned_right(pose_.heading);
    } else if (c == "Mark") {
        rows_[pose_.y][pose_.x] = 'm';
    } else if (command != noop_action()) {
        reject(*this, command);
    }
}

std::vector<ActionId> GridWorld::commands() const
{
    return ids({"StepForward", "TurnLeft", "TurnRight", "NoOp", "Mark"});
}

std::vector<VariableDecl> GridWorld::variables() const
{
    std::vector<VariableDecl> out;
    for (int f = -2; f <= 2; ++f)
        for (int r = -2; r <= 2; ++r)
            out.push_back({cell_variable(f, r), 0, 4, Visibility::visible, 0});
    return out;
}

std::map<std::string, int> GridWorld::summary() const
{
    return {{"x", pose_.x}, {"y", pose_.y}, {"heading", static_cast<int>(pose_.heading)}};
}

// ---- Door --------------------------------------------------------------------

DoorWorld::DoorWorld(DoorConfig cfg)
    : locked_(cfg.locked), knowledge_(cfg.knowledge), has_key_(cfg.has_key), room_(cfg.room)
{
    if (room_ != 0 && room_ != 1)
        throw ConstructionError("room must be 0 or 1");
}

InputState DoorWorld::observe() const
{
    InputState x;
    x.set("knowledge", static_cast<int>(knowledge_));
    x.set("has_key", has_key_ ? 1 : 0);
    x.set("room", room_);
    return x;
}

void DoorWorld::step(const ActionId& command)
{
    const std::string& c = command.str();
    if (c == "Unlock") {
        if (has_key_)
            locked_ = false;
        knowledge_ = locked_ ? Knowledge::locked : Knowledge::unlocked;
    } else if (c == "Probe") {
        knowledge_ = locked_ ? Knowledge::locked : Knowledge::unlocked;
    } else if (c == "GoThrough") {
        if (!locked_)
            room_ = 1;
    } else if (c == "FetchKey") {
        has_key_ = true;
    } else if (command != noop_action()) {
        reject(*this, command);
    }
}

std::vector<ActionId> DoorWorld::commands() const
{
    return ids({"Unlock", "Probe", "GoThrough", "FetchKey", "NoOp"});
}

std::vector<VariableDecl> DoorWorld::variables() const
{
    return {{"knowledge", 0, 2, Visibility::visible, 0},
            {"has_key", 0, 1, Visibility::visible, 0},
            {"room", 0, 1, Visibility::visible, 0}};
}

std::map<std::string, int> DoorWorld::summary() const
{
    return {{"locked", locked_ ? 1 : 0},
            {"knowledge", static_cast<int>(knowledge_)},
            {"has_key", has_key_ ? 1 : 0},
            {"room", room_}};
}

// ---- Scripted ----------------------------------------------------------------

ScriptedWorld::ScriptedWorld(std::vector<InputState> script, std::vector<VariableDecl> variables,
                             std::vector<ActionId> commands)
    : script_(std::move(script)), variables_(std::move(variables)), commands_(std::move(commands))
{
    if (script_.empty())
        throw ConstructionError("scripted world needs at least one observation");
}

InputState ScriptedWorld::observe() const
{
    return script_[std::min(index_, script_.size() - 1)];
}

void ScriptedWorld::step(const ActionId& command)
{
    if (!commands_.empty() && !accepts(command))
        reject(*this, command);
    ++index_;
}

std::map<std::string, int> ScriptedWorld::summary() const
{
    return {{"index", static_cast<int>(index_)}};
}

// ---- Controller stack --------------------------------------------------------

ControllerStack::ControllerStack(std::vector<Layer> layers) : layers_(std::move(layers))
{
    if (layers_.empty())
        throw ConstructionError("controller stack needs at least one layer");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        if (!layers_[i].controller)
            throw ConstructionError("layer '" + layers_[i].name + "' has no controller");
        for (std::size_t j = 0; j < i; ++j)
            if (layers_[j].name == layers_[i].name)
                throw ConstructionError("duplicate layer '" + layers_[i].name + "'");
    }
}

std::optional<std::size_t> ControllerStack::layer_index(const std::string& name) const
{
    for (std::size_t i = 0; i < layers_.size(); ++i)
        if (layers_[i].name == name)
            return i;
    return std::nullopt;
}

std::vector<Selection> SimTrace::selections() const
{
    std::vector<Selection> out;
    for (const auto& s : steps)
        out.push_back(s.path.back().second);
    return out;
}

std::vector<ActionId> SimTrace::commands() const
{
    std::vector<ActionId> out;
    for (const auto& s : steps)
        out.push_back(s.command);
    return out;
}

SimTrace simulate(const World& w, const ControllerStack& c, const SimOptions& opts)
{
    auto world = w.clone();
    if (opts.seed)
        world->reseed(*opts.seed);
    const auto& layers = c.layers();
    std::vector<std::unique_ptr<Session>> sessions;
    for (const auto& l : layers)
        sessions.push_back(l.controller->start());

    SimTrace trace;
    trace.world_kind = world->kind();
    trace.seed = opts.seed;
    for (std::size_t t = 0; t < opts.steps; ++t) {
        SimStep step;
        step.step = t;
        step.input = world->observe();
        if (opts.observe_override)
            if (auto x = opts.observe_override(t, step.input))
                step.input = std::move(*x);

        std::vector<bool> consulted(layers.size(), false);
        std::size_t cur = 0;
        for (;;) {
            consulted[cur] = true;
            const Selection sel = sessions[cur]->step(step.input);
            step.path.emplace_back(layers[cur].name, sel);
            if (sel.kind != LeafKind::action) {
                step.command = noop_action();
                break;
            }
            if (auto lower = c.layer_index(sel.action.str())) {
                if (*lower <= cur)
                    throw StackError("layer '" + layers[cur].name + "' selects layer '" + sel.action.str() +
                                     "', which is not below it");
                cur = *lower;
                continue;
            }
            step.command = sel.action;
            break;
        }
        if (!world->accepts(step.command))
            throw StackError("selection '" + step.command.str() + "' is neither a layer nor a " + world->kind() +
                             " world command");
        for (std::size_t i = 0; i < layers.size(); ++i)
            if (!consulted[i])
                sessions[i] = layers[i].controller->start();

        world->step(step.command);
        step.world = world->summary();
        trace.steps.push_back(std::move(step));
        if (opts.stop) {
            if (std::string why = opts.stop(*world, t); !why.empty()) {
                trace.stopped = std::move(why);
                break;
            }
        }
    }
    return trace;
}

std::string to_jsonl(const SimTrace& t)
{
    using nlohmann::ordered_json;
    std::string out;
    for (const auto& s : t.steps) {
        ordered_json line;
        line["step"] = s.step;
        ordered_json input = ordered_json::object();
        for (const auto& [k, v] : s.input.bindings())
            input[s.input.is_hidden(k) ? "#" + k : k] = v;
        line["input"] = std::move(input);
        ordered_json path = ordered_json::array();
        for (const auto& [layer, sel] : s.path) {
            ordered_json p;
            p["layer"] = layer;
            p["action"] = sel.action.str();
            p["value"] = sel.value ? ordered_json(sel.value->str()) : ordered_json(nullptr);
            p["handled"] = sel.handled;
            path.push_back(std::move(p));
        }
        line["path"] = std::move(path);
        line["command"] = s.command.str();
        ordered_json world = ordered_json::object();
        for (const auto& [k, v] : s.world)
            world[k] = v;
        line["world"] = std::move(world);
        out += line.dump();
        out += '\n';
    }
    return out;
}

} // namespace kbt
