#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "kbt/analysis.hpp"
#include "kbt/dsl.hpp"
#include "kbt/error.hpp"
#include "kbt/scenarios.hpp"

using namespace kbt;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_witness = 2;

Model load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write '" + path + "'");
    out << text;
}

CheckOptions check_options(std::optional<std::size_t> sample, std::optional<std::uint64_t> seed)
{
    CheckOptions opts;
    opts.samples = sample;
    opts.seed = seed;
    if (sample && !seed)
        throw Error("--sample needs --seed");
    return opts;
}

int demo(const std::string& scenario)
{
    if (scenario == "chattering") {
        const auto open = run_chattering_scripted(40);
        const auto closed = run_chattering(40);
        std::printf("battery oscillating 11/9 (scripted), 40 steps\n");
        std::printf("  flat tree switches:     %zu\n", open.reactive_switches);
        std::printf("  moded stack switches:   %zu\n", open.layered_switches);
        std::printf("battery world hovering at 10%% (closed loop), 40 steps\n");
        std::printf("  flat tree switches:     %zu\n", closed.reactive_switches);
        std::printf("  moded stack switches:   %zu\n", closed.layered_switches);
        return exit_ok;
    }
    if (scenario == "wall-follow") {
        const auto s = wall_follow_scenario();
        const auto r = analyse_walk(*s.world, run_walk(s, s.reactive, 50));
        const auto f = analyse_walk(*s.world, run_walk(s, s.fsm, 200, true));
        std::printf("reactive wall follower, 50 steps\n");
        if (r.repeated_pose)
            std::printf("  pose at step %zu repeats step %zu (stuck in a loop)\n", r.repeated_pose->second,
                        r.repeated_pose->first);
        std::printf("  wall cells visited: %zu/%zu\n", r.wall_cells_visited, r.wall_cells);
        std::printf("FSM wall follower, up to 200 steps\n");
        if (f.completed_at)
            std::printf("  perimeter complete, back at start after %zu steps\n", *f.completed_at);
        else
            std::printf("  perimeter not completed\n");
        std::printf("  wall cells visited: %zu/%zu\n", f.wall_cells_visited, f.wall_cells);
        return exit_ok;
    }
    if (scenario == "door") {
        const auto d = door_scenario();
        const auto x = d.world->observe();
        std::printf("door locked, knowledge unknown, no key: %s\n", to_string(x).c_str());
        std::printf("  Unknown-handling tree selects: %s\n", to_string(tick(*d.handling, x).selection).c_str());
        std::printf("  Unknown-ignoring tree selects: %s\n", to_string(tick(*d.ignoring, x).selection).c_str());
        for (const char* stack : {"HandlingStack", "IgnoringStack"}) {
            const SimTrace t = simulate(*d.world, d.model.stack(stack), SimOptions{6, {}, {}, {}});
            std::printf("  %s:", stack);
            for (const auto& c : t.commands())
                std::printf(" %s", c.str().c_str());
            std::printf("\n");
        }
        return exit_ok;
    }
    throw Error("unknown scenario '" + scenario + "'");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"k-valued behaviour trees: run, check and export models"};
    app.require_subcommand(1);

    std::string model;
    std::string stack;
    std::string world;
    std::size_t steps = 100;
    std::optional<std::uint64_t> seed;
    std::string trace_out;
    auto* run = app.add_subcommand("run", "simulate a controller stack in a world");
    run->add_option("--model", model, "model file")->required();
    run->add_option("--stack", stack, "stack (or ASM) name")->required();
    run->add_option("--world", world, "world name")->required();
    run->add_option("--steps", steps, "number of steps")->default_val(100);
    run->add_option("--seed", seed, "seed");
    run->add_option("--trace-out", trace_out, "write the trace as JSON lines");

    std::string asm_name;
    std::string alphabet;
    std::size_t max_len = 3;
    std::optional<std::size_t> sample;
    auto* reactive = app.add_subcommand("check-reactive", "search for a non-reactiveness witness");
    reactive->add_option("--model", model, "model file")->required();
    reactive->add_option("--asm", asm_name, "ASM name")->required();
    reactive->add_option("--alphabet", alphabet, "alphabet name")->required();
    reactive->add_option("--max-len", max_len, "longest history")->required();
    reactive->add_option("--sample", sample, "random histories instead of enumeration");
    reactive->add_option("--seed", seed, "seed for --sample");

    std::string a_name;
    std::string b_name;
    bool values = false;
    auto* equiv = app.add_subcommand("equiv", "compare two ASMs on bounded histories");
    equiv->add_option("--model", model, "model file")->required();
    equiv->add_option("--a", a_name, "first ASM")->required();
    equiv->add_option("--b", b_name, "second ASM")->required();
    equiv->add_option("--alphabet", alphabet, "alphabet name")->required();
    equiv->add_option("--max-len", max_len, "longest history")->required();
    equiv->add_option("--sample", sample, "random histories instead of enumeration");
    equiv->add_option("--seed", seed, "seed for --sample");
    equiv->add_flag("--values", values, "also compare return values");

    std::string out;
    auto* dot = app.add_subcommand("export-dot", "write an ASM as Graphviz DOT");
    dot->add_option("--model", model, "model file")->required();
    dot->add_option("--asm", asm_name, "ASM name")->required();
    dot->add_option("--out", out, "output file (stdout when omitted)");

    auto* format = app.add_subcommand("format", "print the canonical form of a model");
    format->add_option("--model", model, "model file")->required();

    std::string scenario;
    auto* demo_cmd = app.add_subcommand("demo", "run a built-in scenario and print a summary");
    demo_cmd->add_option("--scenario", scenario, "scenario")
        ->required()
        ->check(CLI::IsMember({"chattering", "wall-follow", "door"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_error;
    }

    try {
        if (*run) {
            const Model m = load(model);
            SimOptions opts;
            opts.steps = steps;
            opts.seed = seed;
            const SimTrace t = simulate(*m.world(world), m.stack(stack), opts);
            const std::string text = to_jsonl(t);
            if (trace_out.empty())
                std::cout << text;
            else
                write_file(trace_out, text);
            std::cerr << t.steps.size() << " steps, " << count_switches(t.selections()) << " switches"
                      << (t.stopped.empty() ? "" : ", stopped: " + t.stopped) << "\n";
            return exit_ok;
        }
        if (*reactive) {
            const Model m = load(model);
            const auto r = check_reactive(*m.asm_named(asm_name), m.alphabet(alphabet), max_len,
                                          check_options(sample, seed));
            std::cout << to_string(r) << "\n";
            return r.reactive ? exit_ok : exit_witness;
        }
        if (*equiv) {
            const Model m = load(model);
            CheckOptions opts = check_options(sample, seed);
            opts.compare_values = values;
            const auto r = check_equivalence(*m.asm_named(a_name), *m.asm_named(b_name), m.alphabet(alphabet), max_len,
                                             opts);
            std::cout << to_string(r) << "\n";
            return r.equivalent ? exit_ok : exit_witness;
        }
        if (*dot) {
            const Model m = load(model);
            const std::string text = export_dot(*m.asm_named(asm_name), asm_name);
            if (out.empty())
                std::cout << text;
            else
                write_file(out, text);
            return exit_ok;
        }
        if (*format) {
            std::cout << format_model(load(model));
            return exit_ok;
        }
        if (*demo_cmd)
            return demo(scenario);
    } catch (const ParseError& e) {
        for (const auto& d : e.diagnostics())
            std::cerr << model << ":" << to_string(d) << "\n";
        return exit_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_error;
    }
    return exit_error;
}
