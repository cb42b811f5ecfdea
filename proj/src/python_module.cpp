#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kbt/analysis.hpp"
#include "kbt/dsl.hpp"
#include "kbt/error.hpp"
#include "kbt/scenarios.hpp"

namespace py = pybind11;
using namespace kbt;

namespace {

InputState to_input(const std::map<std::string, int>& bindings)
{
    InputState x;
    for (const auto& [k, v] : bindings)
        x.set(k, v);
    return x;
}

py::dict to_dict(const Selection& s)
{
    py::dict d;
    d["action"] = s.action.str();
    d["value"] = s.value ? py::object(py::str(s.value->str())) : py::object(py::none());
    d["handled"] = s.handled;
    return d;
}

py::list to_list(const History& h)
{
    py::list out;
    for (const auto& x : h)
        out.append(x.bindings());
    return out;
}

CheckOptions options(std::optional<std::size_t> sample, std::optional<std::uint64_t> seed, bool values)
{
    CheckOptions o;
    o.samples = sample;
    o.seed = seed;
    o.compare_values = values;
    return o;
}

py::dict reactiveness(const Model& m, const std::string& name, const std::string& alphabet, std::size_t max_len,
                      std::optional<std::size_t> sample, std::optional<std::uint64_t> seed)
{
    const auto r = check_reactive(*m.asm_named(name), m.alphabet(alphabet), max_len, options(sample, seed, false));
    py::dict d;
    d["reactive"] = r.reactive;
    d["exhaustive"] = r.exhaustive;
    d["histories"] = r.histories;
    d["text"] = to_string(r);
    if (r.witness) {
        d["witness"] = py::make_tuple(to_list(r.witness->first), to_list(r.witness->second));
        d["selections"] = py::make_tuple(to_dict(r.witness->first_selection), to_dict(r.witness->second_selection));
    } else {
        d["witness"] = py::none();
    }
    return d;
}

py::dict equivalence(const Model& m, const std::string& a, const std::string& b, const std::string& alphabet,
                     std::size_t max_len, bool values, std::optional<std::size_t> sample,
                     std::optional<std::uint64_t> seed)
{
    const auto r = check_equivalence(*m.asm_named(a), *m.asm_named(b), m.alphabet(alphabet), max_len,
                                     options(sample, seed, values));
    py::dict d;
    d["equivalent"] = r.equivalent;
    d["exhaustive"] = r.exhaustive;
    d["histories"] = r.histories;
    d["text"] = to_string(r);
    d["witness"] = r.witness ? py::object(to_list(r.witness->history)) : py::object(py::none());
    return d;
}

py::list run_history(const Model& m, const std::string& name, const std::vector<std::map<std::string, int>>& inputs)
{
    History h;
    for (const auto& b : inputs)
        h.push_back(to_input(b));
    py::list out;
    for (const auto& s : trace_asm(*m.asm_named(name), h))
        out.append(to_dict(s));
    return out;
}

py::dict simulate_model(const Model& m, const std::string& stack, const std::string& world, std::size_t steps,
                        std::optional<std::uint64_t> seed)
{
    SimOptions opts;
    opts.steps = steps;
    opts.seed = seed;
    const SimTrace t = simulate(*m.world(world), m.stack(stack), opts);
    py::list commands;
    for (const auto& c : t.commands())
        commands.append(c.str());
    py::dict d;
    d["commands"] = commands;
    d["switches"] = count_switches(t.selections());
    d["jsonl"] = to_jsonl(t);
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "k-valued behaviour trees: models, checkers, worlds";

    static py::exception<Error> error(m, "KbtError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p)
                std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error, e.what());
        }
    });

    py::class_<Model>(m, "Model")
        .def_property_readonly("asm_names", &Model::asm_names)
        .def_property_readonly("world_names", &Model::world_names)
        .def_property_readonly("warnings", &Model::warnings)
        .def("format", [](const Model& self) { return format_model(self); })
        .def("export_dot", [](const Model& self, const std::string& name) {
            return export_dot(*self.asm_named(name), name);
        })
        .def("run", &run_history, py::arg("asm"), py::arg("inputs"),
             "Selections after each input of the history.")
        .def("check_reactive", &reactiveness, py::arg("asm"), py::arg("alphabet"), py::arg("max_len"),
             py::arg("sample") = py::none(), py::arg("seed") = py::none())
        .def("check_equivalence", &equivalence, py::arg("a"), py::arg("b"), py::arg("alphabet"), py::arg("max_len"),
             py::arg("values") = false, py::arg("sample") = py::none(), py::arg("seed") = py::none())
        .def("simulate", &simulate_model, py::arg("stack"), py::arg("world"), py::arg("steps") = 100,
             py::arg("seed") = py::none())
        .def("__eq__", [](const Model& a, const Model& b) { return a == b; });

    m.def("parse_model", [](const std::string& text) { return parse_model(text); }, py::arg("text"));
    m.def("bundled_models", &bundled_models);
    m.def("bundled_model", [](const std::string& name) { return bundled_model(name); }, py::arg("name"));
    m.def("bundled_model_text", [](const std::string& name) { return std::string(bundled_model_text(name)); });

    m.def("tick", [](const std::string& expr, const std::map<std::string, int>& inputs) {
        return to_dict(tick(infix_compose(expr), to_input(inputs)).selection);
    }, py::arg("expr"), py::arg("inputs") = std::map<std::string, int>{},
        "Ticks the tree written as an infix expression once.");
    m.def("format_tree", [](const std::string& expr) { return format_tree(infix_compose(expr)); });
    m.def("count_switches", [](const std::vector<std::string>& actions) {
        std::vector<Selection> s;
        for (const auto& a : actions)
            s.push_back(Selection{ActionId(a), std::nullopt, false});
        return count_switches(s);
    });

    m.def("chattering", [](std::size_t steps, bool scripted) {
        const auto r = scripted ? run_chattering_scripted(steps) : run_chattering(steps);
        return std::make_pair(r.reactive_switches, r.layered_switches);
    }, py::arg("steps") = 40, py::arg("scripted") = false,
        "Switch counts of the flat and layered battery controllers.");
    m.def("wall_follow", [] {
        const auto s = wall_follow_scenario();
        const auto r = analyse_walk(*s.world, run_walk(s, s.reactive, 50));
        const auto f = analyse_walk(*s.world, run_walk(s, s.fsm, 200, true));
        py::dict d;
        d["reactive_loop"] = r.repeated_pose ? py::object(py::make_tuple(r.repeated_pose->first, r.repeated_pose->second))
                                             : py::object(py::none());
        d["reactive_complete"] = r.completed_at.has_value();
        d["fsm_complete_at"] = f.completed_at ? py::object(py::int_(*f.completed_at)) : py::object(py::none());
        d["wall_cells"] = f.wall_cells;
        return d;
    });
    m.def("door", [] {
        const auto d = door_scenario();
        const auto x = d.world->observe();
        return std::make_pair(tick(*d.handling, x).selection.action.str(), tick(*d.ignoring, x).selection.action.str());
    }, "Actions the Unknown-handling and Unknown-ignoring trees select when the door state is unknown.");
}
