#include <sstream>

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "isingmdp/experiment.hpp"

namespace py = pybind11;
using namespace isingmdp;

namespace {

SpinConfiguration from_rows(const std::vector<std::string>& rows, double field) { return from_ascii(rows, field); }

RelaxationMode mode_of(std::optional<std::uint64_t> kappa) {
    if (kappa) return Capped{*kappa};
    return ToRobust{};
}

const FiniteMdp& cached_model(int n) {
    static std::map<int, FiniteMdp> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_stripe_stripe_mdp(n)).first;
    return it->second;
}

std::map<std::string, double> family_values(int n, const std::string& family, double lambda) {
    const FiniteMdp& mdp = cached_model(n);
    const auto v = policy_evaluation(mdp, x_family_policy(mdp, parse_family(family)), lambda);
    std::map<std::string, double> out;
    for (int s = 0; s < mdp.size(); ++s) out[mdp.state(s).label] = v[s];
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Zero-temperature Ising control toolkit";
    m.attr("__version__") = std::string(kToolkitVersion);

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ClassificationError>(m, "ClassificationError", PyExc_RuntimeError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);
    py::register_exception<BracketError>(m, "BracketError", PyExc_ValueError);

    py::class_<SpinConfiguration>(m, "SpinConfiguration")
        .def_static("all_minus", [](int n, double h) { return SpinConfiguration::all_minus(Lattice(n, h)); },
                    py::arg("n"), py::arg("field") = 0.5)
        .def_static("all_plus", [](int n, double h) { return SpinConfiguration::all_plus(Lattice(n, h)); },
                    py::arg("n"), py::arg("field") = 0.5)
        .def_static("from_ascii", &from_rows, py::arg("rows"), py::arg("field") = 0.5)
        .def_property_readonly("side", &SpinConfiguration::side)
        .def_property_readonly("plus_count", &SpinConfiguration::plus_count)
        .def("spin", [](const SpinConfiguration& s, int r, int c) { return s.spin(Site{r, c}); })
        .def("spins", [](const SpinConfiguration& s) { return std::vector<int>(s.spins().begin(), s.spins().end()); })
        .def("flip", [](const SpinConfiguration& s, int r, int c) { return flip(s, {r, c}); })
        .def("fill_plus",
             [](SpinConfiguration s, int r, int c, int h, int w) {
                 s.fill_plus(r, c, h, w);
                 return s;
             })
        .def("to_ascii", &to_ascii)
        .def("to_pgm",
             [](const SpinConfiguration& s) {
                 std::ostringstream os;
                 write_pgm(os, s);
                 return os.str();
             })
        .def("__eq__", [](const SpinConfiguration& a, const SpinConfiguration& b) { return a == b; })
        .def("__repr__", [](const SpinConfiguration& s) {
            return "<SpinConfiguration N=" + std::to_string(s.side()) + " plus=" + std::to_string(s.plus_count()) +
                   ">";
        });

    m.def("hamiltonian", &hamiltonian);
    m.def("energy_delta", [](const SpinConfiguration& s, int r, int c) { return energy_delta(s, {r, c}); });
    m.def("is_robust", &is_robust);
    m.def("stripe_pair", [](int n, int i, int j) { return stripe_pair(n, {i, j}); });
    m.def(
        "relax",
        [](const SpinConfiguration& s, std::uint64_t seed, std::optional<std::uint64_t> kappa) {
            Rng rng = make_stream(seed, 0);
            return relax(s, mode_of(kappa), rng);
        },
        py::arg("sigma"), py::arg("seed") = 1, py::arg("kappa") = py::none());
    m.def(
        "downhill_absorption",
        [](const SpinConfiguration& s, std::size_t budget) {
            std::vector<std::tuple<SpinConfiguration, std::string, double>> out;
            for (const auto& [key, e] : downhill_absorption(s, budget).entries) {
                out.emplace_back(e.config, e.probability.str(), e.probability.convert_to<double>());
            }
            return out;
        },
        py::arg("sigma"), py::arg("budget") = 1'000'000);

    m.def("classify_x", [](const SpinConfiguration& s) {
        const auto x = classify_x(s);
        return std::make_tuple(x.i, x.j);
    });
    m.def("classify_y", [](const SpinConfiguration& s) {
        const auto y = classify_y(s);
        return std::make_tuple(y.i, y.j, y.k);
    });
    m.def("classify_z", [](const SpinConfiguration& s) {
        const auto z = classify_z(s);
        return std::make_tuple(z.i, z.j, z.k, z.l, z.m, z.n);
    });

    m.def("model_labels", [](int n) {
        std::vector<std::string> out;
        for (const auto& st : cached_model(n).states()) out.push_back(st.label);
        return out;
    });
    m.def("serialize_model", [](int n) { return cached_model(n).serialize(); });
    m.def("family_values", &family_values, py::arg("n"), py::arg("family"), py::arg("lam"));
    m.def("analytic_value_x", [](int i, int j, double lambda) { return analytic_value_x({i, j}, lambda); });
    m.def(
        "lambda_crossing",
        [](int n, int i, int j, double lo, double hi) {
            const FiniteMdp& mdp = cached_model(n);
            return find_lambda_crossing(mdp, x_family_policy(mdp, Family::XA1), x_family_policy(mdp, Family::XA2),
                                        mdp.index(x_label(i, j)), {lo, hi});
        },
        py::arg("n") = 32, py::arg("i") = 13, py::arg("j") = 13, py::arg("lo") = 0.8, py::arg("hi") = 0.95);
    m.def(
        "hitting_time_moments",
        [](int n, const std::string& family) {
            const FiniteMdp& mdp = cached_model(n);
            const auto moments =
                hitting_time_moments(mdp, x_family_policy(mdp, parse_family(family)), mdp.index(x_label(0, 0)));
            std::map<std::string, std::pair<double, double>> out;
            for (int s = 0; s < mdp.size(); ++s) {
                const auto& mo = moments[static_cast<std::size_t>(s)];
                out[mdp.state(s).label] = {mo.e_tau, mo.e_tau_factorial2};
            }
            return out;
        },
        py::arg("n"), py::arg("family"));
    m.def("verify_kernel", [](int n) {
        std::vector<py::dict> out;
        for (const auto& k : verify_kernel_rows(n)) {
            py::dict d;
            d["state"] = py::make_tuple(k.state.i, k.state.j);
            d["action"] = k.action;
            d["expected"] = k.expected;
            d["observed"] = k.observed;
            d["match"] = k.match;
            out.push_back(d);
        }
        return out;
    });

    m.def(
        "simulate",
        [](const std::string& config_json, const std::string& family) {
            const ExperimentConfig c = parse_config(config_json);
            RunOptions opt;
            opt.mode = c.relaxation;
            opt.max_epochs = c.max_epochs;
            FamilyRun run;
            {
                py::gil_scoped_release release;
                run = simulate_family(build_seed(c), parse_family(family), opt, c.replications, c.master_seed,
                                      c.threads);
            }
            return run.samples();
        },
        py::arg("config_json"), py::arg("family"));
    m.def(
        "run_command",
        [](const std::string& command, const std::string& config_json) {
            const ExperimentConfig c = parse_config(config_json);
            std::ostringstream log;
            CommandResult r;
            if (command == "verify-kernel") r = cmd_verify_kernel(c, log);
            else if (command == "evaluate") r = cmd_evaluate(c, log);
            else if (command == "simulate") r = cmd_simulate(c, log);
            else if (command == "moments") r = cmd_moments(c, log);
            else if (command == "render") r = cmd_render(c, log);
            else throw py::value_error("unknown command " + command);
            write_manifest(c, command, r, 0.0);
            return py::make_tuple(r.exit_code, r.outputs, log.str());
        },
        py::arg("command"), py::arg("config_json"));
}
