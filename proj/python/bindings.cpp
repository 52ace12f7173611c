#include "cvd/cvd.hpp"
#include "cvd/errors.hpp"
#include "cvd/hamiltonian.hpp"
#include "cvd/io.hpp"
#include "cvd/states.hpp"
#include "cvd/verification.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <variant>

namespace py = pybind11;
using namespace cvd;

namespace {

using AlphaArg = std::variant<double, std::string>;

RenyiIndex to_index(const AlphaArg& a) {
    if (const auto* s = std::get_if<std::string>(&a)) return RenyiIndex::parse(*s);
    return RenyiIndex::of(std::get<double>(a));
}

GateParams to_params(const std::array<double, 9>& t) { return GateParams{t}; }

Truncation to_truncation(Index max_bond, double cutoff) {
    return {max_bond <= 0 ? kUnboundedBond : max_bond, cutoff};
}

std::string dump(const nlohmann::json& j) { return j.dump(); }

py::dict sweep_dict(const Lemma1Sweep& s) {
    py::dict d;
    d["spectra"] = s.spectra;
    d["checks"] = s.checks;
    d["violations"] = s.violations;
    d["max_ratio"] = s.max_ratio;
    return d;
}

py::dict lemma3_dict(const Lemma3Stats& s) {
    py::list gens;
    for (const auto& g : s.generators) {
        py::dict e;
        e["name"] = g.name;
        e["mean"] = g.mean;
        e["variance"] = g.variance;
        e["stderr_mean"] = g.stderr_mean;
        e["stderr_variance"] = g.stderr_variance;
        gens.append(e);
    }
    py::dict d;
    d["D"] = s.D;
    d["samples"] = s.samples;
    d["generators"] = gens;
    d["closed_form"] = s.closed_form;
    d["mean_ok"] = s.mean_ok();
    d["status"] = s.status();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Canonical variational disentangling of matrix product states";
    m.attr("__version__") = kLibraryVersion;

    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);

    py::class_<Mps>(m, "Mps")
        .def_property_readonly("n", &Mps::size)
        .def("__len__", &Mps::size)
        .def("bond_dim", &Mps::bond_dim, py::arg("bond"))
        .def("bond_dims", &Mps::bond_dims)
        .def("max_bond_dim", &Mps::max_bond_dim)
        .def("schmidt_values", [](const Mps& s, int bond) { return s.lambda(bond).values(); }, py::arg("bond"))
        .def("gamma", [](const Mps& s, int site) {
                std::vector<Matrix> out;
                for (Index b = 0; b < s.gamma(site).phys_dim(); ++b) out.push_back(s.gamma(site)[b]);
                return out;
            }, py::arg("site"), "Physical slices Gamma[s] of one site tensor.")
        .def("statevector", &to_statevector)
        .def("canonical_deviation", &canonical_deviation)
        .def("to_json", [](const Mps& s) { return dump(to_json(s)); })
        .def_static("from_json", [](const std::string& s) { return mps_from_json(nlohmann::json::parse(s)); })
        .def("__repr__", [](const Mps& s) {
            return "<Mps n=" + std::to_string(s.size()) + " max_bond=" + std::to_string(s.max_bond_dim()) + ">";
        });

    m.def("canonicalize", [](const Vector& psi) { return canonicalize(psi); }, py::arg("psi"),
          "Exact canonical form of a dense qubit statevector (big-endian).");
    m.def("zero_state", &zero_state, py::arg("n"), py::arg("phys") = 2);
    m.def("overlap", &overlap);
    m.def("distance", &distance);
    m.def("truncate", [](const Mps& s, Index max_bond, double cutoff) {
            const TruncationResult r = truncate(s, to_truncation(max_bond, cutoff));
            return py::make_tuple(r.mps, r.discarded);
        }, py::arg("mps"), py::arg("max_bond") = 0, py::arg("cutoff") = 0.0);
    m.def("expectation", [](const Mps& s, const std::string& p) { return expectation(s, PauliString(p)); },
          py::arg("mps"), py::arg("pauli"));

    m.def("gate_matrix", [](const std::array<double, 9>& t) { return gate_matrix(to_params(t)); }, py::arg("theta"));
    m.def("apply_gate", [](const Mps& s, int site, const std::array<double, 9>& t, Index max_bond, double cutoff) {
            const GateResult r = apply_gate(s, site, to_params(t), to_truncation(max_bond, cutoff));
            return py::make_tuple(r.mps, r.discarded);
        }, py::arg("mps"), py::arg("site"), py::arg("theta"), py::arg("max_bond") = 0, py::arg("cutoff") = 0.0);

    m.def("renyi_entropy", [](const RealVector& v, const AlphaArg& a) { return renyi_entropy(v, to_index(a)); },
          py::arg("schmidt_values"), py::arg("alpha"));
    m.def("local_cost", [](const Mps& s, int site, const std::array<double, 9>& t, const AlphaArg& a) {
            return local_cost(s, site, to_params(t), to_index(a));
        }, py::arg("mps"), py::arg("site"), py::arg("theta"), py::arg("alpha"));
    m.def("fd_gradient", [](const Mps& s, int site, const std::array<double, 9>& t, const AlphaArg& a, double h) {
            return fd_gradient(s, site, to_params(t), to_index(a), h);
        }, py::arg("mps"), py::arg("site"), py::arg("theta"), py::arg("alpha"), py::arg("h") = 1e-5);
    m.def("analytic_gradient_theta0",
          [](const Mps& s, int site) { return analytic_gradient_theta0(s, site); }, py::arg("mps"), py::arg("site"),
          "Exact alpha=2 gradient at the identity gate.");

    py::class_<CvdConfig>(m, "CvdConfig")
        .def(py::init<>())
        .def_readwrite("max_layers", &CvdConfig::max_layers)
        .def_readwrite("bond_cap", &CvdConfig::bond_cap)
        .def_readwrite("cutoff", &CvdConfig::cutoff)
        .def_readwrite("target_tail", &CvdConfig::target_tail)
        .def_readwrite("target_eps_site", &CvdConfig::target_eps_site)
        .def_readwrite("seed", &CvdConfig::seed)
        .def_readwrite("threads", &CvdConfig::threads)
        .def("set_alpha", [](CvdConfig& c, const AlphaArg& a) { c.alpha = AlphaSchedule::constant(to_index(a)); },
             py::arg("alpha"), "Use one Renyi index for every layer.")
        .def("set_alpha_schedule", [](CvdConfig& c, const AlphaArg& base, const AlphaArg& special, int period) {
                c.alpha = AlphaSchedule{to_index(base), to_index(special), period};
            }, py::arg("base"), py::arg("special"), py::arg("period"))
        .def("alpha_at", [](const CvdConfig& c, int layer) { return c.alpha.at(layer).to_string(); })
        .def("to_json", [](const CvdConfig& c) { return dump(to_json(c)); })
        .def("update_from_json", [](CvdConfig& c, const std::string& s) { apply_config_json(nlohmann::json::parse(s), c); });

    py::class_<Circuit>(m, "Circuit")
        .def_readonly("n", &Circuit::n)
        .def_property_readonly("direction", [](const Circuit& c) { return to_string(c.direction); })
        .def_property_readonly("num_layers", [](const Circuit& c) { return c.layers.size(); })
        .def("gate_count", &Circuit::gate_count)
        .def("reversed", &Circuit::reversed)
        .def("export_gate_list", [](const Circuit& c) { return export_gate_list(c); })
        .def("apply", [](const Circuit& c, const Mps& s, bool reverse, Index max_bond, double cutoff) {
                return apply_circuit(s, c, to_truncation(max_bond, cutoff), reverse).mps;
            }, py::arg("mps"), py::arg("reverse") = false, py::arg("max_bond") = 0, py::arg("cutoff") = 0.0)
        .def("to_json", [](const Circuit& c) { return dump(to_json(c)); })
        .def_static("from_json", [](const std::string& s) { return circuit_from_json(nlohmann::json::parse(s)); });

    py::class_<CvdReport>(m, "CvdReport")
        .def_readonly("n", &CvdReport::n)
        .def_readonly("tail_matrix", &CvdReport::tail_matrix)
        .def_readonly("bond_dims", &CvdReport::bond_dims)
        .def_readonly("converged_layer", &CvdReport::converged_layer)
        .def_readonly("eps", &CvdReport::eps)
        .def_readonly("eps_site", &CvdReport::eps_site)
        .def_property_readonly("p_max", &CvdReport::p_max)
        .def("max_bond_dim", &CvdReport::max_bond_dim)
        .def("tail_csv", [](const CvdReport& r) { return tail_csv(r); })
        .def("to_json", [](const CvdReport& r) { return dump(to_json(r)); })
        .def_static("from_json", [](const std::string& s) { return report_from_json(nlohmann::json::parse(s)); });

    py::class_<CvdResult>(m, "CvdResult")
        .def_readonly("circuit", &CvdResult::circuit)
        .def_readonly("report", &CvdResult::report)
        .def_readonly("final_mps", &CvdResult::final_mps);

    m.def("disentangle", &disentangle, py::arg("mps"), py::arg("config") = CvdConfig{},
          py::call_guard<py::gil_scoped_release>());
    m.def("eps_site", &eps_site, py::arg("eps"), py::arg("n"));

    m.def("ghz", &ghz, py::arg("n"));
    m.def("cluster", &cluster, py::arg("n"));
    m.def("aklt", &aklt, py::arg("n_spin1"));
    m.def("random_mps", &random_mps, py::arg("n"), py::arg("bond"), py::arg("seed") = 0);
    m.def("logical_bell", [](const std::string& code, const std::string& layout) {
            return logical_bell(StabilizerCode::get(parse_code(code)), parse_layout(layout));
        }, py::arg("code"), py::arg("layout") = "separated");
    m.def("ground_state", [](const std::string& family, int n, double hx, double hz, double jz, double t, double u,
                             int n_up, int n_down) {
            HamiltonianSpec spec;
            spec.family = parse_family(family);
            spec.n_sites = n;
            spec.hx = hx;
            spec.hz = hz;
            spec.jz = jz;
            spec.t = t;
            spec.u = u;
            spec.n_up = n_up;
            spec.n_down = n_down;
            const GroundState gs = ed_ground_state(spec);
            return py::make_tuple(gs.mps, gs.energy);
        }, py::arg("family"), py::arg("n"), py::arg("hx") = 0.0, py::arg("hz") = 0.0, py::arg("jz") = 0.0,
        py::arg("t") = 1.0, py::arg("u") = 0.0, py::arg("n_up") = 0, py::arg("n_down") = 0,
        "Ground state MPS and energy of a named Hamiltonian family.");

    m.def("lemma1_bound", &lemma1_bound, py::arg("entropy"), py::arg("alpha"), py::arg("p"));
    m.def("lemma2_bound", &lemma2_bound, py::arg("eps"), py::arg("layers"), py::arg("n"), py::arg("p_max"));
    m.def("lemma1_property", [](int spectra, int max_rank, std::uint64_t seed) {
            return sweep_dict(lemma1_property(spectra, max_rank, seed));
        }, py::arg("spectra"), py::arg("max_rank") = 64, py::arg("seed") = 0);
    m.def("lemma2_check", [](const Mps& target, const CvdResult& run) {
            const Lemma2Check c = lemma2_check(target, run);
            py::dict d;
            d["actual"] = c.actual;
            d["bound"] = c.bound;
            d["eps"] = c.eps;
            d["p_max"] = c.p_max;
            d["layers"] = c.layers;
            d["holds"] = c.holds();
            return d;
        }, py::arg("target"), py::arg("run"));
    m.def("lemma3_stats", [](Index D, const RealVector& center, int samples, std::uint64_t seed, bool bond_2d) {
            return lemma3_dict(lemma3_stats(D, center, samples, seed,
                                            bond_2d ? CenterConvention::bond_2d : CenterConvention::bond_d));
        }, py::arg("D"), py::arg("center"), py::arg("samples"), py::arg("seed") = 0, py::arg("bond_2d") = false);
    m.def("haar_isometry", py::overload_cast<Index, Index, std::uint64_t>(&haar_isometry), py::arg("rows"),
          py::arg("cols"), py::arg("seed") = 0);

    m.def("load_mps", &load_mps, py::arg("path"));
    m.def("load_circuit", &load_circuit, py::arg("path"));
    m.def("load_report", &load_report, py::arg("path"));
}
