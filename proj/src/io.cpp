#include "cvd/io.hpp"

#include "cvd/errors.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace cvd {

using nlohmann::json;

namespace {

constexpr const char* kMpsFormat = "cvdprep.mps";
constexpr const char* kCircuitFormat = "cvdprep.circuit";
constexpr const char* kReportFormat = "cvdprep.report";
constexpr int kFormatVersion = 1;

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from(const json& j) {
    if (!j.is_array() || j.size() != 2) throw IoError("expected a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

json renyi_json(const RenyiIndex& a) {
    switch (a.kind()) {
        case RenyiIndex::Kind::one: return 1.0;
        case RenyiIndex::Kind::infinity: return "inf";
        default: return a.value();
    }
}

RenyiIndex renyi_from(const json& j) {
    if (j.is_string()) return RenyiIndex::parse(j.get<std::string>());
    return RenyiIndex::of(j.get<double>());
}

void check_format(const json& j, const char* format) {
    if (!j.is_object() || !j.contains("format") || j["format"] != format)
        throw IoError(std::string("not a ") + format + " document");
    if (j.value("version", 0) != kFormatVersion) throw IoError(std::string("unsupported ") + format + " version");
}

// Wrap nlohmann and domain errors raised while decoding into IoError.
template <class F>
auto decoding(const char* what, F&& f) {
    try {
        return f();
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw IoError(std::string("malformed ") + what + ": " + e.what());
    }
}

}  // namespace

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

json to_json(const RunManifest& m) {
    json j{{"command", m.command}, {"config", m.config}, {"inputs", m.inputs}, {"outputs", m.outputs},
           {"seed", m.seed},       {"version", m.version}};
    j["timestamps"] = m.started.empty() ? json(nullptr) : json{{"started", m.started}, {"finished", m.finished}};
    return j;
}

RunManifest manifest_from_json(const json& j) {
    return decoding("manifest", [&] {
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.config = j.value("config", json::object());
        m.inputs = j.value("inputs", std::vector<std::string>{});
        m.outputs = j.value("outputs", std::vector<std::string>{});
        m.seed = j.value("seed", std::uint64_t{0});
        m.version = j.value("version", std::string{});
        if (j.contains("timestamps") && j["timestamps"].is_object()) {
            m.started = j["timestamps"].value("started", "");
            m.finished = j["timestamps"].value("finished", "");
        }
        return m;
    });
}

json to_json(const CvdConfig& c) {
    const OptimizerOptions& o = c.optimizer;
    return json{{"max_layers", c.max_layers},
                {"bond_cap", c.bond_cap},
                {"cutoff", c.cutoff},
                {"alpha", {{"base", renyi_json(c.alpha.base)}, {"special", renyi_json(c.alpha.special)}, {"period", c.alpha.period}}},
                {"target_tail", c.target_tail},
                {"target_eps_site", c.target_eps_site},
                {"seed", c.seed},
                {"threads", c.threads},
                {"optimizer",
                 {{"max_iterations", o.max_iterations},
                  {"exact_gradient", o.exact_gradient},
                  {"fd_step", o.fd_step},
                  {"initial_step", o.initial_step},
                  {"armijo", o.armijo},
                  {"shrink", o.shrink},
                  {"max_backtracks", o.max_backtracks},
                  {"stall_tolerance", o.stall_tolerance},
                  {"restarts", o.restarts},
                  {"restart_scale", o.restart_scale},
                  {"polish", o.polish},
                  {"polish_threshold", o.polish_threshold},
                  {"polish_iterations", o.polish_iterations}}}};
}

void apply_config_json(const json& j, CvdConfig& c) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "max_layers") c.max_layers = v.get<int>();
        else if (key == "bond_cap") c.bond_cap = v.get<Index>();
        else if (key == "cutoff") c.cutoff = v.get<double>();
        else if (key == "target_tail") c.target_tail = v.get<double>();
        else if (key == "target_eps_site") c.target_eps_site = v.get<double>();
        else if (key == "seed") c.seed = v.get<std::uint64_t>();
        else if (key == "threads") c.threads = v.get<int>();
        else if (key == "alpha") {
            if (!v.is_object()) {
                c.alpha = AlphaSchedule::constant(renyi_from(v));
                continue;
            }
            for (const auto& [k, a] : v.items()) {
                if (k == "base") c.alpha.base = renyi_from(a);
                else if (k == "special") c.alpha.special = renyi_from(a);
                else if (k == "period") c.alpha.period = a.get<int>();
                else throw std::invalid_argument("unknown alpha key '" + k + "'");
            }
        } else if (key == "optimizer") {
            OptimizerOptions& o = c.optimizer;
            for (const auto& [k, a] : v.items()) {
                if (k == "max_iterations") o.max_iterations = a.get<int>();
                else if (k == "exact_gradient") o.exact_gradient = a.get<bool>();
                else if (k == "fd_step") o.fd_step = a.get<double>();
                else if (k == "initial_step") o.initial_step = a.get<double>();
                else if (k == "armijo") o.armijo = a.get<double>();
                else if (k == "shrink") o.shrink = a.get<double>();
                else if (k == "max_backtracks") o.max_backtracks = a.get<int>();
                else if (k == "stall_tolerance") o.stall_tolerance = a.get<double>();
                else if (k == "restarts") o.restarts = a.get<int>();
                else if (k == "restart_scale") o.restart_scale = a.get<double>();
                else if (k == "polish") o.polish = a.get<bool>();
                else if (k == "polish_threshold") o.polish_threshold = a.get<double>();
                else if (k == "polish_iterations") o.polish_iterations = a.get<int>();
                else throw std::invalid_argument("unknown optimizer key '" + k + "'");
            }
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
}

json to_json(const Mps& mps) {
    json gammas = json::array();
    for (const auto& g : mps.gammas()) {
        json site = json::array();
        for (Index l = 0; l < g.left_dim(); ++l) {
            json row = json::array();
            for (Index s = 0; s < g.phys_dim(); ++s) {
                json col = json::array();
                for (Index r = 0; r < g.right_dim(); ++r) col.push_back(complex_json(g[s](l, r)));
                row.push_back(std::move(col));
            }
            site.push_back(std::move(row));
        }
        gammas.push_back(std::move(site));
    }
    json lambdas = json::array();
    for (const auto& l : mps.lambdas()) lambdas.push_back(std::vector<double>(l.values().begin(), l.values().end()));
    return json{{"format", kMpsFormat}, {"version", kFormatVersion}, {"n", mps.size()},
                {"phys_dim", mps.phys_dim()}, {"gammas", gammas}, {"lambdas", lambdas}};
}

Mps mps_from_json(const json& j) {
    check_format(j, kMpsFormat);
    return decoding("MPS", [&] {
        const int n = j.at("n").get<int>();
        const auto& gj = j.at("gammas");
        const auto& lj = j.at("lambdas");
        if (n < 1 || static_cast<int>(gj.size()) != n || static_cast<int>(lj.size()) != n - 1)
            throw IoError("MPS site count does not match its tensors");
        std::vector<SiteTensor> gammas;
        for (const auto& site : gj) {
            const Index dl = static_cast<Index>(site.size());
            if (dl < 1) throw IoError("empty site tensor");
            const Index d = static_cast<Index>(site[0].size());
            const Index dr = d > 0 ? static_cast<Index>(site[0][0].size()) : 0;
            if (d < 1 || dr < 1) throw IoError("empty site tensor");
            SiteTensor t(dl, d, dr);
            for (Index l = 0; l < dl; ++l) {
                if (static_cast<Index>(site[l].size()) != d) throw IoError("ragged site tensor");
                for (Index s = 0; s < d; ++s) {
                    if (static_cast<Index>(site[l][s].size()) != dr) throw IoError("ragged site tensor");
                    for (Index r = 0; r < dr; ++r) t[s](l, r) = complex_from(site[l][s][r]);
                }
            }
            gammas.push_back(std::move(t));
        }
        std::vector<Spectrum> lambdas;
        for (const auto& l : lj) {
            const auto v = l.get<std::vector<double>>();
            lambdas.emplace_back(Eigen::Map<const RealVector>(v.data(), static_cast<Index>(v.size())));
        }
        return Mps(std::move(gammas), std::move(lambdas));
    });
}

json to_json(const Circuit& c) {
    json layers = json::array();
    for (const auto& layer : c.layers) {
        json gates = json::array();
        for (const auto& g : layer.gates) gates.push_back({{"site", g.site}, {"theta", g.params.theta}});
        layers.push_back({{"parity", to_string(layer.parity)}, {"gates", gates}});
    }
    json readoff = json::array();
    for (const auto& r : c.readoff) readoff.push_back({{"phi_x", r.phi_x}, {"phi_z", r.phi_z}});
    return json{{"format", kCircuitFormat}, {"version", kFormatVersion}, {"n", c.n},
                {"direction", to_string(c.direction)}, {"layers", layers}, {"readoff", readoff}};
}

Circuit circuit_from_json(const json& j) {
    check_format(j, kCircuitFormat);
    Circuit c = decoding("circuit", [&] {
        Circuit out;
        out.n = j.at("n").get<int>();
        out.direction = parse_direction(j.at("direction").get<std::string>());
        for (const auto& lj : j.at("layers")) {
            Layer layer;
            layer.parity = parse_parity(lj.at("parity").get<std::string>());
            for (const auto& g : lj.at("gates"))
                layer.gates.push_back({g.at("site").get<int>(), {g.at("theta").get<std::array<double, 9>>()}});
            out.layers.push_back(std::move(layer));
        }
        for (const auto& r : j.at("readoff")) out.readoff.push_back({r.at("phi_x").get<double>(), r.at("phi_z").get<double>()});
        return out;
    });
    decoding("circuit", [&] {
        c.validate();
        return 0;
    });
    return c;
}

json to_json(const CvdReport& r) {
    json layers = json::array();
    for (const auto& l : r.layers)
        layers.push_back({{"parity", to_string(l.parity)},
                          {"alpha", renyi_json(l.alpha)},
                          {"cost_before", l.cost_before},
                          {"cost_after", l.cost_after},
                          {"max_discarded", l.max_discarded},
                          {"tail_increased", l.tail_increased},
                          {"wall_time", l.wall_time}});
    return json{{"format", kReportFormat},
                {"version", kFormatVersion},
                {"n", r.n},
                {"layers_run", r.layers.size()},
                {"converged_layer", r.converged_layer ? json(*r.converged_layer) : json(nullptr)},
                {"eps", r.eps},
                {"eps_site", r.eps_site},
                {"p_max_forward", r.p_max_forward},
                {"p_max_reverse", r.p_max_reverse},
                {"max_bond_dim", r.max_bond_dim()},
                {"tail_matrix", r.tail_matrix},
                {"bond_dims", r.bond_dims},
                {"layers", layers}};
}

CvdReport report_from_json(const json& j) {
    check_format(j, kReportFormat);
    return decoding("report", [&] {
        CvdReport r;
        r.n = j.at("n").get<int>();
        if (!j.at("converged_layer").is_null()) r.converged_layer = j["converged_layer"].get<int>();
        r.eps = j.at("eps").get<double>();
        r.eps_site = j.at("eps_site").get<double>();
        r.p_max_forward = j.at("p_max_forward").get<double>();
        r.p_max_reverse = j.at("p_max_reverse").get<double>();
        r.tail_matrix = j.at("tail_matrix").get<std::vector<std::vector<double>>>();
        r.bond_dims = j.at("bond_dims").get<std::vector<std::vector<Index>>>();
        for (const auto& lj : j.at("layers")) {
            LayerInfo l;
            l.parity = parse_parity(lj.at("parity").get<std::string>());
            l.alpha = renyi_from(lj.at("alpha"));
            l.cost_before = lj.at("cost_before").get<double>();
            l.cost_after = lj.at("cost_after").get<double>();
            l.max_discarded = lj.at("max_discarded").get<double>();
            l.tail_increased = lj.at("tail_increased").get<bool>();
            l.wall_time = lj.at("wall_time").get<double>();
            r.layers.push_back(l);
        }
        return r;
    });
}

std::string tail_csv(const CvdReport& r) {
    std::ostringstream os;
    os << "layer,bond,S_inf,bond_dim\n" << std::setprecision(17);
    for (std::size_t mu = 0; mu < r.tail_matrix.size(); ++mu)
        for (std::size_t k = 0; k < r.tail_matrix[mu].size(); ++k) {
            os << mu << ',' << k << ',' << r.tail_matrix[mu][k] << ',';
            if (mu < r.bond_dims.size() && k < r.bond_dims[mu].size()) os << r.bond_dims[mu][k];
            os << '\n';
        }
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << s;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

namespace {

json with_manifest(json payload, const RunManifest& m) {
    payload["manifest"] = to_json(m);
    return payload;
}

}  // namespace

void save_mps(const std::filesystem::path& path, const Mps& mps, const RunManifest& m) {
    write_json(path, with_manifest(to_json(mps), m));
}
Mps load_mps(const std::filesystem::path& path) { return mps_from_json(read_json(path)); }

void save_circuit(const std::filesystem::path& path, const Circuit& c, const RunManifest& m) {
    write_json(path, with_manifest(to_json(c), m));
}
Circuit load_circuit(const std::filesystem::path& path) { return circuit_from_json(read_json(path)); }

void save_report(const std::filesystem::path& path, const CvdReport& r, const RunManifest& m) {
    write_json(path, with_manifest(to_json(r), m));
}
CvdReport load_report(const std::filesystem::path& path) { return report_from_json(read_json(path)); }

}  // namespace cvd
