#include "cvd/cvd.hpp"
#include "cvd/errors.hpp"
#include "cvd/hamiltonian.hpp"
#include "cvd/io.hpp"
#include "cvd/states.hpp"
#include "cvd/verification.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cvd;

namespace {

enum Exit { kOk = 0, kUsage = 1, kIo = 2, kInvariant = 3 };

struct Common {
    bool timestamps = false;
};

RunManifest manifest(const Common& common, const std::string& command, json config, std::uint64_t seed) {
    RunManifest m;
    m.command = command;
    m.config = std::move(config);
    m.seed = seed;
    if (common.timestamps) m.started = utc_now();
    return m;
}

void finish(const Common& common, RunManifest& m) {
    if (common.timestamps) m.finished = utc_now();
}

std::string join(const std::vector<Index>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
    return os.str();
}

void print_profile(const Mps& mps) {
    std::cout << "sites: " << mps.size() << "\n";
    std::cout << "bond dims: " << join(mps.bond_dims()) << "\n";
    std::cout << "tail weights (S_inf):";
    char buf[32];
    for (const auto& l : mps.lambdas()) {
        std::snprintf(buf, sizeof buf, " %.3e", tail_weight(l));
        std::cout << buf;
    }
    std::cout << "\n";
}

Mps load_checked_mps(const fs::path& path) {
    Mps mps = load_mps(path);
    const double dev = canonical_deviation(mps);
    if (dev > 1e-8) throw InvariantError("input MPS is not in canonical form (deviation " + std::to_string(dev) + ")");
    return mps;
}

// ---- gen-state ----

struct GenArgs {
    std::string family;
    int n = 8;
    double hx = 0.0, hz = 0.0, jz = 0.0, t = 1.0, u = 0.0;
    int n_up = -1, n_down = -1;
    std::string code = "5_1_3";
    std::string layout = "separated";
    Index bond = 4;
    std::uint64_t seed = 0;
    std::string output;
};

int cmd_gen_state(const GenArgs& a, const Common& common) {
    Mps mps;
    json cfg{{"family", a.family}, {"n", a.n}};
    if (a.family == "ghz") {
        mps = ghz(a.n);
    } else if (a.family == "cluster") {
        mps = cluster(a.n);
    } else if (a.family == "aklt") {
        mps = aklt(a.n);
    } else if (a.family == "random") {
        mps = random_mps(a.n, a.bond, a.seed);
        cfg["bond"] = a.bond;
    } else if (a.family == "logical-bell") {
        mps = logical_bell(StabilizerCode::get(parse_code(a.code)), parse_layout(a.layout));
        cfg = {{"family", a.family}, {"code", a.code}, {"layout", a.layout}};
    } else {
        HamiltonianSpec spec;
        spec.family = parse_family(a.family);
        spec.n_sites = a.n;
        spec.hx = a.hx;
        spec.hz = a.hz;
        spec.jz = a.jz;
        spec.t = a.t;
        spec.u = a.u;
        // half filling by default
        spec.n_up = a.n_up >= 0 ? a.n_up : a.n / 2;
        spec.n_down = a.n_down >= 0 ? a.n_down : a.n / 2;
        const GroundState gs = ed_ground_state(spec);
        mps = gs.mps;
        cfg.update({{"hx", a.hx}, {"hz", a.hz}, {"jz", a.jz}, {"t", a.t}, {"u", a.u}, {"n_up", spec.n_up},
                    {"n_down", spec.n_down}, {"energy", gs.energy}, {"degeneracy", gs.degeneracy}});
        std::cout << "ground energy: " << gs.energy << " (degeneracy " << gs.degeneracy << ")\n";
    }
    const std::string out = a.output.empty() ? a.family + ".mps.json" : a.output;
    RunManifest m = manifest(common, "gen-state", cfg, a.seed);
    m.outputs = {out};
    finish(common, m);
    save_mps(out, mps, m);
    print_profile(mps);
    std::cout << "wrote " << out << "\n";
    return kOk;
}

// ---- disentangle ----

struct DisArgs {
    std::string input;
    std::string out_dir = "run";
    std::string config_file;
    CvdConfig flags;
    std::string alpha, alpha_base, alpha_special;
};

int cmd_disentangle(DisArgs& a, const Common& common, CLI::App& sub) {
    CvdConfig cfg;
    if (!a.config_file.empty()) {
        try {
            apply_config_json(read_json(a.config_file), cfg);
        } catch (const nlohmann::json::exception& e) {
            throw IoError("config file: " + std::string(e.what()));
        }
    }
    const auto given = [&](const char* name) { return sub.get_option(name)->count() > 0; };
    if (given("--layers")) cfg.max_layers = a.flags.max_layers;
    if (given("--bond-cap")) cfg.bond_cap = a.flags.bond_cap;
    if (given("--cutoff")) cfg.cutoff = a.flags.cutoff;
    if (given("--target-tail")) cfg.target_tail = a.flags.target_tail;
    if (given("--target-eps-site")) cfg.target_eps_site = a.flags.target_eps_site;
    if (given("--seed")) cfg.seed = a.flags.seed;
    if (given("--threads")) cfg.threads = a.flags.threads;
    if (given("--alpha")) cfg.alpha = AlphaSchedule::constant(RenyiIndex::parse(a.alpha));
    if (given("--alpha-base")) cfg.alpha.base = RenyiIndex::parse(a.alpha_base);
    if (given("--alpha-special")) cfg.alpha.special = RenyiIndex::parse(a.alpha_special);
    if (given("--alpha-period")) cfg.alpha.period = a.flags.alpha.period;
    cfg.validate();

    const Mps mps = load_checked_mps(a.input);
    RunManifest m = manifest(common, "disentangle", to_json(cfg), cfg.seed);
    m.inputs = {a.input};
    const fs::path dir(a.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + a.out_dir + "'");
    const fs::path circuit = dir / "circuit.json", report = dir / "report.json", tails = dir / "tails.csv";
    m.outputs = {circuit.string(), report.string(), tails.string()};

    CvdResult res = disentangle(mps, cfg);
    if (!common.timestamps)
        for (auto& l : res.report.layers) l.wall_time = 0.0;  // keep reruns byte-identical
    finish(common, m);
    save_circuit(circuit, res.circuit, m);
    save_report(report, res.report, m);
    write_text(tails, tail_csv(res.report));

    char buf[160];
    std::snprintf(buf, sizeof buf, "layers: %zu\nconverged at layer: %s\neps: %.6e\neps_site: %.6e\nmax bond dim: %ld\n",
                  res.report.layers.size(),
                  res.report.converged_layer ? std::to_string(*res.report.converged_layer).c_str() : "none",
                  res.report.eps, res.report.eps_site, static_cast<long>(res.report.max_bond_dim()));
    std::cout << buf << "wrote " << circuit.string() << ", " << report.string() << ", " << tails.string() << "\n";
    return kOk;
}

// ---- verify ----

struct VerArgs {
    std::string lemma;
    int trials = 10000;
    int max_rank = 64;
    std::string run_dir;
    std::string mps_file;
    Index D = 2;
    std::string spectrum = "flat";
    std::string convention = "D";
    int samples = 100000;
    std::uint64_t seed = 0;
    std::string output;
};

RealVector parse_center(const std::string& s, Index D, CenterConvention conv) {
    const Index dc = conv == CenterConvention::bond_d ? D : 2 * D;
    if (s == "flat") return RealVector::Constant(dc, 1.0 / std::sqrt(static_cast<double>(dc)));
    if (s == "product") return RealVector::Ones(1);
    if (s == "skewed") return RealVector(Eigen::Vector2d(std::sqrt(0.8), std::sqrt(0.2)));
    // comma-separated probabilities
    std::vector<double> p;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) p.push_back(std::stod(item));
    if (p.empty()) throw std::invalid_argument("empty spectrum");
    RealVector v(static_cast<Index>(p.size()));
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 0.0) throw std::invalid_argument("negative probability in spectrum");
        total += p[i];
    }
    for (std::size_t i = 0; i < p.size(); ++i) v(static_cast<Index>(i)) = std::sqrt(p[i] / total);
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

int cmd_verify(const VerArgs& a, const Common& common) {
    json out;
    std::string status;
    json cfg{{"lemma", a.lemma}};
    std::vector<std::string> inputs;
    if (a.lemma == "lemma1") {
        const Lemma1Sweep s = lemma1_property(a.trials, a.max_rank, a.seed);
        status = s.violations == 0 ? "pass" : "fail";
        out = {{"spectra", s.spectra}, {"checks", s.checks}, {"violations", s.violations}, {"max_ratio", s.max_ratio}};
        cfg.update({{"trials", a.trials}, {"max_rank", a.max_rank}});
    } else if (a.lemma == "lemma2") {
        if (a.run_dir.empty()) throw std::invalid_argument("lemma2 needs --run");
        const fs::path dir(a.run_dir);
        const json cj = read_json(dir / "circuit.json");
        CvdResult run;
        run.circuit = circuit_from_json(cj);
        run.report = load_report(dir / "report.json");
        std::string input = a.mps_file;
        if (input.empty()) {
            if (!cj.contains("manifest")) throw IoError("circuit file carries no manifest");
            const RunManifest m = manifest_from_json(cj["manifest"]);
            if (m.inputs.empty()) throw IoError("run manifest does not name its input MPS");
            input = m.inputs.front();
            // recorded paths are relative to where disentangle ran; fall back to the run's parent
            if (!fs::exists(input) && fs::path(input).is_relative() && fs::exists(dir.parent_path() / input))
                input = (dir.parent_path() / input).string();
        }
        const Mps target = load_checked_mps(input);
        const Lemma2Check c = lemma2_check(target, run);
        status = c.holds() ? "pass" : "fail";
        out = {{"actual", c.actual}, {"eps", c.eps}, {"p_max", c.p_max}, {"layers", c.layers},
               {"bound", c.bound}, {"slack", c.bound - c.actual}};
        cfg.update({{"run", a.run_dir}, {"mps", input}});
        inputs = {(dir / "circuit.json").string(), (dir / "report.json").string(), input};
    } else if (a.lemma == "lemma3") {
        const CenterConvention conv = a.convention == "2D" ? CenterConvention::bond_2d : CenterConvention::bond_d;
        if (a.convention != "D" && a.convention != "2D") throw std::invalid_argument("convention must be D or 2D");
        const Lemma3Stats s = lemma3_stats(a.D, parse_center(a.spectrum, a.D, conv), a.samples, a.seed, conv);
        status = s.status();
        json table = json::array();
        for (const auto& g : s.generators)
            table.push_back({{"generator", g.name}, {"mean", g.mean}, {"stderr_mean", g.stderr_mean},
                             {"variance", g.variance}, {"stderr_variance", g.stderr_variance},
                             {"closed_form", s.closed_form}, {"difference", g.variance - s.closed_form}});
        out = {{"D", s.D}, {"convention", a.convention}, {"spectrum", std::vector<double>(s.spectrum.begin(), s.spectrum.end())},
               {"samples", s.samples}, {"closed_form", s.closed_form}, {"mean_ok", s.mean_ok()},
               {"closed_form_matches", s.closed_form_matches()}, {"table", table}};
        cfg.update({{"D", a.D}, {"spectrum", a.spectrum}, {"convention", a.convention}, {"samples", a.samples}});
    } else if (a.lemma == "haar") {
        const auto checks = haar_moment_checks(2 * a.D, a.samples, a.seed);
        bool ok = true;
        json table = json::array();
        for (const auto& c : checks) {
            ok = ok && c.within(3.0);
            table.push_back({{"moment", c.name}, {"estimate", {c.estimate.real(), c.estimate.imag()}},
                             {"expected", {c.expected.real(), c.expected.imag()}},
                             {"stderr", {c.stderr_re, c.stderr_im}}, {"within_3sigma", c.within(3.0)}});
        }
        status = ok ? "pass" : "fail";
        out = {{"N", 2 * a.D}, {"samples", a.samples}, {"table", table}};
        cfg.update({{"D", a.D}, {"samples", a.samples}});
    } else {
        throw std::invalid_argument("unknown check '" + a.lemma + "' (lemma1, lemma2, lemma3, haar)");
    }
    RunManifest m = manifest(common, "verify", cfg, a.seed);
    m.inputs = inputs;
    if (!a.output.empty()) m.outputs = {a.output};
    finish(common, m);
    json doc{{"format", "cvdprep.verification"}, {"version", 1}, {"check", a.lemma}, {"status", status}, {"result", out},
             {"manifest", to_json(m)}};
    if (a.output.empty())
        std::cout << doc.dump(2) << "\n";
    else {
        write_json(a.output, doc);
        std::cout << a.lemma << ": " << status << "\nwrote " << a.output << "\n";
    }
    return status == "fail" ? kInvariant : kOk;
}

// ---- export / info ----

int cmd_export(const std::string& input, const std::string& direction, const std::string& output) {
    Circuit c = load_circuit(input);
    if (!direction.empty() && parse_direction(direction) != c.direction) c = c.reversed();
    const std::string text = export_gate_list(c);
    if (output.empty())
        std::cout << text;
    else
        write_text(output, text);
    return kOk;
}

int cmd_info(const std::string& input) {
    const json j = read_json(input);
    const std::string format = j.value("format", "");
    if (format == "cvdprep.mps") {
        const Mps mps = mps_from_json(j);
        print_profile(mps);
        const double dev = canonical_deviation(mps);
        std::cout << "canonical deviation: " << dev << "\n";
        if (dev > 1e-8) throw InvariantError("MPS violates the canonical form");
    } else if (format == "cvdprep.circuit") {
        const Circuit c = circuit_from_json(j);
        std::cout << "sites: " << c.n << "\ndirection: " << to_string(c.direction) << "\nlayers: " << c.layers.size()
                  << "\ntwo-site gates: " << c.gate_count() << "\n";
    } else if (format == "cvdprep.report") {
        const CvdReport r = report_from_json(j);
        std::cout << "sites: " << r.n << "\nlayers: " << r.layers.size() << "\nconverged at layer: "
                  << (r.converged_layer ? std::to_string(*r.converged_layer) : "none") << "\neps: " << r.eps
                  << "\neps_site: " << r.eps_site << "\nmax bond dim: " << r.max_bond_dim() << "\n";
    } else {
        throw IoError("'" + input + "' is not a cvdprep artifact");
    }
    if (j.contains("manifest")) {
        const RunManifest m = manifest_from_json(j["manifest"]);
        std::cout << "produced by: " << m.command << " (version " << m.version << ", seed " << m.seed << ")\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classical variational disentangling of matrix product states"};
    app.require_subcommand(1);
    Common common;
    app.add_flag("--timestamps", common.timestamps, "Record wall-clock timestamps in manifests");

    GenArgs gen;
    auto* g = app.add_subcommand("gen-state", "Generate a target MPS");
    g->add_option("family", gen.family,
                  "ghz | cluster | aklt | random | ising | xy | xxz | fermi-hubbard | logical-bell")
        ->required();
    g->add_option("--n", gen.n, "Sites (spin-1 sites for aklt, electronic sites for fermi-hubbard)");
    g->add_option("--hx", gen.hx);
    g->add_option("--hz", gen.hz);
    g->add_option("--jz", gen.jz);
    g->add_option("--t", gen.t, "Fermi-Hubbard hopping");
    g->add_option("--u", gen.u, "Fermi-Hubbard on-site interaction");
    g->add_option("--n-up", gen.n_up);
    g->add_option("--n-down", gen.n_down);
    g->add_option("--code", gen.code, "5_1_3 | 11_1_5");
    g->add_option("--layout", gen.layout, "separated | interlaced");
    g->add_option("--bond", gen.bond, "Bond dimension of random states");
    g->add_option("--seed", gen.seed);
    g->add_option("-o,--output", gen.output);

    DisArgs dis;
    auto* d = app.add_subcommand("disentangle", "Find a disentangling circuit for an MPS");
    d->add_option("input", dis.input, "MPS JSON file")->required();
    d->add_option("-o,--out-dir", dis.out_dir, "Directory for circuit.json, report.json, tails.csv");
    d->add_option("--config", dis.config_file, "JSON config; flags take precedence");
    d->add_option("--layers", dis.flags.max_layers);
    d->add_option("--bond-cap", dis.flags.bond_cap);
    d->add_option("--cutoff", dis.flags.cutoff);
    d->add_option("--alpha", dis.alpha, "Constant Renyi index (number, 1 or inf)");
    d->add_option("--alpha-base", dis.alpha_base);
    d->add_option("--alpha-special", dis.alpha_special);
    d->add_option("--alpha-period", dis.flags.alpha.period);
    d->add_option("--target-tail", dis.flags.target_tail);
    d->add_option("--target-eps-site", dis.flags.target_eps_site);
    d->add_option("--seed", dis.flags.seed);
    d->add_option("--threads", dis.flags.threads, "Worker threads per sublayer (1 = reproducible order)");

    VerArgs ver;
    auto* v = app.add_subcommand("verify", "Numerical checks of the bounds and sampling statistics");
    v->add_option("lemma", ver.lemma, "lemma1 | lemma2 | lemma3 | haar")->required();
    v->add_option("--trials", ver.trials);
    v->add_option("--max-rank", ver.max_rank);
    v->add_option("--run", ver.run_dir, "Directory written by disentangle");
    v->add_option("--mps", ver.mps_file, "Target MPS (defaults to the run's recorded input)");
    v->add_option("--D", ver.D);
    v->add_option("--spectrum", ver.spectrum, "flat | product | skewed | comma-separated probabilities");
    v->add_option("--convention", ver.convention, "D | 2D");
    v->add_option("--samples", ver.samples);
    v->add_option("--seed", ver.seed);
    v->add_option("-o,--output", ver.output);

    std::string ex_in, ex_dir, ex_out;
    auto* e = app.add_subcommand("export", "Write a circuit as a gate list");
    e->add_option("circuit", ex_in)->required();
    e->add_option("--direction", ex_dir, "disentangle | prepare (default: as stored)");
    e->add_option("-o,--output", ex_out);

    std::string info_in;
    auto* i = app.add_subcommand("info", "Inspect an artifact");
    i->add_option("file", info_in)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (g->parsed()) return cmd_gen_state(gen, common);
        if (d->parsed()) return cmd_disentangle(dis, common, *d);
        if (v->parsed()) return cmd_verify(ver, common);
        if (e->parsed()) return cmd_export(ex_in, ex_dir, ex_out);
        if (i->parsed()) return cmd_info(info_in);
    } catch (const IoError& err) {
        std::cerr << "I/O error: " << err.what() << "\n";
        return kIo;
    } catch (const InvariantError& err) {
        std::cerr << "invariant violation: " << err.what() << "\n";
        return kInvariant;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kUsage;
    } catch (const std::out_of_range& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kUsage;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kInvariant;
    }
    return kUsage;
}
