// gpnodal command-line front end: single-point phase evaluation, nodal
// scans, separability checks, and self-tests, with CSV/JSON emission.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gpnodal/csv.hpp"
#include "gpnodal/selftest.hpp"

namespace {

using nlohmann::json;
using namespace gpnodal;

constexpr int kExitOk = 0;
constexpr int kExitSelfTestFail = 1;
constexpr int kExitInvalidInput = 2;
constexpr int kExitPhaseUndefined = 3;

struct Config {
    std::string state = "phi";
    std::string kind = "free";
    bool kind_explicit = false;
    double r = 1.0;
    double theta = 0.0;
    double beta = 0.0;
    double omega_t = kPi;
    double coupling_j = 0.0;
    double tol = kNodalTol;
    std::string grid;
    std::vector<double> r_values;
    std::string output;
    std::string format = "csv";
    int workers = 1;
    std::uint64_t seed = 12345;
    bool r_explicit = false;
    bool degrees = false;
    bool check_analytic = false;
    bool json_report = false;
    double mutate = 0.0;
    int chain_n = 3;
    int idx_i = 0;
    int idx_j = 3;
    int n_theta = 256;
};

StateVariant parse_variant(const std::string& s) {
    if (s == "phi") return StateVariant::phi;
    if (s == "psi") return StateVariant::psi;
    throw std::invalid_argument("state: must be phi or psi");
}

HamiltonianKind effective_kind(const Config& c) {
    if (c.kind_explicit) {
        if (c.kind == "free") return HamiltonianKind::free;
        if (c.kind == "ising") return HamiltonianKind::ising;
        throw std::invalid_argument("kind: must be free or ising");
    }
    return c.coupling_j != 0.0 ? HamiltonianKind::ising : HamiltonianKind::free;
}

StateParams make_state(const Config& c) {
    const double scale = c.degrees ? kPi / 180.0 : 1.0;
    StateParams s{parse_variant(c.state), c.r, c.theta * scale, c.beta * scale};
    s.validate();
    return s;
}

ModelParams make_model(const Config& c) {
    // omega = 1 by convention; --omega-t fixes the product, --coupling-J the
    // rescaled coupling g/omega.
    ModelParams m{1.0, 1.0, c.coupling_j, c.omega_t};
    m.validate();
    return m;
}

void parse_grid(const std::string& spec, int& w, int& h) {
    if (spec.empty()) return;
    const std::size_t x = spec.find('x');
    if (x == std::string::npos) throw std::invalid_argument("grid: expected WxH");
    try {
        w = std::stoi(spec.substr(0, x));
        h = std::stoi(spec.substr(x + 1));
    } catch (const std::exception&) {
        throw std::invalid_argument("grid: expected WxH with integer W, H");
    }
    if (w < 2 || h < 2) throw std::invalid_argument("grid: axes need at least 2 samples");
}

void write_output(const Config& c, const std::string& content) {
    if (c.output.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(c.output, std::ios::binary);
    if (!f) throw std::invalid_argument("output: cannot open " + c.output);
    f << content;
}

void write_sidecar(const std::string& main_path, const std::string& suffix,
                   const std::string& content) {
    std::string path = main_path;
    const std::size_t dot = path.rfind('.');
    if (dot != std::string::npos && path.find('/', dot) == std::string::npos)
        path = path.substr(0, dot);
    path += suffix;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("output: cannot open " + path);
    f << content;
}

/// One record as CSV (header + row) or a JSON object.
int emit_record(const Config& c, const std::string& gamma_name, const PhaseResult& res,
                const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    if (c.format == "json") {
        json rec;
        if (res.value)
            rec[gamma_name] = *res.value;
        else
            rec[gamma_name] = nullptr;
        rec["re_trace"] = res.trace.real();
        rec["im_trace"] = res.trace.imag();
        rec["nodal"] = res.nodal;
        for (const auto& [k, v] : extra) rec[k] = v;
        write_output(c, rec.dump(2) + "\n");
    } else {
        std::string header = gamma_name + ",re_trace,im_trace,nodal";
        std::string row = (res.value ? csv_double(*res.value) : std::string("nan")) + "," +
                          csv_double(res.trace.real()) + "," + csv_double(res.trace.imag()) + "," +
                          (res.nodal ? "true" : "false");
        for (const auto& [k, v] : extra) {
            header += "," + k;
            row += "," + v;
        }
        write_output(c, header + "\n" + row + "\n");
    }
    return res.nodal ? kExitPhaseUndefined : kExitOk;
}

int cmd_gp(const Config& c) {
    PhaseResult res = gp(make_state(c), make_model(c), effective_kind(c));
    if (std::abs(res.trace) < c.tol && !res.nodal) res = {std::nullopt, res.trace, true};
    return emit_record(c, "gamma_gp", res);
}

int cmd_op2(const Config& c) {
    const StateParams s = make_state(c);
    const ModelParams m = make_model(c);
    const PhaseResult res = op2(s, m, effective_kind(c));
    std::vector<std::pair<std::string, std::string>> extra;
    if (c.check_analytic) {
        const double dev_printed =
            std::abs(res.trace - Complex(op2_analytic_value(s, RadicandVariant::as_printed)));
        const double dev_doubled =
            std::abs(res.trace - Complex(op2_analytic_value(s, RadicandVariant::doubled)));
        extra.emplace_back("dev_as_printed", csv_double(dev_printed));
        extra.emplace_back("dev_doubled", csv_double(dev_doubled));
        extra.emplace_back("selected", dev_doubled <= dev_printed ? "doubled" : "as_printed");
    }
    return emit_record(c, "gamma_op2", res, extra);
}

int cmd_opn(const Config& c) {
    if (c.chain_n < 2) throw std::invalid_argument("n: must be >= 2");
    const StateParams s = make_state(c);
    const ModelParams m = make_model(c);
    const HamiltonianKind kind = effective_kind(c);
    const ComplexMatrix rho0 = build_state(s);
    std::vector<ComplexMatrix> chain;
    for (int l = 1; l < c.chain_n; ++l) {
        ModelParams ml = m;
        ml.t = m.t * l;
        const ComplexMatrix u = evolution_operator(hamiltonian(ml, kind), ml.t);
        chain.push_back(u * rho0 * u.adjoint());
    }
    return emit_record(c, "gamma_opn", op_n(s, m, kind, chain));
}

int cmd_op_pure(const Config& c) {
    if (c.idx_i < 0 || c.idx_i > 3 || c.idx_j < 0 || c.idx_j > 3 || c.idx_i == c.idx_j)
        throw std::invalid_argument("i/j: need distinct basis indices in 0..3");
    ComplexVector vi(4, 0.0), vj(4, 0.0);
    vi[static_cast<std::size_t>(c.idx_i)] = 1.0;
    vj[static_cast<std::size_t>(c.idx_j)] = 1.0;
    try {
        const double gamma = op_pure(vi, vj, make_model(c), effective_kind(c));
        PhaseResult res{gamma, Complex(std::cos(gamma), std::sin(gamma)), false};
        return emit_record(c, "gamma_op_pure", res);
    } catch (const ZeroOverlap&) {
        return emit_record(c, "gamma_op_pure", {std::nullopt, 0.0, true});
    }
}

int cmd_ppt(const Config& c) {
    const StateParams s = make_state(c);
    const SeparabilityVerdict v = ppt_check(build_state(s));
    const double r_sep = separability_boundary(s.theta);
    if (c.format == "json") {
        json rec{{"min_pt_eigenvalue", v.min_pt_eigenvalue},
                 {"entangled", v.entangled},
                 {"r_separable", r_sep}};
        write_output(c, rec.dump(2) + "\n");
    } else {
        write_output(c, "min_pt_eigenvalue,entangled,r_separable\n" +
                            csv_double(v.min_pt_eigenvalue) + "," +
                            (v.entangled ? std::string("true") : std::string("false")) + "," +
                            csv_double(r_sep) + "\n");
    }
    return kExitOk;
}

json scan_json(const NodalScanResult& res) {
    json out;
    out["ising"] = res.ising;
    json nodal = json::array();
    for (const NodalPoint& p : res.nodal_points)
        nodal.push_back({{"theta", p.theta},
                         {res.ising ? "J" : "beta", p.second},
                         {"r", p.r},
                         {"residual", p.residual},
                         {"grazing", p.grazing}});
    out["nodal_points"] = nodal;
    json curves = json::array();
    for (const Polyline& pl : res.curves) {
        json pts = json::array();
        for (const std::array<double, 2>& p : pl.points) pts.push_back({p[0], p[1]});
        curves.push_back({{"curve_id", pl.id},
                          {"kind", pl.kind == Polyline::Kind::re_zero ? "re_zero" : "im_zero"},
                          {"r", pl.r},
                          {"points", pts}});
    }
    out["curves"] = curves;
    return out;
}

int cmd_scan_free(const Config& c) {
    if (std::abs(c.omega_t - kPi) > 1e-12)
        throw std::invalid_argument("omega-t: the free-model scan requires omega*t = pi");
    ScanGrid grid;
    parse_grid(c.grid, grid.theta.n, grid.beta.n);
    grid.omega_t = c.omega_t;
    if (!c.r_values.empty())
        grid.r_values = c.r_values;
    else
        grid.r_values = {c.r};
    const NodalScanResult res = scan_free(parse_variant(c.state), grid, c.workers);
    if (c.format == "json") {
        json out = scan_json(res);
        write_output(c, out.dump() + "\n");
    } else {
        write_output(c, free_grid_csv(res));
        if (!c.output.empty()) write_sidecar(c.output, ".nodal.csv", nodal_points_csv(res));
    }
    return kExitOk;
}

int cmd_scan_ising(const Config& c) {
    ScanGrid grid;
    parse_grid(c.grid, grid.theta.n, grid.coupling.n);
    grid.omega_t = c.omega_t;
    if (!c.r_values.empty())
        grid.r_values = c.r_values;
    else if (c.r_explicit)
        grid.r_values = {c.r};
    else
        grid.r_values = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    const double scale = c.degrees ? kPi / 180.0 : 1.0;
    const NodalScanResult res =
        scan_ising(parse_variant(c.state), grid, c.beta * scale, c.workers);
    if (c.format == "json") {
        json out = scan_json(res);
        write_output(c, out.dump() + "\n");
    } else {
        write_output(c, ising_grid_csv(res));
        if (!c.output.empty()) {
            write_sidecar(c.output, ".curves.csv", curves_csv(res));
            write_sidecar(c.output, ".nodal.csv", nodal_points_csv(res));
        }
    }
    return kExitOk;
}

int cmd_scan_boundary(const Config& c) {
    const auto rows = boundary_scan(parse_variant(c.state), c.n_theta);
    if (c.format == "json") {
        json out = json::array();
        for (const std::array<double, 3>& row : rows)
            out.push_back(
                {{"theta", row[0]}, {"r_nodal_max", row[1]}, {"r_separable", row[2]}});
        write_output(c, out.dump() + "\n");
    } else {
        write_output(c, boundary_csv(rows));
    }
    return kExitOk;
}

int cmd_selftest(const Config& c) {
    const SelfTestReport rep = run_selftest(c.seed, c.mutate);
    if (c.json_report || c.format == "json") {
        json out;
        json checks = json::array();
        for (const SelfTestCheck& chk : rep.checks)
            checks.push_back({{"name", chk.name},
                              {"pass", chk.pass},
                              {"metric", chk.metric},
                              {"tolerance", chk.tolerance},
                              {"detail", chk.detail}});
        out["checks"] = checks;
        out["radicand"] = {
            {"selected",
             rep.radicand.selected == RadicandVariant::doubled ? "doubled" : "as_printed"},
            {"max_dev_as_printed", rep.radicand.max_dev_as_printed},
            {"max_dev_doubled", rep.radicand.max_dev_doubled}};
        out["all_pass"] = rep.all_pass();
        write_output(c, out.dump(2) + "\n");
    } else {
        std::ostringstream os;
        for (const SelfTestCheck& chk : rep.checks) {
            char line[256];
            std::snprintf(line, sizeof(line), "%-32s %s  metric=%.3e tol=%.3e  %s\n",
                          chk.name.c_str(), chk.pass ? "PASS" : "FAIL", chk.metric, chk.tolerance,
                          chk.detail.c_str());
            os << line;
        }
        os << "radicand: selected="
           << (rep.radicand.selected == RadicandVariant::doubled ? "doubled" : "as_printed")
           << " dev_as_printed=" << rep.radicand.max_dev_as_printed
           << " dev_doubled=" << rep.radicand.max_dev_doubled << "\n";
        os << (rep.all_pass() ? "ALL PASS\n" : "FAILURES PRESENT\n");
        write_output(c, os.str());
    }
    return rep.all_pass() ? kExitOk : kExitSelfTestFail;
}

/// Apply a JSON job file (mirroring the flag set) as new defaults before the
/// command line is parsed; explicit flags still win.
void apply_job_file(int argc, char** argv, Config& c) {
    std::string path;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--job") path = argv[i + 1];
    if (path.empty()) return;
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("job: cannot open " + path);
    json j;
    f >> j;
    const auto get = [&](const char* key, auto& slot) {
        if (j.contains(key)) j.at(key).get_to(slot);
    };
    get("state", c.state);
    if (j.contains("kind")) {
        j.at("kind").get_to(c.kind);
        c.kind_explicit = true;
    }
    get("r", c.r);
    get("theta", c.theta);
    get("beta", c.beta);
    get("omega_t", c.omega_t);
    get("coupling_J", c.coupling_j);
    get("tol", c.tol);
    get("grid", c.grid);
    get("r_values", c.r_values);
    get("output", c.output);
    get("format", c.format);
    get("workers", c.workers);
    get("seed", c.seed);
    get("degrees", c.degrees);
    get("n", c.chain_n);
    get("n_theta", c.n_theta);
}

}  // namespace

int main(int argc, char** argv) {
    Config c;
    try {
        apply_job_file(argc, argv, c);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    }

    CLI::App app{"Geometric-phase nodal structure toolkit for two-qubit mixed states"};
    app.require_subcommand(1);
    std::string job_path;  // consumed in the pre-pass; registered so CLI11 accepts it
    app.add_option("--job", job_path, "JSON job file supplying defaults for the flags below");

    const auto add_common = [&](CLI::App* sub, bool with_state = true) {
        if (with_state) {
            sub->add_option("--state", c.state, "State family: phi or psi")
                ->capture_default_str();
            sub->add_option("--r", c.r, "Purity parameter r in (0, 1]")
                ->each([&](const std::string&) { c.r_explicit = true; })
                ->capture_default_str();
            sub->add_option("--theta", c.theta, "State angle theta")->capture_default_str();
            sub->add_option("--beta", c.beta, "State angle beta")->capture_default_str();
        }
        sub->add_option("--omega-t", c.omega_t, "Product omega*t (default pi)")
            ->capture_default_str();
        sub->add_option("--coupling-J", c.coupling_j, "Rescaled Ising coupling J = g/omega")
            ->capture_default_str();
        sub->add_option("--kind", c.kind, "Hamiltonian: free or ising")
            ->each([&](const std::string&) { c.kind_explicit = true; });
        sub->add_option("--tol", c.tol, "Nodal tolerance on |trace|")->capture_default_str();
        sub->add_flag("--degrees", c.degrees, "Interpret input angles in degrees");
        sub->add_option("--format", c.format, "Output format: csv or json")
            ->capture_default_str();
        sub->add_option("-o,--output", c.output, "Output path (default stdout)");
        sub->add_option("--job", job_path, "JSON job file supplying defaults");
    };

    CLI::App* s_gp = app.add_subcommand("gp", "Diagonal geometric phase at one point");
    add_common(s_gp);

    CLI::App* s_op2 = app.add_subcommand("op2", "Two-index off-diagonal phase at one point");
    add_common(s_op2);
    s_op2->add_flag("--check-analytic", c.check_analytic,
                    "Also report deviations from both closed-form radicand variants");

    CLI::App* s_opn = app.add_subcommand("opn", "n-index off-diagonal phase at one point");
    add_common(s_opn);
    s_opn->add_option("--n", c.chain_n, "Number of indices n >= 2")->capture_default_str();

    CLI::App* s_opp = app.add_subcommand("op-pure", "Pure-state off-diagonal phase sigma_ij sigma_ji");
    add_common(s_opp, false);
    s_opp->add_option("--i", c.idx_i, "First basis index (0=|11>,1=|10>,2=|01>,3=|00>)")
        ->capture_default_str();
    s_opp->add_option("--j", c.idx_j, "Second basis index")->capture_default_str();

    CLI::App* s_scan = app.add_subcommand("scan", "Grid scans for nodal structure");
    s_scan->require_subcommand(1);
    CLI::App* s_free = s_scan->add_subcommand("free", "Free model (theta, beta) scan per r");
    add_common(s_free);
    s_free->add_option("--grid", c.grid, "Grid as WxH (theta x beta), default 512x512");
    s_free->add_option("--r-values", c.r_values, "r slices (overrides --r)");
    s_free->add_option("--workers", c.workers, "Worker threads")->capture_default_str();

    CLI::App* s_ising = s_scan->add_subcommand("ising", "Ising model (theta, J) scan per r");
    add_common(s_ising);
    s_ising->add_option("--grid", c.grid, "Grid as WxH (theta x J), default 512x256");
    s_ising->add_option("--r-values", c.r_values, "r slices (default 0.1..0.9)");
    s_ising->add_option("--workers", c.workers, "Worker threads")->capture_default_str();

    CLI::App* s_bnd = s_scan->add_subcommand("boundary", "Max nodal r vs separability boundary");
    add_common(s_bnd);
    s_bnd->add_option("--n-theta", c.n_theta, "Number of theta samples")->capture_default_str();

    CLI::App* s_ppt = app.add_subcommand("ppt", "Peres partial-transpose check at one point");
    add_common(s_ppt);

    CLI::App* s_self = app.add_subcommand("selftest", "Run the invariant suite");
    s_self->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    s_self->add_flag("--json", c.json_report, "Machine-readable report");
    s_self->add_option("--format", c.format, "Output format: csv (table) or json");
    s_self->add_option("-o,--output", c.output, "Output path (default stdout)");
    s_self->add_option("--mutate", c.mutate,
                       "Deliberate-fault hook: perturb the closed-form constant by eps");
    s_self->add_option("--job", job_path, "JSON job file supplying defaults");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInvalidInput;
    }

    try {
        if (s_gp->parsed()) return cmd_gp(c);
        if (s_op2->parsed()) return cmd_op2(c);
        if (s_opn->parsed()) return cmd_opn(c);
        if (s_opp->parsed()) return cmd_op_pure(c);
        if (s_ppt->parsed()) return cmd_ppt(c);
        if (s_self->parsed()) return cmd_selftest(c);
        if (s_free->parsed()) return cmd_scan_free(c);
        if (s_ising->parsed()) return cmd_scan_ising(c);
        if (s_bnd->parsed()) return cmd_scan_boundary(c);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    }
    return kExitInvalidInput;
}
