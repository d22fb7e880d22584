// radial: scenario runner.  Every run writes into --out; every file carries
// the artifact version and the hash of the resolved configuration.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "radial/curvature.hpp"
#include "radial/errors.hpp"
#include "radial/examples.hpp"
#include "radial/hflow.hpp"
#include "radial/mass.hpp"
#include "radial/mollify.hpp"
#include "radial/yamabe.hpp"
#include "verify.hpp"

#ifndef RADIAL_VERSION
#define RADIAL_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace radial;

namespace {

constexpr int kMisuse = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const char* kDefaults = R"({
  "n": 3,
  "seed": 20240611,
  "eps": [0.1, 0.05, 0.025],
  "example": {"prop": "positive-mass-cone", "eps": 0.25, "m": 1.0, "alpha": 0.5, "beta": 1.0,
              "r0": 3.0, "r1": 6.0},
  "mollify": {"family": "positive-mass-cone", "param": 0.2, "p": 0},
  "flow": {"cone_eps": 0.05, "background_eps": 0.1, "T": 0.01, "outputs": 8, "cfl": 0.2, "tol": 1e-7,
           "sigma": 0.0, "q": 0},
  "yamabe": {"family": "kasner", "c": 0.2, "nodes": 31, "length": 6.283185307179586, "tol": 1e-8,
             "max_iter": 5000, "q": 0}
})";

// ---- configuration ---------------------------------------------------------

std::string scenario_of(const json& cfg) { return cfg.value("scenario", std::string()); }

// FNV-1a over the canonical dump (sorted keys, shortest round-trip numbers)
std::string config_hash(const json& cfg) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : cfg.dump()) h = (h ^ c) * 1099511628211ull;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RadialGrid make_grid(const json& g) {
    const std::string spacing = g.value("spacing", "geometric");
    const double a = g.at("r_min"), b = g.at("r_max");
    const int N = g.at("nodes");
    if (!(b > a) || a < 0 || N < 8) throw UsageError("grid needs 0 <= r_min < r_max and nodes >= 8");
    RadialGrid grid = spacing == "uniform"     ? RadialGrid::uniform(a, b, N)
                      : spacing == "geometric" ? RadialGrid::geometric(a, b, N, g.value("kappa", 4.0))
                                               : throw UsageError("grid spacing must be uniform or geometric");
    return grid.with_end_order(g.value("end_order", 2));
}

json grid_spec(const std::string& spacing, double a, double b, int N, double kappa, int end_order) {
    return {{"spacing", spacing}, {"r_min", a}, {"r_max", b}, {"nodes", N}, {"kappa", kappa}, {"end_order", end_order}};
}

// family names; the numeric aliases are the labels used in the literature
std::string example_name(const std::string& p) {
    if (p == "2.2" || p == "positive-mass-cone") return "positive-mass-cone";
    if (p == "2.3" || p == "zero-area") return "zero-area";
    if (p == "2.5" || p == "glued-schwarzschild") return "glued-schwarzschild";
    if (p == "cone" || p == "cone-ball") return p;
    throw UsageError("unknown example '" + p + "' (positive-mass-cone|zero-area|glued-schwarzschild|cone|cone-ball)");
}

json default_grid(const json& cfg) {
    const std::string s = scenario_of(cfg);
    if (s == "curvature") return grid_spec("uniform", 0.25, 3.0, 300, 0, 2);
    if (s == "mollify") return grid_spec("geometric", 0.0, 6.0, 1024, 4.0, 4);
    if (s == "flow") return grid_spec("geometric", 0.0, 40.0, 200, 6.0, 2);
    const json& ex = cfg.at("example");
    const std::string name = example_name(ex.at("prop"));
    const double m = ex.at("m");
    if (name == "positive-mass-cone") return grid_spec("geometric", 0.0, 300.0, 1200, 4.0, 4);
    if (name == "zero-area") return grid_spec("geometric", 2.2 * m, 400.0 * m, 800, 4.0, 4);
    if (name == "glued-schwarzschild") return grid_spec("geometric", 2.2 * m, 200.0 * m, 1200, 4.0, 4);
    return grid_spec("geometric", 0.0, 3.0, 400, 3.0, 2);
}

json resolve(json cfg) {
    json d = json::parse(kDefaults);
    json grid = cfg.contains("grid") ? cfg["grid"] : json::object();
    cfg.erase("grid");
    d.merge_patch(cfg);
    // grid keys given piecemeal land on the scenario's default grid
    d["grid"] = default_grid(d);
    d["grid"].merge_patch(grid);
    const int n = d.at("n");
    if (n < 3 || n > 8) throw UsageError("n must be in 3..8");
    for (double e : d.at("eps"))
        if (!(e > 0)) throw UsageError("eps values must be positive");
    return d;
}

// ---- output ------------------------------------------------------------------

struct Outputs {
    fs::path dir;
    std::string hash;

    void json_file(const std::string& name, json body) const {
        body["version"] = RADIAL_VERSION;
        body["config_hash"] = hash;
        std::ofstream f(dir / name, std::ios::binary);
        f << body.dump(2) << "\n";
    }

    // RFC 4180: CRLF records, fields quoted when they need it; the version
    // and configuration hash ride along as the last two columns
    void csv_file(const std::string& name, const std::vector<std::string>& header,
                  const std::vector<std::vector<double>>& rows) const {
        std::ofstream f(dir / name, std::ios::binary);
        for (const auto& h : header) f << quote(h) << ",";
        f << "version,config_hash\r\n";
        char buf[32];
        for (const auto& row : rows) {
            for (double v : row) {
                std::snprintf(buf, sizeof buf, "%.17g", v);
                f << buf << ",";
            }
            f << RADIAL_VERSION << "," << hash << "\r\n";
        }
    }

    static std::string quote(const std::string& s) {
        if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
};

json mass_json(const MassReport& m) {
    json radii = json::array();
    for (size_t k = 0; k < m.radii.size(); ++k) radii.push_back({{"r", m.radii[k]}, {"m", m.integrand[k]}});
    return {{"extrapolated_mass", m.extrapolated_mass},
            {"convergence_order", m.convergence_order},
            {"tau_fit", m.tau_fit},
            {"radii", radii}};
}

json af_json(const AfReport& a) {
    return {{"tau_fit", a.tau_fit}, {"tau1_fit", a.tau1_fit}, {"tau2_fit", a.tau2_fit}, {"q_fit", a.q_fit},
            {"q_vacuous", a.q_vacuous}, {"verdict", a.verdict}};
}

void profile_csv(const Outputs& out, const std::string& name, const WarpedMetric& g) {
    auto S = scalar_curvature_warped(g);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < g.size(); ++i) rows.push_back({g.grid()[i], g.A[i], g.B[i], S[i]});
    out.csv_file(name, {"r", "A", "B", "S"}, rows);
}

// ---- scenarios -----------------------------------------------------------------

void run_curvature(const json& cfg, const Outputs& out) {
    const json& ex = cfg.at("example");
    auto grid = make_grid(cfg.at("grid"));
    auto g = make_cone({cfg.at("n"), ex.at("alpha"), ex.at("beta")}, grid);
    auto ca = curvature_assembly(g);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < g.size(); ++i)
        rows.push_back({grid[i], g.A[i], g.B[i], ca.scalar[i], ca.ricci.T_rr[i], ca.ricci.T_s[i], ca.K_radial[i],
                        ca.K_tangent[i], ca.rm_norm2[i]});
    out.csv_file("curvature.csv", {"r", "A", "B", "S", "Ric_rr", "Ric_s", "K_radial", "K_tangent", "Rm2"}, rows);
    auto [lo, hi] = std::minmax_element(ca.scalar.values.begin(), ca.scalar.values.end());
    out.json_file("curvature.json", {{"metric", "dr^2 + (alpha r^beta)^2 h0"},
                                     {"alpha", ex.at("alpha")},
                                     {"beta", ex.at("beta")},
                                     {"min_S", *lo},
                                     {"max_S", *hi}});
}

void run_example(const json& cfg, const Outputs& out, bool mass_only) {
    const json& ex = cfg.at("example");
    const std::string name = example_name(ex.at("prop"));
    const int n = cfg.at("n");
    const double m = ex.at("m");
    auto grid = make_grid(cfg.at("grid"));
    json summary{{"example", name}, {"n", n}};
    std::optional<WarpedMetric> g;
    if (name == "positive-mass-cone") {
        if (n != 3) throw UsageError("positive-mass-cone is three-dimensional");
        PositiveMassCone pm(ex.at("eps"));
        summary["eps"] = pm.eps();
        summary["a"] = pm.a();
        summary["cone_angle_fit"] = pm.cone_angle_fit();
        g = pm.metric(grid).to_warped();
    } else if (name == "zero-area") {
        if (n != 3) throw UsageError("zero-area is three-dimensional");
        ZeroAreaSingularity z(m);
        summary["m"] = m;
        summary["exponent_fit"] = z.exponent_fit();
        g = z.metric(grid).to_warped();
    } else if (name == "glued-schwarzschild") {
        if (n != 3) throw UsageError("glued-schwarzschild is three-dimensional");
        GluedSchwarzschild gs(m, ex.at("r0").get<double>() * m, ex.at("r1").get<double>() * m,
                              GluedSchwarzschild::Normalization::amplitude);
        summary["m"] = m;
        summary["kappa"] = gs.kappa();
        summary["normalization"] = "amplitude";
        g = gs.metric(grid).to_warped();
    } else if (name == "cone") {
        g = make_cone({n, ex.at("alpha"), ex.at("beta")}, grid);
        summary["alpha"] = ex.at("alpha");
        summary["beta"] = ex.at("beta");
    } else {
        auto cm = make_cone_ball_gluing(n, ex.at("alpha"), 1.0);
        summary["alpha"] = ex.at("alpha");
        summary["r0"] = cm.r0;
        summary["H_minus"] = cm.H_minus;
        summary["H_plus"] = cm.H_plus;
        if (!mass_only) {
            profile_csv(out, "profile_inner.csv", cm.inner);
            profile_csv(out, "profile_outer.csv", cm.outer);
        }
        summary["mass"] = "not asymptotically flat";
        out.json_file(mass_only ? "mass.json" : "example.json", summary);
        return;
    }
    if (!mass_only) profile_csv(out, "profile.csv", *g);
    try {
        auto rep = adm_mass(*g);
        summary["mass"] = mass_json(rep);
        summary["asymptotic_flatness"] = af_json(verify_af_decay(*g, rep.tau_fit, n + 1));
        std::vector<std::vector<double>> rows;
        for (size_t k = 0; k < rep.radii.size(); ++k) rows.push_back({rep.radii[k], rep.integrand[k]});
        out.csv_file("mass_integrand.csv", {"r", "m_r"}, rows);
    } catch (const DomainError& e) {
        summary["mass"] = std::string("undefined: ") + e.what();
    }
    out.json_file(mass_only ? "mass.json" : "example.json", summary);
}

void run_mollify(const json& cfg, const Outputs& out) {
    const json& mo = cfg.at("mollify");
    const int n = cfg.at("n");
    auto grid = make_grid(cfg.at("grid"));
    if (!grid.tip()) throw UsageError("mollify smooths a cone point and needs a grid with r_min = 0");
    const std::string family = mo.at("family");
    if (family != "positive-mass-cone" && family != "cone")
        throw UsageError("mollify family must be positive-mass-cone or cone");
    const double p = mo.at("p").get<double>() > 0 ? mo.at("p").get<double>() : 2.0 * n;
    json runs = json::array();
    std::vector<std::vector<double>> rows;
    for (double eps : cfg.at("eps")) {
        MollifyReport rep;
        const MollifierSpec spec{eps, Region(0.0, 0.0)};
        WarpedMetric g = family == "cone" ? mollify_metric(make_cone({n, mo.at("param"), 1.0}, grid), spec, &rep)
                                          : mollify_metric(PositiveMassCone(mo.at("param")).metric(grid), spec, &rep);
        auto S = scalar_curvature_warped(g);
        const Region inner(0.0, std::min(1.0, grid.r_max()));
        auto w = sobolev_norms(g.A, g, p, inner);
        for (int i = 0; i < g.size(); ++i) rows.push_back({eps, grid[i], rep.input_radius[i], g.A[i], g.B[i], S[i]});
        runs.push_back({{"eps", eps},
                        {"tip_regular", g.tip_regular},
                        {"min_S", *std::min_element(S.values.begin(), S.values.end())},
                        {"eig_ratio_min", rep.eig_ratio_min},
                        {"eig_ratio_max", rep.eig_ratio_max},
                        {"A_w1p_on_r_le_1", w.w1p},
                        {"p", p}});
    }
    out.csv_file("mollify_profiles.csv", {"eps", "r", "input_r", "A", "B", "S"}, rows);
    out.json_file("mollify.json", {{"family", family}, {"param", mo.at("param")}, {"runs", runs}});
}

void run_flow(const json& cfg, const Outputs& out) {
    const json& fl = cfg.at("flow");
    auto grid = make_grid(cfg.at("grid"));
    if (cfg.at("n") != 3) throw UsageError("the flow scenario runs the three-dimensional positive mass cone");
    PositiveMassCone pm(fl.at("cone_eps"));
    auto base = pm.metric(grid);
    auto h = mollify_metric(base, {fl.at("background_eps"), Region(0.0, 0.0)});
    FlowConfig fc;
    fc.T = fl.at("T");
    fc.outputs = fl.at("outputs");
    fc.cfl = fl.at("cfl");
    fc.tol = fl.at("tol");
    fc.sigma = fl.at("sigma");
    fc.q = fl.at("q");
    fc.asymptotically_flat = true;
    json runs = json::array();
    for (double eps : cfg.at("eps")) {
        auto g0 = mollify_metric(base, {eps, Region(0.0, 0.0)});
        auto tr = run_hflow(g0, h, fc);
        std::vector<std::vector<double>> rows;
        auto est = monitor_estimates(tr, fc);
        for (size_t k = 0; k < tr.monitors.size(); ++k) {
            const auto& s = tr.monitors[k];
            rows.push_back({s.t, s.J, s.min_S, est.grad_scaled[k], est.hess_scaled[k], s.closeness, s.mass, s.sup_dq_S});
        }
        std::ostringstream name;
        name << "flow_eps" << eps << ".csv";
        out.csv_file(name.str(),
                     {"t", "J", "min_S", "sup_grad_scaled", "sup_hess_scaled", "closeness", "mass", "sup_dq_S"}, rows);
        auto drift = mass_drift(tr);
        runs.push_back({{"eps", eps},
                        {"csv", name.str()},
                        {"steps", tr.steps},
                        {"rejected", tr.rejected},
                        {"truncated", tr.truncated},
                        {"delta", est.delta},
                        {"sup_grad_scaled", est.sup_grad_scaled},
                        {"sup_hess_scaled", est.sup_hess_scaled},
                        {"sup_W_scaled", est.sup_W_scaled},
                        {"C_hat", est.C_hat},
                        {"J_monotone", est.J_monotone},
                        {"verdict", est.verdict},
                        {"mass_drift", drift.max_relative_drift}});
    }
    out.json_file("flow.json", {{"initial", "mollified positive mass cone"},
                                {"cone_eps", fl.at("cone_eps")},
                                {"background_eps", fl.at("background_eps")},
                                {"runs", runs}});
}

void run_yamabe(const json& cfg, const Outputs& out) {
    const json& y = cfg.at("yamabe");
    const int n = cfg.at("n"), N = y.at("nodes");
    const double L = y.at("length");
    const std::string family = y.at("family");
    TorusMetric g = TorusMetric::flat(n, L, N);
    if (family == "kasner") {
        // dx^2 + e^{2c sin x} dy^2 + e^{-2c sin x} dz^2 (+ flat directions)
        const double c = y.at("c"), k = 2 * std::numbers::pi / L;
        std::vector<PeriodicProfile> B;
        for (int j = 0; j < n - 1; ++j) {
            const double s = j == 0 ? 2 * c : j == 1 ? -2 * c : 0.0;
            B.push_back(PeriodicProfile::from(L, N, [=](double x) { return std::exp(s * std::sin(k * x)); }));
        }
        g = TorusMetric(n, PeriodicProfile::from(L, N, [](double) { return 1.0; }), B);
    } else if (family != "flat") {
        throw UsageError("yamabe family must be kasner or flat");
    }
    auto sol = solve_yamabe(g, {y.at("tol"), y.at("max_iter")});
    const double q = y.at("q").get<double>() > 0 ? y.at("q").get<double>() : g.p() + 2;
    std::vector<std::vector<double>> rows;
    for (size_t k = 0; k < sol.functional_history.size(); ++k) rows.push_back({double(k), sol.functional_history[k]});
    out.csv_file("yamabe_history.csv", {"iteration", "E"}, rows);
    std::vector<std::vector<double>> urows;
    for (int i = 0; i < sol.u.size(); ++i) urows.push_back({sol.u.x(i), sol.u[i]});
    out.csv_file("yamabe_u.csv", {"x", "u"}, urows);
    out.json_file("yamabe.json", {{"family", family},
                                  {"n", n},
                                  {"nodes", N},
                                  {"volume", volume(g)},
                                  {"lambda", sol.lambda},
                                  {"yamabe_constant", sol.yamabe_constant},
                                  {"iterations", sol.iterations},
                                  {"el_residual", sol.el_residual},
                                  {"normalization_residual", sol.normalization_residual},
                                  {"lq_exponent", q},
                                  {"lq_norm", lq_bound_check(sol, g, q)}});
}

void run_verify_all(const json& cfg, const Outputs& out, int threads) {
    verify::Options opt;
    opt.seed = cfg.at("seed");
    opt.threads = threads;
    auto claims = verify::run_all(opt);
    json list = json::array();
    int counts[3] = {0, 0, 0};
    std::vector<std::vector<std::string>> table;
    for (const auto& c : claims) {
        ++counts[static_cast<int>(c.verdict)];
        list.push_back({{"criterion", c.criterion},
                        {"anchor", c.anchor},
                        {"statement", c.statement},
                        {"verdict", verify::to_string(c.verdict)},
                        {"value", c.value},
                        {"bound", c.bound},
                        {"note", c.note}});
    }
    out.json_file("summary.json", {{"seed", opt.seed},
                                   {"counts", {{"pass", counts[0]}, {"fail", counts[1]}, {"measured", counts[2]}}},
                                   {"claims", list}});
    std::ostringstream txt;
    txt << "radial " << RADIAL_VERSION << "  config " << out.hash << "\n";
    for (const auto& c : claims) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", c.value);
        txt << std::left << std::setw(9) << verify::to_string(c.verdict) << std::setw(3) << c.criterion << " "
            << std::setw(56) << c.anchor << " " << buf;
        if (!c.bound.empty()) txt << "  (" << c.bound << ")";
        txt << "\n";
    }
    txt << counts[0] << " pass, " << counts[1] << " fail, " << counts[2] << " measured\n";
    std::ofstream(out.dir / "verdicts.txt", std::ios::binary) << txt.str();
    std::cout << txt.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial: warped-product scalar curvature, h-flow, ADM mass and Yamabe experiments.\n"
                 "Defaults (overridable from a JSON --config file or the flags below):\n" +
                 json::parse(kDefaults).dump(2)};
    app.set_help_all_flag("--help-all", "help for every subcommand");
    app.fallthrough();
    std::string config_path, out_dir = "out";
    std::uint64_t seed = 0;
    int threads = 1;
    json over = json::object();
    app.add_option("--config", config_path, "JSON configuration file (keys as in the defaults, plus \"scenario\")");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", seed, "seed for the randomized suites");
    app.add_option("--threads", threads, "worker threads for verify-all")->check(CLI::Range(1, 64))->capture_default_str();

    auto num = [&](CLI::App* s, const std::string& flag, json::json_pointer ptr, const std::string& help) {
        s->add_option_function<double>(flag, [&over, ptr](double v) { over[ptr] = v; }, help);
    };
    auto integer = [&](CLI::App* s, const std::string& flag, json::json_pointer ptr, const std::string& help) {
        s->add_option_function<int>(flag, [&over, ptr](int v) { over[ptr] = v; }, help);
    };
    auto text = [&](CLI::App* s, const std::string& flag, json::json_pointer ptr, const std::string& help) {
        s->add_option_function<std::string>(flag, [&over, ptr](const std::string& v) { over[ptr] = v; }, help);
    };
    auto grid_flags = [&](CLI::App* s) {
        text(s, "--spacing", "/grid/spacing"_json_pointer, "uniform | geometric");
        num(s, "--r-min", "/grid/r_min"_json_pointer, "inner radius (0 puts a tip at the origin)");
        num(s, "--r-max", "/grid/r_max"_json_pointer, "outer radius");
        integer(s, "--nodes", "/grid/nodes"_json_pointer, "number of nodes");
        num(s, "--kappa", "/grid/kappa"_json_pointer, "geometric clustering");
        integer(s, "--end-order", "/grid/end_order"_json_pointer, "2 or 4: order of the end stencils");
    };
    auto eps_flag = [&](CLI::App* s) {
        s->add_option_function<std::vector<double>>("--eps-list", [&over](const std::vector<double>& v) { over["eps"] = v; },
                                                    "smoothing scales of the sweep");
    };

    auto* curv = app.add_subcommand("curvature", "curvature tables of the cone dr^2 + (alpha r^beta)^2 h0");
    num(curv, "--alpha", "/example/alpha"_json_pointer, "cone parameter");
    num(curv, "--beta", "/example/beta"_json_pointer, "power");
    grid_flags(curv);

    auto* ex = app.add_subcommand("example", "singular example: profile CSV and mass report JSON");
    text(ex, "--prop", "/example/prop"_json_pointer,
         "positive-mass-cone (2.2) | zero-area (2.3) | glued-schwarzschild (2.5) | cone | cone-ball");
    num(ex, "--eps", "/example/eps"_json_pointer, "cone strength of the positive mass cone");
    num(ex, "--m", "/example/m"_json_pointer, "mass parameter");
    num(ex, "--alpha", "/example/alpha"_json_pointer, "cone parameter (cone, cone-ball)");
    num(ex, "--beta", "/example/beta"_json_pointer, "power (cone)");
    grid_flags(ex);

    auto* mo = app.add_subcommand("mollify", "smoothing sweep at a cone point");
    text(mo, "--family", "/mollify/family"_json_pointer, "positive-mass-cone | cone");
    num(mo, "--param", "/mollify/param"_json_pointer, "eps of the positive mass cone, or alpha of the cone");
    num(mo, "--p", "/mollify/p"_json_pointer, "Sobolev exponent (0: 2n)");
    eps_flag(mo);
    grid_flags(mo);

    auto* fl = app.add_subcommand("flow", "h-flow of the mollified positive mass cone with monitors");
    num(fl, "--T", "/flow/T"_json_pointer, "final time");
    integer(fl, "--outputs", "/flow/outputs"_json_pointer, "sampled times");
    num(fl, "--cone-eps", "/flow/cone_eps"_json_pointer, "strength of the positive mass cone");
    num(fl, "--background-eps", "/flow/background_eps"_json_pointer, "smoothing scale of the background h");
    num(fl, "--cfl", "/flow/cfl"_json_pointer, "explicit step cap factor");
    num(fl, "--tol", "/flow/tol"_json_pointer, "local error tolerance");
    num(fl, "--sigma", "/flow/sigma"_json_pointer, "scalar lower bound in J");
    eps_flag(fl);
    grid_flags(fl);

    auto* ma = app.add_subcommand("mass", "ADM mass report with radii table and integrand CSV");
    text(ma, "--prop", "/example/prop"_json_pointer, "example family, as for `example`");
    num(ma, "--eps", "/example/eps"_json_pointer, "cone strength of the positive mass cone");
    num(ma, "--m", "/example/m"_json_pointer, "mass parameter");
    grid_flags(ma);

    auto* ya = app.add_subcommand("yamabe", "Yamabe minimizer on a diagonal torus");
    text(ya, "--family", "/yamabe/family"_json_pointer, "kasner | flat");
    num(ya, "--c", "/yamabe/c"_json_pointer, "anisotropy of the kasner family");
    integer(ya, "--nodes", "/yamabe/nodes"_json_pointer, "odd number of periodic nodes");
    num(ya, "--tol", "/yamabe/tol"_json_pointer, "Euler-Lagrange residual tolerance");
    num(ya, "--q", "/yamabe/q"_json_pointer, "L^q exponent (0: p + 2)");
    integer(ya, "--n", "/n"_json_pointer, "dimension");

    app.add_subcommand("verify-all", "run every acceptance claim; summary.json, verdicts.txt");

    CLI11_PARSE(app, argc, argv);

    try {
        json cfg = json::object();
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw UsageError("cannot read config " + config_path);
            std::string body((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
            if (body.find_first_not_of(" \t\r\n") != std::string::npos) cfg = json::parse(body);
            if (!cfg.is_object()) throw UsageError("config must be a JSON object");
        }
        for (auto* s : app.get_subcommands()) cfg["scenario"] = s->get_name();
        cfg.merge_patch(over);
        if (app.count("--seed")) cfg["seed"] = seed;
        if (scenario_of(cfg).empty()) {
            std::cerr << app.help();
            return kMisuse;
        }
        static const std::vector<std::string> known{"curvature", "example", "mollify", "flow", "mass", "yamabe",
                                                    "verify-all"};
        if (std::find(known.begin(), known.end(), scenario_of(cfg)) == known.end())
            throw UsageError("unknown scenario '" + scenario_of(cfg) + "'");
        cfg = resolve(cfg);

        Outputs out{out_dir, config_hash(cfg)};
        fs::create_directories(out.dir);
        out.json_file("config.json", {{"config", cfg}});
        const std::string s = scenario_of(cfg);
        if (s == "curvature") run_curvature(cfg, out);
        else if (s == "example") run_example(cfg, out, false);
        else if (s == "mass") run_example(cfg, out, true);
        else if (s == "mollify") run_mollify(cfg, out);
        else if (s == "flow") run_flow(cfg, out);
        else if (s == "yamabe") run_yamabe(cfg, out);
        else run_verify_all(cfg, out, threads);
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "radial: " << e.what() << "\n";
        return kMisuse;
    } catch (const json::exception& e) {
        std::cerr << "radial: invalid configuration: " << e.what() << "\n";
        return kMisuse;
    } catch (const std::exception& e) {
        std::cerr << "radial: " << e.what() << "\n";
        return 1;
    }
}
