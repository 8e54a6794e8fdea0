// tern_cli: catalog listing, verification suites and PDE certificates.
//
// Exit codes: 0 pass, 1 fail (or undecided certificate), 2 usage.
// Config: key=value file from --config or $TERN_CONFIG; flags win.

#include "tern/localize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

using namespace tern;
using nlohmann::json;

namespace {

struct RunConfig {
    std::string mode = "symbolic";
    std::string output = "text";
    std::string scheme = "fd2";
    double half_width = 2.0;
    double h = 0.125;
    double rho_axis = 0.25;
    double rho_origin = 0.25;
    std::uint64_t seed = 20240607;
    int max_iterations = 2000;
    double tolerance = 1e-8;
    double numeric_floor = 1e-11;
    double order_window = 0.3;  // fd4 uses twice this
    int refinements = 2;        // numeric cross-check spacings after the first
    std::string d8 = "corrected";
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void load_config(const std::string& path, RunConfig& c) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        try {
            if (k == "mode") c.mode = v;
            else if (k == "output") c.output = v;
            else if (k == "scheme") c.scheme = v;
            else if (k == "half_width") c.half_width = std::stod(v);
            else if (k == "h") c.h = std::stod(v);
            else if (k == "rho_axis") c.rho_axis = std::stod(v);
            else if (k == "rho_origin") c.rho_origin = std::stod(v);
            else if (k == "seed") c.seed = std::stoull(v);
            else if (k == "max_iterations") c.max_iterations = std::stoi(v);
            else if (k == "tolerance") c.tolerance = std::stod(v);
            else if (k == "numeric_floor") c.numeric_floor = std::stod(v);
            else if (k == "order_window") c.order_window = std::stod(v);
            else if (k == "refinements") c.refinements = std::stoi(v);
            else if (k == "d8") c.d8 = v;
            else throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key " + k);
        } catch (const std::logic_error&) {
            throw UsageError(path + ":" + std::to_string(lineno) + ": bad value for " + k);
        }
    }
}

void validate(const RunConfig& c) {
    if (c.mode != "symbolic" && c.mode != "numeric" && c.mode != "both") throw UsageError("mode: symbolic|numeric|both");
    if (c.output != "text" && c.output != "json") throw UsageError("output: text|json");
    if (c.scheme != "fd2" && c.scheme != "fd4") throw UsageError("scheme: fd2|fd4");
    if (c.d8 != "printed" && c.d8 != "corrected") throw UsageError("d8: printed|corrected");
    if (!(c.tolerance > 0) || !(c.numeric_floor > 0) || !(c.order_window > 0)) throw UsageError("tolerances must be positive");
    if (c.max_iterations < 1 || c.refinements < 1) throw UsageError("max_iterations and refinements must be positive");
    try {
        MomentumGrid g(GridParams{c.half_width, c.h, c.rho_axis, c.rho_origin});
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

GridParams grid_of(const RunConfig& c) { return GridParams{c.half_width, c.h, c.rho_axis, c.rho_origin}; }
Scheme scheme_of(const RunConfig& c) { return c.scheme == "fd4" ? Scheme::fd4 : Scheme::fd2; }

std::string class_name(TernClass c) {
    switch (c) {
        case TernClass::u: return "u";
        case TernClass::d: return "d";
        case TernClass::s: return "s";
    }
    return "?";
}

std::string square_name(int s) { return s == 0 ? "n/a" : (s > 0 ? "+Id" : "-Id"); }

bool zero_helicity(const Tern& t) {
    for (const auto& b : t.expected.blocks)
        if (b.m != 0) return false;
    return true;
}

// Helicity values m/2 of each block, as numbers.
json helicity_array(const CertificateReport& rep) {
    json out = json::array();
    for (const auto& [k, v] : rep.derived_constants) {
        if (k.rfind("helicity_block", 0) != 0) continue;
        auto slash = v.find('/');
        double x = slash == std::string::npos ? std::stod(v) : std::stod(v.substr(0, slash)) / std::stod(v.substr(slash + 1));
        if (x == std::floor(x)) out.push_back(static_cast<long>(x));
        else out.push_back(x);
    }
    return out;
}

int cmd_list(const RunConfig& c, bool only_localizable, const std::string& cls, std::optional<int> m, int max_m) {
    json rows = json::array();
    for (const auto& t : catalog(max_m)) {
        if (!cls.empty() && class_name(t.spec.cls) != cls) continue;
        if (m && t.spec.m != *m) continue;
        bool loc = t.complete() && zero_helicity(t) && localizable(t);
        if (only_localizable && !loc) continue;
        rows.push_back({{"spec", t.spec.to_string()},
                        {"class", class_name(t.spec.cls)},
                        {"m", t.spec.m},
                        {"combo", t.spec.combo},
                        {"pi_square", square_name(t.expected.pi_square)},
                        {"tau_square", square_name(t.expected.tau_square)},
                        {"localizable", loc}});
    }
    if (c.output == "json") {
        std::cout << json{{"schema", 1}, {"terns", rows}}.dump(2) << "\n";
    } else {
        for (const auto& r : rows)
            std::cout << r["spec"].get<std::string>() << "  class=" << r["class"].get<std::string>() << " m=" << r["m"].get<int>()
                      << " combo=" << r["combo"].get<std::string>() << " pi^2=" << r["pi_square"].get<std::string>()
                      << " tau^2=" << r["tau_square"].get<std::string>() << " localizable=" << (r["localizable"].get<bool>() ? "yes" : "no")
                      << "\n";
    }
    return 0;
}

// Numeric cross-check on one seeded bump; each relation passes when its
// observed order lies in the window or the residual is at rounding level.
CertificateReport numeric_report(const Tern& t, const RunConfig& c) {
    CertificateReport rep;
    rep.subject = t.spec.to_string();
    Scheme s = scheme_of(c);
    int order = scheme_order(s);
    double window = s == Scheme::fd4 ? 2 * c.order_window : c.order_window;
    std::vector<double> hs{c.h};
    for (int r = 0; r < c.refinements; ++r) hs.push_back(hs.back() / 2);
    GridParams base = grid_of(c);
    std::mt19937_64 rng(c.seed);
    Bump b = random_bump(base, t.dim, -1, rng, 0.25);
    for (const auto& rc : cross_check(t, b, s, hs, base, c.numeric_floor)) {
        Check ch;
        ch.id = "numeric:" + rc.id;
        ch.numeric = true;
        ch.value = rc.result.observed_order();
        ch.tolerance = window;
        ch.pass = rc.result.rounding_level || std::abs(ch.value - order) <= window;
        std::ostringstream os;
        os.precision(4);
        if (rc.result.rounding_level) os << "rounding-level " << rc.result.residual.back();
        else os << "order " << ch.value << " residual " << rc.result.residual.back();
        ch.residual = os.str();
        rep.add(ch);
    }
    return rep;
}

int cmd_verify(const RunConfig& c, const std::string& spec_text, const std::vector<std::string>& mutations) {
    Tern t;
    try {
        t = build(TernSpec::parse(spec_text));
        for (const auto& m : mutations) Mutation::parse(m).apply(t);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    CertificateReport rep;
    rep.subject = t.spec.to_string();
    if (c.mode != "numeric") rep.merge(full_report(t));
    if (c.mode != "symbolic") rep.merge(numeric_report(t, c));
    for (const auto& n : t.notes)
        if (std::find(rep.notes.begin(), rep.notes.end(), n) == rep.notes.end()) rep.notes.push_back(n);
    if (c.output == "json") {
        json j = rep.to_json();
        j["schema"] = 1;
        j["mode"] = c.mode;
        j["derived_constants"]["helicity"] = helicity_array(rep);
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& ch : rep.checks)
            std::cout << (ch.pass ? "PASS " : "FAIL ") << ch.id << "  " << ch.residual << "\n";
        for (const auto& [k, v] : rep.derived_constants) std::cout << "  " << k << " = " << v << "\n";
        std::cout << (rep.overall() ? "overall: pass" : "overall: fail") << "\n";
    }
    return rep.overall() ? 0 : 1;
}

int cmd_certify(const RunConfig& c, const std::string& system, int m) {
    SolveOptions o;
    o.max_iterations = c.max_iterations;
    o.tolerance = c.tolerance;
    o.seed = c.seed;
    SystemCertificate cert;
    GridParams g = grid_of(c);
    Scheme s = scheme_of(c);
    if (system == "lemma71") {
        cert = certify_no_solution(lemma71_system(m, c.d8 == "printed" ? D8Form::printed : D8Form::corrected), m, g, s, o);
    } else if (system == "lemma71-derived") {
        cert = certify_no_solution(lemma71_derived(m), m, g, s, o);
    } else if (system == "lemma71-commuting") {
        cert = certify_no_solution(lemma71_derived(m, true), m, g, s, o);
    } else if (system == "parity-obstruction") {
        if (m == 0) throw UsageError("parity-obstruction needs m != 0");
        cert = certify_trivial_kernel(parity_system(m), m, g, s, o);
    } else if (system == "unitaryT-obstruction") {
        if (m == 0) throw UsageError("unitaryT-obstruction needs m != 0");
        cert = certify_trivial_kernel(unitary_tau_system(m), m, g, s, o);
    } else {
        throw UsageError("unknown system " + system);
    }
    if (c.output == "json") {
        std::cout << cert.to_json().dump(2) << "\n";
    } else {
        std::cout << "system: " << cert.system << "\nm: " << cert.m << "\n";
        for (const auto& r : cert.runs)
            std::cout << "h=" << r.h << " rows=" << r.rows << " columns=" << r.columns << " value=" << r.value
                      << " bound=" << r.bound << " iterations=" << r.iterations << (r.converged ? "" : " (not converged)") << "\n";
        std::cout << "r_star: " << cert.r_star << "\nrefinement_ratio: " << cert.refinement_ratio << "\nverdict: " << cert.verdict
                  << "\n";
        for (const auto& n : cert.notes) std::cout << "note: " << n << "\n";
    }
    return cert.verdict == "undecided" ? 1 : 0;
}

int cmd_report(const RunConfig& c, int max_m, std::optional<int> prop71_m) {
    json terns = json::array();
    bool ok = true;
    for (const auto& t : catalog(max_m)) {
        CertificateReport rep = full_report(t);
        ok = ok && rep.overall();
        json j = rep.to_json();
        if (t.complete() && zero_helicity(t)) {
            auto d = classify_D(t);
            j["d_free_functions"] = d.free_functions;
            j["localizable"] = d.free_functions == 0 && localizable(t);
        }
        terns.push_back(j);
    }
    json out = {{"schema", 1}, {"terns", terns}};
    if (prop71_m) {
        SolveOptions o;
        o.max_iterations = c.max_iterations;
        o.tolerance = c.tolerance;
        out["prop71"] = prop71_harness(*prop71_m, grid_of(c), o).to_json();
    }
    if (c.output == "json") {
        std::cout << out.dump(2) << "\n";
    } else {
        for (const auto& j : terns)
            std::cout << (j["overall"] == "pass" ? "PASS " : "FAIL ") << j["subject"].get<std::string>() << "  checks="
                      << j["checks"].size() << "\n";
        if (prop71_m) std::cout << "prop71 m=" << *prop71_m << ": " << out["prop71"]["verdict"].get<std::string>() << "\n";
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig c;
    try {
        // The config file is read before the flags so that flags win.
        std::string config_path;
        if (const char* env = std::getenv("TERN_CONFIG")) config_path = env;
        for (int i = 1; i + 1 < argc; ++i)
            if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
        if (!config_path.empty()) load_config(config_path, c);

        CLI::App app{"Massless transformer terns: catalog, verification and certificates"};
        app.require_subcommand(1);
        app.fallthrough();
        std::string unused_config;
        app.add_option("--config", unused_config, "key=value config file (default $TERN_CONFIG)");
        app.add_option("--output", c.output, "text|json");
        bool json_flag = false;
        app.add_flag("--json", json_flag, "same as --output json");
        app.add_option("--grid-h", c.h, "grid spacing");
        app.add_option("--half-width", c.half_width, "box is [-w, w]^3");
        app.add_option("--rho-axis", c.rho_axis, "excluded distance from the p3 axis");
        app.add_option("--rho-origin", c.rho_origin, "excluded distance from the origin");
        app.add_option("--seed", c.seed, "random seed");
        app.add_option("--scheme", c.scheme, "fd2|fd4");

        auto* list = app.add_subcommand("list", "catalog terns with metadata");
        bool only_loc = false;
        std::string cls;
        std::optional<int> list_m;
        int max_m = 4;
        list->add_flag("--localizable", only_loc, "only terns where the Newton-Wigner operator is the unique position");
        list->add_option("--class", cls, "u|d|s");
        list->add_option("--m", list_m, "helicity parameter");
        list->add_option("--max-m", max_m, "largest |m| in the catalog");

        auto* verify = app.add_subcommand("verify", "run the verification suites on one tern");
        std::string spec;
        std::vector<std::string> mutations;
        verify->add_option("spec", spec, "tern spec, e.g. s:m=2:AA:+1")->required();
        verify->add_option("--mode", c.mode, "symbolic|numeric|both");
        verify->add_option("--mutate", mutations, "test hook, e.g. J3+=p1");
        verify->add_option("--refinements", c.refinements, "numeric spacings after the first");
        verify->add_option("--order-window", c.order_window, "accepted deviation of the fd2 order");

        auto* certify = app.add_subcommand("certify", "least-squares certificate for a PDE system");
        std::string system;
        int cert_m = 0;
        certify->add_option("system", system, "lemma71|lemma71-derived|lemma71-commuting|parity-obstruction|unitaryT-obstruction")
            ->required();
        certify->add_option("--m", cert_m, "helicity parameter")->required();
        certify->add_option("--d8", c.d8, "printed|corrected form of the eighth lemma equation");
        certify->add_option("--max-iterations", c.max_iterations, "solver iteration cap");
        certify->add_option("--tolerance", c.tolerance, "solver tolerance");

        auto* report = app.add_subcommand("report", "full symbolic report for the catalog");
        std::optional<int> prop71_m;
        report->add_option("--max-m", max_m, "largest |m| in the catalog");
        report->add_option("--prop71", prop71_m, "also run the position-operator harness at this m");

        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            return 2;
        }
        if (json_flag) c.output = "json";
        validate(c);

        if (*list) return cmd_list(c, only_loc, cls, list_m, max_m);
        if (*verify) return cmd_verify(c, spec, mutations);
        if (*certify) return cmd_certify(c, system, cert_m);
        if (*report) return cmd_report(c, max_m, prop71_m);
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
