// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is 0 only when every criterion passes.

#include "tern/localize.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace tern;

namespace {

// Pinned tolerances.
constexpr double kSuiteSeconds = 60.0;          // criterion 1
constexpr double kSolvableResidual = 1e-10;     // criterion 7, m = 0
constexpr double kRefinementChange = 0.20;      // criterion 7
constexpr double kCertifySeconds = 300.0;       // criterion 7
constexpr double kRecordAgreement = 1e-6;       // criterion 7, against the recorded r*
constexpr double kOrderFd2 = 2.0, kWindowFd2 = 0.3;
constexpr double kOrderFd4 = 4.0, kWindowFd4 = 0.6;
constexpr double kRoundingFloor = 1e-11;
constexpr std::uint64_t kBumpSeed = 20240607;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;
    void fail(const std::string& why) {
        pass = false;
        details.push_back("FAIL: " + why);
    }
    void note(const std::string& s) { details.push_back(s); }
};

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

std::vector<std::string> failing_ids(const CertificateReport& r) {
    std::vector<std::string> out;
    for (const auto& c : r.checks)
        if (!c.pass) out.push_back(c.id);
    return out;
}

Outcome criterion1(const std::vector<Tern>& cat) {
    Outcome o;
    auto t0 = Clock::now();
    std::size_t relations = 0;
    for (const auto& t : cat) {
        auto rep = check_lie_algebra(t);
        relations += rep.checks.size();
        for (const auto& id : failing_ids(rep)) o.fail(t.spec.to_string() + " " + id);
    }
    double s = seconds_since(t0);
    o.note(std::to_string(cat.size()) + " terns, " + std::to_string(relations) + " relations, " + fmt(s) + " s");
    if (s > kSuiteSeconds) o.fail("runtime " + fmt(s) + " s exceeds " + fmt(kSuiteSeconds) + " s");
    return o;
}

Outcome criterion2(const std::vector<Tern>& cat) {
    Outcome o;
    for (const auto& t : cat) {
        if (!t.complete()) continue;
        auto rep = check_discrete_relations(t);
        for (const auto& id : failing_ids(rep)) o.fail(t.spec.to_string() + " " + id);
        auto pi2 = scalar_square(*t.pi), tau2 = scalar_square(*t.tau);
        if (!pi2 || *pi2 != ComplexRational(t.expected.pi_square)) o.fail(t.spec.to_string() + " Pi^2");
        if (!tau2 || *tau2 != ComplexRational(t.expected.tau_square)) o.fail(t.spec.to_string() + " T^2");
        auto w = extract_omega(*t.pi, *t.tau);
        if (!w || (*w * w->conj()) != ComplexRational(1)) o.fail(t.spec.to_string() + " |omega| != 1");
        if (t.spec.family == Family::doublet_u) o.note("u-doublet: T^2 = " + (tau2 ? tau2->to_string() : "none") + " by composition");
    }
    return o;
}

Outcome criterion3(const std::vector<Tern>& cat) {
    Outcome o;
    for (const auto& t : cat) {
        auto h = check_helicity(t);
        for (const auto& id : failing_ids(h.report)) o.fail(t.spec.to_string() + " " + id);
        for (std::size_t b = 0; b < t.expected.blocks.size(); ++b) {
            const auto& blk = t.expected.blocks[b];
            ComplexRational want = ComplexRational::frac(blk.m, 2);
            if (b >= h.per_block.size() || !h.per_block[b] || *h.per_block[b] != want)
                o.fail(t.spec.to_string() + " block " + std::to_string(b + 1) + " helicity");
        }
        if (t.spec.cls == TernClass::s && t.spec.m != 0 && t.expected.blocks.size() == 2 &&
            !(t.expected.blocks[0].m == t.spec.m && t.expected.blocks[1].m == -t.spec.m))
            o.fail(t.spec.to_string() + " block signs");
        if (t.complete())
            for (const auto& id : failing_ids(check_mirror(t))) o.fail(t.spec.to_string() + " " + id);
    }
    return o;
}

Outcome criterion4(const std::vector<Tern>& cat) {
    Outcome o;
    for (const auto& t : cat) {
        auto rep = check_casimirs(t);
        for (const auto& id : failing_ids(rep)) o.fail(t.spec.to_string() + " " + id);
        if (rep.derived_constants["eta"] != "0" || rep.derived_constants["varpi"] != "0")
            o.fail(t.spec.to_string() + " eta=" + rep.derived_constants["eta"] + " varpi=" + rep.derived_constants["varpi"]);
    }
    return o;
}

Outcome criterion5(const std::vector<Tern>& cat) {
    Outcome o;
    for (const auto& t : cat) {
        if (!t.complete()) continue;
        auto cr = commutant_probe(t);
        if (!cr.irreducible || cr.basis.size() != 1) o.fail(t.spec.to_string() + " commutant dim " + std::to_string(cr.basis.size()));
    }
    for (int m : {1, 2, 4}) {
        auto cr = commutant_probe(build_s_m(m, 0));
        o.note("bare generators s:m=" + std::to_string(m) + ": commutant dim " + std::to_string(cr.basis.size()));
        if (cr.basis.size() <= 1) o.fail("bare generators s:m=" + std::to_string(m) + " look irreducible");
    }
    return o;
}

Outcome criterion6() {
    Outcome o;
    // F must pass (Q.1), (12.i), (12.ii) on the scalar terns and the three terns singled out as localizable.
    for (const char* s : {"u:m=0", "d:m=0", "s:m=0:UU:-1", "s:m=0:AU:+1", "s:m=0:AA:-1"}) {
        Tern t = build(TernSpec::parse(s));
        for (const auto& id : failing_ids(check_position(t, newton_wigner(t.dim)))) o.fail(std::string(s) + " " + id);
    }
    const std::vector<std::string> variants = {"UU:+1", "UU:-1", "AU:+1", "AU:-1", "AA:+1", "AA:-1"};
    const std::vector<int> expected = {2, 0, 0, 1, 1, 0};
    std::string got = "(", want = "(";
    for (std::size_t i = 0; i < variants.size(); ++i) {
        auto d = classify_D(build(TernSpec::parse("s:m=0:" + variants[i])));
        got += (i ? ", " : "") + std::to_string(d.free_functions);
        want += (i ? ", " : "") + std::to_string(expected[i]);
        if (d.free_functions != expected[i])
            o.fail("classify_D s:m=0:" + variants[i] + " = " + std::to_string(d.free_functions) + " [" + d.pattern() +
                   "], expected " + std::to_string(expected[i]));
    }
    o.note("classify_D " + got + ") against expected " + want + ")");
    if (!o.pass)
        o.note("analysis: the counts come from an exact linear solve of Pi D = -D Pi, T D = D T with the stated Pi, T; "
               "an independent 2x2 matrix oracle in test_localize agrees with the engine, so the expected tuple is not "
               "reproduced by these forms of Pi and T");
    return o;
}

Outcome criterion7(const std::string& record_path) {
    Outcome o;
    auto t0 = Clock::now();
    nlohmann::json rec = nlohmann::json::object();
    auto c0 = certify_no_solution(lemma71_system(0), 0);
    o.note("m=0: verdict " + c0.verdict + ", r* " + fmt(c0.r_star));
    if (!(c0.r_star <= kSolvableResidual)) o.fail("m=0 r* " + fmt(c0.r_star));
    for (int m : {1, 2, 4}) {
        auto c = certify_no_solution(lemma71_system(m), m);
        const auto& coarse = c.runs.at(0);
        const auto& fine = c.runs.at(1);
        double change = std::abs(c.refinement_ratio - 1.0);
        o.note("m=" + std::to_string(m) + ": r*(h=" + fmt(coarse.h) + ") " + fmt(coarse.value) + ", r*(h=" + fmt(fine.h) + ") " +
               fmt(fine.value) + ", change " + fmt(100 * change) + "%, pointwise bound " + fmt(fine.bound) +
               ", iterations " + std::to_string(coarse.iterations) + "/" + std::to_string(fine.iterations) + ", verdict " +
               c.verdict);
        if (!(c.r_star > 0.0)) o.fail("m=" + std::to_string(m) + " r* not positive");
        if (!(change < kRefinementChange)) o.fail("m=" + std::to_string(m) + " refinement change " + fmt(change));
        if (c.verdict != "inconsistent") o.fail("m=" + std::to_string(m) + " verdict " + c.verdict);
        rec[std::to_string(m)] = {{"r_star", c.r_star}, {"refinement_ratio", c.refinement_ratio}, {"bound", fine.bound}};
    }
    double s = seconds_since(t0);
    o.note("runtime " + fmt(s) + " s");
    if (s > kCertifySeconds) o.fail("runtime " + fmt(s) + " s exceeds " + fmt(kCertifySeconds) + " s");
    std::ifstream in(record_path);
    if (in) {
        auto old = nlohmann::json::parse(in);
        for (const auto& [m, v] : rec.items()) {
            double a = v["r_star"], b = old.at(m).at("r_star");
            if (std::abs(a - b) > kRecordAgreement * b) o.fail("m=" + m + " r* " + fmt(a) + " differs from recorded " + fmt(b));
        }
        o.note("compared with " + record_path);
    } else {
        std::ofstream(record_path) << rec.dump(2) << "\n";
        o.note("recorded r* in " + record_path);
    }
    return o;
}

Outcome criterion8() {
    Outcome o;
    const std::vector<std::string> terns = {"u:m=0", "d:m=0", "s:m=2:AA:+1", "u-doublet", "s-quartet"};
    std::mt19937_64 rng(kBumpSeed);
    GridParams wide{3.0, 1.0 / 12, 0.25, 0.25};
    int relations = 0, rounding = 0;
    double worst2 = 0.0, worst4 = 0.0;
    auto t0 = Clock::now();
    for (int n = 0; n < 10; ++n) {
        Tern t = build(TernSpec::parse(terns[static_cast<std::size_t>(n) % terns.size()]));
        Bump b = random_bump(wide, t.dim, -1, rng, 0.6);
        for (Scheme s : {Scheme::fd2, Scheme::fd4}) {
            bool fd2 = s == Scheme::fd2;
            std::vector<double> hs = fd2 ? std::vector<double>{1.0 / 12, 1.0 / 24, 1.0 / 48} : std::vector<double>{1.0 / 8, 1.0 / 16, 1.0 / 32};
            double order = fd2 ? kOrderFd2 : kOrderFd4, window = fd2 ? kWindowFd2 : kWindowFd4;
            for (const auto& r : cross_check(t, b, s, hs, wide, kRoundingFloor)) {
                ++relations;
                if (r.result.rounding_level) {
                    ++rounding;
                    continue;
                }
                double dev = std::abs(r.result.observed_order() - order);
                (fd2 ? worst2 : worst4) = std::max(fd2 ? worst2 : worst4, dev);
                if (dev > window)
                    o.fail("bump " + std::to_string(n) + " " + t.spec.to_string() + " " + (fd2 ? "fd2 " : "fd4 ") + r.id + " order " +
                           fmt(r.result.observed_order()));
            }
        }
    }
    o.note(std::to_string(relations) + " relation runs, " + std::to_string(rounding) + " at rounding level; worst order deviation fd2 " +
           fmt(worst2) + ", fd4 " + fmt(worst4) + "; " + fmt(seconds_since(t0)) + " s");
    return o;
}

Outcome criterion9() {
    Outcome o;
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"u:m=0", "J3+=p1"}, {"d:m=0", "P0+=p3"}, {"s:m=2:AA:+1", "K1+=p0"}, {"u-doublet", "J2+=1/2*p3"}, {"s-quartet", "K3+=i*p1"}};
    for (const auto& [spec, text] : cases) {
        Tern t = build(TernSpec::parse(spec));
        auto mu = Mutation::parse(text);
        mu.apply(t);
        auto ids = failing_ids(full_report(t));
        bool named = false;
        for (const auto& id : ids) named = named || id.find(mu.generator) != std::string::npos;
        o.note(spec + " " + text + ": " + std::to_string(ids.size()) + " failing checks" + (ids.empty() ? "" : ", first " + ids.front()));
        if (ids.empty()) o.fail(spec + " " + text + " not detected");
        else if (!named) o.fail(spec + " " + text + " detected but no failing relation names " + mu.generator);
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    std::string record = argc > 1 ? argv[1] : "criterion7_record.json";
    const auto cat = catalog(4);
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"Lie-algebra suite", [&] { return criterion1(cat); }},
        {"discrete symmetries", [&] { return criterion2(cat); }},
        {"helicity and mirror", [&] { return criterion3(cat); }},
        {"Casimirs", [&] { return criterion4(cat); }},
        {"irreducibility", [&] { return criterion5(cat); }},
        {"localizability positive", [] { return criterion6(); }},
        {"localizability negative", [&] { return criterion7(record); }},
        {"numeric cross-validation", [] { return criterion8(); }},
        {"negative controls", [] { return criterion9(); }},
    };
    bool all = true;
    int n = 0;
    for (const auto& [name, run] : criteria) {
        ++n;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        all = all && o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << " (" << name << ")\n";
        for (const auto& d : o.details) std::cout << "    " << d << "\n";
        std::cout.flush();
    }
    return all ? 0 : 1;
}
