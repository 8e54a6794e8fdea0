#include "tern/terncat.hpp"

#include <sstream>
#include <stdexcept>

namespace tern {

namespace {

const ComplexRational I = ComplexRational::i();

RationalFn half(int m) { return RationalFn(ComplexRational::frac(m, 2)); }

FiberMatrix mat(std::initializer_list<std::initializer_list<long>> rows) {
    FiberMatrix m;
    for (const auto& r : rows) {
        std::vector<ComplexRational> row;
        for (long v : r) row.emplace_back(v);
        m.push_back(std::move(row));
    }
    return m;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

std::string normalize_minus(std::string s) {
    const std::string uminus = "\xE2\x88\x92";
    for (auto pos = s.find(uminus); pos != std::string::npos; pos = s.find(uminus)) s.replace(pos, uminus.size(), "-");
    return s;
}

int parse_int(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("TernSpec: bad " + what + " '" + s + "'");
    }
}

// Diagonal generators from a list of one-component blocks.
Tern assemble(const TernSpec& spec, const std::vector<BlockInfo>& blocks) {
    Tern t;
    t.spec = spec;
    t.dim = static_cast<int>(blocks.size());
    t.p0 = OperatorExpr(t.dim);
    for (int a = 0; a < 3; ++a) {
        t.p[static_cast<std::size_t>(a)] = OperatorExpr(t.dim);
        t.j[static_cast<std::size_t>(a)] = OperatorExpr(t.dim);
        t.k[static_cast<std::size_t>(a)] = OperatorExpr(t.dim);
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const BlockInfo& info = blocks[b];
        const int off = static_cast<int>(b);
        RationalFn sign(info.p0_sign);
        t.p0 += OperatorExpr::multiply(1, sign * RationalFn::p0()).embed(t.dim, off);
        for (int a = 1; a <= 3; ++a) {
            auto ia = static_cast<std::size_t>(a - 1);
            t.p[ia] += OperatorExpr::multiply(1, RationalFn::p(a)).embed(t.dim, off);
            t.j[ia] += (orbital_j(a) + OperatorExpr::multiply(1, helicity_j(info.m, a))).embed(t.dim, off);
            t.k[ia] += (sign * (orbital_k(a) + OperatorExpr::multiply(1, helicity_k(info.m, a)))).embed(t.dim, off);
        }
    }
    t.expected.blocks = blocks;
    for (std::size_t b = 0; b < blocks.size(); ++b) t.expected.blocks[b].offset = static_cast<int>(b);
    return t;
}

void finish(Tern& t, OperatorExpr pi, OperatorExpr tau, int pi_square, int tau_square) {
    t.pi = std::move(pi);
    t.tau = std::move(tau);
    t.expected.pi_square = pi_square;
    t.expected.tau_square = tau_square;
    t.expected.omega = extract_omega(*t.pi, *t.tau);
}

OperatorExpr upsilon_times(const FiberMatrix& m) { return compose(OperatorExpr::parity(static_cast<int>(m.size())), OperatorExpr::matrix(m)); }

OperatorExpr kappa_times(const FiberMatrix& m) {
    return compose(OperatorExpr::conjugation(static_cast<int>(m.size())), OperatorExpr::matrix(m));
}

OperatorExpr kappa_upsilon_times(const FiberMatrix& m) {
    int n = static_cast<int>(m.size());
    return compose(compose(OperatorExpr::conjugation(n), OperatorExpr::parity(n)), OperatorExpr::matrix(m));
}

}  // namespace

// ---------------------------------------------------------------------------

TernSpec TernSpec::parse(const std::string& raw) {
    std::string text = normalize_minus(raw);
    TernSpec s;
    if (text == "u-doublet") {
        s.family = Family::doublet_u;
        return s;
    }
    if (text == "d-doublet") {
        s.cls = TernClass::d;
        s.family = Family::doublet_d;
        return s;
    }
    if (text == "s-quartet") {
        s.cls = TernClass::s;
        s.family = Family::quartet_s;
        return s;
    }
    auto parts = split(text, ':');
    if (parts.size() < 2) throw std::invalid_argument("TernSpec: cannot parse '" + raw + "'");
    if (parts[0] == "u")
        s.cls = TernClass::u;
    else if (parts[0] == "d")
        s.cls = TernClass::d;
    else if (parts[0] == "s")
        s.cls = TernClass::s;
    else
        throw std::invalid_argument("TernSpec: unknown class '" + parts[0] + "'");
    if (parts[1].rfind("m=", 0) != 0) throw std::invalid_argument("TernSpec: expected m=<int> in '" + raw + "'");
    s.m = parse_int(parts[1].substr(2), "m");

    if (s.cls != TernClass::s) {
        if (parts.size() == 3 && parts[2] == "pair" && s.cls == TernClass::u) {
            s.combo = "pair";
            s.family = Family::generators_only;
            return s;
        }
        if (parts.size() != 2) throw std::invalid_argument("TernSpec: unexpected fields in '" + raw + "'");
        s.family = s.m == 0 ? Family::irreducible : Family::generators_only;
        return s;
    }
    if (parts.size() == 2) {
        if (s.m == 0) throw std::invalid_argument("TernSpec: s-class with m=0 needs a combination");
        s.family = Family::generators_only;
        return s;
    }
    if (parts.size() != 4) throw std::invalid_argument("TernSpec: expected s:m=<int>:<combo>:<+1|-1>");
    s.combo = parts[2];
    if (s.combo != "UU" && s.combo != "AU" && s.combo != "AA")
        throw std::invalid_argument("TernSpec: unknown combination '" + s.combo + "'");
    s.variant = parse_int(parts[3], "variant");
    if (s.variant != 1 && s.variant != -1) throw std::invalid_argument("TernSpec: variant must be +1 or -1");
    if (s.m != 0 && s.combo != "AA")
        throw std::invalid_argument("TernSpec: non-zero helicity requires combination AA");
    s.family = Family::irreducible;
    return s;
}

std::string TernSpec::to_string() const {
    switch (family) {
        case Family::doublet_u: return "u-doublet";
        case Family::doublet_d: return "d-doublet";
        case Family::quartet_s: return "s-quartet";
        default: break;
    }
    std::string c = cls == TernClass::u ? "u" : (cls == TernClass::d ? "d" : "s");
    std::string out = c + ":m=" + std::to_string(m);
    if (combo == "pair") return out + ":pair";
    if (cls == TernClass::s && combo != "n/a") out += ":" + combo + ":" + (variant > 0 ? "+1" : "-1");
    return out;
}

std::vector<std::pair<std::string, OperatorExpr>> Tern::generators() const {
    return {{"P0", p0}, {"P1", p[0]}, {"P2", p[1]}, {"P3", p[2]}, {"J1", j[0]},
            {"J2", j[1]}, {"J3", j[2]}, {"K1", k[0]}, {"K2", k[1]}, {"K3", k[2]}};
}

OperatorExpr& Tern::generator(const std::string& name) {
    if (name.size() == 2) {
        int idx = name[1] - '1';
        if (name == "P0") return p0;
        if (idx >= 0 && idx < 3) {
            auto i = static_cast<std::size_t>(idx);
            if (name[0] == 'P') return p[i];
            if (name[0] == 'J') return j[i];
            if (name[0] == 'K') return k[i];
        }
    }
    throw std::invalid_argument("unknown generator '" + name + "'");
}

const OperatorExpr& Tern::generator(const std::string& name) const {
    return const_cast<Tern*>(this)->generator(name);
}

// ---------------------------------------------------------------------------

RationalFn rho_squared() { return RationalFn::p(1) * RationalFn::p(1) + RationalFn::p(2) * RationalFn::p(2); }

RationalFn helicity_j(int m, int j) {
    if (m == 0 || j == 3) return {};
    return half(m) * RationalFn::p(j) * RationalFn::p0() / rho_squared();
}

RationalFn helicity_k(int m, int j) {
    if (m == 0 || j == 3) return {};
    if (j == 1) return -half(m) * RationalFn::p(2) * RationalFn::p(3) / rho_squared();
    return half(m) * RationalFn::p(3) * RationalFn::p(1) / rho_squared();
}

OperatorExpr orbital_j(int j) {
    int k = j % 3 + 1;
    int l = k % 3 + 1;
    return RationalFn(-I) *
           (RationalFn::p(k) * OperatorExpr::partial(1, l) - RationalFn::p(l) * OperatorExpr::partial(1, k));
}

OperatorExpr orbital_k(int j) { return RationalFn(I) * RationalFn::p0() * OperatorExpr::partial(1, j); }

std::optional<ComplexRational> extract_omega(const OperatorExpr& pi, const OperatorExpr& tau) {
    OperatorExpr pt = compose(pi, tau);
    OperatorExpr tp = compose(tau, pi);
    if (tp.is_zero()) return std::nullopt;
    const auto& [key, c_tp] = *tp.terms().begin();
    auto it = pt.terms().find(key);
    if (it == pt.terms().end()) return std::nullopt;
    RationalFn ratio = it->second / c_tp;
    if (!ratio.is_constant()) return std::nullopt;
    ComplexRational omega = ratio.constant_value();
    if (!(pt - RationalFn(omega) * tp).is_zero()) return std::nullopt;
    return omega;
}

std::optional<ComplexRational> scalar_square(const OperatorExpr& a) {
    OperatorExpr sq = compose(a, a);
    if (static_cast<int>(sq.terms().size()) != a.dim()) return std::nullopt;
    std::optional<ComplexRational> c;
    for (const auto& [k, v] : sq.terms()) {
        if (k.row != k.col || k.upsilon || k.deriv != std::array<int, 3>{0, 0, 0} || !v.is_constant())
            return std::nullopt;
        if (!c) c = v.constant_value();
        if (*c != v.constant_value()) return std::nullopt;
    }
    return c;
}

Tern build_irreducible(TernClass cls, int m) {
    if (cls == TernClass::s) throw std::invalid_argument("build_irreducible: class must be u or d");
    TernSpec spec;
    spec.cls = cls;
    spec.m = m;
    spec.family = m == 0 ? Family::irreducible : Family::generators_only;
    int sign = cls == TernClass::u ? 1 : -1;
    Tern t = assemble(spec, {{0, sign, m}});
    if (m == 0) finish(t, OperatorExpr::parity(1), kappa_upsilon_times(identity_matrix(1)), 1, 1);
    return t;
}

Tern build_s_zero(const std::string& combo, int variant) {
    if (variant != 1 && variant != -1) throw std::invalid_argument("build_s_zero: variant must be +1 or -1");
    TernSpec spec;
    spec.cls = TernClass::s;
    spec.m = 0;
    spec.combo = combo;
    spec.variant = variant;
    Tern t = assemble(spec, {{0, 1, 0}, {1, -1, 0}});
    FiberMatrix swap = mat({{0, 1}, {1, 0}});
    FiberMatrix anti = {{0, 1}, {ComplexRational(variant), 0}};
    if (combo == "UU") {
        FiberMatrix d = {{1, 0}, {0, ComplexRational(variant)}};
        finish(t, upsilon_times(d), OperatorExpr::matrix(swap), 1, 1);
    } else if (combo == "AU") {
        finish(t, kappa_times(anti), OperatorExpr::matrix(swap), variant, 1);
    } else if (combo == "AA") {
        finish(t, kappa_times(anti), kappa_upsilon_times(identity_matrix(2)), variant, 1);
    } else {
        throw std::invalid_argument("build_s_zero: unknown combination '" + combo + "'");
    }
    return t;
}

Tern build_s_m(int m, int variant) {
    if (m == 0) throw std::invalid_argument("build_s_m: m must be non-zero");
    if (variant != 1 && variant != -1 && variant != 0) throw std::invalid_argument("build_s_m: bad variant");
    TernSpec spec;
    spec.cls = TernClass::s;
    spec.m = m;
    spec.combo = variant == 0 ? "n/a" : "AA";
    spec.variant = variant;
    spec.family = variant == 0 ? Family::generators_only : Family::irreducible;
    // Lower block: J = J0 - j, K = -K0 + k, i.e. the negative-energy block with -m.
    Tern t = assemble(spec, {{0, 1, m}, {1, -1, -m}});
    if (variant == 0) return t;
    FiberMatrix anti = {{0, 1}, {ComplexRational(variant), 0}};
    finish(t, kappa_times(anti), kappa_upsilon_times(identity_matrix(2)), variant, 1);
    return t;
}

Tern build_u_pair(int m) {
    TernSpec spec;
    spec.cls = TernClass::u;
    spec.m = m;
    spec.combo = "pair";
    spec.family = Family::generators_only;
    return assemble(spec, {{0, 1, m}, {1, 1, -m}});
}

Tern build_example(Family f) {
    TernSpec spec;
    spec.family = f;
    if (f == Family::doublet_u || f == Family::doublet_d) {
        int sign = f == Family::doublet_u ? 1 : -1;
        spec.cls = f == Family::doublet_u ? TernClass::u : TernClass::d;
        Tern t = assemble(spec, {{0, sign, 0}, {1, sign, 0}});
        // Pi = U [[0,1],[1,0]], T = U K [[0,1],[-1,0]]
        OperatorExpr pi = upsilon_times(mat({{0, 1}, {1, 0}}));
        OperatorExpr tau = compose(compose(OperatorExpr::parity(2), OperatorExpr::conjugation(2)),
                                   OperatorExpr::matrix(mat({{0, 1}, {-1, 0}})));
        finish(t, pi, tau, 1, -1);
        t.notes.push_back("each component uses a scalar fiber (s=0); the C^(2s+1) fiber is not modelled");
        return t;
    }
    if (f == Family::quartet_s) {
        spec.cls = TernClass::s;
        Tern t = assemble(spec, {{0, 1, 0}, {1, -1, 0}, {2, 1, 0}, {3, -1, 0}});
        OperatorExpr tau = OperatorExpr::matrix(mat({{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}));
        OperatorExpr pi = kappa_times(mat({{0, 0, 0, 1}, {0, 0, 1, 0}, {0, -1, 0, 0}, {-1, 0, 0, 0}}));
        finish(t, pi, tau, -1, 1);
        t.notes.push_back("components indexed 1..4; blocks carry orbital generators with m=0");
        return t;
    }
    throw std::invalid_argument("build_example: not an example family");
}

std::vector<Tern> build_examples() {
    return {build_example(Family::doublet_u), build_example(Family::doublet_d), build_example(Family::quartet_s)};
}

Tern build(const TernSpec& spec) {
    switch (spec.family) {
        case Family::doublet_u:
        case Family::doublet_d:
        case Family::quartet_s: return build_example(spec.family);
        default: break;
    }
    if (spec.combo == "pair") return build_u_pair(spec.m);
    if (spec.cls != TernClass::s) return build_irreducible(spec.cls, spec.m);
    if (spec.m == 0) return build_s_zero(spec.combo, spec.variant);
    return build_s_m(spec.m, spec.family == Family::generators_only ? 0 : spec.variant);
}

std::vector<Tern> catalog(int max_m) {
    std::vector<Tern> out;
    out.push_back(build_irreducible(TernClass::u, 0));
    out.push_back(build_irreducible(TernClass::d, 0));
    for (const char* combo : {"UU", "AU", "AA"})
        for (int v : {1, -1}) out.push_back(build_s_zero(combo, v));
    for (int m = 1; m <= max_m; ++m)
        for (int v : {1, -1}) out.push_back(build_s_m(m, v));
    for (auto& t : build_examples()) out.push_back(std::move(t));
    return out;
}

}  // namespace tern
