#include "tern/localize.hpp"

#include "tern/exact_solve.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tern {

namespace {

const ComplexRational I = ComplexRational::i();

int levi_civita(int j, int k, int l) {
    if (j == k || k == l || j == l) return 0;
    return ((j == 1 && k == 2) || (j == 2 && k == 3) || (j == 3 && k == 1)) ? 1 : -1;
}

FiberMatrix unit(int n, int r, int c) {
    FiberMatrix m(static_cast<std::size_t>(n), std::vector<ComplexRational>(static_cast<std::size_t>(n)));
    m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = 1;
    return m;
}

RationalFn p0_power(int k) {
    RationalFn g(1);
    for (int i = 0; i < std::abs(k); ++i) g = k > 0 ? g * RationalFn::p0() : g / RationalFn::p0();
    return g;
}

bool zero_helicity(const Tern& t) {
    return std::all_of(t.expected.blocks.begin(), t.expected.blocks.end(), [](const BlockInfo& b) { return b.m == 0; });
}

}  // namespace

Position newton_wigner(int n) {
    if (n < 1) throw std::invalid_argument("newton_wigner: fiber dimension must be positive");
    Position f;
    FiberMatrix id = identity_matrix(n);
    RationalFn p0sq = RationalFn::p0() * RationalFn::p0();
    for (int j = 0; j < 3; ++j) {
        std::array<int, 3> d{0, 0, 0};
        d[static_cast<std::size_t>(j)] = 1;
        f[static_cast<std::size_t>(j)] = OperatorExpr::from_term(id, RationalFn(I), d) +
                                         OperatorExpr::from_term(id, RationalFn(-I) / RationalFn(2) * RationalFn::p(j + 1) / p0sq);
    }
    return f;
}

CertificateReport check_position(const Tern& t, const Position& q) {
    CertificateReport rep;
    rep.subject = t.spec.to_string();
    const int n = t.dim;
    OperatorExpr id = OperatorExpr::identity(n);
    for (int j = 1; j <= 3; ++j) {
        const OperatorExpr& qj = q[static_cast<std::size_t>(j - 1)];
        rep.add(symbolic_check("Q:self-adjoint:" + std::to_string(j), formal_adjoint(qj) - qj));
        for (int k = j + 1; k <= 3; ++k)
            rep.add(symbolic_check("Q.1:" + std::to_string(j) + std::to_string(k),
                                   commutator(qj, q[static_cast<std::size_t>(k - 1)])));
    }
    for (int k = 1; k <= 3; ++k) {
        const OperatorExpr& qk = q[static_cast<std::size_t>(k - 1)];
        for (int j = 1; j <= 3; ++j) {
            OperatorExpr expect = j == k ? RationalFn(I) * id : OperatorExpr(n);
            rep.add(symbolic_check("12.ii:Q" + std::to_string(k) + ",P" + std::to_string(j),
                                   commutator(qk, t.p[static_cast<std::size_t>(j - 1)]) - expect));
        }
    }
    for (int j = 1; j <= 3; ++j) {
        for (int k = 1; k <= 3; ++k) {
            OperatorExpr expect(n);
            for (int l = 1; l <= 3; ++l)
                if (int e = levi_civita(j, k, l)) expect += RationalFn(I * ComplexRational(e)) * q[static_cast<std::size_t>(l - 1)];
            rep.add(symbolic_check("12.ii:J" + std::to_string(j) + ",Q" + std::to_string(k),
                                   commutator(t.j[static_cast<std::size_t>(j - 1)], q[static_cast<std::size_t>(k - 1)]) - expect));
        }
    }
    if (t.complete()) {
        for (int j = 1; j <= 3; ++j) {
            const OperatorExpr& qj = q[static_cast<std::size_t>(j - 1)];
            rep.add(symbolic_check("12.i:tau:Q" + std::to_string(j), relation_residual(*t.tau, qj, 1)));
            rep.add(symbolic_check("12.i:pi:Q" + std::to_string(j), relation_residual(*t.pi, qj, -1)));
        }
    } else {
        rep.notes.push_back("12.i skipped: tern has no Pi/T");
    }
    return rep;
}

std::string DClassification::pattern() const {
    if (basis.empty()) return "0";
    std::ostringstream os;
    for (std::size_t b = 0; b < basis.size(); ++b) {
        if (b) os << " | ";
        os << "[";
        for (std::size_t i = 0; i < basis[b].size(); ++i) {
            if (i) os << ";";
            for (std::size_t j = 0; j < basis[b][i].size(); ++j) os << (j ? "," : "") << basis[b][i][j].to_string();
        }
        os << "]";
    }
    return os.str();
}

DClassification classify_D(const Tern& t, const std::vector<int>& exponents) {
    if (!t.complete()) throw std::invalid_argument("classify_D: tern has no Pi/T");
    if (!zero_helicity(t)) throw std::invalid_argument("classify_D: every block must have m = 0");
    if (exponents.empty()) throw std::invalid_argument("classify_D: no radial exponents");
    const int n = t.dim;
    // Real parameters of a Hermitian matrix: diagonal, then (re, im) above it.
    std::vector<FiberMatrix> herm;
    for (int a = 0; a < n; ++a) herm.push_back(unit(n, a, a));
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            FiberMatrix re = unit(n, a, b), im = unit(n, a, b);
            re[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = 1;
            im[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = I;
            im[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = -I;
            herm.push_back(re);
            herm.push_back(im);
        }
    }
    const int params = static_cast<int>(herm.size());

    DClassification res;
    res.spec = t.spec.to_string();
    for (std::size_t ei = 0; ei < exponents.size(); ++ei) {
        RationalFn g = p0_power(exponents[ei]);
        RowReducer rr(params);
        for (int j = 1; j <= 3; ++j) {
            std::map<std::pair<int, TermKey>, std::vector<std::pair<int, RationalFn>>> groups;
            for (int e = 0; e < params; ++e) {
                OperatorExpr dj = OperatorExpr::from_term(herm[static_cast<std::size_t>(e)], g * RationalFn::p(j));
                for (const auto& [x, s] : {std::pair{&*t.pi, -1}, std::pair{&*t.tau, 1}}) {
                    OperatorExpr r = relation_residual(*x, dj, s);
                    int tag = (x == &*t.pi ? 0 : 2) + (r.antilinear() ? 1 : 0);
                    for (const auto& [k, c] : r.terms()) groups[{tag, k}].emplace_back(e, c);
                }
            }
            for (const auto& [key, terms] : groups) emit_equations(terms, rr);
        }
        auto null = rr.nullspace();
        res.per_exponent.push_back(static_cast<int>(null.size()));
        if (ei == 0) {
            res.free_functions = static_cast<int>(null.size());
            for (const auto& v : null) {
                FiberMatrix m(static_cast<std::size_t>(n), std::vector<ComplexRational>(static_cast<std::size_t>(n)));
                for (int e = 0; e < params; ++e)
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b) {
                            auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
                            m[ua][ub] += ComplexRational(v[static_cast<std::size_t>(e)]) * herm[static_cast<std::size_t>(e)][ua][ub];
                        }
                res.basis.push_back(std::move(m));
            }
        }
    }
    for (int d : res.per_exponent)
        if (d != res.free_functions) throw std::logic_error("classify_D: solution space depends on the radial function");
    return res;
}

bool localizable(const Tern& t) {
    if (!t.complete() || !zero_helicity(t)) return false;
    if (!check_position(t, newton_wigner(t.dim)).overall()) return false;
    return classify_D(t).free_functions == 0;
}

Tern build_u_pair_with_parity(int m) {
    Tern t = build_u_pair(m);
    t.spec.combo = "pair";
    t.spec.family = Family::irreducible;
    t.pi = OperatorExpr::from_term({{0, 1}, {1, 0}}, RationalFn(1), {0, 0, 0}, 1, 0);
    t.tau = OperatorExpr::from_term(identity_matrix(2), RationalFn(1), {0, 0, 0}, 1, 1);
    t.expected.pi_square = 1;
    t.expected.tau_square = 1;
    t.notes.push_back("Pi = U sigma_x is unitary although the blocks carry helicity m and -m");
    return t;
}

// ---------------------------------------------------------------------------
// First-order systems

std::string PdeEquation::to_string(const std::vector<std::string>& unknowns) const {
    static const char* axes[3] = {"d1", "d2", "d3"};
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms) {
        const std::string& u = unknowns[static_cast<std::size_t>(t.unknown)];
        for (int i = 0; i < 3; ++i) {
            if (t.grad[static_cast<std::size_t>(i)].is_zero()) continue;
            os << (first ? "" : " + ") << "(" << t.grad[static_cast<std::size_t>(i)].to_string() << ")*" << axes[i] << "(" << u << ")";
            first = false;
        }
        if (!t.value.is_zero()) {
            os << (first ? "" : " + ") << "(" << t.value.to_string() << ")*" << u;
            first = false;
        }
    }
    os << (first ? "0" : "") << " = " << (rhs.is_zero() ? "0" : rhs.to_string());
    return os.str();
}

bool ResidualSystem::homogeneous() const {
    return std::all_of(equations.begin(), equations.end(), [](const PdeEquation& e) { return e.rhs.is_zero(); });
}

ResidualSystem ResidualSystem::subset(const std::vector<std::size_t>& idx) const {
    ResidualSystem r{name, unknowns, {}};
    for (std::size_t i : idx) r.equations.push_back(equations.at(i));
    return r;
}

std::vector<RationalFn> ResidualSystem::evaluate(const std::vector<RationalFn>& x) const {
    if (x.size() != unknowns.size()) throw std::invalid_argument("evaluate: wrong number of unknowns");
    std::vector<RationalFn> out;
    for (const auto& e : equations) {
        RationalFn v = -e.rhs;
        for (const auto& t : e.terms) {
            const RationalFn& f = x[static_cast<std::size_t>(t.unknown)];
            v += t.value * f;
            for (int i = 0; i < 3; ++i)
                if (!t.grad[static_cast<std::size_t>(i)].is_zero()) v += t.grad[static_cast<std::size_t>(i)] * f.differentiate(i + 1);
        }
        out.push_back(std::move(v));
    }
    return out;
}

namespace {

using Keyed = std::map<std::pair<std::string, std::pair<int, TermKey>>, RationalFn>;

Keyed flatten(const std::vector<std::pair<std::string, OperatorExpr>>& rels) {
    Keyed out;
    for (const auto& [name, r] : rels)
        for (const auto& [k, c] : r.terms()) out[{name, {r.antilinear() ? 1 : 0, k}}] += c;
    return out;
}

RationalFn lookup(const Keyed& m, const Keyed::key_type& k) {
    auto it = m.find(k);
    return it == m.end() ? RationalFn() : it->second;
}

std::string key_name(const std::string& rel, const std::pair<int, TermKey>& k, bool single) {
    if (single) return rel;
    std::ostringstream os;
    os << rel << "{" << k.second.row << "," << k.second.col;
    const auto& d = k.second.deriv;
    if (d[0] || d[1] || d[2]) os << ";d" << d[0] << d[1] << d[2];
    if (k.second.upsilon) os << ";U";
    if (k.first) os << ";K";
    os << "}";
    return os.str();
}

}  // namespace

ResidualSystem extract_system(const std::string& name, const std::vector<std::string>& unknowns,
                              const SystemBuilder& build) {
    const std::size_t nu = unknowns.size();
    std::vector<RationalFn> zero(nu);
    auto rels0 = build(zero);
    Keyed base = flatten(rels0);
    std::vector<Keyed> value(nu);
    std::vector<std::array<Keyed, 3>> grad(nu);
    std::set<Keyed::key_type> keys;
    for (const auto& [k, c] : base) keys.insert(k);
    auto probe = [&](std::size_t u, const RationalFn& f) {
        std::vector<RationalFn> x = zero;
        x[u] = f;
        Keyed r = flatten(build(x));
        for (const auto& [k, c] : base) r[k] -= c;
        for (auto it = r.begin(); it != r.end();) it = it->second.is_zero() ? r.erase(it) : std::next(it);
        for (const auto& [k, c] : r) keys.insert(k);
        return r;
    };
    for (std::size_t u = 0; u < nu; ++u) {
        value[u] = probe(u, RationalFn(1));
        for (int i = 0; i < 3; ++i) {
            Keyed r = probe(u, RationalFn::p(i + 1));
            for (const auto& k : keys) {
                RationalFn a = lookup(r, k) - lookup(value[u], k) * RationalFn::p(i + 1);
                if (!a.is_zero()) grad[u][static_cast<std::size_t>(i)][k] = a;
            }
        }
    }
    // All unknowns at once on non-polynomial probes: checks both linearity and first order.
    std::vector<RationalFn> q(nu);
    for (std::size_t u = 0; u < nu; ++u)
        q[u] = RationalFn::p(1) * RationalFn::p(2) * RationalFn(static_cast<long>(u + 1)) / RationalFn::p0() +
               RationalFn::p(3) * RationalFn::p(3) * RationalFn::p(1) + RationalFn(static_cast<long>(2 * u + 3)) * RationalFn::p(2);
    Keyed rq = flatten(build(q));
    for (const auto& [k, c] : rq) keys.insert(k);

    std::map<std::string, int> per_relation;
    for (const auto& k : keys) ++per_relation[k.first];
    ResidualSystem sys{name, unknowns, {}};
    for (const auto& k : keys) {
        PdeEquation e;
        e.name = key_name(k.first, k.second, per_relation[k.first] == 1);
        e.rhs = -lookup(base, k);
        RationalFn predicted = lookup(base, k);
        for (std::size_t u = 0; u < nu; ++u) {
            PdeTerm t;
            t.unknown = static_cast<int>(u);
            t.value = lookup(value[u], k);
            bool any = !t.value.is_zero();
            predicted += t.value * q[u];
            for (int i = 0; i < 3; ++i) {
                auto ui = static_cast<std::size_t>(i);
                t.grad[ui] = lookup(grad[u][ui], k);
                any |= !t.grad[ui].is_zero();
                predicted += t.grad[ui] * q[u].differentiate(i + 1);
            }
            if (any) e.terms.push_back(std::move(t));
        }
        if (!(predicted == lookup(rq, k)))
            throw std::logic_error("extract_system: residual of " + k.first + " is not first order and linear in the unknowns");
        if (e.terms.empty() && e.rhs.is_zero()) continue;
        sys.equations.push_back(std::move(e));
    }
    return sys;
}

namespace {

PdeTerm rot(int unknown, int j, const RationalFn& scale = RationalFn(1), const RationalFn& value = {}) {
    // L1 = p2 d3 - p3 d2, L2 = p3 d1 - p1 d3, L3 = p1 d2 - p2 d1
    int k = j % 3 + 1, l = k % 3 + 1;
    PdeTerm t;
    t.unknown = unknown;
    t.grad[static_cast<std::size_t>(l - 1)] = scale * RationalFn::p(k);
    t.grad[static_cast<std::size_t>(k - 1)] = -scale * RationalFn::p(l);
    t.value = value;
    return t;
}

PdeTerm val(int unknown, const RationalFn& v) {
    PdeTerm t;
    t.unknown = unknown;
    t.value = v;
    return t;
}

}  // namespace

ResidualSystem lemma71_system(int m, D8Form form) {
    const RationalFn c = RationalFn(ComplexRational::frac(m, 2));
    const RationalFn p0 = RationalFn::p0(), p1 = RationalFn::p(1), p2 = RationalFn::p(2), p3 = RationalFn::p(3);
    const RationalFn rho2 = rho_squared();
    const RationalFn mixed = p0 * p1 * p2 / (rho2 * rho2) - p1 * p2 / (p0 * rho2);
    ResidualSystem s{form == D8Form::printed ? "lemma71:printed" : "lemma71", {"d1", "d2", "d3"}, {}};
    auto eq = [&](std::string n, std::vector<PdeTerm> t, RationalFn rhs) { s.equations.push_back({std::move(n), std::move(t), std::move(rhs)}); };
    eq("d.1", {rot(2, 2), val(0, 1)}, c * p2 * p3 / (p0 * rho2));
    eq("d.2", {rot(2, 3)}, {});
    eq("d.3", {rot(1, 1), val(2, 1)}, -c * mixed);
    eq("d.4", {rot(0, 2), val(2, -1)}, -c * mixed);
    eq("d.5", {rot(0, 1)}, -c * (p0 * p1 * p1 / (rho2 * rho2) - p0 / rho2 - p1 * p1 / (p0 * rho2)));
    eq("d.6", {rot(1, 3), val(0, -1)}, {});
    eq("d.7", {rot(1, 2)}, -c * (p0 * p2 * p2 / (rho2 * rho2) - p0 / rho2 - p2 * p2 / (p0 * rho2)));
    if (form == D8Form::printed) {
        PdeTerm t;
        t.unknown = 0;
        t.grad[1] = p1;
        t.grad[0] = -p1;
        eq("d.8", {t, val(1, -1)}, {});
    } else {
        eq("d.8", {rot(0, 3), val(1, 1)}, {});
    }
    eq("d.9", {rot(2, 1), val(1, -1)}, c * p3 * p1 / (p0 * rho2));
    return s;
}

ResidualSystem lemma71_derived(int m, bool commuting) {
    Tern t = build_irreducible(TernClass::u, m);
    Position f = newton_wigner(1);
    auto builder = [t, f, commuting](const std::vector<RationalFn>& d) {
        Position q;
        for (std::size_t k = 0; k < 3; ++k) q[k] = f[k] + OperatorExpr::multiply(1, d[k]);
        std::vector<std::pair<std::string, OperatorExpr>> out;
        for (int j = 1; j <= 3; ++j) {
            for (int k = 1; k <= 3; ++k) {
                OperatorExpr r = commutator(t.j[static_cast<std::size_t>(j - 1)], q[static_cast<std::size_t>(k - 1)]);
                for (int l = 1; l <= 3; ++l)
                    if (int e = levi_civita(j, k, l)) r -= RationalFn(I * ComplexRational(e)) * q[static_cast<std::size_t>(l - 1)];
                out.emplace_back("J" + std::to_string(j) + ",Q" + std::to_string(k), r);
            }
        }
        if (commuting)
            for (int j = 1; j <= 3; ++j)
                for (int k = j + 1; k <= 3; ++k)
                    out.emplace_back("Q" + std::to_string(j) + ",Q" + std::to_string(k),
                                     commutator(q[static_cast<std::size_t>(j - 1)], q[static_cast<std::size_t>(k - 1)]));
        return out;
    };
    return extract_system(commuting ? "lemma71:derived+commuting" : "lemma71:derived", {"d1", "d2", "d3"}, builder);
}

namespace {

// X G - s G X for the generators, with the unitary sign table of Pi or T.
std::vector<std::pair<std::string, OperatorExpr>> unitary_relations(const Tern& t, const std::string& name,
                                                                     const OperatorExpr& x, std::array<int, 4> s) {
    std::vector<std::pair<std::string, OperatorExpr>> out;
    for (const auto& [g, op] : t.generators()) {
        int sign = g == "P0" ? s[0] : (g[0] == 'P' ? s[1] : (g[0] == 'J' ? s[2] : s[3]));
        out.emplace_back(name + ":" + g, relation_residual(x, op, sign));
    }
    return out;
}

}  // namespace

ResidualSystem parity_system(int m) {
    Tern t = build_u_pair(m);
    auto builder = [t](const std::vector<RationalFn>& s) {
        OperatorExpr pi = OperatorExpr::from_term(unit(2, 0, 1), s[0], {0, 0, 0}, 1) +
                          OperatorExpr::from_term(unit(2, 1, 0), s[1], {0, 0, 0}, 1);
        return unitary_relations(t, "pi", pi, {1, -1, 1, -1});
    };
    return extract_system("parity", {"S1", "S2"}, builder);
}

ResidualSystem unitary_tau_system(int m) {
    Tern t = build_s_m(m, 0);
    auto builder = [t](const std::vector<RationalFn>& s) {
        OperatorExpr tau = OperatorExpr::from_term(unit(2, 0, 1), s[0]) + OperatorExpr::from_term(unit(2, 1, 0), s[1]);
        return unitary_relations(t, "tau", tau, {-1, 1, 1, -1});
    };
    return extract_system("unitary-tau", {"T1", "T2"}, builder);
}

namespace {

// Coefficients of an equation in a fixed order: (unknown, grad 0..2, value).
std::vector<RationalFn> coefficient_vector(const PdeEquation& e, std::size_t unknowns) {
    std::vector<RationalFn> v(unknowns * 4);
    for (const auto& t : e.terms) {
        auto base = static_cast<std::size_t>(t.unknown) * 4;
        for (std::size_t i = 0; i < 3; ++i) v[base + i] += t.grad[i];
        v[base + 3] += t.value;
    }
    return v;
}

}  // namespace

std::vector<EquationMatch> compare_systems(const ResidualSystem& stated, const ResidualSystem& derived) {
    if (stated.unknowns.size() != derived.unknowns.size()) throw std::invalid_argument("compare_systems: unknowns differ");
    const std::size_t nu = stated.unknowns.size();
    std::vector<EquationMatch> out;
    for (const auto& se : stated.equations) {
        EquationMatch m;
        m.stated = se.name;
        auto sv = coefficient_vector(se, nu);
        std::size_t pivot = 0;
        while (pivot < sv.size() && sv[pivot].is_zero()) ++pivot;
        for (const auto& de : derived.equations) {
            auto dv = coefficient_vector(de, nu);
            if (pivot == sv.size()) break;
            if (dv[pivot].is_zero()) continue;
            RationalFn factor = dv[pivot] / sv[pivot];
            if (!factor.is_constant()) continue;
            bool prop = true;
            for (std::size_t i = 0; i < sv.size() && prop; ++i) prop = dv[i] == factor * sv[i];
            if (!prop) continue;
            m.derived = de.name;
            m.factor = factor.to_string();
            RationalFn diff = de.rhs / factor - se.rhs;
            m.rhs_match = diff.is_zero();
            m.rhs_difference = diff.is_zero() ? "0" : diff.to_string();
            break;
        }
        out.push_back(std::move(m));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Discretization

namespace {

// First-derivative stencil: offsets -r..r, weights before division by h.
std::vector<double> stencil(Scheme s) {
    if (s == Scheme::fd2) return {-0.5, 0.0, 0.5};
    return {1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0};
}

struct CompiledTerm {
    int unknown;
    std::array<CompiledFn, 3> grad;
    std::array<bool, 3> has_grad;
    CompiledFn value;
    bool has_value;
};

struct CompiledEquation {
    std::vector<CompiledTerm> terms;
    CompiledFn rhs;
    bool has_rhs;
};

std::vector<CompiledEquation> compile(const ResidualSystem& s) {
    std::vector<CompiledEquation> out;
    for (const auto& e : s.equations) {
        CompiledEquation ce;
        for (const auto& t : e.terms) {
            CompiledTerm ct;
            ct.unknown = t.unknown;
            for (std::size_t i = 0; i < 3; ++i) {
                ct.has_grad[i] = !t.grad[i].is_zero();
                if (ct.has_grad[i]) ct.grad[i] = CompiledFn(t.grad[i]);
            }
            ct.has_value = !t.value.is_zero();
            if (ct.has_value) ct.value = CompiledFn(t.value);
            ce.terms.push_back(std::move(ct));
        }
        ce.has_rhs = !e.rhs.is_zero();
        if (ce.has_rhs) ce.rhs = CompiledFn(e.rhs);
        out.push_back(std::move(ce));
    }
    return out;
}

double radius(const MomentumGrid& g, const std::array<int, 3>& n) {
    double x = g.coord(n[0]), y = g.coord(n[1]), z = g.coord(n[2]);
    return std::sqrt(x * x + y * y + z * z);
}

}  // namespace

DiscreteSystem discretize(const ResidualSystem& s, const GridParams& params, Scheme scheme) {
    DiscreteSystem d{MomentumGrid(params), scheme, static_cast<int>(s.unknowns.size()), static_cast<int>(s.equations.size()),
                     {}, {}, {}, {}, {}};
    const MomentumGrid& g = d.grid;
    const int n = g.n(), r = stencil_radius(scheme);
    const double h = g.h();
    auto flat = [n](int i, int j, int k) { return (std::int64_t(i) * n + j) * n + k; };
    auto valid = [&](int i, int j, int k) { return i >= 0 && j >= 0 && k >= 0 && i < n && j < n && k < n && !g.excluded(i, j, k); };

    std::vector<int> col(static_cast<std::size_t>(g.node_count()), -1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                bool ok = valid(i, j, k);
                for (int o = -r; o <= r && ok; ++o) ok = valid(i + o, j, k) && valid(i, j + o, k) && valid(i, j, k + o);
                if (!ok) continue;
                d.equation_nodes.push_back({i, j, k});
                for (int o = -r; o <= r; ++o)
                    for (auto [a, b, c] : {std::array{i + o, j, k}, std::array{i, j + o, k}, std::array{i, j, k + o}})
                        col[static_cast<std::size_t>(flat(a, b, c))] = 0;
            }
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                auto& c = col[static_cast<std::size_t>(flat(i, j, k))];
                if (c < 0) continue;
                c = static_cast<int>(d.unknown_nodes.size());
                d.unknown_nodes.push_back({i, j, k});
            }

    const auto ne = static_cast<std::int64_t>(d.equation_nodes.size());
    const auto nc = static_cast<std::int64_t>(d.unknown_nodes.size());
    auto eqs = compile(s);
    std::vector<double> w = stencil(scheme);
    d.a.resize(d.equations * ne, d.unknowns * nc);
    d.b = Eigen::VectorXcd::Zero(d.equations * ne);
    d.weight.resize(static_cast<std::size_t>(ne));
    for (std::int64_t q = 0; q < ne; ++q) d.weight[static_cast<std::size_t>(q)] = std::sqrt(h * h * h / radius(g, d.equation_nodes[static_cast<std::size_t>(q)]));

    std::int64_t estimate = 0;
    for (const auto& e : eqs)
        for (const auto& t : e.terms) estimate += (t.has_value ? 1 : 0) + 2 * r * (t.has_grad[0] + t.has_grad[1] + t.has_grad[2]);
    d.a.reserve(estimate * ne);
    std::vector<std::pair<std::int64_t, cplx>> row;
    for (int e = 0; e < d.equations; ++e) {
        const auto& ce = eqs[static_cast<std::size_t>(e)];
        for (std::int64_t q = 0; q < ne; ++q) {
            const auto& node = d.equation_nodes[static_cast<std::size_t>(q)];
            const double p1 = g.coord(node[0]), p2 = g.coord(node[1]), p3 = g.coord(node[2]);
            const double wq = d.weight[static_cast<std::size_t>(q)];
            std::int64_t rix = e * ne + q;
            row.clear();
            for (const auto& t : ce.terms) {
                std::int64_t base = std::int64_t(t.unknown) * nc;
                if (t.has_value) row.emplace_back(base + col[static_cast<std::size_t>(flat(node[0], node[1], node[2]))], wq * t.value(p1, p2, p3));
                for (int ax = 0; ax < 3; ++ax) {
                    if (!t.has_grad[static_cast<std::size_t>(ax)]) continue;
                    cplx coef = wq * t.grad[static_cast<std::size_t>(ax)](p1, p2, p3) / h;
                    for (int o = -r; o <= r; ++o) {
                        double sw = w[static_cast<std::size_t>(o + r)];
                        if (sw == 0.0) continue;
                        std::array<int, 3> nb = node;
                        nb[static_cast<std::size_t>(ax)] += o;
                        row.emplace_back(base + col[static_cast<std::size_t>(flat(nb[0], nb[1], nb[2]))], coef * sw);
                    }
                }
            }
            std::sort(row.begin(), row.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
            d.a.startVec(rix);
            for (std::size_t i = 0; i < row.size(); ++i) {
                cplx v = row[i].second;
                while (i + 1 < row.size() && row[i + 1].first == row[i].first) v += row[++i].second;
                if (v != cplx(0.0)) d.a.insertBack(rix, row[i].first) = v;
            }
            if (ce.has_rhs) d.b[rix] = wq * ce.rhs(p1, p2, p3);
        }
    }
    d.a.finalize();
    return d;
}

Eigen::VectorXcd DiscreteSystem::pack(const GridWavefunction& x) const {
    if (x.dim() != unknowns || !x.grid().same_as(grid)) throw std::invalid_argument("pack: grid function does not fit the system");
    const auto nc = static_cast<std::int64_t>(unknown_nodes.size());
    Eigen::VectorXcd v(unknowns * nc);
    for (int u = 0; u < unknowns; ++u)
        for (std::int64_t c = 0; c < nc; ++c) {
            const auto& nd = unknown_nodes[static_cast<std::size_t>(c)];
            v[u * nc + c] = x.at(u, nd[0], nd[1], nd[2]);
        }
    return v;
}

GridWavefunction DiscreteSystem::unpack(const Eigen::VectorXcd& x) const {
    const int n = grid.n();
    GridWavefunction out(grid, unknowns, IndexBox{{0, 0, 0}, {n, n, n}});
    const auto nc = static_cast<std::int64_t>(unknown_nodes.size());
    for (int u = 0; u < unknowns; ++u)
        for (std::int64_t c = 0; c < nc; ++c) {
            const auto& nd = unknown_nodes[static_cast<std::size_t>(c)];
            out.ref(u, nd[0], nd[1], nd[2]) = x[u * nc + c];
        }
    return out;
}

ResidualNorms residual_norms(const DiscreteSystem& d, const Eigen::VectorXcd& x) {
    Eigen::VectorXcd r = d.a * x - d.b;
    const auto ne = static_cast<Eigen::Index>(d.equation_nodes.size());
    ResidualNorms out;
    double total = 0.0;
    for (int e = 0; e < d.equations; ++e) {
        double s = r.segment(e * ne, ne).squaredNorm();
        out.per_equation.push_back(std::sqrt(s));
        total += s;
    }
    out.total = std::sqrt(total);
    return out;
}

ResidualNorms lemma71_residual(const GridWavefunction& d, int m, D8Form form, Scheme scheme) {
    if (d.dim() != 3) throw std::invalid_argument("lemma71_residual: need three components");
    const MomentumGrid& g = d.grid();
    const IndexBox& bx = d.box();
    for (int i = bx.lo[0]; i < bx.hi[0]; ++i)
        for (int j = bx.lo[1]; j < bx.hi[1]; ++j)
            for (int k = bx.lo[2]; k < bx.hi[2]; ++k)
                if (g.excluded(i, j, k))
                    for (int c = 0; c < 3; ++c)
                        if (d.at(c, i, j, k) != cplx(0.0)) throw std::domain_error("lemma71_residual: nonzero value on an excluded node");
    DiscreteSystem ds = discretize(lemma71_system(m, form), g.params(), scheme);
    return residual_norms(ds, ds.pack(d));
}

// ---------------------------------------------------------------------------
// Solvers

namespace {

// CGLS with right preconditioning by column norms; the minimal residual is unchanged.
template <class Scalar>
std::pair<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>, int> cgls(const Eigen::SparseMatrix<Scalar, Eigen::RowMajor>& a,
                                                              const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
                                                              const SolveOptions& opts, bool& converged,
                                                              bool& stagnated) {
    using Mat = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Eigen::VectorXd colnorm = Eigen::VectorXd::Zero(a.cols());
    for (Eigen::Index r = 0; r < a.outerSize(); ++r)
        for (typename Mat::InnerIterator it(a, r); it; ++it) colnorm[it.col()] += std::norm(it.value());
    Eigen::VectorXd scale(a.cols());
    for (Eigen::Index c = 0; c < a.cols(); ++c) scale[c] = colnorm[c] > 0.0 ? 1.0 / std::sqrt(colnorm[c]) : 0.0;
    Mat as = a * scale.asDiagonal();
    Mat ah = as.adjoint();

    Vec y = Vec::Zero(a.cols());
    Vec r = b;
    Vec s = ah * r;
    Vec p = s;
    double gamma = s.squaredNorm();
    const double gamma0 = gamma;
    converged = false;
    stagnated = false;
    const int window = opts.stagnation_window;
    std::vector<double> history;  // |r| per iteration
    history.push_back(r.norm());
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        if (gamma <= opts.tolerance * opts.tolerance * gamma0) {
            converged = true;
            break;
        }
        if (window > 0 && it >= window &&
            history[static_cast<std::size_t>(it - window)] - history.back() <
                opts.stagnation_tolerance * history[static_cast<std::size_t>(it - window)]) {
            stagnated = true;
            break;
        }
        Vec q = as * p;
        double delta = q.squaredNorm();
        if (delta == 0.0) break;
        double alpha = gamma / delta;
        y += alpha * p;
        r -= alpha * q;
        s = ah * r;
        history.push_back(r.norm());
        double gnew = s.squaredNorm();
        p = s + (gnew / gamma) * p;
        gamma = gnew;
    }
    Vec x = scale.template cast<Scalar>().asDiagonal() * y;
    return {x, it};
}

bool is_real(const SparseMatrix& a, const Eigen::VectorXcd& b) {
    for (Eigen::Index r = 0; r < a.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(a, r); it; ++it)
            if (it.value().imag() != 0.0) return false;
    return b.imag().isZero(0.0);
}

}  // namespace

LeastSquaresResult solve_least_squares(const SparseMatrix& a, const Eigen::VectorXcd& b, const SolveOptions& opts) {
    LeastSquaresResult res;
    res.x = Eigen::VectorXcd::Zero(a.cols());
    const double bn = b.norm();
    if (bn == 0.0) {
        res.converged = true;
        return res;
    }
    if (is_real(a, b)) {
        Eigen::SparseMatrix<double, Eigen::RowMajor> ar = a.real();
        Eigen::VectorXd br = b.real();
        auto [x, it] = cgls<double>(ar, br, opts, res.converged, res.stagnated);
        res.x = x.cast<cplx>();
        res.iterations = it;
    } else {
        auto [x, it] = cgls<cplx>(a, b, opts, res.converged, res.stagnated);
        res.x = x;
        res.iterations = it;
    }
    res.residual = (a * res.x - b).norm() / bn;
    return res;
}

SingularValueResult extreme_singular_values(const SparseMatrix& a, const SolveOptions& opts) {
    SingularValueResult res;
    const Eigen::Index n = a.cols();
    if (n == 0) return res;
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> nd;
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(nd(rng), nd(rng));
    v.normalize();
    Eigen::VectorXcd prev = Eigen::VectorXcd::Zero(n);
    std::vector<double> alpha, beta;
    double last_min = -1.0;
    // No reorthogonalization: lost orthogonality only duplicates converged Ritz values.
    for (int it = 1; it <= opts.max_iterations; ++it) {
        Eigen::VectorXcd w = a.adjoint() * (a * v);
        double al = v.dot(w).real();
        w -= al * v;
        if (!beta.empty()) w -= beta.back() * prev;
        alpha.push_back(al);
        double be = w.norm();
        bool done = be <= 1e-14 * std::abs(al) || it == opts.max_iterations;
        if (it % 25 == 0 || done) {
            Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
            Eigen::VectorXd sub = beta.empty() ? Eigen::VectorXd() : Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size())));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
            es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
            if (es.info() != Eigen::Success) {
                if (done) break;
                prev = v;
                v = w / be;
                beta.push_back(be);
                continue;
            }
            double lmin = std::max(es.eigenvalues().minCoeff(), 0.0), lmax = es.eigenvalues().maxCoeff();
            res.sigma_min = std::sqrt(lmin);
            res.sigma_max = std::sqrt(lmax);
            res.iterations = it;
            if (last_min >= 0.0 && std::abs(lmin - last_min) <= 1e-7 * lmin + 1e-14 * lmax) {
                res.converged = true;
                break;
            }
            last_min = lmin;
        }
        if (be <= 1e-14 * std::abs(al)) {
            res.converged = true;
            break;
        }
        prev = v;
        v = w / be;
        beta.push_back(be);
    }
    return res;
}

double pointwise_residual_bound(const DiscreteSystem& d, const ResidualSystem& s) {
    const double bn = d.b.norm();
    if (bn == 0.0) return 0.0;
    auto eqs = compile(s);
    const int ne = d.equations, nu = d.unknowns;
    double total = 0.0;
    Eigen::MatrixXcd c(ne, 4 * nu);
    Eigen::VectorXcd g(ne);
    for (std::size_t q = 0; q < d.equation_nodes.size(); ++q) {
        const auto& node = d.equation_nodes[q];
        const double p1 = d.grid.coord(node[0]), p2 = d.grid.coord(node[1]), p3 = d.grid.coord(node[2]);
        c.setZero();
        for (int e = 0; e < ne; ++e) {
            const auto& ce = eqs[static_cast<std::size_t>(e)];
            for (const auto& t : ce.terms) {
                for (int ax = 0; ax < 3; ++ax)
                    if (t.has_grad[static_cast<std::size_t>(ax)]) c(e, 4 * t.unknown + ax) += t.grad[static_cast<std::size_t>(ax)](p1, p2, p3);
                if (t.has_value) c(e, 4 * t.unknown + 3) += t.value(p1, p2, p3);
            }
            g[e] = ce.has_rhs ? ce.rhs(p1, p2, p3) : cplx(0.0);
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(c, Eigen::ComputeFullU);
        const auto& sv = svd.singularValues();
        double cut = 1e-10 * (sv.size() ? sv[0] : 0.0);
        Eigen::Index rank = 0;
        while (rank < sv.size() && sv[rank] > cut) ++rank;
        Eigen::VectorXcd coeffs = svd.matrixU().adjoint() * g;
        double dist2 = coeffs.tail(ne - rank).squaredNorm();
        total += d.weight[q] * d.weight[q] * dist2;
    }
    return std::sqrt(total) / bn;
}

// ---------------------------------------------------------------------------
// Certificates

namespace {

GridParams refined(const GridParams& g) {
    GridParams r = g;
    r.h = g.h / 2.0;
    return r;
}

const char* scheme_name(Scheme s) { return s == Scheme::fd2 ? "fd2" : "fd4"; }

}  // namespace

nlohmann::json SystemCertificate::to_json() const {
    nlohmann::json j;
    j["schema"] = 1;
    j["system"] = system;
    j["m"] = m;
    j["grid"] = {{"half_width", grid.half_width}, {"h", grid.h}, {"rho_axis", grid.rho_axis},
                 {"rho_origin", grid.rho_origin}, {"scheme", scheme_name(scheme)}};
    j["homogeneous"] = homogeneous;
    j["r_star"] = r_star;
    j["refinement_ratio"] = refinement_ratio;
    j["verdict"] = verdict;
    nlohmann::json runs_j = nlohmann::json::array();
    for (const auto& r : runs)
        runs_j.push_back({{"h", r.h}, {"rows", r.rows}, {"columns", r.columns}, {"value", r.value},
                          {"bound", r.bound}, {"iterations", r.iterations}, {"converged", r.converged}});
    j["runs"] = runs_j;
    j["notes"] = notes;
    return j;
}

SystemCertificate certify_no_solution(const ResidualSystem& s, int m, const GridParams& grid, Scheme scheme,
                                      const SolveOptions& opts) {
    SystemCertificate c;
    c.system = s.name;
    c.m = m;
    c.grid = grid;
    c.scheme = scheme;
    c.homogeneous = s.homogeneous();
    if (c.homogeneous) {
        c.verdict = "solvable";
        c.notes.push_back("right-hand side vanishes: x = 0 is a solution");
        return c;
    }
    for (const GridParams& g : {grid, refined(grid)}) {
        DiscreteSystem d = discretize(s, g, scheme);
        GridRun run;
        run.h = g.h;
        run.rows = d.a.rows();
        run.columns = d.a.cols();
        auto ls = solve_least_squares(d.a, d.b, opts);
        run.value = ls.residual;
        run.iterations = ls.iterations;
        run.converged = ls.converged;
        run.bound = pointwise_residual_bound(d, s);
        c.runs.push_back(run);
    }
    const double coarse = c.runs[0].value, fine = c.runs[1].value;
    c.r_star = fine;
    c.refinement_ratio = coarse > 0.0 ? fine / coarse : 0.0;
    if (fine <= 1e-10)
        c.verdict = "solvable";
    else if (fine > 1e-6 && c.refinement_ratio >= 0.8 && c.refinement_ratio <= 1.2)
        // an unconverged r* only bounds the minimum from above
        c.verdict = (c.runs[0].converged && c.runs[1].converged) || c.runs[1].bound > 1e-6 ? "inconsistent" : "undecided";
    else if (c.refinement_ratio < 0.8)
        c.verdict = "solvable";
    else
        c.verdict = "undecided";
    if (c.runs[1].bound > 1e-12)
        c.notes.push_back("pointwise combination of the equations bounds r* below by " + std::to_string(c.runs[1].bound));
    if (c.verdict == "solvable" && fine > 1e-10) c.notes.push_back("r* decreases under refinement");
    if (!c.runs[0].converged || !c.runs[1].converged)
        c.notes.push_back("least squares stopped before the tolerance (iteration cap or stagnation)");
    return c;
}

SystemCertificate certify_trivial_kernel(const ResidualSystem& s, int m, const GridParams& grid, Scheme scheme,
                                         const SolveOptions& opts) {
    if (!s.homogeneous()) throw std::invalid_argument("certify_trivial_kernel: system is not homogeneous");
    SystemCertificate c;
    c.system = s.name;
    c.m = m;
    c.grid = grid;
    c.scheme = scheme;
    c.homogeneous = true;
    std::vector<double> sigma_max;
    for (const GridParams& g : {grid, refined(grid)}) {
        DiscreteSystem d = discretize(s, g, scheme);
        // Columns in the dnu norm, so sigma_min approximates inf |A x| / |x| of the continuum problem.
        SparseMatrix a = d.a;
        const auto nc = static_cast<Eigen::Index>(d.unknown_nodes.size());
        Eigen::VectorXd scale(a.cols());
        for (Eigen::Index u = 0; u < d.unknowns; ++u)
            for (Eigen::Index q = 0; q < nc; ++q) {
                const auto& nd = d.unknown_nodes[static_cast<std::size_t>(q)];
                scale[u * nc + q] = std::sqrt(radius(d.grid, nd) / (g.h * g.h * g.h));
            }
        a = a * scale.asDiagonal();
        GridRun run;
        run.h = g.h;
        run.rows = a.rows();
        run.columns = a.cols();
        auto sv = extreme_singular_values(a, opts);
        run.value = sv.sigma_min;
        sigma_max.push_back(sv.sigma_max);
        run.iterations = sv.iterations;
        run.converged = sv.converged;
        c.runs.push_back(run);
    }
    const double coarse = c.runs[0].value, fine = c.runs[1].value;
    c.r_star = fine;
    c.refinement_ratio = coarse > 0.0 ? fine / coarse : 0.0;
    // Lanczos resolves sigma_min only down to about sqrt(eps) sigma_max.
    if (fine <= 1e-6 * sigma_max[1])
        c.verdict = "nontrivial solution";
    else if (fine > 1e-3 && c.refinement_ratio >= 0.8 && c.runs[0].converged && c.runs[1].converged)
        c.verdict = "obstruction";
    else
        c.verdict = "undecided";
    c.notes.push_back("value is the smallest singular value with unknowns measured in the dnu norm");
    if (!c.runs[0].converged || !c.runs[1].converged) c.notes.push_back("Lanczos did not settle on sigma_min");
    return c;
}

// ---------------------------------------------------------------------------

ZetaCheck zeta_reduction_check(const GridWavefunction& d, int m, Scheme scheme) {
    if (d.dim() != 3) throw std::invalid_argument("zeta_reduction_check: need three components");
    const MomentumGrid& g = d.grid();
    ZetaCheck z;
    z.lemma_residual = lemma71_residual(d, m, D8Form::corrected, scheme).total;
    DiscreteSystem ds = discretize(lemma71_system(m), g.params(), scheme);
    const int r = stencil_radius(scheme);
    const double h = g.h(), c = m / 2.0;
    std::vector<double> w = stencil(scheme);
    auto zeta = [&](int i, int j, int k) {
        return g.coord(i) * d.at(0, i, j, k) + g.coord(j) * d.at(1, i, j, k) + g.coord(k) * d.at(2, i, j, k);
    };
    std::array<double, 3> sq{0.0, 0.0, 0.0};
    double bound = 0.0;
    for (std::size_t q = 0; q < ds.equation_nodes.size(); ++q) {
        const auto& nd = ds.equation_nodes[q];
        std::array<double, 3> p{g.coord(nd[0]), g.coord(nd[1]), g.coord(nd[2])};
        std::array<cplx, 3> dz{};
        for (int ax = 0; ax < 3; ++ax)
            for (int o = -r; o <= r; ++o) {
                std::array<int, 3> nb = nd;
                nb[static_cast<std::size_t>(ax)] += o;
                dz[static_cast<std::size_t>(ax)] += w[static_cast<std::size_t>(o + r)] * zeta(nb[0], nb[1], nb[2]) / h;
            }
        const double rho2 = p[0] * p[0] + p[1] * p[1];
        const double p0 = std::sqrt(rho2 + p[2] * p[2]);
        std::array<cplx, 3> res{p[1] * dz[2] - p[2] * dz[1] - c * p[0] * p0 / rho2,
                                p[2] * dz[0] - p[0] * dz[2] - c * p[1] * p0 / rho2,
                                p[0] * dz[1] - p[1] * dz[0]};
        const double wq = ds.weight[q];
        for (std::size_t e = 0; e < 3; ++e) sq[e] += wq * wq * std::norm(res[e]);
        // sum_j p_j res_j = -c p0 exactly, so |res| >= |c| p0 / |p| = |c|
        bound += wq * wq * c * c;
    }
    double total = 0.0;
    for (std::size_t e = 0; e < 3; ++e) {
        z.residual[e] = std::sqrt(sq[e]);
        total += sq[e];
    }
    z.total = std::sqrt(total);
    z.constant = z.lemma_residual > 0.0 ? z.total / z.lemma_residual : 0.0;
    z.lower_bound = std::sqrt(bound);
    return z;
}

nlohmann::json Prop71Result::to_json() const {
    nlohmann::json j;
    j["schema"] = 1;
    j["m"] = m;
    nlohmann::json mj = nlohmann::json::array();
    for (const auto& e : matches)
        mj.push_back({{"stated", e.stated}, {"derived", e.derived}, {"factor", e.factor}, {"rhs_match", e.rhs_match},
                      {"rhs_difference", e.rhs_difference}});
    j["matches"] = mj;
    j["d8_form"] = d8_form == D8Form::printed ? "printed" : "corrected";
    j["witness_solves_derived"] = witness_solves_derived;
    j["stated"] = stated.to_json();
    j["derived"] = derived.to_json();
    j["derived_commuting"] = derived_commuting.to_json();
    j["verdict"] = verdict;
    return j;
}

Prop71Result prop71_harness(int m, const GridParams& grid, const SolveOptions& opts) {
    Prop71Result res;
    res.m = m;
    ResidualSystem derived = lemma71_derived(m);
    auto d8_matches = [&](D8Form f) {
        for (const auto& e : compare_systems(lemma71_system(m, f), derived))
            if (e.stated == "d.8") return !e.derived.empty();
        return false;
    };
    res.d8_form = d8_matches(D8Form::printed) ? D8Form::printed : D8Form::corrected;
    if (!d8_matches(res.d8_form)) throw std::logic_error("prop71_harness: neither form of d.8 matches the derivation");
    ResidualSystem stated = lemma71_system(m, res.d8_form);
    res.matches = compare_systems(stated, derived);

    std::vector<RationalFn> witness;
    for (int j = 1; j <= 3; ++j) witness.push_back(helicity_k(m, j) / RationalFn::p0());
    auto vals = derived.evaluate(witness);
    res.witness_solves_derived = std::all_of(vals.begin(), vals.end(), [](const RationalFn& f) { return f.is_zero(); });

    res.stated = certify_no_solution(stated, m, grid, Scheme::fd2, opts);
    res.derived = certify_no_solution(derived, m, grid, Scheme::fd2, opts);
    res.derived_commuting = certify_no_solution(lemma71_derived(m, true), m, grid, Scheme::fd2, opts);
    if (m == 0)
        res.verdict = "position operator F";
    else if (res.derived_commuting.verdict == "inconsistent")
        res.verdict = "no position operator";
    else
        res.verdict = "not established";
    return res;
}

}  // namespace tern
