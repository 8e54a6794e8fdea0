#include "tern/verify.hpp"

#include "tern/exact_solve.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace tern {

namespace {

const ComplexRational I = ComplexRational::i();

int levi_civita(int j, int k, int l) {
    if (j == k || k == l || j == l) return 0;
    // cyclic permutations of (1,2,3) are even
    return ((j == 1 && k == 2) || (j == 2 && k == 3) || (j == 3 && k == 1)) ? 1 : -1;
}

// Constant c with e == c * Id, or nullopt. The zero operator gives 0.
std::optional<ComplexRational> identity_multiple(const OperatorExpr& e) {
    if (e.is_zero()) return ComplexRational(0);
    if (e.antilinear() || static_cast<int>(e.terms().size()) != e.dim()) return std::nullopt;
    std::optional<ComplexRational> c;
    for (const auto& [k, v] : e.terms()) {
        if (k.row != k.col || k.upsilon || k.deriv != std::array<int, 3>{0, 0, 0} || !v.is_constant())
            return std::nullopt;
        if (c && *c != v.constant_value()) return std::nullopt;
        c = v.constant_value();
    }
    return c;
}

std::string render_scalar(const std::optional<ComplexRational>& c) { return c ? c->to_string() : "non-scalar"; }

OperatorExpr sign_matrix(const Tern& t) {
    FiberMatrix s = identity_matrix(t.dim);
    for (const auto& b : t.expected.blocks)
        s[static_cast<std::size_t>(b.offset)][static_cast<std::size_t>(b.offset)] = ComplexRational(b.p0_sign);
    return OperatorExpr::matrix(s);
}

}  // namespace

// ---------------------------------------------------------------------------

bool CertificateReport::overall() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void CertificateReport::merge(const CertificateReport& other) {
    if (subject.empty()) subject = other.subject;
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
    for (const auto& [k, v] : other.derived_constants) derived_constants[k] = v;
    notes.insert(notes.end(), other.notes.begin(), other.notes.end());
}

nlohmann::json CertificateReport::to_json() const {
    std::vector<Check> sorted = checks;
    std::stable_sort(sorted.begin(), sorted.end(), [](const Check& a, const Check& b) { return a.id < b.id; });
    nlohmann::json j;
    j["schema"] = 1;
    j["subject"] = subject;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : sorted) {
        nlohmann::json e = {{"id", c.id}, {"pass", c.pass}, {"residual", c.residual}};
        if (c.numeric) {
            e["numeric"] = true;
            e["value"] = c.value;
            e["tolerance"] = c.tolerance;
        }
        j["checks"].push_back(e);
    }
    j["derived_constants"] = derived_constants;
    j["notes"] = notes;
    j["overall"] = overall() ? "pass" : "fail";
    return j;
}

Check symbolic_check(std::string id, const OperatorExpr& r) {
    Check c;
    c.id = std::move(id);
    c.pass = r.is_zero();
    c.residual = r.to_string();
    return c;
}

// ---------------------------------------------------------------------------

std::vector<Relation> lie_relations(const Tern& t) {
    auto gens = t.generators();
    // (type, axis): type 0 = P0, 1 = P, 2 = J, 3 = K
    auto type_of = [](const std::string& n) { return n == "P0" ? 0 : (n[0] == 'P' ? 1 : (n[0] == 'J' ? 2 : 3)); };
    auto axis_of = [](const std::string& n) { return n[1] - '0'; };
    auto gen = [&](int type, int axis) -> const OperatorExpr& {
        if (type == 0) return t.p0;
        auto i = static_cast<std::size_t>(axis - 1);
        return type == 1 ? t.p[i] : (type == 2 ? t.j[i] : t.k[i]);
    };

    // Expected value of [A,B] for an oriented pair, nullopt if the table lists it the other way round.
    auto expected = [&](int ta, int a, int tb, int b) -> std::optional<OperatorExpr> {
        OperatorExpr zero(t.dim);
        int l = 6 - a - b;
        RationalFn eps(ComplexRational(levi_civita(a, b, l)));
        if (ta == 1 && tb == 1) return zero;
        if (ta == 2 && tb == 1) return a == b ? zero : RationalFn(I) * eps * gen(1, l);
        if (ta == 2 && tb == 2) return a == b ? zero : RationalFn(I) * eps * gen(2, l);
        if (ta == 2 && tb == 3) return a == b ? zero : RationalFn(I) * eps * gen(3, l);
        if (ta == 3 && tb == 3) return a == b ? zero : RationalFn(-I) * eps * gen(2, l);
        if (ta == 3 && tb == 1) return a == b ? RationalFn(I) * t.p0 : zero;
        if (ta == 1 && tb == 0) return zero;
        if (ta == 2 && tb == 0) return zero;
        if (ta == 3 && tb == 0) return RationalFn(I) * gen(1, a);
        return std::nullopt;
    };

    std::vector<Relation> out;
    for (std::size_t x = 0; x < gens.size(); ++x) {
        for (std::size_t y = x + 1; y < gens.size(); ++y) {
            const auto& [na, A] = gens[x];
            const auto& [nb, B] = gens[y];
            int ta = type_of(na), tb = type_of(nb);
            int a = ta == 0 ? 0 : axis_of(na), b = tb == 0 ? 0 : axis_of(nb);
            auto e = expected(ta, a, tb, b);
            if (!e) {
                auto f = expected(tb, b, ta, a);
                if (!f) throw std::logic_error("lie table incomplete for " + na + "," + nb);
                e = -*f;
            }
            out.push_back({"lie:" + na + "," + nb, A, B, 1, *e});
        }
    }
    return out;
}

std::vector<Relation> discrete_relations(const Tern& t) {
    if (!t.complete()) throw std::invalid_argument("discrete_relations: tern has no Pi/T (generators only)");
    // Signs s in  X G = s G X  for G = P0, Pj, Jk, Kj.
    struct Signs {
        int p0, p, j, k;
    };
    const Signs pi_unitary{1, -1, 1, -1}, pi_anti{-1, 1, -1, 1};
    const Signs tau_unitary{-1, 1, 1, -1}, tau_anti{1, -1, -1, 1};
    std::vector<Relation> out;
    OperatorExpr zero(t.dim);
    auto run = [&](const std::string& name, const OperatorExpr& x, const Signs& s) {
        out.push_back({name + ":P0", x, t.p0, s.p0, zero});
        for (int a = 1; a <= 3; ++a) {
            auto i = static_cast<std::size_t>(a - 1);
            std::string n = std::to_string(a);
            out.push_back({name + ":P" + n, x, t.p[i], s.p, zero});
            out.push_back({name + ":J" + n, x, t.j[i], s.j, zero});
            out.push_back({name + ":K" + n, x, t.k[i], s.k, zero});
        }
    };
    run("pi", *t.pi, t.pi->antilinear() ? pi_anti : pi_unitary);
    run("tau", *t.tau, t.tau->antilinear() ? tau_anti : tau_unitary);
    return out;
}

Relation mirror_relation(const Tern& t) {
    if (!t.complete()) throw std::invalid_argument("mirror_relation: tern has no Pi");
    return {"mirror:pi-helicity", *t.pi, helicity_operator(t), -1, OperatorExpr(t.dim)};
}

OperatorExpr Relation::residual() const { return relation_residual(a, b, sign) - rhs; }

CertificateReport check_lie_algebra(const Tern& t) {
    CertificateReport rep;
    rep.subject = t.spec.to_string();
    for (const auto& r : lie_relations(t)) rep.add(symbolic_check(r.id, r.residual()));
    return rep;
}

CertificateReport check_discrete_relations(const Tern& t) {
    if (!t.complete()) throw std::invalid_argument("check_discrete_relations: tern has no Pi/T (generators only)");
    CertificateReport rep;
    rep.subject = t.spec.to_string();
    const OperatorExpr& pi = *t.pi;
    const OperatorExpr& tau = *t.tau;
    for (const auto& r : discrete_relations(t)) rep.add(symbolic_check(r.id, r.residual()));

    auto square = [&](const std::string& name, const OperatorExpr& x, int expected_square) {
        auto sq = scalar_square(x);
        Check c;
        c.id = name + ":square";
        bool allowed = x.antilinear() ? (sq && (*sq == ComplexRational(1) || *sq == ComplexRational(-1)))
                                      : (sq && *sq == ComplexRational(1));
        c.pass = allowed && *sq == ComplexRational(expected_square);
        c.residual = sq ? "square = " + sq->to_string() + " Id" : compose(x, x).to_string();
        rep.add(c);
        rep.derived_constants[name + "_square"] = render_scalar(sq);
    };
    square("pi", pi, t.expected.pi_square);
    square("tau", tau, t.expected.tau_square);

    auto omega = extract_omega(pi, tau);
    Check c;
    c.id = "pi-tau:omega";
    c.pass = omega && omega->norm2() == 1;
    c.residual = omega ? "omega = " + omega->to_string() : "Pi T is not a constant multiple of T Pi";
    rep.add(c);
    rep.derived_constants["omega"] = omega ? omega->to_string() : "none";
    rep.derived_constants["pi"] = pi.antilinear() ? "antiunitary" : "unitary";
    rep.derived_constants["tau"] = tau.antilinear() ? "antiunitary" : "unitary";
    return rep;
}

OperatorExpr helicity_operator(const Tern& t) {
    OperatorExpr lambda(t.dim);
    for (int a = 1; a <= 3; ++a)
        lambda += compose(t.j[static_cast<std::size_t>(a - 1)],
                          OperatorExpr::multiply(t.dim, RationalFn::p(a) / RationalFn::p0()));
    return lambda;
}

HelicityResult check_helicity(const Tern& t) {
    HelicityResult out;
    out.report.subject = t.spec.to_string();
    OperatorExpr lambda = helicity_operator(t);
    // Off-diagonal entries must vanish so each block carries its own value.
    OperatorExpr off(t.dim);
    for (const auto& [k, v] : lambda.terms())
        if (k.row != k.col) off.add(k, v);
    out.report.add(symbolic_check("helicity:block-diagonal", off));
    for (const auto& b : t.expected.blocks) {
        auto value = identity_multiple(lambda.block(b.offset, 1));
        out.per_block.push_back(value);
        ComplexRational want = ComplexRational::frac(b.m, 2);
        Check c;
        c.id = "helicity:block" + std::to_string(b.offset + 1);
        c.pass = value && *value == want;
        c.residual = value ? (*value - want).to_string() : lambda.block(b.offset, 1).to_string();
        out.report.add(c);
        out.report.derived_constants["helicity_block" + std::to_string(b.offset + 1)] = render_scalar(value);
    }
    return out;
}

CertificateReport check_mirror(const Tern& t) {
    if (!t.complete()) throw std::invalid_argument("check_mirror: tern has no Pi");
    CertificateReport rep;
    rep.subject = t.spec.to_string();
    Relation r = mirror_relation(t);
    rep.add(symbolic_check(r.id, r.residual()));
    return rep;
}

CertificateReport check_casimirs(const Tern& t) {
    CertificateReport rep;
    rep.subject = t.spec.to_string();
    OperatorExpr mass = compose(t.p0, t.p0);
    for (const auto& pj : t.p) mass -= compose(pj, pj);
    auto eta = identity_multiple(mass);
    Check ce;
    ce.id = "casimir:eta";
    ce.pass = eta && eta->is_zero();
    ce.residual = mass.to_string();
    rep.add(ce);
    rep.derived_constants["eta"] = render_scalar(eta);

    OperatorExpr w0(t.dim);
    for (int a = 0; a < 3; ++a) w0 += compose(t.j[static_cast<std::size_t>(a)], t.p[static_cast<std::size_t>(a)]);
    std::array<OperatorExpr, 3> w;
    for (int a = 1; a <= 3; ++a) {
        int b = a % 3 + 1, c = b % 3 + 1;
        auto i = [](int x) { return static_cast<std::size_t>(x - 1); };
        w[i(a)] = compose(t.p0, t.j[i(a)]) + compose(t.p[i(b)], t.k[i(c)]) - compose(t.p[i(c)], t.k[i(b)]);
    }
    OperatorExpr w2 = compose(w0, w0);
    for (const auto& wj : w) w2 -= compose(wj, wj);
    auto varpi = identity_multiple(w2);
    Check cw;
    cw.id = "casimir:varpi";
    cw.pass = varpi.has_value() && varpi->is_zero();
    cw.residual = varpi ? "varpi = " + varpi->to_string() : w2.to_string();
    rep.add(cw);
    rep.derived_constants["varpi"] = render_scalar(varpi);

    // W = helicity * (|P|, sgn(P0) P) on every block.
    OperatorExpr lambda = helicity_operator(t);
    OperatorExpr s = sign_matrix(t);
    rep.add(symbolic_check("pauli-lubanski:W0", w0 - compose(lambda, OperatorExpr::multiply(t.dim, RationalFn::p0()))));
    for (int a = 0; a < 3; ++a)
        rep.add(symbolic_check("pauli-lubanski:W" + std::to_string(a + 1),
                               w[static_cast<std::size_t>(a)] - compose(lambda, compose(s, t.p[static_cast<std::size_t>(a)]))));
    return rep;
}

CertificateReport check_spectrum_sign(const Tern& t) {
    CertificateReport rep;
    rep.subject = t.spec.to_string();
    bool pos = false, neg = false;
    for (const auto& b : t.expected.blocks) {
        OperatorExpr blk = t.p0.block(b.offset, 1);
        Check c;
        c.id = "spectrum:block" + std::to_string(b.offset + 1);
        bool is_pos = blk == OperatorExpr::multiply(1, RationalFn::p0());
        bool is_neg = blk == OperatorExpr::multiply(1, -RationalFn::p0());
        pos |= is_pos;
        neg |= is_neg;
        c.pass = (is_pos && b.p0_sign == 1) || (is_neg && b.p0_sign == -1);
        c.residual = c.pass ? "0" : "P0 block is " + blk.to_string();
        rep.add(c);
    }
    OperatorExpr off(t.dim);
    for (const auto& [k, v] : t.p0.terms())
        if (k.row != k.col) off.add(k, v);
    rep.add(symbolic_check("spectrum:diagonal", off));

    Check cls;
    cls.id = "spectrum:class";
    std::string declared = t.spec.cls == TernClass::u ? "u" : (t.spec.cls == TernClass::d ? "d" : "s");
    std::string found = pos && neg ? "s" : (pos ? "u" : (neg ? "d" : "?"));
    cls.pass = declared == found;
    cls.residual = "declared " + declared + ", P0 blocks give " + found;
    rep.add(cls);
    rep.derived_constants["class"] = found;

    if (t.complete()) {
        Check ch;
        ch.id = "spectrum:character";
        bool pi_anti = t.pi->antilinear(), tau_anti = t.tau->antilinear();
        if (found == "s")
            ch.pass = pi_anti || !tau_anti;
        else
            ch.pass = !pi_anti && tau_anti;
        ch.residual = std::string("Pi ") + (pi_anti ? "antiunitary" : "unitary") + ", T " +
                      (tau_anti ? "antiunitary" : "unitary");
        rep.add(ch);
    }
    return rep;
}

CertificateReport check_block_reduction(const Tern& t) {
    if (!t.complete() || t.tau->antilinear() || t.dim != 4)
        throw std::invalid_argument("check_block_reduction: needs a four-component tern with unitary T");
    CertificateReport rep;
    rep.subject = t.spec.to_string();
    FiberMatrix fp(4, std::vector<ComplexRational>(4));
    fp[0][0] = 1;
    FiberMatrix em(4, std::vector<ComplexRational>(4));
    em[1][1] = 1;
    em[3][3] = 1;
    OperatorExpr f_plus = OperatorExpr::matrix(fp);
    OperatorExpr f_minus = compose(compose(*t.tau, f_plus), *t.tau);
    rep.add(symbolic_check("reduce:projection", compose(f_minus, f_minus) - f_minus));
    rep.add(symbolic_check("reduce:negative-block", compose(f_minus, OperatorExpr::matrix(em)) - f_minus));
    for (const auto& [n, g] : t.generators()) {
        rep.add(symbolic_check("reduce:F+," + n, commutator(f_plus, g)));
        rep.add(symbolic_check("reduce:F-," + n, commutator(f_minus, g)));
    }
    rep.add(symbolic_check("reduce:F,T", relation_residual(f_plus + f_minus, *t.tau, 1)));
    rep.derived_constants["F-"] = f_minus.to_string();
    return rep;
}

// ---------------------------------------------------------------------------
// Commutant probe: exact real linear algebra over Q.

std::string CommutantElement::to_string() const {
    static const char* names[4] = {"", "U", "K", "UK"};
    std::ostringstream os;
    bool first = true;
    for (std::size_t s = 0; s < 4; ++s) {
        bool nonzero = false;
        for (const auto& r : sectors[s])
            for (const auto& v : r) nonzero |= !v.is_zero();
        if (!nonzero) continue;
        if (!first) os << " + ";
        first = false;
        os << "[";
        for (std::size_t i = 0; i < sectors[s].size(); ++i) {
            if (i) os << ";";
            for (std::size_t j = 0; j < sectors[s][i].size(); ++j) os << (j ? "," : "") << sectors[s][i][j].to_string();
        }
        os << "]";
        if (*names[s]) os << "*" << names[s];
    }
    return first ? "0" : os.str();
}

bool CommutantElement::is_identity_multiple() const {
    for (std::size_t s = 1; s < 4; ++s)
        for (const auto& r : sectors[s])
            for (const auto& v : r)
                if (!v.is_zero()) return false;
    const auto& m = sectors[0];
    if (m.empty() || m[0][0].is_zero() || !m[0][0].is_real()) return false;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            if (m[i][j] != (i == j ? m[0][0] : ComplexRational(0))) return false;
    return true;
}

CommutantResult commutant_probe(const Tern& t, const CommutantOptions& opts) {
    const int n = t.dim;
    const int unknowns = 8 * n * n;
    auto index = [n](int sector, int a, int b, int part) { return ((sector * n + a) * n + b) * 2 + part; };

    std::vector<OperatorExpr> conditions;
    for (const auto& [name, g] : t.generators()) conditions.push_back(g);
    if (opts.include_discrete && t.complete()) {
        conditions.push_back(*t.pi);
        conditions.push_back(*t.tau);
    }

    RowReducer rr(unknowns);
    CommutantResult res;
    for (std::size_t ci = 0; ci < conditions.size(); ++ci) {
        const OperatorExpr& x = conditions[ci];
        std::map<std::pair<int, TermKey>, std::vector<std::pair<int, RationalFn>>> groups;
        for (int sector = 0; sector < 4; ++sector) {
            int upsilon = sector / 2, kappa = sector % 2;
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) {
                    for (int part = 0; part < 2; ++part) {
                        OperatorExpr basis(n, kappa != 0);
                        basis.add({a, b, {0, 0, 0}, upsilon}, part ? RationalFn(I) : RationalFn(1));
                        OperatorExpr r = relation_residual(basis, x, 1);
                        int rk = r.antilinear() ? 1 : 0;
                        for (const auto& [k, c] : r.terms()) groups[{rk, k}].emplace_back(index(sector, a, b, part), c);
                    }
                }
            }
        }
        for (const auto& [key, terms] : groups) res.equations += emit_equations(terms, rr);
    }

    if (opts.self_adjoint) {
        for (int sector = 0; sector < 4; ++sector) {
            bool antilinear = sector % 2 == 1;
            for (int a = 0; a < n; ++a) {
                for (int b = a; b < n; ++b) {
                    // linear sectors: M Hermitian; antilinear sectors: M symmetric
                    Row re, im;
                    re[index(sector, a, b, 0)] += 1;
                    re[index(sector, b, a, 0)] -= 1;
                    im[index(sector, a, b, 1)] += 1;
                    im[index(sector, b, a, 1)] += antilinear ? -1 : 1;
                    rr.add(re);
                    rr.add(im);
                    res.equations += 2;
                }
            }
        }
    }

    for (const auto& v : rr.nullspace()) {
        CommutantElement el;
        for (int sector = 0; sector < 4; ++sector) {
            FiberMatrix m(static_cast<std::size_t>(n), std::vector<ComplexRational>(static_cast<std::size_t>(n)));
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                        ComplexRational(v[static_cast<std::size_t>(index(sector, a, b, 0))],
                                        v[static_cast<std::size_t>(index(sector, a, b, 1))]);
            el.sectors[static_cast<std::size_t>(sector)] = std::move(m);
        }
        res.basis.push_back(std::move(el));
    }
    res.irreducible = res.basis.size() == 1 && res.basis[0].is_identity_multiple();
    res.ansatz = "constant fiber matrix x {Id, U} x {Id, K}";
    if (opts.self_adjoint) res.ansatz += ", self-adjoint (Hermitian linear part, symmetric antilinear part)";
    if (!opts.include_discrete || !t.complete()) res.ansatz += ", generators only";
    return res;
}

CertificateReport full_report(const Tern& t) {
    CertificateReport rep;
    rep.subject = t.spec.to_string();
    rep.merge(check_spectrum_sign(t));
    rep.merge(check_lie_algebra(t));
    rep.merge(check_helicity(t).report);
    rep.merge(check_casimirs(t));
    if (t.complete()) {
        rep.merge(check_discrete_relations(t));
        rep.merge(check_mirror(t));
        CommutantResult cr = commutant_probe(t);
        Check c;
        c.id = "commutant:irreducible";
        c.pass = cr.irreducible;
        std::string basis;
        for (const auto& b : cr.basis) basis += (basis.empty() ? "" : " | ") + b.to_string();
        c.residual = "basis {" + basis + "}";
        rep.add(c);
        rep.derived_constants["commutant_dim"] = std::to_string(cr.basis.size());
        rep.notes.push_back("commutant ansatz: " + cr.ansatz);
        if (t.spec.family == Family::quartet_s) rep.merge(check_block_reduction(t));
    }
    for (const auto& n : t.notes) rep.notes.push_back(n);
    return rep;
}

Mutation Mutation::parse(const std::string& text) {
    auto eq = text.find("+=");
    if (eq == std::string::npos || eq == 0 || eq + 2 == text.size())
        throw std::invalid_argument("mutation must read GEN+=COEFF: " + text);
    Mutation mu;
    mu.text = text;
    mu.generator = text.substr(0, eq);
    static const std::vector<std::string> names = {"P0", "P1", "P2", "P3", "J1", "J2", "J3", "K1", "K2", "K3"};
    if (std::find(names.begin(), names.end(), mu.generator) == names.end())
        throw std::invalid_argument("unknown generator in mutation: " + mu.generator);
    RationalFn c(1);
    std::stringstream ss(text.substr(eq + 2));
    std::string f;
    while (std::getline(ss, f, '*')) {
        if (f == "i") {
            c = c * RationalFn(ComplexRational::i());
        } else if (f == "p0") {
            c = c * RationalFn::p0();
        } else if (f.size() == 2 && f[0] == 'p' && f[1] >= '1' && f[1] <= '3') {
            c = c * RationalFn::p(f[1] - '0');
        } else {
            try {
                c = c * RationalFn(ComplexRational(Rational(f)));
            } catch (const std::exception&) {
                throw std::invalid_argument("bad factor in mutation: " + f);
            }
        }
    }
    if (c.is_zero()) throw std::invalid_argument("mutation coefficient is zero: " + text);
    mu.coefficient = c;
    return mu;
}

void Mutation::apply(Tern& t) const {
    t.generator(generator) += OperatorExpr::multiply(t.dim, coefficient);
    t.notes.push_back("mutated: " + text);
}

}  // namespace tern
