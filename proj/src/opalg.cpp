#include "tern/opalg.hpp"

#include <sstream>
#include <stdexcept>

namespace tern {

FiberMatrix identity_matrix(int n) {
    FiberMatrix m(static_cast<std::size_t>(n), std::vector<ComplexRational>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
    return m;
}

OperatorExpr OperatorExpr::from_term(const FiberMatrix& m, const RationalFn& coeff, std::array<int, 3> deriv,
                                     int upsilon, int kappa) {
    const int n = static_cast<int>(m.size());
    OperatorExpr r(n, kappa != 0);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(m[static_cast<std::size_t>(i)].size()) != n)
            throw std::invalid_argument("OperatorExpr: fiber matrix must be square");
        for (int j = 0; j < n; ++j) {
            const ComplexRational& e = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (e.is_zero()) continue;
            r.add({i, j, deriv, upsilon & 1}, RationalFn(e) * coeff);
        }
    }
    return r;
}

OperatorExpr OperatorExpr::identity(int n) { return from_term(identity_matrix(n), 1); }

OperatorExpr OperatorExpr::multiply(int n, const RationalFn& f) { return from_term(identity_matrix(n), f); }

OperatorExpr OperatorExpr::partial(int n, int axis) {
    if (axis < 1 || axis > 3) throw std::invalid_argument("OperatorExpr::partial: axis must be 1, 2 or 3");
    std::array<int, 3> d{0, 0, 0};
    d[static_cast<std::size_t>(axis - 1)] = 1;
    return from_term(identity_matrix(n), 1, d);
}

OperatorExpr OperatorExpr::parity(int n) { return from_term(identity_matrix(n), 1, {0, 0, 0}, 1); }

OperatorExpr OperatorExpr::conjugation(int n) { return from_term(identity_matrix(n), 1, {0, 0, 0}, 0, 1); }

OperatorExpr OperatorExpr::matrix(const FiberMatrix& m) { return from_term(m, 1); }

void OperatorExpr::add(const TermKey& key, const RationalFn& coeff) {
    if (coeff.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(key, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

namespace {

void check_compatible(const OperatorExpr& a, const OperatorExpr& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("OperatorExpr: fiber dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                                    std::to_string(b.dim()) + ")");
}

}  // namespace

OperatorExpr& OperatorExpr::operator+=(const OperatorExpr& o) {
    check_compatible(*this, o);
    if (o.is_zero()) return *this;
    if (is_zero()) antilinear_ = o.antilinear_;
    if (antilinear_ != o.antilinear_)
        throw std::invalid_argument("OperatorExpr: cannot add linear and antilinear expressions");
    for (const auto& [k, c] : o.terms_) add(k, c);
    return *this;
}

OperatorExpr& OperatorExpr::operator-=(const OperatorExpr& o) { return *this += -o; }

OperatorExpr OperatorExpr::operator-() const {
    OperatorExpr r(dim_, antilinear_);
    for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
    return r;
}

OperatorExpr operator*(const RationalFn& f, const OperatorExpr& a) {
    OperatorExpr r(a.dim(), a.antilinear());
    for (const auto& [k, c] : a.terms()) r.add(k, f * c);
    return r;
}

bool operator==(const OperatorExpr& a, const OperatorExpr& b) {
    if (a.dim() != b.dim()) return false;
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    if (a.antilinear() != b.antilinear()) return false;
    return (a - b).is_zero();
}

OperatorExpr OperatorExpr::block(int offset, int size) const {
    OperatorExpr r(size, antilinear_);
    for (const auto& [k, c] : terms_) {
        if (k.row < offset || k.row >= offset + size || k.col < offset || k.col >= offset + size) continue;
        TermKey nk = k;
        nk.row -= offset;
        nk.col -= offset;
        r.add(nk, c);
    }
    return r;
}

OperatorExpr OperatorExpr::embed(int n, int offset) const {
    if (offset < 0 || offset + dim_ > n) throw std::invalid_argument("OperatorExpr::embed: block does not fit");
    OperatorExpr r(n, antilinear_);
    for (const auto& [k, c] : terms_) {
        TermKey nk = k;
        nk.row += offset;
        nk.col += offset;
        r.add(nk, c);
    }
    return r;
}

std::string OperatorExpr::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "E" << (k.row + 1) << (k.col + 1) << "*[" << c.to_string() << "]";
        for (int j = 0; j < 3; ++j) {
            int a = k.deriv[static_cast<std::size_t>(j)];
            if (a == 0) continue;
            os << "*d" << (j + 1);
            if (a > 1) os << "^" << a;
        }
        if (k.upsilon) os << "*U";
        if (antilinear_) os << "*K";
    }
    return os.str();
}

// ---------------------------------------------------------------------------

namespace {

long binomial(int n, int k) {
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Derivatives of one coefficient, memoised by multi-index.
class DerivativeTable {
public:
    explicit DerivativeTable(RationalFn f) { table_.emplace(std::array<int, 3>{0, 0, 0}, std::move(f)); }

    const RationalFn& get(const std::array<int, 3>& g) {
        auto it = table_.find(g);
        if (it != table_.end()) return it->second;
        // Peel off one derivative from the first nonzero axis.
        std::array<int, 3> lower = g;
        int axis = 0;
        while (lower[static_cast<std::size_t>(axis)] == 0) ++axis;
        --lower[static_cast<std::size_t>(axis)];
        RationalFn d = get(lower).differentiate(axis + 1);
        return table_.emplace(g, std::move(d)).first->second;
    }

private:
    std::map<std::array<int, 3>, RationalFn> table_;
};

}  // namespace

OperatorExpr compose(const OperatorExpr& a, const OperatorExpr& b) {
    check_compatible(a, b);
    OperatorExpr r(a.dim(), a.antilinear() != b.antilinear());
    const int kappa = a.antilinear() ? 1 : 0;

    // Transformed right-hand coefficients, one table per (term, upsilon of left factor).
    std::map<std::pair<TermKey, int>, DerivativeTable> tables;
    auto table_for = [&](const TermKey& kb, const RationalFn& c2, int u) -> DerivativeTable& {
        auto key = std::make_pair(kb, u);
        auto it = tables.find(key);
        if (it != tables.end()) return it->second;
        RationalFn t = kappa ? c2.conjugate() : c2;
        if (u) t = t.parity_transform();
        return tables.emplace(key, DerivativeTable(std::move(t))).first->second;
    };

    for (const auto& [ka, c1] : a.terms()) {
        for (const auto& [kb, c2] : b.terms()) {
            if (ka.col != kb.row) continue;
            const int order_b = kb.deriv[0] + kb.deriv[1] + kb.deriv[2];
            const bool flip = ka.upsilon && (order_b % 2 != 0);
            DerivativeTable& tab = table_for(kb, c2, ka.upsilon);
            const auto& al = ka.deriv;
            for (int g1 = 0; g1 <= al[0]; ++g1) {
                for (int g2 = 0; g2 <= al[1]; ++g2) {
                    for (int g3 = 0; g3 <= al[2]; ++g3) {
                        const RationalFn& dg = tab.get({g1, g2, g3});
                        if (dg.is_zero()) continue;
                        long w = binomial(al[0], g1) * binomial(al[1], g2) * binomial(al[2], g3);
                        if (flip) w = -w;
                        TermKey k{ka.row,
                                  kb.col,
                                  {al[0] - g1 + kb.deriv[0], al[1] - g2 + kb.deriv[1], al[2] - g3 + kb.deriv[2]},
                                  ka.upsilon ^ kb.upsilon};
                        r.add(k, RationalFn(ComplexRational(w)) * c1 * dg);
                    }
                }
            }
        }
    }
    return r;
}

OperatorExpr commutator(const OperatorExpr& a, const OperatorExpr& b) {
    if (a.antilinear() || b.antilinear())
        throw std::invalid_argument("commutator: antilinear operand; use relation_residual");
    return relation_residual(a, b, 1);
}

OperatorExpr relation_residual(const OperatorExpr& a, const OperatorExpr& b, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("relation_residual: sign must be +1 or -1");
    OperatorExpr ab = compose(a, b);
    OperatorExpr ba = compose(b, a);
    return sign == 1 ? ab - ba : ab + ba;
}

OperatorExpr formal_adjoint(const OperatorExpr& a) {
    if (a.antilinear()) throw std::invalid_argument("formal_adjoint: antilinear operand");
    const int n = a.dim();
    // d_j^dagger = -d_j + p_j / p0^2
    std::array<OperatorExpr, 3> dagger;
    for (int j = 1; j <= 3; ++j)
        dagger[static_cast<std::size_t>(j - 1)] =
            -OperatorExpr::partial(n, j) + OperatorExpr::multiply(n, RationalFn::p(j) / (RationalFn::p0() * RationalFn::p0()));

    OperatorExpr result(n);
    for (const auto& [k, c] : a.terms()) {
        // (E_rc c d^alpha U^u)^dagger = U^u (d^alpha)^dagger conj(c) E_cr
        OperatorExpr t(n);
        t.add({k.col, k.row, {0, 0, 0}, 0}, c.conjugate());
        for (int j = 0; j < 3; ++j)
            for (int m = 0; m < k.deriv[static_cast<std::size_t>(j)]; ++m) t = compose(dagger[static_cast<std::size_t>(j)], t);
        if (k.upsilon) t = compose(OperatorExpr::parity(n), t);
        result += t;
    }
    return result;
}

}  // namespace tern
