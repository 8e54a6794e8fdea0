#pragma once

/**
 * @file opalg.hpp
 * @brief Linear and antilinear differential operators on C^n-valued
 *        functions of momentum.
 *
 * Every term is stored in the canonical order
 *     E_{row,col} * coeff(p) * d^alpha * U^upsilon * K^kappa
 * where E is a matrix unit, U is the parity (psi(p) -> psi(-p)) and K is
 * complex conjugation. kappa is shared by all terms of an expression.
 */

#include "tern/ratfn.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace tern {

using FiberMatrix = std::vector<std::vector<ComplexRational>>;

FiberMatrix identity_matrix(int n);

struct TermKey {
    int row = 0;
    int col = 0;
    std::array<int, 3> deriv{0, 0, 0};
    int upsilon = 0;

    friend bool operator==(const TermKey&, const TermKey&) = default;
    friend auto operator<=>(const TermKey&, const TermKey&) = default;
};

class OperatorExpr {
public:
    using TermMap = std::map<TermKey, RationalFn>;

    OperatorExpr() = default;
    explicit OperatorExpr(int dim, bool antilinear = false) : dim_(dim), antilinear_(antilinear) {}

    // matrix * coeff * d^deriv * U^upsilon * K^kappa
    static OperatorExpr from_term(const FiberMatrix& m, const RationalFn& coeff, std::array<int, 3> deriv = {0, 0, 0},
                                  int upsilon = 0, int kappa = 0);
    static OperatorExpr identity(int n);
    static OperatorExpr zero(int n) { return OperatorExpr(n); }
    static OperatorExpr multiply(int n, const RationalFn& f);
    static OperatorExpr partial(int n, int axis);
    static OperatorExpr parity(int n);
    static OperatorExpr conjugation(int n);
    static OperatorExpr matrix(const FiberMatrix& m);

    int dim() const { return dim_; }
    bool antilinear() const { return antilinear_; }
    bool is_zero() const { return terms_.empty(); }
    const TermMap& terms() const { return terms_; }

    // Adds coeff at key; merges and drops zeros.
    void add(const TermKey& key, const RationalFn& coeff);

    OperatorExpr& operator+=(const OperatorExpr& o);
    OperatorExpr& operator-=(const OperatorExpr& o);
    friend OperatorExpr operator+(OperatorExpr a, const OperatorExpr& b) { return a += b; }
    friend OperatorExpr operator-(OperatorExpr a, const OperatorExpr& b) { return a -= b; }
    OperatorExpr operator-() const;

    // Left multiplication by a scalar function (no rewriting needed).
    friend OperatorExpr operator*(const RationalFn& f, const OperatorExpr& a);

    friend bool operator==(const OperatorExpr& a, const OperatorExpr& b);

    // Block of components [offset, offset+size) in both row and column.
    OperatorExpr block(int offset, int size) const;
    // Places this expression as a diagonal block at offset inside dimension n.
    OperatorExpr embed(int n, int offset) const;

    // Apply a transformation to every coefficient (keys unchanged).
    template <class F>
    OperatorExpr map_coefficients(F f) const {
        OperatorExpr r(dim_, antilinear_);
        for (const auto& [k, c] : terms_) r.add(k, f(c));
        return r;
    }

    std::string to_string() const;

private:
    int dim_ = 0;
    bool antilinear_ = false;
    TermMap terms_;
};

OperatorExpr compose(const OperatorExpr& a, const OperatorExpr& b);
OperatorExpr commutator(const OperatorExpr& a, const OperatorExpr& b);
// a*b - sign*b*a
OperatorExpr relation_residual(const OperatorExpr& a, const OperatorExpr& b, int sign);
// Adjoint for the measure d^3p / p0. Linear input only.
OperatorExpr formal_adjoint(const OperatorExpr& a);

}  // namespace tern
