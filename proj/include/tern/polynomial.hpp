#pragma once

// Multivariate polynomials in the spatial momenta p1, p2, p3 with exact
// Gaussian-rational coefficients. The energy p0 never appears here: the
// rational-function layer keeps it as an explicit linear factor.

#include "tern/complex_rational.hpp"

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <string>

namespace tern {

using Exponent = std::array<int, 3>;

// Graded order: total degree first, then lexicographic on (p1, p2, p3).
struct GradedLess {
    bool operator()(const Exponent& a, const Exponent& b) const {
        int da = a[0] + a[1] + a[2];
        int db = b[0] + b[1] + b[2];
        if (da != db) return da < db;
        return a < b;
    }
};

class Polynomial {
public:
    using TermMap = std::map<Exponent, ComplexRational, GradedLess>;

    Polynomial() = default;
    Polynomial(const ComplexRational& c);  // NOLINT(google-explicit-constructor)

    static Polynomial variable(int axis);  // axis in {1,2,3}
    static Polynomial monomial(const Exponent& e, const ComplexRational& c = 1);
    // p1^2 + p2^2 + p3^2, the on-shell value of p0^2.
    static Polynomial radius_squared();

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    int total_degree() const;
    const TermMap& terms() const { return terms_; }

    // Largest term in graded order. Requires !is_zero().
    const std::pair<const Exponent, ComplexRational>& leading() const { return *terms_.rbegin(); }

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(const ComplexRational& c);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(Polynomial a, const ComplexRational& c) { return a *= c; }
    Polynomial operator-() const;

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }
    friend bool operator<(const Polynomial& a, const Polynomial& b);

    Polynomial derivative(int axis) const;
    Polynomial parity() const;     // p -> -p
    Polynomial conjugate() const;  // coefficient-wise conjugation

    // Exact quotient when divisor divides *this, otherwise nullopt.
    std::optional<Polynomial> divide_exact(const Polynomial& divisor) const;

    // Leading coefficient scaled to 1; returns the removed factor.
    ComplexRational make_monic();

    std::complex<double> evaluate(const std::array<double, 3>& p) const;

    std::string to_string() const;

private:
    void add_term(const Exponent& e, const ComplexRational& c);
    TermMap terms_;
};

}  // namespace tern
