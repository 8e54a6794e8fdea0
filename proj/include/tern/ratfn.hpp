#pragma once

/**
 * @file ratfn.hpp
 * @brief Exact rational functions of momentum on the cone p0 = |p|.
 *
 * A value is stored as (A + B*p0) / D where A, B, D are polynomials in
 * p1, p2, p3 only. D is kept as a product of monic factors. Division by a
 * p0-dependent quantity uses 1/(A+B p0) = (A-B p0)/(A^2-B^2 r), r = |p|^2.
 *
 * Zero test: A == 0 and B == 0. Since p0 is not a rational function of p,
 * A + B p0 vanishing on an open set forces both to vanish.
 */

#include "tern/polynomial.hpp"

#include <array>
#include <complex>
#include <map>
#include <string>
#include <vector>

namespace tern {

class RationalFn {
public:
    using Denominator = std::map<Polynomial, int>;

    RationalFn() = default;
    RationalFn(const ComplexRational& c);  // NOLINT(google-explicit-constructor)
    RationalFn(long c) : RationalFn(ComplexRational(c)) {}  // NOLINT(google-explicit-constructor)
    RationalFn(const Polynomial& a, const Polynomial& b = {});  // NOLINT(google-explicit-constructor)

    static RationalFn p0();
    static RationalFn p(int axis);
    static RationalFn constant(const ComplexRational& c) { return RationalFn(c); }

    const Polynomial& even_part() const { return a_; }  // A
    const Polynomial& p0_part() const { return b_; }    // B
    const Denominator& denominator() const { return den_; }
    Polynomial denominator_product() const;

    bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
    bool is_constant() const;
    // Constant value; throws std::logic_error when not constant.
    ComplexRational constant_value() const;
    bool is_polynomial() const { return den_.empty(); }

    RationalFn& operator+=(const RationalFn& o);
    RationalFn& operator-=(const RationalFn& o);
    RationalFn& operator*=(const RationalFn& o);
    RationalFn& operator/=(const RationalFn& o);
    friend RationalFn operator+(RationalFn a, const RationalFn& b) { return a += b; }
    friend RationalFn operator-(RationalFn a, const RationalFn& b) { return a -= b; }
    friend RationalFn operator*(RationalFn a, const RationalFn& b) { return a *= b; }
    friend RationalFn operator/(RationalFn a, const RationalFn& b) { return a /= b; }
    RationalFn operator-() const;

    friend bool operator==(const RationalFn& a, const RationalFn& b) { return (a - b).is_zero(); }

    RationalFn differentiate(int axis) const;
    RationalFn parity_transform() const;
    RationalFn conjugate() const;

    std::complex<double> evaluate(const std::array<double, 3>& p) const;

    std::string to_string() const;

private:
    void multiply_denominator(const Polynomial& q, int power);
    void cancel();

    Polynomial a_;
    Polynomial b_;
    Denominator den_;
};

RationalFn pow(const RationalFn& f, int n);

// Floating-point snapshot of a RationalFn for fast repeated evaluation.
class CompiledFn {
public:
    CompiledFn() = default;
    explicit CompiledFn(const RationalFn& f);

    std::complex<double> operator()(double p1, double p2, double p3) const;
    bool is_zero() const { return a_.empty() && b_.empty(); }

private:
    struct Mono {
        std::array<int, 3> e;
        std::complex<double> c;
    };
    struct Factor {
        std::vector<Mono> poly;
        int power;
    };
    static std::complex<double> eval(const std::vector<Mono>& ms, const double* pw, int stride);
    static std::vector<Mono> compile(const Polynomial& p);

    std::vector<Mono> a_;
    std::vector<Mono> b_;
    std::vector<Factor> den_;
    int max_deg_ = 0;
};

}  // namespace tern
