#pragma once

/**
 * @file complex_rational.hpp
 * @brief Exact Gaussian-rational scalars (a + b i, a and b in Q).
 *
 * Every coefficient in the symbolic engine is one of these. Arithmetic is
 * exact; there is no floating point anywhere in this type except the
 * explicit to_complex() conversion used by the numerical grid.
 */

#include <gmpxx.h>

#include <complex>
#include <compare>
#include <stdexcept>
#include <string>

namespace tern {

using Rational = mpq_class;

class ComplexRational {
public:
    ComplexRational() : re_(0), im_(0) {}
    ComplexRational(long v) : re_(v), im_(0) {}  // NOLINT(google-explicit-constructor)
    ComplexRational(Rational re) : re_(std::move(re)), im_(0) { re_.canonicalize(); }  // NOLINT
    ComplexRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {
        re_.canonicalize();
        im_.canonicalize();
    }

    static ComplexRational i() { return {Rational(0), Rational(1)}; }
    static ComplexRational frac(long num, long den) { return Rational(num, den); }

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }

    ComplexRational conj() const { return {re_, -im_}; }
    Rational norm2() const { return re_ * re_ + im_ * im_; }

    ComplexRational operator-() const { return {-re_, -im_}; }

    ComplexRational& operator+=(const ComplexRational& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    ComplexRational& operator-=(const ComplexRational& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    ComplexRational& operator*=(const ComplexRational& o) {
        Rational r = re_ * o.re_ - im_ * o.im_;
        Rational i = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }
    ComplexRational& operator/=(const ComplexRational& o) {
        if (o.is_zero()) throw std::domain_error("ComplexRational: division by zero");
        Rational n = o.norm2();
        *this *= o.conj();
        re_ /= n;
        im_ /= n;
        return *this;
    }

    friend ComplexRational operator+(ComplexRational a, const ComplexRational& b) { return a += b; }
    friend ComplexRational operator-(ComplexRational a, const ComplexRational& b) { return a -= b; }
    friend ComplexRational operator*(ComplexRational a, const ComplexRational& b) { return a *= b; }
    friend ComplexRational operator/(ComplexRational a, const ComplexRational& b) { return a /= b; }

    friend bool operator==(const ComplexRational& a, const ComplexRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

    // Total order used only to make containers deterministic.
    friend std::strong_ordering operator<=>(const ComplexRational& a, const ComplexRational& b) {
        int c = cmp(a.re_, b.re_);
        if (c == 0) c = cmp(a.im_, b.im_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

    // "3/4", "-i", "(1/2+3i)", "2/3*i" style; stable across runs.
    std::string to_string() const {
        if (sgn(im_) == 0) return re_.get_str();
        std::string imag;
        if (im_ == 1)
            imag = "i";
        else if (im_ == -1)
            imag = "-i";
        else
            imag = im_.get_str() + "*i";
        if (sgn(re_) == 0) return imag;
        std::string s = "(" + re_.get_str();
        if (sgn(im_) > 0) s += "+";
        return s + imag + ")";
    }

private:
    Rational re_;
    Rational im_;
};

}  // namespace tern
