#include "tern/polynomial.hpp"

#include <cmath>
#include <sstream>

namespace tern {

Polynomial::Polynomial(const ComplexRational& c) {
    if (!c.is_zero()) terms_.emplace(Exponent{0, 0, 0}, c);
}

Polynomial Polynomial::variable(int axis) {
    Exponent e{0, 0, 0};
    e.at(static_cast<std::size_t>(axis - 1)) = 1;
    return monomial(e);
}

Polynomial Polynomial::monomial(const Exponent& e, const ComplexRational& c) {
    Polynomial p;
    p.add_term(e, c);
    return p;
}

Polynomial Polynomial::radius_squared() {
    Polynomial r;
    r.add_term({2, 0, 0}, 1);
    r.add_term({0, 2, 0}, 1);
    r.add_term({0, 0, 2}, 1);
    return r;
}

bool Polynomial::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Exponent{0, 0, 0});
}

int Polynomial::total_degree() const {
    if (terms_.empty()) return -1;
    const auto& e = terms_.rbegin()->first;
    return e[0] + e[1] + e[2];
}

void Polynomial::add_term(const Exponent& e, const ComplexRational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(const ComplexRational& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, v] : terms_) v *= c;
    return *this;
}

Polynomial Polynomial::operator-() const {
    Polynomial r = *this;
    for (auto& [e, v] : r.terms_) v = -v;
    return r;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_)
            r.add_term({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
    return r;
}

bool operator<(const Polynomial& a, const Polynomial& b) {
    // Compare from the leading term down; shorter prefix is smaller.
    auto ia = a.terms_.rbegin();
    auto ib = b.terms_.rbegin();
    GradedLess less;
    for (; ia != a.terms_.rend() && ib != b.terms_.rend(); ++ia, ++ib) {
        if (ia->first != ib->first) return less(ia->first, ib->first);
        if (ia->second != ib->second) return ia->second < ib->second;
    }
    return ia == a.terms_.rend() && ib != b.terms_.rend();
}

Polynomial Polynomial::derivative(int axis) const {
    const auto k = static_cast<std::size_t>(axis - 1);
    Polynomial r;
    for (const auto& [e, c] : terms_) {
        if (e[k] == 0) continue;
        Exponent d = e;
        --d[k];
        r.add_term(d, c * ComplexRational(e[k]));
    }
    return r;
}

Polynomial Polynomial::parity() const {
    Polynomial r = *this;
    for (auto& [e, c] : r.terms_)
        if ((e[0] + e[1] + e[2]) % 2 != 0) c = -c;
    return r;
}

Polynomial Polynomial::conjugate() const {
    Polynomial r = *this;
    for (auto& [e, c] : r.terms_) c = c.conj();
    return r;
}

std::optional<Polynomial> Polynomial::divide_exact(const Polynomial& divisor) const {
    if (divisor.is_zero()) throw std::domain_error("Polynomial: division by zero polynomial");
    const auto& [lead_e, lead_c] = divisor.leading();
    Polynomial quotient;
    Polynomial rest = *this;
    while (!rest.is_zero()) {
        const auto& [e, c] = rest.leading();
        Exponent q{e[0] - lead_e[0], e[1] - lead_e[1], e[2] - lead_e[2]};
        if (q[0] < 0 || q[1] < 0 || q[2] < 0) return std::nullopt;
        Polynomial t = monomial(q, c / lead_c);
        rest -= t * divisor;
        quotient += t;
    }
    return quotient;
}

ComplexRational Polynomial::make_monic() {
    if (terms_.empty()) return 1;
    ComplexRational lead = terms_.rbegin()->second;
    if (!lead.is_one()) {
        ComplexRational inv = ComplexRational(1) / lead;
        for (auto& [e, c] : terms_) c *= inv;
    }
    return lead;
}

std::complex<double> Polynomial::evaluate(const std::array<double, 3>& p) const {
    std::complex<double> sum = 0.0;
    for (const auto& [e, c] : terms_) {
        double m = 1.0;
        for (std::size_t k = 0; k < 3; ++k)
            for (int n = 0; n < e[k]; ++n) m *= p[k];
        sum += c.to_complex() * m;
    }
    return sum;
}

std::string Polynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        bool unit_mono = e == Exponent{0, 0, 0};
        bool negative = c.is_real() && sgn(c.re()) < 0;
        ComplexRational shown = negative ? -c : c;
        if (!first) os << (negative ? "-" : "+");
        else if (negative) os << "-";
        first = false;
        if (!shown.is_one() || unit_mono) {
            os << shown.to_string();
            if (!unit_mono) os << "*";
        }
        bool need_star = false;
        for (std::size_t k = 0; k < 3; ++k) {
            if (e[k] == 0) continue;
            if (need_star) os << "*";
            os << "p" << (k + 1);
            if (e[k] > 1) os << "^" << e[k];
            need_star = true;
        }
    }
    return os.str();
}

}  // namespace tern
