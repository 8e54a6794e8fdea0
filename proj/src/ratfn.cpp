#include "tern/ratfn.hpp"

#include <cmath>
#include <stdexcept>

namespace tern {

namespace {

const std::vector<Polynomial>& factor_base() {
    static const std::vector<Polynomial> base = [] {
        Polynomial p1 = Polynomial::variable(1);
        Polynomial p2 = Polynomial::variable(2);
        Polynomial p3 = Polynomial::variable(3);
        return std::vector<Polynomial>{
            Polynomial::radius_squared(),
            p1 * p1 + p2 * p2,
            p1 * p1 + p3 * p3,
            p2 * p2 + p3 * p3,
            p1,
            p2,
            p3,
        };
    }();
    return base;
}

ComplexRational power_of(const ComplexRational& c, int n) {
    ComplexRational r = 1;
    for (int k = 0; k < n; ++k) r *= c;
    return r;
}

Polynomial power_of(const Polynomial& p, int n) {
    Polynomial r = ComplexRational(1);
    for (int k = 0; k < n; ++k) r = r * p;
    return r;
}

}  // namespace

RationalFn::RationalFn(const ComplexRational& c) : a_(c) {}

RationalFn::RationalFn(const Polynomial& a, const Polynomial& b) : a_(a), b_(b) {}

RationalFn RationalFn::p0() { return RationalFn(Polynomial(), Polynomial(ComplexRational(1))); }

RationalFn RationalFn::p(int axis) {
    if (axis < 1 || axis > 3) throw std::invalid_argument("RationalFn::p: axis must be 1, 2 or 3");
    return RationalFn(Polynomial::variable(axis));
}

Polynomial RationalFn::denominator_product() const {
    Polynomial d = ComplexRational(1);
    for (const auto& [f, e] : den_) d = d * power_of(f, e);
    return d;
}

bool RationalFn::is_constant() const { return den_.empty() && b_.is_zero() && a_.is_constant(); }

ComplexRational RationalFn::constant_value() const {
    if (!is_constant()) throw std::logic_error("RationalFn: value is not constant: " + to_string());
    if (a_.is_zero()) return 0;
    return a_.terms().begin()->second;
}

void RationalFn::multiply_denominator(const Polynomial& q_in, int power) {
    if (q_in.is_zero()) throw std::domain_error("RationalFn: division by zero");
    Polynomial q = q_in;
    std::vector<Polynomial> candidates;
    for (const auto& [f, e] : den_) candidates.push_back(f);
    for (const auto& f : factor_base()) candidates.push_back(f);
    for (const auto& f : candidates) {
        while (q.total_degree() >= f.total_degree()) {
            auto quotient = q.divide_exact(f);
            if (!quotient) break;
            q = std::move(*quotient);
            den_[f] += power;
        }
    }
    ComplexRational scale = q.is_constant() ? q.leading().second : q.make_monic();
    if (!q.is_constant()) den_[q] += power;
    ComplexRational inv = ComplexRational(1) / power_of(scale, power);
    a_ *= inv;
    b_ *= inv;
}

void RationalFn::cancel() {
    if (is_zero()) {
        den_.clear();
        return;
    }
    for (auto it = den_.begin(); it != den_.end();) {
        auto& [f, e] = *it;
        while (e > 0) {
            auto qa = a_.divide_exact(f);
            if (!qa) break;
            auto qb = b_.divide_exact(f);
            if (!qb) break;
            a_ = std::move(*qa);
            b_ = std::move(*qb);
            --e;
        }
        it = e == 0 ? den_.erase(it) : std::next(it);
    }
}

RationalFn& RationalFn::operator+=(const RationalFn& o) {
    if (o.is_zero()) return *this;
    if (is_zero()) return *this = o;
    Polynomial mine = ComplexRational(1);
    Polynomial theirs = ComplexRational(1);
    Denominator merged = den_;
    for (const auto& [f, e] : o.den_) {
        int& m = merged[f];
        if (e > m) {
            mine = mine * power_of(f, e - m);
            m = e;
        }
    }
    for (const auto& [f, m] : merged) {
        auto it = o.den_.find(f);
        int e = it == o.den_.end() ? 0 : it->second;
        if (m > e) theirs = theirs * power_of(f, m - e);
    }
    a_ = a_ * mine + o.a_ * theirs;
    b_ = b_ * mine + o.b_ * theirs;
    den_ = std::move(merged);
    cancel();
    return *this;
}

RationalFn& RationalFn::operator-=(const RationalFn& o) { return *this += -o; }

RationalFn RationalFn::operator-() const {
    RationalFn r = *this;
    r.a_ = -r.a_;
    r.b_ = -r.b_;
    return r;
}

RationalFn& RationalFn::operator*=(const RationalFn& o) {
    if (is_zero() || o.is_zero()) return *this = RationalFn();
    Polynomial r = Polynomial::radius_squared();
    Polynomial a = a_ * o.a_ + b_ * o.b_ * r;
    Polynomial b = a_ * o.b_ + b_ * o.a_;
    a_ = std::move(a);
    b_ = std::move(b);
    for (const auto& [f, e] : o.den_) den_[f] += e;
    cancel();
    return *this;
}

RationalFn& RationalFn::operator/=(const RationalFn& o) {
    if (o.is_zero()) throw std::domain_error("RationalFn: division by zero function");
    Polynomial od = o.denominator_product();
    a_ = a_ * od;
    b_ = b_ * od;
    if (o.b_.is_zero()) {
        multiply_denominator(o.a_, 1);
    } else if (o.a_.is_zero()) {
        // 1/(B p0) = p0/(B r)
        std::swap(a_, b_);
        a_ = a_ * Polynomial::radius_squared();
        multiply_denominator(o.b_, 1);
        multiply_denominator(Polynomial::radius_squared(), 1);
    } else {
        Polynomial r = Polynomial::radius_squared();
        Polynomial norm = o.a_ * o.a_ - o.b_ * o.b_ * r;
        Polynomial a = a_ * o.a_ - b_ * o.b_ * r;
        Polynomial b = b_ * o.a_ - a_ * o.b_;
        a_ = std::move(a);
        b_ = std::move(b);
        multiply_denominator(norm, 1);
    }
    cancel();
    return *this;
}

RationalFn RationalFn::differentiate(int axis) const {
    if (axis < 1 || axis > 3) throw std::invalid_argument("RationalFn::differentiate: axis must be 1, 2 or 3");
    if (is_zero()) return {};
    // d(p0)/dp_j = p_j / p0
    RationalFn num_prime(a_.derivative(axis), b_.derivative(axis));
    if (!b_.is_zero()) num_prime += RationalFn(b_ * Polynomial::variable(axis)) / p0();
    RationalFn inv_den = ComplexRational(1);
    inv_den.den_ = den_;
    RationalFn result = num_prime * inv_den;
    for (const auto& [f, e] : den_) {
        RationalFn term(f.derivative(axis) * ComplexRational(e));
        term.multiply_denominator(f, 1);
        term.cancel();
        result -= *this * term;
    }
    return result;
}

RationalFn RationalFn::parity_transform() const {
    RationalFn r(a_.parity(), b_.parity());
    for (const auto& [f, e] : den_) r.multiply_denominator(f.parity(), e);
    r.cancel();
    return r;
}

RationalFn RationalFn::conjugate() const {
    RationalFn r(a_.conjugate(), b_.conjugate());
    for (const auto& [f, e] : den_) r.multiply_denominator(f.conjugate(), e);
    r.cancel();
    return r;
}

std::complex<double> RationalFn::evaluate(const std::array<double, 3>& p) const {
    double p0v = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    std::complex<double> num = a_.evaluate(p) + b_.evaluate(p) * p0v;
    std::complex<double> den = 1.0;
    for (const auto& [f, e] : den_) den *= std::pow(f.evaluate(p), e);
    return num / den;
}

namespace {

bool compound(const Polynomial& p) { return p.terms().size() > 1; }

std::string wrap(const Polynomial& p) { return compound(p) ? "(" + p.to_string() + ")" : p.to_string(); }

}  // namespace

std::string RationalFn::to_string() const {
    std::string num;
    if (b_.is_zero()) {
        num = a_.to_string();
    } else {
        std::string p0_part;
        if (b_ == Polynomial(ComplexRational(1)))
            p0_part = "p0";
        else if (b_ == Polynomial(ComplexRational(-1)))
            p0_part = "-p0";
        else
            p0_part = wrap(b_) + "*p0";
        if (a_.is_zero())
            num = p0_part;
        else
            num = a_.to_string() + (p0_part[0] == '-' ? "" : "+") + p0_part;
    }
    if (den_.empty()) return num;
    std::string den;
    if (den_.size() == 1 && den_.begin()->second == 1) {
        den = den_.begin()->first.to_string();
    } else {
        for (const auto& [f, e] : den_) {
            if (!den.empty()) den += "*";
            den += (e > 1 || den_.size() > 1) ? wrap(f) : f.to_string();
            if (e > 1) den += "^" + std::to_string(e);
        }
    }
    bool num_compound = num.find_first_of("+-", 1) != std::string::npos;
    return (num_compound ? "(" + num + ")" : num) + "/(" + den + ")";
}

RationalFn pow(const RationalFn& f, int n) {
    RationalFn r = ComplexRational(1);
    for (int k = 0; k < std::abs(n); ++k) r *= f;
    return n < 0 ? RationalFn(ComplexRational(1)) / r : r;
}

// ---------------------------------------------------------------------------

std::vector<CompiledFn::Mono> CompiledFn::compile(const Polynomial& p) {
    std::vector<Mono> out;
    out.reserve(p.terms().size());
    for (const auto& [e, c] : p.terms()) out.push_back({e, c.to_complex()});
    return out;
}

CompiledFn::CompiledFn(const RationalFn& f) : a_(compile(f.even_part())), b_(compile(f.p0_part())) {
    for (const auto& [poly, e] : f.denominator()) den_.push_back({compile(poly), e});
    auto track = [this](const std::vector<Mono>& ms) {
        for (const auto& m : ms)
            for (int k : m.e) max_deg_ = std::max(max_deg_, k);
    };
    track(a_);
    track(b_);
    for (const auto& d : den_) track(d.poly);
}

std::complex<double> CompiledFn::eval(const std::vector<Mono>& ms, const double* pw, int stride) {
    std::complex<double> s = 0.0;
    for (const auto& m : ms) s += m.c * (pw[m.e[0]] * pw[stride + m.e[1]] * pw[2 * stride + m.e[2]]);
    return s;
}

std::complex<double> CompiledFn::operator()(double p1, double p2, double p3) const {
    const int stride = max_deg_ + 1;
    std::vector<double> pw(static_cast<std::size_t>(3 * stride));
    const double p[3] = {p1, p2, p3};
    for (int k = 0; k < 3; ++k) {
        pw[static_cast<std::size_t>(k * stride)] = 1.0;
        for (int n = 1; n < stride; ++n)
            pw[static_cast<std::size_t>(k * stride + n)] = pw[static_cast<std::size_t>(k * stride + n - 1)] * p[k];
    }
    std::complex<double> num = eval(a_, pw.data(), stride);
    if (!b_.empty()) num += eval(b_, pw.data(), stride) * std::sqrt(p1 * p1 + p2 * p2 + p3 * p3);
    std::complex<double> den = 1.0;
    for (const auto& d : den_) {
        std::complex<double> v = eval(d.poly, pw.data(), stride);
        for (int k = 0; k < d.power; ++k) den *= v;
    }
    return num / den;
}

}  // namespace tern
