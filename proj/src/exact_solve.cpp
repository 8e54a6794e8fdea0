#include "tern/exact_solve.hpp"

#include <stdexcept>
#include <tuple>

namespace tern {

void RowReducer::add(Row row) {
    for (auto it = row.begin(); it != row.end();) it = sgn(it->second) == 0 ? row.erase(it) : std::next(it);
    // reduce against existing pivots
    for (const auto& [p, prow] : pivots_) {
        auto it = row.find(p);
        if (it == row.end()) continue;
        Rational f = it->second;
        for (const auto& [c, v] : prow) {
            Rational nv = row[c] - f * v;
            if (sgn(nv) == 0)
                row.erase(c);
            else
                row[c] = nv;
        }
    }
    if (row.empty()) return;
    int p = row.begin()->first;
    Rational lead = row.begin()->second;
    for (auto& [c, v] : row) v /= lead;
    // keep reduced form
    for (auto& [q, qrow] : pivots_) {
        auto it = qrow.find(p);
        if (it == qrow.end()) continue;
        Rational f = it->second;
        for (const auto& [c, v] : row) {
            Rational nv = qrow[c] - f * v;
            if (sgn(nv) == 0)
                qrow.erase(c);
            else
                qrow[c] = nv;
        }
    }
    pivots_[p] = std::move(row);
}

std::vector<std::vector<Rational>> RowReducer::nullspace() const {
    std::vector<std::vector<Rational>> out;
    for (int f = 0; f < cols_; ++f) {
        if (pivots_.count(f)) continue;
        std::vector<Rational> v(static_cast<std::size_t>(cols_));
        v[static_cast<std::size_t>(f)] = 1;
        for (const auto& [p, prow] : pivots_) {
            auto it = prow.find(f);
            if (it != prow.end()) v[static_cast<std::size_t>(p)] = -it->second;
        }
        out.push_back(std::move(v));
    }
    return out;
}

int emit_equations(const std::vector<std::pair<int, RationalFn>>& terms, RowReducer& rr) {
    std::map<Polynomial, int> lcm;
    for (const auto& [e, c] : terms)
        for (const auto& [f, p] : c.denominator()) lcm[f] = std::max(lcm[f], p);
    Polynomial l = ComplexRational(1);
    for (const auto& [f, p] : lcm)
        for (int i = 0; i < p; ++i) l = l * f;
    // (p0 degree, exponent, real/imag) -> row
    std::map<std::tuple<int, Exponent, int>, Row> rows;
    for (const auto& [e, c] : terms) {
        RationalFn n = c * RationalFn(l);
        if (!n.is_polynomial()) throw std::logic_error("emit_equations: common denominator failed");
        for (int deg = 0; deg < 2; ++deg) {
            const Polynomial& part = deg == 0 ? n.even_part() : n.p0_part();
            for (const auto& [ex, v] : part.terms()) {
                rows[{deg, ex, 0}][e] += v.re();
                rows[{deg, ex, 1}][e] += v.im();
            }
        }
    }
    int count = 0;
    for (auto& [key, row] : rows) {
        rr.add(std::move(row));
        ++count;
    }
    return count;
}

}  // namespace tern
