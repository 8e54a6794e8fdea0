#pragma once

// Exact sparse row reduction over Q, used for commutant and ansatz solves.

#include "tern/ratfn.hpp"

#include <map>
#include <utility>
#include <vector>

namespace tern {

using Row = std::map<int, Rational>;

// Incremental reduced row echelon form.
class RowReducer {
public:
    explicit RowReducer(int columns) : cols_(columns) {}

    void add(Row row);
    std::vector<std::vector<Rational>> nullspace() const;
    int rank() const { return static_cast<int>(pivots_.size()); }
    int columns() const { return cols_; }

private:
    int cols_;
    std::map<int, Row> pivots_;
};

// Adds the real equations for  sum_e x_e c_e == 0  with real unknowns x_e:
// one row per monomial of the common numerator, split into real and imaginary
// parts. Returns the number of rows added.
int emit_equations(const std::vector<std::pair<int, RationalFn>>& terms, RowReducer& rr);

}  // namespace tern
