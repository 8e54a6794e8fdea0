#pragma once

// Discretized momentum space: finite-difference realization of operator
// expressions, the invariant inner product, and convergence studies.

#include "tern/verify.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace tern {

using cplx = std::complex<double>;

enum class Scheme { fd2, fd4 };
int scheme_order(Scheme s);
int stencil_radius(Scheme s);

struct GridParams {
    double half_width = 2.0;  // box is [-half_width, half_width]^3
    double h = 0.125;
    double rho_axis = 0.25;
    double rho_origin = 0.25;
};

// Cell-centred nodes lo + (i + 1/2) h, so the node set is symmetric under p -> -p.
class MomentumGrid {
public:
    explicit MomentumGrid(const GridParams& params = {});

    const GridParams& params() const { return params_; }
    int n() const { return n_; }
    double h() const { return params_.h; }
    double coord(int i) const { return -params_.half_width + (i + 0.5) * params_.h; }
    int reflect(int i) const { return n_ - 1 - i; }
    bool excluded(int i, int j, int k) const;
    std::int64_t node_count() const { return std::int64_t(n_) * n_ * n_; }
    std::int64_t allowed_count() const;
    bool same_as(const MomentumGrid& o) const;

private:
    GridParams params_;
    int n_ = 0;
};

// Index box [lo, hi) per axis.
struct IndexBox {
    std::array<int, 3> lo{0, 0, 0};
    std::array<int, 3> hi{0, 0, 0};
    bool empty() const { return lo[0] >= hi[0] || lo[1] >= hi[1] || lo[2] >= hi[2]; }
    std::int64_t size() const;
    bool contains(int i, int j, int k) const;
};

// Fiber-vector valued grid function. Values are stored on an index box and
// are zero outside it.
class GridWavefunction {
public:
    GridWavefunction(const MomentumGrid& grid, int dim, IndexBox box = {});

    const MomentumGrid& grid() const { return *grid_; }
    int dim() const { return dim_; }
    const IndexBox& box() const { return box_; }

    cplx at(int comp, int i, int j, int k) const;  // zero outside the box
    cplx& ref(int comp, int i, int j, int k);       // inside the box only
    const std::vector<cplx>& component(int comp) const { return values_[static_cast<std::size_t>(comp)]; }
    std::vector<cplx>& component(int comp) { return values_[static_cast<std::size_t>(comp)]; }

    GridWavefunction& operator+=(const GridWavefunction& o);
    GridWavefunction& operator-=(const GridWavefunction& o);
    GridWavefunction& operator*=(cplx s);
    friend GridWavefunction operator+(GridWavefunction a, const GridWavefunction& b) { return a += b; }
    friend GridWavefunction operator-(GridWavefunction a, const GridWavefunction& b) { return a -= b; }
    friend GridWavefunction operator*(cplx s, GridWavefunction a) { return a *= s; }

    bool all_finite() const;
    // Copy onto a larger box (must contain the current one).
    GridWavefunction widened(const IndexBox& b) const;
    std::int64_t index(int i, int j, int k) const;

private:
    const MomentumGrid* grid_;
    int dim_;
    IndexBox box_;
    std::vector<std::vector<cplx>> values_;
};

// Apply an operator expression. Coefficients are evaluated at nodes,
// derivatives by central differences, U by index reflection, K by
// conjugation. Throws std::domain_error when a nonzero value would need a
// coefficient on an excluded node or a stencil outside the box.
GridWavefunction apply(const OperatorExpr& expr, const GridWavefunction& psi, Scheme scheme);

// sum conj(phi) psi h^3 / p0 with pairwise summation.
cplx inner_product(const GridWavefunction& phi, const GridWavefunction& psi);
double norm(const GridWavefunction& psi);

// Product of one-dimensional bumps (1-x^2)^8 (C^7, enough for both schemes)
// with a plane-wave phase, on one fiber component or, if comp < 0, on all of
// them with distinct amplitudes.
struct Bump {
    std::array<double, 3> center{0.0, 0.0, 0.0};
    std::array<double, 3> radius{0.5, 0.5, 0.5};
    std::array<double, 3> wave{0.0, 0.0, 0.0};
    std::vector<cplx> amplitude;  // one per fiber component
};
GridWavefunction sample_bump(const MomentumGrid& grid, const Bump& b);
// Random bump clear of the exclusion sets and the box edge by `guard`.
// Radii are drawn from [0.35, 0.6]; a guard of 0.6 needs half_width of about 3.
Bump random_bump(const GridParams& params, int dim, int comp, std::mt19937_64& rng, double guard = 0.25);

// a(b psi) - sign b(a psi) - rhs psi, each factor applied on the grid.
GridWavefunction numeric_residual(const Relation& r, const GridWavefunction& psi, Scheme scheme);

struct ConvergenceResult {
    std::vector<double> h;
    std::vector<double> residual;  // relative to the norm of psi
    std::vector<double> orders;    // log2 of successive ratios
    bool rounding_level = false;   // residual below floor at every h
    double observed_order() const { return orders.empty() ? 0.0 : orders.back(); }
};
// residual(h) must return a relative residual norm. Spacings must halve.
ConvergenceResult convergence_study(const std::function<double(double)>& residual, const std::vector<double>& hs,
                                    double floor = 1e-11);

// Lie, discrete and mirror relations of a tern (the last two only when complete).
std::vector<Relation> numeric_relations(const Tern& t);

struct RelationConvergence {
    std::string id;
    ConvergenceResult result;
};
// Convergence of every relation of t on one bump; the grid is rebuilt per spacing.
std::vector<RelationConvergence> cross_check(const Tern& t, const Bump& b, Scheme scheme, const std::vector<double>& hs,
                                             const GridParams& base = {}, double floor = 1e-11);

// sum_j J_j applied to (p_j / p0) psi, each factor on the grid. The symbolic
// helicity operator collapses to a multiplication, so this keeps the
// discretization error visible.
GridWavefunction numeric_helicity(const Tern& t, const GridWavefunction& psi, Scheme scheme);

// <psi, A psi> / <psi, psi>
cplx expectation(const OperatorExpr& a, const GridWavefunction& psi, Scheme scheme);

// Little-endian binary layout: "TGWF", u32 version=1, u32 dim, i32 n,
// f64 half_width, f64 h, i32 box.lo[3], i32 box.hi[3], then for each node of
// the box (i outer, k inner) and each component: f64 re, f64 im.
void dump(const GridWavefunction& psi, std::ostream& os);
GridWavefunction load(const MomentumGrid& grid, std::istream& is);

}  // namespace tern
