#pragma once

// Position operators, the admissible D-operators of zero helicity terns, and
// numerical certificates for linear first-order PDE systems in momentum space.

#include "tern/numgrid.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <json.hpp>

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace tern {

using Position = std::array<OperatorExpr, 3>;

// F_j = (i d_j - (i/2) p_j / p0^2) Id_n
Position newton_wigner(int n);

// ids "Q.1:jk", "12.i:pi:Qj", "12.i:tau:Qj", "12.ii:Qk,Pj", "12.ii:Jj,Qk".
// The 12.i checks need a complete tern and are skipped otherwise.
CertificateReport check_position(const Tern& t, const Position& q);

// Admissible D_j = d(p0) p_j with d a Hermitian n x n matrix of radial
// functions, subject to Pi D = -D Pi and T D = D T. Each radial function is
// sampled as p0^k for the listed exponents; the solution space must not
// depend on k.
struct DClassification {
    std::string spec;
    int free_functions = 0;
    std::vector<FiberMatrix> basis;  // pattern of each free function at g = 1
    std::vector<int> per_exponent;   // dimension found for each sampled exponent
    std::string pattern() const;
};
// Throws std::invalid_argument unless t is complete with every block at m = 0.
DClassification classify_D(const Tern& t, const std::vector<int>& exponents = {0, 1, -1, 2});

// Complete, zero helicity, F passes check_position and no nonzero D exists.
bool localizable(const Tern& t);

// ---------------------------------------------------------------------------
// Linear first-order systems  sum_u (grad_u . nabla + value_u) x_u = rhs.

struct PdeTerm {
    int unknown = 0;
    std::array<RationalFn, 3> grad;
    RationalFn value;
};

struct PdeEquation {
    std::string name;
    std::vector<PdeTerm> terms;
    RationalFn rhs;
    std::string to_string(const std::vector<std::string>& unknowns) const;
};

struct ResidualSystem {
    std::string name;
    std::vector<std::string> unknowns;
    std::vector<PdeEquation> equations;

    bool homogeneous() const;
    ResidualSystem subset(const std::vector<std::size_t>& equations) const;
    // lhs - rhs for each equation at symbolic unknowns
    std::vector<RationalFn> evaluate(const std::vector<RationalFn>& x) const;
};

// Named operator residuals as a function of the unknown coefficient functions.
using SystemBuilder = std::function<std::vector<std::pair<std::string, OperatorExpr>>(const std::vector<RationalFn>&)>;

// Reads off the system by probing with x = 0, 1 and p_i, then checks the
// result on a quadratic probe. One equation per nonzero operator term.
ResidualSystem extract_system(const std::string& name, const std::vector<std::string>& unknowns,
                              const SystemBuilder& build);

// The nine equations (d.1)-(d.9) as printed, in that order. The eighth
// reads  p1 d2(d1) - p1 d1(d1) = d2  in the printed form and
// p1 d2(d1) - p2 d1(d1) = -d2  in the corrected one.
enum class D8Form { printed, corrected };
ResidualSystem lemma71_system(int m, D8Form form = D8Form::corrected);
// [J_j, F_k + d_k] = i eps_jkl (F_l + d_l) on the helicity-m block, from the
// symbolic commutators. With commuting = true the equations [Q_j, Q_k] = 0
// are appended.
ResidualSystem lemma71_derived(int m, bool commuting = false);
// Unitary Pi = [[0, S1], [S2, 0]] U on the u-class pair (m, -m).
ResidualSystem parity_system(int m);
// Unitary T = [[0, T1], [T2, 0]] on the s-class generators with helicity m.
ResidualSystem unitary_tau_system(int m);

struct EquationMatch {
    std::string stated;
    std::string derived;         // empty when no derived equation has a proportional left side
    std::string factor;          // derived lhs = factor * stated lhs
    bool rhs_match = false;
    std::string rhs_difference;  // derived rhs / factor - stated rhs
};
std::vector<EquationMatch> compare_systems(const ResidualSystem& stated, const ResidualSystem& derived);

// ---------------------------------------------------------------------------
// Discretization on a MomentumGrid. Equations sit on nodes whose stencil is
// clear of exclusions and of the box edge; unknowns on every node a stencil
// reaches. Rows are weighted by sqrt(h^3 / p0).

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

struct DiscreteSystem {
    MomentumGrid grid;
    Scheme scheme = Scheme::fd2;
    int unknowns = 0;
    int equations = 0;
    std::vector<std::array<int, 3>> equation_nodes;
    std::vector<std::array<int, 3>> unknown_nodes;
    std::vector<double> weight;  // per equation node
    SparseMatrix a;              // row = equation * nodes + node, column = unknown * nodes + node
    Eigen::VectorXcd b;

    Eigen::VectorXcd pack(const GridWavefunction& x) const;
    GridWavefunction unpack(const Eigen::VectorXcd& x) const;
};
DiscreteSystem discretize(const ResidualSystem& s, const GridParams& params, Scheme scheme = Scheme::fd2);

struct ResidualNorms {
    std::vector<double> per_equation;  // weighted L2
    double total = 0.0;
};
ResidualNorms residual_norms(const DiscreteSystem& d, const Eigen::VectorXcd& x);

// Evaluates (d.1)-(d.9) for three grid functions d (components 0..2).
ResidualNorms lemma71_residual(const GridWavefunction& d, int m, D8Form form = D8Form::corrected,
                               Scheme scheme = Scheme::fd2);

struct SolveOptions {
    int max_iterations = 2000;
    double tolerance = 1e-8;  // on |A^H r| / |A^H b| for CGLS, on Ritz value drift for Lanczos
    // CGLS also stops when |r| fell by less than stagnation_tolerance (relative)
    // over the last stagnation_window iterations; 0 disables.
    int stagnation_window = 200;
    double stagnation_tolerance = 1e-4;
    std::uint64_t seed = 7;
};

struct LeastSquaresResult {
    Eigen::VectorXcd x;
    double residual = 0.0;  // |A x - b| / |b|
    int iterations = 0;
    bool converged = false;
    bool stagnated = false;
};
// CGLS from x = 0. residual only decreases, so it bounds the true minimum from above.
LeastSquaresResult solve_least_squares(const SparseMatrix& a, const Eigen::VectorXcd& b, const SolveOptions& opts = {});

struct SingularValueResult {
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    int iterations = 0;
    bool converged = false;
};
// Lanczos on A^H A for the extreme singular values.
SingularValueResult extreme_singular_values(const SparseMatrix& a, const SolveOptions& opts = {});

// Lower bound on r*: at each equation node the residual is C y - g with
// y = (difference quotients, values) of the unknowns there, so |e| is at
// least the distance from g to the range of C. Weighted and relative to |b|.
double pointwise_residual_bound(const DiscreteSystem& d, const ResidualSystem& s);

struct GridRun {
    double h = 0.0;
    std::int64_t rows = 0;
    std::int64_t columns = 0;
    double value = 0.0;  // r* for inhomogeneous systems, sigma_min in the dnu norm otherwise
    double bound = 0.0;  // pointwise lower bound on r*
    int iterations = 0;
    bool converged = false;
};

struct SystemCertificate {
    std::string system;
    int m = 0;
    GridParams grid;
    Scheme scheme = Scheme::fd2;
    bool homogeneous = false;
    std::vector<GridRun> runs;  // coarse, then refined
    double r_star = 0.0;        // value at the finest grid
    double refinement_ratio = 0.0;
    std::string verdict;  // "inconsistent", "solvable", "obstruction", "nontrivial solution", "undecided"
    std::vector<std::string> notes;
    nlohmann::json to_json() const;
};

// Least squares at grid.h and grid.h / 2. A homogeneous system is reported
// solvable without solving.
SystemCertificate certify_no_solution(const ResidualSystem& s, int m, const GridParams& grid = {},
                                      Scheme scheme = Scheme::fd2, const SolveOptions& opts = {});
// For homogeneous systems: whether only x = 0 fits, from sigma_min at two spacings.
SystemCertificate certify_trivial_kernel(const ResidualSystem& s, int m, const GridParams& grid,
                                         Scheme scheme = Scheme::fd2, const SolveOptions& opts = {});

// ---------------------------------------------------------------------------

struct ZetaCheck {
    std::array<double, 3> residual{0.0, 0.0, 0.0};  // weighted L2 of (34)-(36)
    double total = 0.0;
    double lemma_residual = 0.0;                    // total of (d.1)-(d.9)
    double constant = 0.0;                          // zeta residual / lemma residual
    double lower_bound = 0.0;  // sum_j p_j (L_j zeta) = 0 forces |R| >= (m/2) p0 / |p|
};
// zeta = sum_j p_j d_j and the rotation derivatives L1 = p2 d3 - p3 d2, ...
ZetaCheck zeta_reduction_check(const GridWavefunction& d, int m, Scheme scheme = Scheme::fd2);

struct Prop71Result {
    int m = 0;
    std::vector<EquationMatch> matches;  // printed equations against the derived ones
    D8Form d8_form = D8Form::corrected;  // which form of the eighth equation has the derived left side
    bool witness_solves_derived = false;  // d = k / p0
    SystemCertificate stated;
    SystemCertificate derived;
    SystemCertificate derived_commuting;
    std::string verdict;
    nlohmann::json to_json() const;
};
Prop71Result prop71_harness(int m, const GridParams& grid = {}, const SolveOptions& opts = {});

// The u-class pair (m, -m) completed with Pi = U sigma_x and T = K U.
Tern build_u_pair_with_parity(int m);

}  // namespace tern
