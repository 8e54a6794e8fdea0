#include "tern/localize.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace tern;

namespace {

const ComplexRational I = ComplexRational::i();

std::string failures(const CertificateReport& r) {
    std::string out;
    for (const auto& c : r.checks)
        if (!c.pass) out += c.id + " -> " + c.residual + "\n";
    return out;
}

bool check_passes(const CertificateReport& r, const std::string& prefix) {
    bool any = false;
    for (const auto& c : r.checks) {
        if (c.id.rfind(prefix, 0) != 0) continue;
        any = true;
        if (!c.pass) return false;
    }
    return any;
}

GridParams small_grid() {
    GridParams g;
    g.half_width = 1.5;
    g.h = 0.25;
    return g;
}

// Oracle for the D classification: X = U^a K^b M acts on d(p0) p_j as
// X (d p_j) = (-1)^a M d^(b) M^-1 p_j X, with d^(1) the complex conjugate.
// Unknowns: real parameters of a Hermitian 2x2 matrix.
int oracle_d_dimension(int pa, int pb, const Eigen::Matrix2cd& pm, int ta, int tb, const Eigen::Matrix2cd& tm) {
    auto herm = [](const Eigen::Vector4d& x) {
        Eigen::Matrix2cd d;
        d << x[0], cplx(x[2], x[3]), cplx(x[2], -x[3]), x[1];
        return d;
    };
    auto act = [](int a, int b, const Eigen::Matrix2cd& m, const Eigen::Matrix2cd& d) {
        Eigen::Matrix2cd db = b ? Eigen::Matrix2cd(d.conjugate()) : d;
        return Eigen::Matrix2cd((a ? -1.0 : 1.0) * m * db * m.inverse());
    };
    Eigen::MatrixXd c(16, 4);
    for (int k = 0; k < 4; ++k) {
        Eigen::Vector4d e = Eigen::Vector4d::Zero();
        e[k] = 1.0;
        Eigen::Matrix2cd d = herm(e);
        Eigen::Matrix2cd rp = act(pa, pb, pm, d) + d;  // Pi D = -D Pi
        Eigen::Matrix2cd rt = act(ta, tb, tm, d) - d;  // T D = D T
        for (int i = 0; i < 4; ++i) {
            c(i, k) = rp(i / 2, i % 2).real();
            c(4 + i, k) = rp(i / 2, i % 2).imag();
            c(8 + i, k) = rt(i / 2, i % 2).real();
            c(12 + i, k) = rt(i / 2, i % 2).imag();
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(c);
    return static_cast<int>(lu.dimensionOfKernel());
}

}  // namespace

TEST(NewtonWigner, CanonicalCommutators) {
    Position f = newton_wigner(1);
    OperatorExpr p1 = OperatorExpr::multiply(1, RationalFn::p(1));
    EXPECT_EQ(commutator(f[0], p1), RationalFn(I) * OperatorExpr::identity(1));
    EXPECT_TRUE(commutator(f[0], f[1]).is_zero());
    EXPECT_EQ(commutator(orbital_j(1), f[1]), RationalFn(I) * f[2]);
    for (int n : {1, 2, 4}) {
        Position fn = newton_wigner(n);
        for (const auto& fj : fn) EXPECT_EQ(formal_adjoint(fj), fj);
    }
    EXPECT_THROW(newton_wigner(0), std::invalid_argument);
}

TEST(NewtonWigner, SymmetricOnTheGrid) {
    // Independent of formal_adjoint: <phi, F psi> = <F phi, psi> by quadrature.
    GridParams gp;
    gp.half_width = 3.0;
    gp.h = 1.0 / 16.0;
    MomentumGrid grid(gp);
    std::mt19937_64 rng(3);
    auto phi = sample_bump(grid, random_bump(gp, 1, 0, rng, 0.6));
    auto psi = sample_bump(grid, random_bump(gp, 1, 0, rng, 0.6));
    Position f = newton_wigner(1);
    for (const auto& fj : f) {
        cplx a = inner_product(phi, apply(fj, psi, Scheme::fd4));
        cplx b = inner_product(apply(fj, phi, Scheme::fd4), psi);
        EXPECT_LT(std::abs(a - b), 1e-6 * (1.0 + std::abs(a)));
    }
}

TEST(Position, NewtonWignerOnZeroHelicity) {
    for (const char* s : {"u:m=0", "d:m=0", "s:m=0:UU:+1", "s:m=0:UU:-1", "s:m=0:AU:+1", "s:m=0:AU:-1", "s:m=0:AA:+1",
                          "s:m=0:AA:-1"}) {
        Tern t = build(TernSpec::parse(s));
        auto rep = check_position(t, newton_wigner(t.dim));
        EXPECT_TRUE(rep.overall()) << s << "\n" << failures(rep);
    }
}

TEST(Position, AdmissibleDKeepsRelationsButBreaksUniqueness) {
    Tern t = build_s_zero("UU", 1);
    Position q = newton_wigner(2);
    for (int j = 0; j < 3; ++j)
        q[static_cast<std::size_t>(j)] += OperatorExpr::from_term({{0, 1}, {1, 0}}, RationalFn::p(j + 1));
    auto rep = check_position(t, q);
    EXPECT_TRUE(rep.overall()) << failures(rep);
    EXPECT_GT(classify_D(t).free_functions, 0);
}

TEST(Position, WrongShiftBreaksParityRelation) {
    Tern t = build_s_zero("AU", 1);
    Position q = newton_wigner(2);
    for (int j = 0; j < 3; ++j) q[static_cast<std::size_t>(j)] += OperatorExpr::multiply(2, RationalFn::p(j + 1));
    auto rep = check_position(t, q);
    EXPECT_TRUE(check_passes(rep, "12.ii"));
    EXPECT_TRUE(check_passes(rep, "Q.1"));
    EXPECT_FALSE(check_passes(rep, "12.i:pi"));
}

TEST(Position, HelicityBlockFailsRotationCovariance) {
    Tern t = build_irreducible(TernClass::u, 2);
    auto rep = check_position(t, newton_wigner(1));
    EXPECT_FALSE(check_passes(rep, "12.ii:J"));
    EXPECT_TRUE(check_passes(rep, "12.ii:Q"));
}

TEST(ClassifyD, MatchesMatrixOracle) {
    Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity(), sx, z, a1, am;
    sx << 0, 1, 1, 0;
    z << 1, 0, 0, -1;
    a1 << 0, 1, 1, 0;
    am << 0, 1, -1, 0;
    struct Case {
        const char* spec;
        int pa, pb;
        Eigen::Matrix2cd pm;
        int ta, tb;
        Eigen::Matrix2cd tm;
    };
    std::vector<Case> cases = {
        {"s:m=0:UU:+1", 1, 0, id, 0, 0, sx}, {"s:m=0:UU:-1", 1, 0, z, 0, 0, sx},
        {"s:m=0:AU:+1", 0, 1, a1, 0, 0, sx}, {"s:m=0:AU:-1", 0, 1, am, 0, 0, sx},
        {"s:m=0:AA:+1", 0, 1, a1, 1, 1, id}, {"s:m=0:AA:-1", 0, 1, am, 1, 1, id},
    };
    for (const auto& c : cases) {
        auto res = classify_D(build(TernSpec::parse(c.spec)));
        EXPECT_EQ(res.free_functions, oracle_d_dimension(c.pa, c.pb, c.pm, c.ta, c.tb, c.tm)) << c.spec;
        EXPECT_EQ(res.basis.size(), static_cast<std::size_t>(res.free_functions));
        for (int d : res.per_exponent) EXPECT_EQ(d, res.free_functions);
    }
}

TEST(ClassifyD, BasisElementsAreAdmissible) {
    for (const char* s : {"s:m=0:UU:+1", "s:m=0:AU:-1", "s:m=0:AA:-1"}) {
        Tern t = build(TernSpec::parse(s));
        for (const auto& m : classify_D(t).basis) {
            Position q = newton_wigner(2);
            for (int j = 0; j < 3; ++j)
                q[static_cast<std::size_t>(j)] += OperatorExpr::from_term(m, RationalFn::p0() * RationalFn::p(j + 1));
            auto rep = check_position(t, q);
            EXPECT_TRUE(rep.overall()) << s << "\n" << failures(rep);
        }
    }
}

TEST(ClassifyD, RejectsOutsideZeroHelicity) {
    EXPECT_THROW(classify_D(build_s_m(2, 1)), std::invalid_argument);
    EXPECT_THROW(classify_D(build_u_pair(0)), std::invalid_argument);
    EXPECT_EQ(classify_D(build_irreducible(TernClass::u, 0)).free_functions, 0);
}

TEST(Localizable, CatalogSelection) {
    std::vector<std::string> yes;
    for (const auto& t : catalog(2))
        if (localizable(t)) yes.push_back(t.spec.to_string());
    // Same selection as the oracle: zero helicity and no admissible D.
    std::vector<std::string> expect = {"u:m=0", "d:m=0", "s:m=0:AU:+1", "s:m=0:AA:+1"};
    std::sort(yes.begin(), yes.end());
    std::sort(expect.begin(), expect.end());
    EXPECT_EQ(yes, expect);
}

TEST(UPairParity, UnitaryParityExistsForOppositeHelicities) {
    Tern t = build_u_pair_with_parity(2);
    auto rep = full_report(t);
    EXPECT_TRUE(rep.overall()) << failures(rep);
    EXPECT_TRUE(commutant_probe(t).irreducible);
    EXPECT_FALSE(t.pi->antilinear());
}

TEST(Extract, RejectsNonlinearBuilder) {
    auto builder = [](const std::vector<RationalFn>& x) {
        return std::vector<std::pair<std::string, OperatorExpr>>{{"sq", OperatorExpr::multiply(1, x[0] * x[0] + RationalFn(1))}};
    };
    EXPECT_THROW(extract_system("bad", {"x"}, builder), std::logic_error);
}

TEST(Extract, RecoversKnownOperator) {
    // x -> p0 d1 x + p2 x - 3
    auto builder = [](const std::vector<RationalFn>& x) {
        RationalFn v = RationalFn::p0() * x[0].differentiate(1) + RationalFn::p(2) * x[0] - RationalFn(3);
        return std::vector<std::pair<std::string, OperatorExpr>>{{"e", OperatorExpr::multiply(1, v)}};
    };
    auto s = extract_system("known", {"x"}, builder);
    ASSERT_EQ(s.equations.size(), 1u);
    const auto& e = s.equations[0];
    ASSERT_EQ(e.terms.size(), 1u);
    EXPECT_EQ(e.terms[0].grad[0], RationalFn::p0());
    EXPECT_TRUE(e.terms[0].grad[1].is_zero());
    EXPECT_EQ(e.terms[0].value, RationalFn::p(2));
    EXPECT_EQ(e.rhs, RationalFn(3));
}

TEST(ShiftSystem, DerivedMatchesHandDerivation) {
    // Hand derivation: [J_j, F_k + d_k] - i eps_jkl (F_l + d_l) = -i (L_j d_k + eps_jkl d_l + d_k j_j).
    const int m = 2;
    const RationalFn c = RationalFn(1);  // m / 2
    const RationalFn p0 = RationalFn::p0(), p1 = RationalFn::p(1), p2 = RationalFn::p(2), p3 = RationalFn::p(3);
    const RationalFn rho2 = p1 * p1 + p2 * p2;
    // d_k j_j with j_1 = c p1 p0 / rho^2, j_2 = c p2 p0 / rho^2, j_3 = 0, differentiated by hand.
    auto djj = [&](int j, int k) -> RationalFn {
        if (j == 3) return {};
        const RationalFn& pj = j == 1 ? p1 : p2;
        if (k == 3) return c * pj * p3 / (p0 * rho2);
        const RationalFn& pk = k == 1 ? p1 : p2;
        RationalFn v = c * pj * pk / (p0 * rho2) - RationalFn(2) * c * pj * p0 * pk / (rho2 * rho2);
        if (j == k) v += c * p0 / rho2;
        return v;
    };
    auto derived = lemma71_derived(m);
    ASSERT_EQ(derived.equations.size(), 9u);
    for (const auto& e : derived.equations) {
        int j = e.name[1] - '0', k = e.name[4] - '0';
        EXPECT_EQ(e.rhs, RationalFn(I) * djj(j, k)) << e.name;
    }
}

TEST(ShiftSystem, PrintedEquationsAgainstDerivation) {
    auto derived = lemma71_derived(2);
    auto printed = compare_systems(lemma71_system(2, D8Form::printed), derived);
    auto corrected = compare_systems(lemma71_system(2, D8Form::corrected), derived);
    ASSERT_EQ(printed.size(), 9u);
    EXPECT_TRUE(printed[7].derived.empty());
    for (const auto& e : corrected) {
        EXPECT_FALSE(e.derived.empty()) << e.stated;
        EXPECT_EQ(e.factor, "-i") << e.stated;
    }
    // Only the homogeneous equations agree on the right-hand side.
    for (const auto& e : corrected) {
        bool homogeneous = e.stated == "d.2" || e.stated == "d.6" || e.stated == "d.8";
        EXPECT_EQ(e.rhs_match, homogeneous) << e.stated << " " << e.rhs_difference;
    }
}

TEST(ShiftSystem, WitnessSolvesDerivedButNotCommuting) {
    const int m = 2;
    std::vector<RationalFn> d;
    for (int j = 1; j <= 3; ++j) d.push_back(helicity_k(m, j) / RationalFn::p0());
    for (const auto& r : lemma71_derived(m).evaluate(d)) EXPECT_TRUE(r.is_zero());
    auto comm = lemma71_derived(m, true);
    auto vals = comm.evaluate(d);
    // curl of d: (d1 d2 - d2 d1) = -(m/2) p3 / p0^3
    const RationalFn p0 = RationalFn::p0();
    for (std::size_t i = 0; i < comm.equations.size(); ++i)
        if (comm.equations[i].name == "Q1,Q2") EXPECT_EQ(vals[i], RationalFn(-I) * RationalFn::p(3) / (p0 * p0 * p0));
}

TEST(ShiftResidual, ZeroFieldAndSources) {
    GridParams gp = small_grid();
    MomentumGrid grid(gp);
    const int n = grid.n();
    GridWavefunction zero(grid, 3, IndexBox{{0, 0, 0}, {n, n, n}});
    EXPECT_EQ(lemma71_residual(zero, 0).total, 0.0);
    // d = 0, m = 2: residual is the weighted norm of the sources, by direct quadrature.
    auto ds = discretize(lemma71_system(2), gp);
    double sq = 0.0;
    for (std::size_t q = 0; q < ds.equation_nodes.size(); ++q) {
        const auto& nd = ds.equation_nodes[q];
        double x = grid.coord(nd[0]), y = grid.coord(nd[1]), z = grid.coord(nd[2]);
        double r2 = x * x + y * y, p0 = std::sqrt(r2 + z * z), w2 = gp.h * gp.h * gp.h / p0;
        double mixed = p0 * x * y / (r2 * r2) - x * y / (p0 * r2);
        double src[9] = {y * z / (p0 * r2), 0.0, -mixed, -mixed, -(p0 * x * x / (r2 * r2) - p0 / r2 - x * x / (p0 * r2)), 0.0,
                         -(p0 * y * y / (r2 * r2) - p0 / r2 - y * y / (p0 * r2)), 0.0, z * x / (p0 * r2)};
        for (double s : src) sq += w2 * s * s;
    }
    EXPECT_NEAR(lemma71_residual(zero, 2).total, std::sqrt(sq), 1e-12 * std::sqrt(sq));
}

TEST(ShiftResidual, LinearInDAffineInM) {
    GridParams gp = small_grid();
    MomentumGrid grid(gp);
    auto ds = discretize(lemma71_system(0), gp);
    auto d2 = discretize(lemma71_system(2), gp);
    auto d4 = discretize(lemma71_system(4), gp);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    Eigen::VectorXcd x(ds.a.cols()), y(ds.a.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x[i] = nd(rng);
        y[i] = nd(rng);
    }
    // m = 0: homogeneous, so residual(eps x) = eps residual(x)
    double base = residual_norms(ds, x).total;
    for (double eps : {1e-3, 0.5, 7.0}) EXPECT_NEAR(residual_norms(ds, eps * x).total, eps * base, 1e-12 * eps * base);
    // Affine in m: r(x, 4) - r(x, 2) = r(0, 4) - r(0, 2) = b(2) - b(4) and b(4) = 2 b(2).
    EXPECT_LT((d4.b - 2.0 * d2.b).norm(), 1e-12 * d4.b.norm());
    Eigen::VectorXcd lin = (d2.a * (x + 2.0 * y)) - (d2.a * x + 2.0 * (d2.a * y));
    EXPECT_LT(lin.norm(), 1e-12 * (d2.a * x).norm());
}

TEST(ShiftResidual, RejectsValuesOnExcludedNodes) {
    MomentumGrid grid(small_grid());
    const int n = grid.n();
    GridWavefunction d(grid, 3, IndexBox{{0, 0, 0}, {n, n, n}});
    d.ref(0, n / 2, n / 2, n / 2) = 1.0;  // next to the origin
    ASSERT_TRUE(grid.excluded(n / 2, n / 2, n / 2));
    EXPECT_THROW(lemma71_residual(d, 2), std::domain_error);
}

TEST(Solvers, LeastSquaresMatchesDenseOracle) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> u;
    const int rows = 60, cols = 25;
    Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (u(rng) < 0.2) dense(r, c) = cplx(nd(rng), nd(rng));
    Eigen::VectorXcd b(rows);
    for (int r = 0; r < rows; ++r) b[r] = cplx(nd(rng), nd(rng));
    SparseMatrix a = dense.sparseView();
    SolveOptions o;
    o.tolerance = 1e-13;
    auto res = solve_least_squares(a, b, o);
    Eigen::VectorXcd x = dense.completeOrthogonalDecomposition().solve(b);
    double oracle = (dense * x - b).norm() / b.norm();
    EXPECT_TRUE(res.converged);
    EXPECT_NEAR(res.residual, oracle, 1e-9);
}

TEST(Solvers, SingularValuesMatchDenseOracle) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    const int rows = 80, cols = 30;
    Eigen::MatrixXcd dense(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) dense(r, c) = cplx(nd(rng), nd(rng));
    SparseMatrix a = dense.sparseView();
    SolveOptions o;
    o.max_iterations = 200;
    auto sv = extreme_singular_values(a, o);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(dense);
    EXPECT_NEAR(sv.sigma_max, svd.singularValues()[0], 1e-8 * svd.singularValues()[0]);
    EXPECT_NEAR(sv.sigma_min, svd.singularValues()[cols - 1], 1e-6 * svd.singularValues()[0]);
}

TEST(Solvers, SingularValuesOnClusteredSpectrum) {
    // Long runs without reorthogonalization produce duplicate Ritz values.
    const int n = 400;
    std::vector<Eigen::Triplet<cplx>> trip;
    for (int i = 0; i < n; ++i) {
        double s = i == 0 ? 1.0 : (i < 300 ? 50.0 + 1e-5 * i : 100.0 + 0.01 * (i - 300));
        trip.emplace_back(i, i, s);
    }
    SparseMatrix a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    SolveOptions o;
    o.max_iterations = 1500;
    auto sv = extreme_singular_values(a, o);
    EXPECT_NEAR(sv.sigma_min, 1.0, 1e-6);
    EXPECT_NEAR(sv.sigma_max, 100.99, 1e-4);
}

TEST(Certificate, HomogeneousIsSolvable) {
    auto c = certify_no_solution(lemma71_system(0), 0, small_grid());
    EXPECT_EQ(c.verdict, "solvable");
    EXPECT_EQ(c.r_star, 0.0);
}

TEST(Certificate, PrintedSystemIsInconsistent) {
    GridParams gp = small_grid();
    auto c = certify_no_solution(lemma71_system(2), 2, gp);
    EXPECT_EQ(c.verdict, "inconsistent");
    ASSERT_EQ(c.runs.size(), 2u);
    EXPECT_NEAR(c.runs[1].h, gp.h / 2.0, 0.0);
    for (const auto& r : c.runs) {
        EXPECT_GT(r.bound, 0.0);
        EXPECT_LE(r.bound, r.value);
    }
    auto j = c.to_json();
    for (const char* k : {"system", "m", "grid", "r_star", "refinement_ratio", "verdict"}) EXPECT_TRUE(j.contains(k)) << k;
}

TEST(Certificate, MirrorHelicityGivesSameResidual) {
    GridParams gp = small_grid();
    auto d2 = discretize(lemma71_system(2), gp);
    auto dm = discretize(lemma71_system(-2), gp);
    SolveOptions o;
    o.max_iterations = 300;
    double a = solve_least_squares(d2.a, d2.b, o).residual, b = solve_least_squares(dm.a, dm.b, o).residual;
    EXPECT_NEAR(a, b, 1e-8 * a);
}

TEST(Certificate, AddingEquationsNeverLowersTheMinimum) {
    GridParams gp;
    gp.half_width = 1.0;
    gp.h = 0.25;
    auto full = lemma71_system(2);
    auto part = full.subset({0, 1, 2, 3, 4});
    SolveOptions o;
    o.max_iterations = 20000;
    o.tolerance = 1e-12;
    auto df = discretize(full, gp);
    auto dp = discretize(part, gp);
    ASSERT_EQ(df.a.cols(), dp.a.cols());
    double rf = solve_least_squares(df.a, df.b, o).residual * df.b.norm();
    double rp = solve_least_squares(dp.a, dp.b, o).residual * dp.b.norm();
    EXPECT_LE(rp, rf * (1.0 + 1e-9));
}

TEST(Certificate, UnitaryTauObstruction) {
    GridParams gp;
    gp.h = 0.25;
    auto c = certify_trivial_kernel(unitary_tau_system(2), 2, gp);
    EXPECT_EQ(c.verdict, "obstruction");
    EXPECT_GT(c.runs.back().value, c.runs.front().value * 0.8);
}

TEST(Certificate, ParityHasConstantSolution) {
    auto s = parity_system(2);
    for (const auto& r : s.evaluate({RationalFn(1), RationalFn(1)})) EXPECT_TRUE(r.is_zero());
    GridParams gp;
    gp.h = 0.25;
    EXPECT_EQ(certify_trivial_kernel(s, 2, gp).verdict, "nontrivial solution");
    EXPECT_THROW(certify_trivial_kernel(lemma71_system(2), 2, gp), std::invalid_argument);
}

TEST(Zeta, ZeroField) {
    MomentumGrid grid(small_grid());
    const int n = grid.n();
    GridWavefunction zero(grid, 3, IndexBox{{0, 0, 0}, {n, n, n}});
    auto z = zeta_reduction_check(zero, 0);
    for (double r : z.residual) EXPECT_EQ(r, 0.0);
}

TEST(Zeta, AngularDerivativeOfSmoothField) {
    // d = (p2^2, p1 p3, p1 + p3): zeta = p1 p2^2 + p1 p2 p3 + p1 p3 + p3^2, and
    // L3 zeta = p1 d2(zeta) - p2 d1(zeta) computed by hand.
    GridParams gp = small_grid();
    gp.h = 1.0 / 16.0;
    MomentumGrid grid(gp);
    const int n = grid.n();
    GridWavefunction d(grid, 3, IndexBox{{0, 0, 0}, {n, n, n}});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                if (grid.excluded(i, j, k)) continue;
                double x = grid.coord(i), y = grid.coord(j), z = grid.coord(k);
                d.ref(0, i, j, k) = y * y;
                d.ref(1, i, j, k) = x * z;
                d.ref(2, i, j, k) = x + z;
            }
    auto res = zeta_reduction_check(d, 0);
    auto ds = discretize(lemma71_system(0), gp);
    double sq = 0.0;
    for (std::size_t q = 0; q < ds.equation_nodes.size(); ++q) {
        const auto& nd = ds.equation_nodes[q];
        double x = grid.coord(nd[0]), y = grid.coord(nd[1]), z = grid.coord(nd[2]);
        double dz1 = y * y + y * z + z, dz2 = 2 * x * y + x * z;
        double l3 = x * dz2 - y * dz1;
        sq += ds.weight[q] * ds.weight[q] * l3 * l3;
    }
    // Second-order differences are exact on quadratics except the cubic term p1 p2^2.
    EXPECT_NEAR(res.residual[2], std::sqrt(sq), 0.02 * std::sqrt(sq));
}

TEST(Zeta, MinimizerStaysAboveBound) {
    GridParams gp = small_grid();
    auto ds = discretize(lemma71_system(2), gp);
    auto ls = solve_least_squares(ds.a, ds.b);
    GridWavefunction d = ds.unpack(ls.x);
    auto z = zeta_reduction_check(d, 2);
    EXPECT_GT(z.lower_bound, 0.0);
    EXPECT_GE(z.total, z.lower_bound * (1.0 - 1e-12));
    EXPECT_GT(z.constant, 0.0);
}

TEST(PositionHarness, SmallGrid) {
    auto r = prop71_harness(2, small_grid());
    EXPECT_EQ(r.d8_form, D8Form::corrected);
    EXPECT_TRUE(r.witness_solves_derived);
    EXPECT_EQ(r.stated.verdict, "inconsistent");
    EXPECT_EQ(r.derived.verdict, "solvable");
    EXPECT_EQ(r.derived_commuting.verdict, "inconsistent");
    EXPECT_EQ(r.verdict, "no position operator");
    EXPECT_EQ(r.to_json()["schema"], 1);
}
