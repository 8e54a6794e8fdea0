#pragma once

// Catalog of massless terns (U, Pi, T): generators of U plus the discrete
// operators, with the metadata each verification needs.

#include "tern/opalg.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace tern {

enum class TernClass { u, d, s };
enum class Family { irreducible, generators_only, doublet_u, doublet_d, quartet_s };

struct TernSpec {
    TernClass cls = TernClass::u;
    int m = 0;
    std::string combo = "n/a";  // UU, AU, AA or n/a
    int variant = 0;            // +1 / -1 where applicable, 0 otherwise
    Family family = Family::irreducible;

    // "u:m=0", "d:m=2", "s:m=0:UU:+1", "s:m=2:AA:-1", "u-doublet", ...
    static TernSpec parse(const std::string& text);
    std::string to_string() const;
    friend bool operator==(const TernSpec&, const TernSpec&) = default;
};

// A diagonal block of the fiber: offset, energy sign and helicity parameter.
struct BlockInfo {
    int offset = 0;
    int p0_sign = 1;
    int m = 0;  // helicity is m/2
};

struct Expected {
    std::vector<BlockInfo> blocks;
    int pi_square = 0;   // 0 when there is no Pi
    int tau_square = 0;  // 0 when there is no T
    std::optional<ComplexRational> omega;  // computed from Pi T = omega T Pi
};

struct Tern {
    TernSpec spec;
    int dim = 1;
    OperatorExpr p0;
    std::array<OperatorExpr, 3> p;
    std::array<OperatorExpr, 3> j;
    std::array<OperatorExpr, 3> k;
    std::optional<OperatorExpr> pi;
    std::optional<OperatorExpr> tau;
    Expected expected;
    std::vector<std::string> notes;

    bool complete() const { return pi.has_value() && tau.has_value(); }
    // Names P0,P1,P2,P3,J1,J2,J3,K1,K2,K3 in that order.
    std::vector<std::pair<std::string, OperatorExpr>> generators() const;
    const OperatorExpr& generator(const std::string& name) const;
    OperatorExpr& generator(const std::string& name);
};

// Scalar building blocks on a one-component fiber.
RationalFn rho_squared();                     // p1^2 + p2^2
RationalFn helicity_j(int m, int j);          // the extra rotation coefficient
RationalFn helicity_k(int m, int j);          // the extra boost coefficient
OperatorExpr orbital_j(int j);                // -i(p_k d_l - p_l d_k)
OperatorExpr orbital_k(int j);                // i p0 d_j

// Solve Pi T = omega T Pi for a constant omega; nullopt if none exists.
std::optional<ComplexRational> extract_omega(const OperatorExpr& pi, const OperatorExpr& tau);
// Square of an operator if it is c * Id for constant c.
std::optional<ComplexRational> scalar_square(const OperatorExpr& a);

Tern build_irreducible(TernClass cls, int m);
Tern build_s_zero(const std::string& combo, int variant);
Tern build_s_m(int m, int variant);
std::vector<Tern> build_examples();
Tern build_example(Family f);
// Reducible u-class representation with blocks m and -m, no Pi or T.
Tern build_u_pair(int m);
Tern build(const TernSpec& spec);

// Complete terns: u, d, six s with m=0, two per m in 1..max_m, three examples.
std::vector<Tern> catalog(int max_m = 2);

}  // namespace tern
