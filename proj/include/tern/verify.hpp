#pragma once

/**
 * @file verify.hpp
 * @brief Exact verification suites over catalog terns.
 *
 * Every symbolic check passes iff its residual is the zero operator; there
 * are no tolerances here. Numeric checks elsewhere tag themselves as such.
 */

#include "tern/terncat.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tern {

struct Check {
    std::string id;
    bool pass = false;
    std::string residual;  // rendering of the residual, "0" when it vanishes
    bool numeric = false;
    double value = 0.0;    // numeric residual or observed quantity
    double tolerance = 0.0;
};

struct CertificateReport {
    std::string subject;
    std::vector<Check> checks;
    std::map<std::string, std::string> derived_constants;
    std::vector<std::string> notes;

    bool overall() const;
    void add(Check c) { checks.push_back(std::move(c)); }
    void merge(const CertificateReport& other);
    // Sorted by check id for deterministic output.
    nlohmann::json to_json() const;
};

// Residual check helper: pass iff r is the zero operator.
Check symbolic_check(std::string id, const OperatorExpr& r);

// A relation  a b - sign b a == rhs  between operators of a tern.
struct Relation {
    std::string id;
    OperatorExpr a, b;
    int sign = 1;
    OperatorExpr rhs;
    OperatorExpr residual() const;
};

// The 45 commutators among P0, Pj, Jj, Kj.
std::vector<Relation> lie_relations(const Tern& t);
// Pi and T against each generator; signs picked by (anti)linearity. Squares and omega are separate.
std::vector<Relation> discrete_relations(const Tern& t);
Relation mirror_relation(const Tern& t);

CertificateReport check_lie_algebra(const Tern& t);
CertificateReport check_discrete_relations(const Tern& t);

struct HelicityResult {
    std::vector<std::optional<ComplexRational>> per_block;  // nullopt if not a constant
    CertificateReport report;
};
OperatorExpr helicity_operator(const Tern& t);
HelicityResult check_helicity(const Tern& t);

CertificateReport check_mirror(const Tern& t);
CertificateReport check_casimirs(const Tern& t);
CertificateReport check_spectrum_sign(const Tern& t);
// Projection spot check on the s-quartet: F+ = diag(1,0,0,0), F- = T F+ T.
CertificateReport check_block_reduction(const Tern& t);

// Element of the commutant ansatz: one constant matrix per sector
// (sector index = 2*upsilon + kappa).
struct CommutantElement {
    std::array<FiberMatrix, 4> sectors;
    std::string to_string() const;
    bool is_identity_multiple() const;
};

struct CommutantOptions {
    bool include_discrete = true;
    bool self_adjoint = true;
};

struct CommutantResult {
    std::vector<CommutantElement> basis;  // real basis
    bool irreducible = false;             // basis spans {a Id, a real}
    int equations = 0;
    std::string ansatz;
};

CommutantResult commutant_probe(const Tern& t, const CommutantOptions& opts = {});

// All checks applicable to t.
CertificateReport full_report(const Tern& t);

// Test hook: "J3+=p1" adds the coefficient times Id to a generator. The
// coefficient is a product of factors separated by '*': integers, fractions
// a/b, i, p0, p1, p2, p3.
struct Mutation {
    std::string generator;
    RationalFn coefficient;
    std::string text;

    static Mutation parse(const std::string& text);  // throws std::invalid_argument
    void apply(Tern& t) const;
};

}  // namespace tern
