#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "speclab/eigensolver.hpp"

namespace speclab::spectral {

struct RationalRelation {
    std::vector<std::int64_t> q;  // not all zero, first nonzero entry positive
    double residual = 0.0;        // |sum_l q_l lambda_l|
    int height = 0;               // max |q_l|
    bool exact_zero = false;      // established by exact surd arithmetic
    bool verified = true;         // false for lattice-reduction proposals beyond the height
};

enum class Verdict { holds, fails, inconclusive };
std::string verdict_name(Verdict v);

struct PropertyReport {
    std::string property;  // simplicity | squared_independence | nonresonance
    int n = 0;
    Verdict verdict = Verdict::inconclusive;
    std::string witness;  // summary of the deciding evidence
    double tolerance = 0.0;
    bool exact = false;  // verdict backed by exact arithmetic

    // simplicity
    double min_gap = 0.0;  // smallest relative consecutive gap
    int gap_index = 0;     // 1-based left index of that pair

    // squared independence search
    double best_det = 0.0;
    double det_tol = 0.0;
    std::vector<PointXd> points;  // best witness tuple
    std::uint64_t seed = 0;
    int trials = 0;

    // nonresonance
    int height = 0;
    std::vector<RationalRelation> relations;
};

// holds iff every consecutive relative gap (lambda_{k+1}-lambda_k)/(1+lambda_k)
// exceeds gap_tol; exact orthotope metadata turns equality checks exact
PropertyReport check_simplicity(const EigenSystem& sys, double gap_tol = 1e-6);

// det of M_ij = phi_j(x_i)^2; rows are canonically sorted before elimination so
// swapping two points flips the sign bitwise and duplicate points give exactly 0
double squared_independence_det(const EigenSystem& sys, const std::vector<PointXd>& points);

// low-discrepancy search for a point tuple with |det| above the scale-aware
// tolerance 1e-8 * prod(row norms); inconclusive when none found (absence of a
// witness does not prove dependence)
PropertyReport squared_independence_search(const EigenSystem& sys, int trials,
                                           std::uint64_t seed);

struct GramCertificate {
    Eigen::MatrixXd G;  // G_ij = integral over omega of phi_i^2 phi_j^2
    double min_eigenvalue = 0.0;
    double tolerance = 0.0;  // quadrature accuracy estimate
};

// closed-form product integration on orthotopes (full domain only); cellwise
// midpoint quadrature on meshes, restricted by the optional cell mask
GramCertificate squared_gram(const EigenSystem& sys,
                             const std::vector<char>* cell_mask = nullptr);

struct ResonanceOptions {
    double residual_tol = 1e-7;  // relative: |q . lambda| <= tol * ||lambda||_2 * ||q||_1
    bool lll_pass = false;       // propose (unverified) candidates beyond the height
    int max_relations = 64;
};

// exhaustive search over integer vectors with 0 < max|q| <= height, one
// representative per sign pair; fails with every relation found (sorted by
// residual, then height, then lexicographic q)
PropertyReport nonresonance_search(const std::vector<double>& lambdas, int height,
                                   const ResonanceOptions& opts = {});
// first k modes of a system; exact surd arithmetic when the orthotope carries it
PropertyReport nonresonance_search(const EigenSystem& sys, int k, int height,
                                   const ResonanceOptions& opts = {});

struct Functional {
    int arity = 0;
    std::function<double(const std::vector<double>&)> f;
    std::string descriptor;
};

Functional projection_functional(int n, int arg_index);  // 1-based argument selector
Functional det_squares_functional(int n);
Functional lambda_combination_functional(int n, std::vector<double> q);

// evaluates F(phi_1(x_1),...,phi_n(x_1),...,phi_1(x_n),...,phi_n(x_n),
//             lambda_1,...,lambda_n); a nonzero value witnesses P_n
double generic_Fn(const EigenSystem& sys, const std::vector<PointXd>& points,
                  const Functional& fn);

namespace detail {
// determinant after canonical row sort; the parity of the sorting permutation
// keeps the value exactly antisymmetric under row exchanges
double row_sorted_det(Eigen::MatrixXd M);
} // namespace detail

} // namespace speclab::spectral
