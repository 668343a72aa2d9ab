#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "speclab/fields.hpp"
#include "speclab/spectral_props.hpp"

namespace speclab::spectral {

// consecutive coupling integrals int_Omega W phi_k phi_{k+1}, k = 1..n-1,
// in the delivered eigenbasis: exact separable quadrature for polynomial W
// on closed-form systems, consistent P1 element products on meshes
std::vector<double> coupling_integrals(const EigenSystem& sys, const ScalarField& W, int n);

struct ControllabilityReport {
    int n = 0;
    int height = 0;
    PropertyReport nonresonance;    // height-H relation search over the first n modes
    std::vector<double> couplings;  // the n-1 consecutive coupling integrals
    double coupling_tol = 0.0;      // 1e-8 * sup |W|
    std::string verdict;            // conditions-met | coupling-fails(k) | resonance-found
    int failed_coupling = 0;        // 1-based k of the first vanishing coupling, 0 if none
    std::string w_descriptor;
    std::string caveat;
};

// bilinear-control precheck: the first n eigenvalues admit no integer relation
// up to the given height and no consecutive coupling of W vanishes. A passing
// verdict is necessary evidence for the genuinely infinite conditions, never a
// proof; the report carries that caveat verbatim. A vanishing coupling is
// decisive on its own, so it takes precedence over a found resonance.
ControllabilityReport controllability_precheck(const EigenSystem& sys, const ScalarField& W,
                                               int n, int height);

struct PotentialSearch {
    ScalarField W;
    ControllabilityReport report;
    int attempts = 0;        // number of candidates tried, including the winner
    std::uint64_t seed = 0;
};

// samples random polynomials (per-axis degree <= 2, coefficients uniform in
// [-1,1]) until the precheck passes. The attempt count is the point: passing
// potentials should be plentiful when the spectrum itself cooperates. Fails
// with work_budget when the spectrum is resonant (no W can help) or the
// attempt budget runs out.
PotentialSearch find_admissible_potential(const EigenSystem& sys, int n, int height,
                                          std::uint64_t seed, int max_attempts = 200);

} // namespace speclab::spectral
