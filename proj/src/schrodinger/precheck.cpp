#include <cmath>
#include <random>
#include <sstream>

#include "speclab/errors.hpp"
#include "speclab/quadrature.hpp"
#include "speclab/schrodinger.hpp"

namespace speclab::spectral {

namespace {

constexpr double kPi = 3.14159265358979323846;

const char* kCaveat =
    "finite evidence only: checks the first n modes against integer relations up to the "
    "given height and the n-1 consecutive couplings; the underlying conditions quantify "
    "over the whole spectrum";

double orthotope_coupling(const OrthotopeBasis& ob, const ScalarField& W, int k) {
    const geom::Orthotope& dom = ob.domain;
    const OrthotopeMode& lo = ob.modes[static_cast<std::size_t>(k - 1)];
    const OrthotopeMode& hi = ob.modes[static_cast<std::size_t>(k)];
    double sum = 0.0;
    for (const auto& term : W.terms) {
        require(static_cast<int>(term.powers.size()) <= dom.dim(), ErrorCode::invalid_parameter,
                "potential term has more variables than the domain");
        double prod = term.c;
        for (int i = 0; i < dom.dim(); ++i) {
            const int p = i < static_cast<int>(term.powers.size())
                              ? term.powers[static_cast<std::size_t>(i)]
                              : 0;
            const double mu = dom.mu[static_cast<std::size_t>(i)];
            prod *= quad::integral_xp_sin_sin(p, lo.K[static_cast<std::size_t>(i)] / mu,
                                              hi.K[static_cast<std::size_t>(i)] / mu, 0.0,
                                              mu * kPi);
        }
        sum += prod;
    }
    return lo.norm_constant * hi.norm_constant * sum;
}

double mesh_coupling(const MeshBasis& mb, const ScalarField& W, int k) {
    const geom::MeshedDomain& dom = mb.mesh;
    double sum = 0.0;
    for (int t = 0; t < dom.num_cells(); ++t) {
        const auto& tri = dom.triangles[static_cast<std::size_t>(t)];
        const double u0 = mb.nodal(tri[0], k - 1);
        const double u1 = mb.nodal(tri[1], k - 1);
        const double u2 = mb.nodal(tri[2], k - 1);
        const double v0 = mb.nodal(tri[0], k);
        const double v1 = mb.nodal(tri[1], k);
        const double v2 = mb.nodal(tri[2], k);
        const geom::Point2 c = dom.centroid(t);
        const double w = W.is_poly() ? W({c.x, c.y})
                                     : W.cell_values[static_cast<std::size_t>(t)];
        sum += w * dom.cell_area[static_cast<std::size_t>(t)] / 12.0 *
               (u0 * v0 + u1 * v1 + u2 * v2 + (u0 + u1 + u2) * (v0 + v1 + v2));
    }
    return sum;
}

} // namespace

std::vector<double> coupling_integrals(const EigenSystem& sys, const ScalarField& W, int n) {
    require(n >= 2, ErrorCode::invalid_parameter, "coupling chain needs at least two modes");
    require(n <= sys.n(), ErrorCode::invalid_parameter,
            "coupling chain needs more modes than the system holds");

    std::vector<double> out(static_cast<std::size_t>(n - 1));
    if (const OrthotopeBasis* ob = sys.orthotope()) {
        require(W.is_poly(), ErrorCode::invalid_parameter,
                "cell-sampled potentials need a mesh system");
        for (int k = 1; k < n; ++k)
            out[static_cast<std::size_t>(k - 1)] = orthotope_coupling(*ob, W, k);
        return out;
    }

    const MeshBasis& mb = *sys.mesh();
    if (!W.is_poly())
        require(W.cell_values.size() == mb.mesh.triangles.size(), ErrorCode::invalid_parameter,
                "cell value count does not match the mesh");
    for (int k = 1; k < n; ++k)
        out[static_cast<std::size_t>(k - 1)] = mesh_coupling(mb, W, k);
    return out;
}

ControllabilityReport controllability_precheck(const EigenSystem& sys, const ScalarField& W,
                                               int n, int height) {
    require(height >= 1, ErrorCode::invalid_parameter, "relation height must be positive");

    ControllabilityReport rep;
    rep.n = n;
    rep.height = height;
    rep.couplings = coupling_integrals(sys, W, n);
    rep.w_descriptor = W.descriptor;
    rep.caveat = kCaveat;

    const double sup = sys.orthotope() ? sup_norm(W, sys.orthotope()->domain)
                                       : sup_norm(W, sys.mesh()->mesh);
    rep.coupling_tol = 1e-8 * sup;

    rep.nonresonance = nonresonance_search(sys, n, height);

    for (int k = 1; k < n; ++k) {
        if (std::abs(rep.couplings[static_cast<std::size_t>(k - 1)]) <= rep.coupling_tol) {
            rep.failed_coupling = k;
            rep.verdict = "coupling-fails(" + std::to_string(k) + ")";
            return rep;
        }
    }
    rep.verdict = rep.nonresonance.verdict == Verdict::holds ? "conditions-met"
                                                             : "resonance-found";
    return rep;
}

PotentialSearch find_admissible_potential(const EigenSystem& sys, int n, int height,
                                          std::uint64_t seed, int max_attempts) {
    require(max_attempts >= 1, ErrorCode::invalid_parameter, "attempt budget must be positive");
    require(n >= 2 && n <= sys.n(), ErrorCode::invalid_parameter,
            "mode count out of range for the system");

    // the relation search does not depend on W; a resonant spectrum dooms
    // every candidate, so say so instead of burning the budget
    require(nonresonance_search(sys, n, height).verdict == Verdict::holds,
            ErrorCode::work_budget,
            "spectrum admits an integer relation up to the height; no potential can pass");

    const int dim = sys.orthotope() ? sys.orthotope()->domain.dim() : 2;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);

    PotentialSearch out;
    out.seed = seed;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        // all monomials with per-axis degree <= 2
        std::vector<ScalarField::Term> terms;
        std::vector<int> powers(static_cast<std::size_t>(dim), 0);
        for (;;) {
            terms.push_back({coeff(rng), powers});
            int d = 0;
            while (d < dim && powers[static_cast<std::size_t>(d)] == 2)
                powers[static_cast<std::size_t>(d++)] = 0;
            if (d == dim) break;
            ++powers[static_cast<std::size_t>(d)];
        }
        std::ostringstream name;
        name << "random-poly(seed=" << seed << ", attempt=" << attempt << ")";
        ScalarField W = poly_field(std::move(terms), name.str());

        ControllabilityReport rep = controllability_precheck(sys, W, n, height);
        if (rep.verdict == "conditions-met") {
            out.W = std::move(W);
            out.report = std::move(rep);
            out.attempts = attempt;
            return out;
        }
    }
    fail(ErrorCode::work_budget, "no admissible potential within " +
                                     std::to_string(max_attempts) + " attempts");
}

} // namespace speclab::spectral
