#include <cmath>
#include <limits>

#include "speclab/errors.hpp"
#include "speclab/spectral_props.hpp"

namespace speclab::spectral {

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::fails: return "fails";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

PropertyReport check_simplicity(const EigenSystem& sys, double gap_tol) {
    require(gap_tol > 0, ErrorCode::invalid_parameter, "gap tolerance must be positive");
    PropertyReport r;
    r.property = "simplicity";
    r.n = sys.n();
    r.tolerance = gap_tol;

    const auto* ob = sys.orthotope();
    r.exact = ob != nullptr && ob->domain.has_exact();

    if (sys.n() <= 1) {
        r.verdict = Verdict::holds;
        r.min_gap = std::numeric_limits<double>::infinity();
        r.witness = "single mode, simplicity is vacuous";
        return r;
    }

    r.min_gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k + 1 < sys.n(); ++k) {
        double rel = (sys.lambdas[k + 1] - sys.lambdas[k]) / (1.0 + sys.lambdas[k]);
        if (r.exact) {
            const auto a = exact_lambda(ob->domain, ob->modes[k].K);
            const auto b = exact_lambda(ob->domain, ob->modes[k + 1].K);
            if (*a == *b) rel = 0.0;
        }
        if (rel < r.min_gap) {
            r.min_gap = rel;
            r.gap_index = k + 1;
        }
    }
    r.verdict = r.min_gap > gap_tol ? Verdict::holds : Verdict::fails;
    r.witness = "smallest relative gap " + std::to_string(r.min_gap) + " between modes " +
                std::to_string(r.gap_index) + " and " + std::to_string(r.gap_index + 1);
    return r;
}

} // namespace speclab::spectral
