#include "speclab/damping.hpp"

#include <Eigen/Eigenvalues>

#include "speclab/errors.hpp"

namespace speclab::spectral {

double modal_decay_rate(const EigenSystem& sys, const DampingDensity& density, double k_damp,
                        int M) {
    require(M >= 1 && M <= sys.n(), ErrorCode::invalid_parameter,
            "modal_decay_rate: mode count out of range");
    require(k_damp >= 0.0, ErrorCode::invalid_parameter,
            "modal_decay_rate: negative damping gain");
    if (k_damp == 0.0) {
        density.validate();
        return 0.0;  // undamped pencil s^2 + lambda: eigenvalues +-i sqrt(lambda)
    }

    const Eigen::MatrixXd B = detail::damped_gram(sys, density, M);
    // companion form of s^2 I + 2 k s B + Lambda acting on (x, s x)
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * M, 2 * M);
    A.topRightCorner(M, M).setIdentity();
    for (int i = 0; i < M; ++i) A(M + i, i) = -sys.lambdas[i];
    A.bottomRightCorner(M, M) = -2.0 * k_damp * B;

    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    require(es.info() == Eigen::Success, ErrorCode::solver_no_convergence,
            "modal_decay_rate: companion eigensolve did not converge");
    return -es.eigenvalues().real().maxCoeff();
}

} // namespace speclab::spectral
