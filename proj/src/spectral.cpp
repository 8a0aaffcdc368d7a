#include "netsize/spectral.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "netsize/errors.hpp"

namespace netsize {

double zero_eigenvalue_threshold(int n) {
    return 1e-9 * static_cast<double>(n);
}

SpectralData spectral(const Eigen::MatrixXd& laplacian) {
    const auto n = laplacian.rows();
    if (n == 0 || laplacian.cols() != n)
        throw NumericalError("spectral: matrix must be square and nonempty");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
    if (solver.info() != Eigen::Success)
        throw NumericalError("spectral: eigen solver did not converge on " +
                             std::to_string(n) + "x" + std::to_string(n) +
                             " Laplacian");

    SpectralData sd;
    sd.laplacian = laplacian;
    sd.eigenvalues = solver.eigenvalues();
    sd.r_basis = solver.eigenvectors().rightCols(n - 1);
    sd.lambda_diag = sd.eigenvalues.tail(n - 1);
    sd.lambda2 = n >= 2 ? sd.eigenvalues(1)
                        : std::numeric_limits<double>::quiet_NaN();

    const double thr = zero_eigenvalue_threshold(static_cast<int>(n));
    sd.zero_eigenvalue_count = 0;
    for (Eigen::Index k = 0; k < n; ++k)
        if (sd.eigenvalues(k) <= thr) ++sd.zero_eigenvalue_count;

    if (n >= 2) {
        const double r_ones =
            (Eigen::RowVectorXd::Ones(n) * sd.r_basis).cwiseAbs().maxCoeff();
        const double r_ortho =
            (sd.r_basis.transpose() * sd.r_basis -
             Eigen::MatrixXd::Identity(n - 1, n - 1)).cwiseAbs().maxCoeff();
        const double r_diag =
            (sd.r_basis.transpose() * laplacian * sd.r_basis -
             Eigen::MatrixXd(sd.lambda_diag.asDiagonal())).cwiseAbs().maxCoeff();
        sd.basis_residual = std::max({r_ones, r_ortho, r_diag});
    } else {
        sd.basis_residual = 0.0;
    }

    // A symmetric solve that produced residuals this large is broken.
    if (!(sd.basis_residual <= 1e-6 * static_cast<double>(n)))
        throw NumericalError("spectral: basis residual " +
                             std::to_string(sd.basis_residual) +
                             " too large, eigen solve unreliable");
    return sd;
}

} // namespace netsize
