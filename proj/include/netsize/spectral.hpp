#pragma once

#include <Eigen/Dense>

namespace netsize {

/// Eigen-structure of a component Laplacian: ascending eigenvalues, the
/// orthonormal basis R of the non-consensus eigenspace (columns 2..n), and
/// the diagonal of the reduced Laplacian. R is unique only up to sign and
/// rotation within repeated eigenspaces; downstream code must only consume
/// quantities invariant to that choice.
struct SpectralData {
    Eigen::MatrixXd laplacian;    // n x n, symmetric PSD
    Eigen::VectorXd eigenvalues;  // ascending
    double lambda2 = 0.0;         // NaN when n == 1
    Eigen::MatrixXd r_basis;      // n x (n-1)
    Eigen::VectorXd lambda_diag;  // n-1 entries, eigenvalues 2..n
    double basis_residual = 0.0;  // max of |1'R|, |R'R - I|, |R'LR - diag|
    int zero_eigenvalue_count = 0;

    double spectral_norm() const {
        return eigenvalues.size() ? eigenvalues(eigenvalues.size() - 1) : 0.0;
    }
};

/// Scale-aware cutoff below which a Laplacian eigenvalue counts as zero.
double zero_eigenvalue_threshold(int n);

/// Dense symmetric eigendecomposition of a Laplacian. Throws NumericalError
/// if the solver does not converge or the basis residual is implausibly
/// large for a symmetric solve.
SpectralData spectral(const Eigen::MatrixXd& laplacian);

} // namespace netsize
