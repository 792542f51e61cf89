#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace gridfuse {

using MaskMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// U diag(max(sigma_i - tau, 0)) V^T.
Eigen::MatrixXd svd_soft_threshold(const Eigen::MatrixXd& M, double tau);

/// Same, also returning the thresholded singular values.
Eigen::MatrixXd svd_soft_threshold(const Eigen::MatrixXd& M, double tau, Eigen::VectorXd& shrunk);

double nuclear_norm(const Eigen::MatrixXd& M);

struct CompletionConfig {
    /// Nuclear-norm weight in the scaled space. Unset: 1e-3 * ||P_Omega(X)||_F.
    std::optional<double> mu;
    int max_iters = 500;
    double tol = 1e-6;
    double step = 1.0;
    /// Divide each column by its largest observed magnitude (floor 1e-6)
    /// before solving, and undo it afterwards.
    bool scale_columns = true;

    void validate() const;
};

struct CompletionResult {
    Eigen::MatrixXd completed;        // native units
    std::vector<double> objective;    // F(Z_k) in the scaled space, k = 0..iterations
    int iterations = 0;
    bool converged = false;
    double mu = 0.0;                  // effective weight used
    Eigen::VectorXd column_scale;
};

/// Proximal-gradient soft-impute on
///   F(Z) = 1/2 ||P_Omega(Z - X)||_F^2 + mu ||Z||_*,
///   Z <- svd_soft_threshold(Z - step P_Omega(Z - X), step mu),
/// starting from the zero-filled observations. Stops when
/// ||Z_{k+1} - Z_k||_F / max(1, ||Z_k||_F) < tol. On reaching max_iters the
/// lowest-objective iterate is returned with converged = false.
///
/// Entries where `mask` is false are never read. Throws NoDataError when
/// nothing is observed.
CompletionResult complete_matrix(const Eigen::MatrixXd& values, const MaskMatrix& mask,
                                 const CompletionConfig& config = {});

}  // namespace gridfuse
