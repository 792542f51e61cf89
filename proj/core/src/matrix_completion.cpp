#include "gridfuse/matrix_completion.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "gridfuse/error.hpp"

namespace gridfuse {

Eigen::MatrixXd svd_soft_threshold(const Eigen::MatrixXd& M, double tau, Eigen::VectorXd& shrunk) {
    if (!(tau >= 0.0)) throw InvalidArgument("svd_soft_threshold: tau must be >= 0");
    if (!M.allFinite()) throw InvalidArgument("svd_soft_threshold: matrix has non-finite entries");
    if (M.size() == 0) {
        shrunk.resize(0);
        return M;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw NumericalFailure("svd_soft_threshold: SVD did not converge");
    shrunk = (svd.singularValues().array() - tau).cwiseMax(0.0).matrix();
    Eigen::Index rank = 0;
    while (rank < shrunk.size() && shrunk[rank] > 0.0) ++rank;
    if (rank == 0) return Eigen::MatrixXd::Zero(M.rows(), M.cols());
    return svd.matrixU().leftCols(rank) * shrunk.head(rank).asDiagonal() *
           svd.matrixV().leftCols(rank).transpose();
}

Eigen::MatrixXd svd_soft_threshold(const Eigen::MatrixXd& M, double tau) {
    Eigen::VectorXd unused;
    return svd_soft_threshold(M, tau, unused);
}

double nuclear_norm(const Eigen::MatrixXd& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues().sum();
}

void CompletionConfig::validate() const {
    if (mu && !(*mu > 0.0)) throw InvalidArgument("CompletionConfig: mu must be > 0");
    if (max_iters <= 0) throw InvalidArgument("CompletionConfig: max_iters must be positive");
    if (!(tol > 0.0)) throw InvalidArgument("CompletionConfig: tol must be > 0");
    if (!(step > 0.0 && step <= 1.0)) throw InvalidArgument("CompletionConfig: step must lie in (0, 1]");
}

namespace {

double residual_term(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& X, const Eigen::MatrixXd& W) {
    return 0.5 * (W.cwiseProduct(Z - X)).squaredNorm();
}

}  // namespace

CompletionResult complete_matrix(const Eigen::MatrixXd& values, const MaskMatrix& mask,
                                 const CompletionConfig& config) {
    config.validate();
    if (values.rows() != mask.rows() || values.cols() != mask.cols())
        throw InvalidArgument("complete_matrix: values and mask shapes differ");
    const Eigen::Index rows = values.rows(), cols = values.cols();
    if (mask.count() == 0) throw NoDataError("complete_matrix: no observed entries");

    CompletionResult out;
    out.column_scale = Eigen::VectorXd::Ones(cols);
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(rows, cols);  // 0/1 observation weights
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(rows, cols);  // zero-filled, scaled
    for (Eigen::Index j = 0; j < cols; ++j) {
        double scale = 0.0;
        bool any = false;
        for (Eigen::Index i = 0; i < rows; ++i)
            if (mask(i, j)) {
                if (!std::isfinite(values(i, j)))
                    throw InvalidArgument("complete_matrix: observed entry is not finite");
                scale = std::max(scale, std::abs(values(i, j)));
                any = true;
            }
        if (config.scale_columns && any) out.column_scale[j] = std::max(scale, 1e-6);
        for (Eigen::Index i = 0; i < rows; ++i)
            if (mask(i, j)) {
                W(i, j) = 1.0;
                X(i, j) = values(i, j) / out.column_scale[j];
            }
    }

    out.mu = config.mu ? *config.mu : 1e-3 * X.norm();
    if (!(out.mu > 0.0)) out.mu = 1e-12;
    const double tau = config.step * out.mu;

    Eigen::MatrixXd Z = X;
    double f = residual_term(Z, X, W) + out.mu * nuclear_norm(Z);
    out.objective.push_back(f);
    Eigen::MatrixXd best = Z;
    double best_f = f;

    Eigen::VectorXd sv;
    for (int k = 0; k < config.max_iters; ++k) {
        const Eigen::MatrixXd Y = Z - config.step * W.cwiseProduct(Z - X);
        Eigen::MatrixXd Znew = svd_soft_threshold(Y, tau, sv);
        const double change = (Znew - Z).norm() / std::max(1.0, Z.norm());
        Z = std::move(Znew);
        f = residual_term(Z, X, W) + out.mu * sv.sum();
        out.objective.push_back(f);
        out.iterations = k + 1;
        if (f <= best_f) {
            best_f = f;
            best = Z;
        }
        if (change < config.tol) {
            out.converged = true;
            best = Z;
            break;
        }
    }

    out.completed = best * out.column_scale.asDiagonal();
    return out;
}

}  // namespace gridfuse
