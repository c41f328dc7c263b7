#include "nelsonlab/spectral_operator.hpp"

#include <algorithm>
#include <cmath>

namespace nelson {

SpectralOperator::SpectralOperator(MatrixXcd matrix, std::shared_ptr<const Grid> grid,
                                   std::string label)
    : matrix_(std::move(matrix)), grid_(std::move(grid)), label_(std::move(label)) {
    if (matrix_.rows() != matrix_.cols())
        throw Error(label_ + ": matrix not square");
    const double scale = std::max(1.0, matrix_.norm());
    const double herm = (matrix_ - matrix_.adjoint()).norm() / scale;
    if (herm > 1e-12)
        throw NumericError(label_ + ": hermiticity violation " + std::to_string(herm));
    MatrixXcd sym = 0.5 * (matrix_ + matrix_.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sym);
    if (es.info() != Eigen::Success)
        throw NumericError(label_ + ": eigendecomposition failed");
    vecs_ = es.eigenvectors();
    vals_ = es.eigenvalues();
    verify();
}

SpectralOperator::SpectralOperator(MatrixXcd matrix, MatrixXcd eigenvectors,
                                   VectorXd eigenvalues, std::shared_ptr<const Grid> grid,
                                   std::string label)
    : matrix_(std::move(matrix)), vecs_(std::move(eigenvectors)), vals_(std::move(eigenvalues)),
      grid_(std::move(grid)), label_(std::move(label)) {
    verify();
}

void SpectralOperator::verify() const {
    const long n = matrix_.rows();
    if (vecs_.rows() != n || vecs_.cols() != n || vals_.size() != n)
        throw Error(label_ + ": eigensystem shape mismatch");
    const double ortho = (vecs_.adjoint() * vecs_ - MatrixXcd::Identity(n, n)).norm();
    if (ortho > 1e-10 * std::sqrt(static_cast<double>(n)))
        throw NumericError(label_ + ": eigenvectors not orthonormal, defect " +
                           std::to_string(ortho));
    const double scale = std::max(1.0, matrix_.norm());
    const double recon =
        (vecs_ * vals_.asDiagonal() * vecs_.adjoint() - matrix_).norm() / scale;
    if (recon > 1e-10)
        throw NumericError(label_ + ": eigendecomposition reconstruction defect " +
                           std::to_string(recon));
}

MatrixXcd SpectralOperator::map_matrix(const ScalarMap& f) const {
    VectorXd fv(vals_.size());
    for (long i = 0; i < vals_.size(); ++i) {
        fv(i) = f(vals_(i));
        if (!std::isfinite(fv(i)))
            throw NumericError(label_ + ": scalar map not finite at eigenvalue " +
                               std::to_string(vals_(i)));
    }
    return vecs_ * fv.asDiagonal() * vecs_.adjoint();
}

SpectralOperator SpectralOperator::map(const ScalarMap& f, const std::string& new_label) const {
    VectorXd fv(vals_.size());
    for (long i = 0; i < vals_.size(); ++i) {
        fv(i) = f(vals_(i));
        if (!std::isfinite(fv(i)))
            throw NumericError(label_ + ": scalar map not finite at eigenvalue " +
                               std::to_string(vals_(i)));
    }
    // Re-sort so the eigenvalue vector stays ascending.
    std::vector<long> order(fv.size());
    for (long i = 0; i < fv.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](long a, long b) { return fv(a) < fv(b); });
    MatrixXcd vecs(vecs_.rows(), vecs_.cols());
    VectorXd vals(fv.size());
    for (long i = 0; i < fv.size(); ++i) {
        vecs.col(i) = vecs_.col(order[i]);
        vals(i) = fv(order[i]);
    }
    MatrixXcd mat = vecs * vals.asDiagonal() * vecs.adjoint();
    return SpectralOperator(std::move(mat), std::move(vecs), std::move(vals), grid_, new_label);
}

VectorXcd SpectralOperator::apply_map(const ScalarMap& f, const VectorXcd& v) const {
    VectorXcd c = vecs_.adjoint() * v;
    for (long i = 0; i < vals_.size(); ++i) {
        double fv = f(vals_(i));
        if (!std::isfinite(fv))
            throw NumericError(label_ + ": scalar map not finite at eigenvalue " +
                               std::to_string(vals_(i)));
        c(i) *= fv;
    }
    return vecs_ * c;
}

MatrixXcd SpectralOperator::projector(const std::function<bool(double)>& pred) const {
    VectorXd fv(vals_.size());
    for (long i = 0; i < vals_.size(); ++i)
        fv(i) = pred(vals_(i)) ? 1.0 : 0.0;
    return vecs_ * fv.asDiagonal() * vecs_.adjoint();
}

SpectralOperator matrix_function(const SpectralOperator& op, const ScalarMap& f,
                                 const std::string& label) {
    return op.map(f, label);
}

TensorOperator::TensorOperator(std::shared_ptr<const SpectralOperator> left,
                               std::shared_ptr<const SpectralOperator> right,
                               long max_dimension)
    : left_(std::move(left)), right_(std::move(right)) {
    dim_ = left_->dim() * right_->dim();
    if (dim_ > max_dimension)
        throw ConfigError("tensor operator dimension " + std::to_string(dim_) +
                          " exceeds cap " + std::to_string(max_dimension));
}

double TensorOperator::min_eigenvalue() const {
    return left_->min_eigenvalue() + right_->min_eigenvalue();
}

MatrixXcd TensorOperator::apply(const MatrixXcd& v_rows) const {
    return left_->matrix() * v_rows + v_rows * right_->matrix().transpose();
}

MatrixXcd TensorOperator::solve(const MatrixXcd& rhs_rows, double z) const {
    const MatrixXcd& qp = left_->eigenvectors();
    const MatrixXcd& qb = right_->eigenvectors();
    MatrixXcd c = qp.adjoint() * rhs_rows * qb.conjugate();
    for (long i = 0; i < left_->dim(); ++i) {
        for (long j = 0; j < right_->dim(); ++j) {
            double denom = left_->eigenvalues()(i) + right_->eigenvalues()(j) - z;
            if (std::abs(denom) < 1e-14)
                throw NumericError("tensor solve: shift z hits the spectrum at " +
                                   std::to_string(z));
            c(i, j) /= denom;
        }
    }
    return qp * c * qb.transpose();
}

VectorXcd TensorOperator::apply(const VectorXcd& v) const {
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        m(v.data(), left_->dim(), right_->dim());
    MatrixXcd out = apply(MatrixXcd(m));
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r = out;
    return Eigen::Map<const VectorXcd>(r.data(), dim_);
}

VectorXcd TensorOperator::solve(const VectorXcd& rhs, double z) const {
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        m(rhs.data(), left_->dim(), right_->dim());
    MatrixXcd out = solve(MatrixXcd(m), z);
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r = out;
    return Eigen::Map<const VectorXcd>(r.data(), dim_);
}

MatrixXcd TensorOperator::dense() const {
    if (dim_ > 4096)
        throw ConfigError("tensor operator dense materialization capped at 4096, dim " +
                          std::to_string(dim_));
    MatrixXcd out = MatrixXcd::Zero(dim_, dim_);
    const long p = left_->dim(), b = right_->dim();
    for (long i = 0; i < p; ++i)
        for (long j = 0; j < p; ++j)
            out.block(i * b, j * b, b, b) +=
                left_->matrix()(i, j) * MatrixXcd::Identity(b, b);
    for (long i = 0; i < p; ++i)
        out.block(i * b, i * b, b, b) += right_->matrix();
    return out;
}

} // namespace nelson
