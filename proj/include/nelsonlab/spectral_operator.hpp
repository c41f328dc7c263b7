#pragma once

#include "nelsonlab/grid.hpp"

#include <functional>
#include <memory>

namespace nelson {

using ScalarMap = std::function<double(double)>;

// Hermitian operator on a grid, stored dense together with its cached
// eigendecomposition.  Construction verifies hermiticity (1e-12 relative),
// eigenvector orthonormality and reconstruction (both 1e-10); violations
// throw NumericError.
class SpectralOperator {
  public:
    SpectralOperator(MatrixXcd matrix, std::shared_ptr<const Grid> grid,
                     std::string label = "operator");
    // Adopts a precomputed eigensystem (used for structured constructions);
    // the same invariants are verified.
    SpectralOperator(MatrixXcd matrix, MatrixXcd eigenvectors, VectorXd eigenvalues,
                     std::shared_ptr<const Grid> grid, std::string label);

    const MatrixXcd& matrix() const { return matrix_; }
    const MatrixXcd& eigenvectors() const { return vecs_; }
    const VectorXd& eigenvalues() const { return vals_; }
    const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
    const Grid& grid() const { return *grid_; }
    const std::string& label() const { return label_; }
    long dim() const { return matrix_.rows(); }
    double min_eigenvalue() const { return vals_.minCoeff(); }
    double max_eigenvalue() const { return vals_.maxCoeff(); }

    // f applied through the eigendecomposition.  f must be finite on the
    // spectrum; a non-finite value names the offending eigenvalue.
    SpectralOperator map(const ScalarMap& f, const std::string& new_label) const;
    // Same functional calculus but returning only the matrix.
    MatrixXcd map_matrix(const ScalarMap& f) const;
    VectorXcd apply_map(const ScalarMap& f, const VectorXcd& v) const;
    VectorXcd apply(const VectorXcd& v) const { return matrix_ * v; }

    // Spectral projector onto eigenvalues with predicate true.
    MatrixXcd projector(const std::function<bool(double)>& pred) const;

  private:
    void verify() const;

    MatrixXcd matrix_;
    MatrixXcd vecs_;
    VectorXd vals_;
    std::shared_ptr<const Grid> grid_;
    std::string label_;
};

SpectralOperator matrix_function(const SpectralOperator& op, const ScalarMap& f,
                                 const std::string& label);

// Kronecker sum  P (x) 1 + 1 (x) B  of two spectral operators, kept in
// factored form: eigenvalues are all pairwise sums and solves go through the
// factor eigenbases, so the product matrix is never materialized.  Vectors
// are indexed with the left (particle) factor slowest, matching
// Grid::product ordering.
class TensorOperator {
  public:
    TensorOperator(std::shared_ptr<const SpectralOperator> left,
                   std::shared_ptr<const SpectralOperator> right,
                   long max_dimension = 20000);

    long dim() const { return dim_; }
    long left_dim() const { return left_->dim(); }
    long right_dim() const { return right_->dim(); }
    const SpectralOperator& left() const { return *left_; }
    const SpectralOperator& right() const { return *right_; }
    double min_eigenvalue() const;

    VectorXcd apply(const VectorXcd& v) const;
    // Solves (T - z) x = rhs through the factor eigendecompositions.
    VectorXcd solve(const VectorXcd& rhs, double z = 0.0) const;
    // Row-major matrix views of the same operations: rows index the left
    // factor, columns the right factor.
    MatrixXcd apply(const MatrixXcd& v_rows) const;
    MatrixXcd solve(const MatrixXcd& rhs_rows, double z = 0.0) const;

    // Dense materialization for small-dimension oracles.
    MatrixXcd dense() const;

  private:
    std::shared_ptr<const SpectralOperator> left_;
    std::shared_ptr<const SpectralOperator> right_;
    long dim_ = 0;
};

} // namespace nelson
