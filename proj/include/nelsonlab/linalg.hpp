#pragma once

#include "nelsonlab/grid.hpp"

#include <functional>

namespace nelson {

using LinOp = std::function<VectorXcd(const VectorXcd&)>;

struct LanczosResult {
    double eigenvalue = 0.0;
    VectorXcd eigenvector;
    int iterations = 0;
    double residual = 0.0; // ||A v - lambda v|| of the returned pair
};

// Lowest eigenvalue of a Hermitian operator via Lanczos with full
// reorthogonalization and a deterministic seeded start vector.  Basis vectors
// are kept, so memory is dim * iterations; intended for dims up to ~1e5.
LanczosResult lanczos_lowest(const LinOp& op, long dim, int max_iter = 400,
                             double tol = 1e-10, unsigned seed = 1234);

// Spectral radius max |eigenvalue| of a Hermitian operator (its norm),
// from the extreme Ritz values of the same Lanczos recurrence.
double operator_norm(const LinOp& op, long dim, int max_iter = 400, double tol = 1e-9,
                     unsigned seed = 4321);

struct PowerFit {
    double exponent = 0.0;     // slope of log y against log x
    double prefactor = 0.0;    // exp of the intercept
    double max_log_residual = 0.0;
};

// Least-squares fit of log y = exponent log x + const; data must be positive
// with at least two points.
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

} // namespace nelson
