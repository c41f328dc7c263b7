#include "nelsonlab/linalg.hpp"

#include <cmath>
#include <random>

namespace nelson {
namespace {

VectorXcd seeded_start(long dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    VectorXcd v(dim);
    for (long i = 0; i < dim; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    v /= v.norm();
    return v;
}

struct Tridiag {
    std::vector<double> alpha;
    std::vector<double> beta; // beta[j] couples steps j and j+1
};

// One Lanczos sweep with full reorthogonalization.  `want_low` selects which
// extreme Ritz pair drives the convergence test; both extremes are reported.
struct SweepResult {
    double low = 0.0, high = 0.0;
    VectorXcd low_vec;
    int iterations = 0;
    double low_residual = 0.0, high_residual = 0.0;
};

SweepResult lanczos_sweep(const LinOp& op, long dim, int max_iter, double tol,
                          unsigned seed, bool need_vector) {
    if (dim < 1) throw ConfigError("lanczos: empty space");
    max_iter = static_cast<int>(std::min<long>(max_iter, dim));
    std::vector<VectorXcd> basis;
    basis.reserve(max_iter);
    basis.push_back(seeded_start(dim, seed));
    Tridiag t;
    SweepResult res;
    Eigen::SelfAdjointEigenSolver<MatrixXd> small;
    for (int j = 0; j < max_iter; ++j) {
        VectorXcd w = op(basis[j]);
        const Complex a = basis[j].dot(w);
        t.alpha.push_back(a.real());
        w -= a * basis[j];
        if (j > 0) w -= t.beta[j - 1] * basis[j - 1];
        // two passes of reorthogonalization keep the basis orthonormal
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) w -= b.dot(w) * b;
        const double bnorm = w.norm();
        const int m = j + 1;
        MatrixXd tri = MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) tri(i, i) = t.alpha[i];
        for (int i = 0; i + 1 < m; ++i) tri(i, i + 1) = tri(i + 1, i) = t.beta[i];
        small.compute(tri);
        res.low = small.eigenvalues()(0);
        res.high = small.eigenvalues()(m - 1);
        res.low_residual = bnorm * std::abs(small.eigenvectors()(m - 1, 0));
        res.high_residual = bnorm * std::abs(small.eigenvectors()(m - 1, m - 1));
        res.iterations = m;
        const double scale = std::max({1.0, std::abs(res.low), std::abs(res.high)});
        const bool invariant = bnorm < 1e-13 * scale;
        const bool converged =
            res.low_residual <= tol * scale && res.high_residual <= tol * scale;
        if (invariant || converged || j + 1 == max_iter) {
            if (need_vector) {
                res.low_vec = VectorXcd::Zero(dim);
                for (int i = 0; i < m; ++i)
                    res.low_vec += small.eigenvectors()(i, 0) * basis[i];
                res.low_vec /= res.low_vec.norm();
            }
            if (!invariant && !converged)
                throw NumericError("lanczos: no convergence after " +
                                   std::to_string(m) + " iterations, residual " +
                                   std::to_string(std::max(res.low_residual,
                                                           res.high_residual)));
            return res;
        }
        t.beta.push_back(bnorm);
        basis.push_back(w / bnorm);
    }
    throw NumericError("lanczos: iteration limit reached");
}

} // namespace

LanczosResult lanczos_lowest(const LinOp& op, long dim, int max_iter, double tol,
                             unsigned seed) {
    SweepResult sweep = lanczos_sweep(op, dim, max_iter, tol, seed, true);
    LanczosResult out;
    out.eigenvalue = sweep.low;
    out.eigenvector = std::move(sweep.low_vec);
    out.iterations = sweep.iterations;
    VectorXcd r = op(out.eigenvector) - out.eigenvalue * out.eigenvector;
    out.residual = r.norm();
    return out;
}

double operator_norm(const LinOp& op, long dim, int max_iter, double tol,
                     unsigned seed) {
    SweepResult sweep = lanczos_sweep(op, dim, max_iter, tol, seed, false);
    return std::max(std::abs(sweep.low), std::abs(sweep.high));
}

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ConfigError("fit_power_law: need at least two matching samples");
    const long n = static_cast<long>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> lx(n), ly(n);
    for (long i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw ConfigError("fit_power_law: data must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-30)
        throw ConfigError("fit_power_law: degenerate abscissas");
    PowerFit fit;
    fit.exponent = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / n;
    fit.prefactor = std::exp(intercept);
    for (long i = 0; i < n; ++i)
        fit.max_log_residual = std::max(
            fit.max_log_residual, std::abs(ly[i] - fit.exponent * lx[i] - intercept));
    return fit;
}

} // namespace nelson
