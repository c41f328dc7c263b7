#include "nelsonlab/assemble.hpp"

#include <cmath>

namespace nelson {

double smoothed_sqrt(double lambda, double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("smoothed_sqrt: sigma must be positive");
    const double lo = sigma * sigma, hi = 4.0 * sigma * sigma;
    if (lambda <= lo) return sigma;
    if (lambda >= hi) return std::sqrt(lambda);
    // Quintic Hermite blend on [sigma^2, 4 sigma^2] matching value, first and
    // second derivative of the constant branch at the left end and of sqrt at
    // the right end.  Coefficients from the 6 endpoint conditions.
    const double t = (lambda - lo) / (hi - lo);
    const double t3 = t * t * t;
    return sigma * (1.0 + t3 * (439.0 / 64.0 + t * (-303.0 / 32.0 + t * 231.0 / 64.0)));
}

double cutoff_high(double mu, double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("cutoff_high: sigma must be positive");
    if (mu <= 2.0 * sigma) return 0.0;
    if (mu >= 4.0 * sigma) return 1.0;
    const double t = (mu - 2.0 * sigma) / (2.0 * sigma);
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double cutoff_low(double mu, double sigma) { return 1.0 - cutoff_high(mu, sigma); }

MatrixXcd second_order_matrix(const Grid& grid, const MatrixField& field) {
    const int d = grid.dim();
    const long n = grid.size();
    std::vector<MatrixXcd> deriv(d);
    for (int a = 0; a < d; ++a) deriv[a] = grid.derivative_full(a);
    // node values of the coefficient matrix
    std::vector<MatrixXd> entries(n);
    std::vector<double> x(d);
    for (long i = 0; i < n; ++i) {
        for (int a = 0; a < d; ++a) x[a] = grid.node_coord(i, a);
        entries[i] = field(x);
        if (entries[i].rows() != d || entries[i].cols() != d)
            throw ConfigError("second_order_matrix: field dimension mismatch");
    }
    MatrixXcd out = MatrixXcd::Zero(n, n);
    VectorXd diag(n);
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
            for (long i = 0; i < n; ++i) diag(i) = entries[i](j, k);
            out.noalias() += deriv[j].adjoint() * diag.asDiagonal() * deriv[k];
        }
    }
    return 0.5 * (out + MatrixXcd(out.adjoint()));
}

namespace {

VectorXd potential_nodes(const Grid& grid, const ScalarField& f) {
    VectorXd out(grid.size());
    std::vector<double> x(grid.dim());
    for (long i = 0; i < grid.size(); ++i) {
        for (int a = 0; a < grid.dim(); ++a) x[a] = grid.node_coord(i, a);
        out(i) = f(x);
    }
    return out;
}

} // namespace

SpectralOperator assemble_h(const std::shared_ptr<const Grid>& grid,
                            const CoefficientSet& coeffs) {
    MatrixXcd m = second_order_matrix(
        *grid, [&](const std::vector<double>& x) { return coeffs.a_at(x); });
    VectorXd pot = potential_nodes(*grid, [&](const std::vector<double>& x) {
        const double mv = coeffs.m_at(x);
        return coeffs.v_at(x) + mv * mv;
    });
    if (pot.minCoeff() < 0.0)
        throw ConfigError("assemble_h: v + m^2 must be nonnegative on the grid");
    m += pot.cast<Complex>().asDiagonal();
    return SpectralOperator(std::move(m), grid, "h");
}

SpectralOperator assemble_K0(const std::shared_ptr<const Grid>& grid,
                             const CoefficientSet& coeffs) {
    MatrixXcd m = second_order_matrix(
        *grid, [&](const std::vector<double>& X) { return coeffs.A_at(X); });
    return SpectralOperator(std::move(m), grid, "K0");
}

SpectralOperator assemble_K(const std::shared_ptr<const Grid>& grid,
                            const CoefficientSet& coeffs) {
    MatrixXcd m = second_order_matrix(
        *grid, [&](const std::vector<double>& X) { return coeffs.A_at(X); });
    VectorXd w = potential_nodes(*grid, [&](const std::vector<double>& X) {
        return coeffs.W_at(X);
    });
    m += w.cast<Complex>().asDiagonal();
    return SpectralOperator(std::move(m), grid, "K");
}

std::shared_ptr<SpectralOperator> point_particle() {
    return std::make_shared<SpectralOperator>(MatrixXcd::Zero(1, 1), nullptr, "point");
}

BosonPack build_boson_pack(const std::shared_ptr<const Grid>& grid,
                           const CoefficientSet& coeffs, double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("build_boson_pack: sigma must be positive");
    BosonPack pack;
    pack.grid = grid;
    pack.sigma = sigma;
    pack.h = std::make_shared<SpectralOperator>(assemble_h(grid, coeffs));
    const double floor = -1e-10 * std::max(1.0, pack.h->max_eigenvalue());
    if (pack.h->min_eigenvalue() < floor)
        throw NumericError("build_boson_pack: field operator has negative eigenvalue " +
                           std::to_string(pack.h->min_eigenvalue()));
    auto sqrt_clamped = [](double l) { return std::sqrt(std::max(l, 0.0)); };
    pack.omega = std::make_shared<SpectralOperator>(pack.h->map(sqrt_clamped, "omega"));
    pack.omega_reg = std::make_shared<SpectralOperator>(pack.h->map(
        [sigma](double l) { return smoothed_sqrt(std::max(l, 0.0), sigma); }, "omega_reg"));
    pack.window_high = std::make_shared<SpectralOperator>(pack.h->map(
        [sigma, sqrt_clamped](double l) { return cutoff_high(sqrt_clamped(l), sigma); },
        "window_high"));
    pack.window_low = std::make_shared<SpectralOperator>(pack.h->map(
        [sigma, sqrt_clamped](double l) { return cutoff_low(sqrt_clamped(l), sigma); },
        "window_low"));
    return pack;
}

} // namespace nelson
