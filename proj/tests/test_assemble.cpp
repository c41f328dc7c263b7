#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>

#include "nelsonlab/assemble.hpp"

using namespace nelson;

namespace {

CoefficientSet make_coeffs(FieldSpec a, FieldSpec v, FieldSpec A, FieldSpec W,
                           double box = 2.0 * M_PI) {
    FieldSpec m;
    m.base = 0.0;
    return CoefficientSet(1, box, box, a, v, m, A, W);
}

FieldSpec constant(double base) {
    FieldSpec f;
    f.base = base;
    return f;
}

FieldSpec sinusoidal(double base, double amplitude) {
    FieldSpec f;
    f.type = "sinusoidal";
    f.base = base;
    f.amplitude = amplitude;
    return f;
}

}  // namespace

TEST_CASE("smoothed square root: plateau, blend, and exact tail") {
    const double sigma = 0.3;
    CHECK(smoothed_sqrt(0.0, sigma) == doctest::Approx(sigma).epsilon(1e-14));
    CHECK(smoothed_sqrt(0.5 * sigma * sigma, sigma) == doctest::Approx(sigma).epsilon(1e-14));
    for (double lam : {4.0 * sigma * sigma, 1.0, 7.5, 300.0}) {
        CHECK(smoothed_sqrt(lam, sigma) == doctest::Approx(std::sqrt(lam)).epsilon(1e-15));
    }
    double prev = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double lam = i * 5.0 * sigma * sigma / 400.0;
        const double val = smoothed_sqrt(lam, sigma);
        CHECK(val >= sigma - 1e-14);
        CHECK(val >= prev - 1e-14);
        prev = val;
    }
}

TEST_CASE("spectral windows split at the documented thresholds") {
    const double sigma = 0.25;
    CHECK(cutoff_high(0.0, sigma) == 0.0);
    CHECK(cutoff_high(2.0 * sigma, sigma) == 0.0);
    CHECK(cutoff_high(4.0 * sigma, sigma) == 1.0);
    CHECK(cutoff_high(9.0, sigma) == 1.0);
    CHECK(cutoff_high(3.0 * sigma, sigma) == doctest::Approx(0.5).epsilon(1e-12));
    for (double mu : {0.1, 0.55, 0.71, 0.99, 1.3}) {
        CHECK(cutoff_low(mu, sigma) == doctest::Approx(1.0 - cutoff_high(mu, sigma)));
    }
    double prev = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double mu = i * 5.0 * sigma / 200.0;
        const double val = cutoff_high(mu, sigma);
        CHECK(val >= prev - 1e-14);
        prev = val;
    }
}

TEST_CASE("divergence-form operator reproduces an analytic image exactly") {
    // a(x) = 2 + sin x and f(x) = sin x are band-limited, so the spectral
    // assembly is exact: -(a f')' + v f = -cos 2x + (2 + v) sin x.
    auto grid = std::make_shared<Grid>(Grid::build(1, 32, 2.0 * M_PI));
    const double v = 0.4;
    const CoefficientSet coeffs =
        make_coeffs(sinusoidal(2.0, 1.0), constant(v), constant(0.5), constant(0.0));
    const SpectralOperator h = assemble_h(grid, coeffs);

    VectorXcd f(32), want(32);
    for (long j = 0; j < 32; ++j) {
        const double x = grid->node_coord(j, 0);
        f[j] = std::sin(x);
        want[j] = -std::cos(2.0 * x) + (2.0 + v) * std::sin(x);
    }
    CHECK((h.matrix() * f - want).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("second-order assembly is Hermitian and nonnegative") {
    const Grid grid = Grid::build(1, 32, 5.0);
    const MatrixField field = make_matrix_field(1, sinusoidal(1.0, 0.4), 5.0);
    const MatrixXcd m = second_order_matrix(grid, field);
    CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-11);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
    CHECK(es.eigenvalues().minCoeff() > -1e-11);
}

TEST_CASE("particle assembly adds the potential on top of the kinetic part") {
    auto grid = std::make_shared<Grid>(Grid::build(1, 16, 2.0 * M_PI));
    const CoefficientSet coeffs =
        make_coeffs(constant(1.0), constant(0.0), sinusoidal(0.6, 0.1), sinusoidal(0.2, 0.1));
    const SpectralOperator k0 = assemble_K0(grid, coeffs);
    const SpectralOperator k = assemble_K(grid, coeffs);
    const MatrixXcd diff = k.matrix() - k0.matrix();
    for (long j = 0; j < 16; ++j) {
        const double w = coeffs.W_at({grid->node_coord(j, 0)});
        CHECK(std::abs(diff(j, j) - w) < 1e-12);
    }
    CHECK((diff - MatrixXcd(diff.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("point particle is a single trivial node") {
    auto p = point_particle();
    CHECK(p->dim() == 1);
    CHECK(std::abs(p->matrix()(0, 0)) == 0.0);
}

TEST_CASE("boson pack members share one eigenbasis and satisfy their laws") {
    auto grid = std::make_shared<Grid>(Grid::build(1, 32, 8.0));
    const CoefficientSet coeffs =
        make_coeffs(sinusoidal(1.0, 0.3), constant(0.0), constant(0.5), constant(0.0));
    const double sigma = 0.2;
    const BosonPack pack = build_boson_pack(grid, coeffs, sigma);

    CHECK(pack.sigma == sigma);
    const MatrixXcd& om = pack.omega->matrix();
    CHECK((om * om - pack.h->matrix()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(pack.omega_reg->min_eigenvalue() >= sigma - 1e-12);

    const MatrixXcd& hi = pack.window_high->matrix();
    const MatrixXcd& lo = pack.window_low->matrix();
    CHECK((hi + lo - MatrixXcd::Identity(32, 32)).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((hi * om - om * hi).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(pack.window_high->min_eigenvalue() > -1e-12);
    CHECK(pack.window_high->max_eigenvalue() < 1.0 + 1e-12);

    // the regularized and exact dispersions agree wherever the high window acts
    const MatrixXcd gap = (pack.omega->matrix() - pack.omega_reg->matrix()) * hi;
    CHECK(gap.cwiseAbs().maxCoeff() < 1e-11);
}
