#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>

#include "nelsonlab/dressing.hpp"

using namespace nelson;

namespace {

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

CoefficientSet constant_coeffs(double a0, double mass, double box) {
    return CoefficientSet(1, box, box, constant(a0), constant(0.0), constant(mass),
                          constant(0.8), constant(0.0));
}

}  // namespace

TEST_CASE("point-particle dressing matches the closed-form multiplier chain") {
    auto bg = std::make_shared<Grid>(Grid::build(1, 64, 8.0 * M_PI));
    const CoefficientSet coeffs = constant_coeffs(1.0, 0.2, 8.0 * M_PI);
    const double sigma = 0.25;
    const OperatorContext ctx = make_point_context(bg, coeffs, sigma);
    CHECK(ctx.particle_points() == 1);
    CHECK(ctx.particle_coord(0).empty());

    const ChargeDensity rho("gaussian", 1.0, 1.2, 1);
    const double kappa = 1.0;
    const DressingField field = compute_beta(ctx, rho, kappa);
    REQUIRE(field.beta.rows() == 1);
    REQUIRE(field.beta.cols() == bg->size());
    CHECK(field.max_imag < 1e-10);

    // With constant coefficients every operator is a Fourier multiplier in
    // lambda(xi) = a0 xi^2 + m^2, so beta has the explicit transform
    //   beta_hat(xi) = -window(sqrt lambda) rho_hat(xi)
    //                  / (smoothed_sqrt(lambda)^{1/2} * smoothed_sqrt(lambda)).
    const VectorXcd rho_vec = rho.sample_at(*bg, {0.0}, kappa);
    const VectorXcd rho_hat = bg->dft() * rho_vec;
    VectorXcd beta_hat(bg->size());
    for (long k = 0; k < bg->size(); ++k) {
        const double xi = bg->freq_coord(k, 0);
        const double lambda = xi * xi + 0.2 * 0.2;
        const double reg = smoothed_sqrt(lambda, sigma);
        beta_hat[k] = -cutoff_high(std::sqrt(lambda), sigma) / (std::sqrt(reg) * reg) *
                      rho_hat[k];
    }
    const VectorXcd oracle = bg->dft().adjoint() * beta_hat;
    const VectorXcd got = field.beta.row(0).transpose();
    CHECK((got - oracle).cwiseAbs().maxCoeff() < 1e-11 * oracle.cwiseAbs().maxCoeff());

    // modes below the window opening carry no dressing at all
    const VectorXcd got_hat = bg->dft() * got;
    for (long k = 0; k < bg->size(); ++k) {
        const double xi = bg->freq_coord(k, 0);
        if (std::sqrt(xi * xi + 0.04) <= 2.0 * sigma)
            CHECK(std::abs(got_hat[k]) < 1e-13 * got_hat.cwiseAbs().maxCoeff());
    }

    // on the window support the exact and regularized dispersions coincide
    const DressingField exact = compute_beta(ctx, rho, kappa, true);
    CHECK((exact.beta - field.beta).cwiseAbs().maxCoeff() <
          1e-12 * field.beta.cwiseAbs().maxCoeff());

    CHECK(beta_identity_residual(ctx, field, rho) < 1e-10);
}

TEST_CASE("constant-coefficient dressing is translation covariant") {
    const long n = 32;
    auto pg = std::make_shared<Grid>(Grid::build(1, n, 8.0));
    auto bg = std::make_shared<Grid>(Grid::build(1, n, 8.0));
    const CoefficientSet coeffs = constant_coeffs(1.0, 0.2, 8.0);
    const OperatorContext ctx = make_context(pg, bg, coeffs, 0.25);
    CHECK(ctx.particle_points() == n);

    const ChargeDensity rho("gaussian", 1.0, 0.9, 1);
    const DressingField field = compute_beta(ctx, rho, 1.0);
    REQUIRE(field.beta.rows() == n);

    const double scale = field.beta.cwiseAbs().maxCoeff();
    for (long i : {1L, 7L, n / 2, n - 1}) {
        for (long j = 0; j < n; ++j) {
            const long shifted = ((j - i) % n + n) % n;
            CHECK(std::abs(field.beta(i, j) - field.beta(0, shifted)) < 1e-10 * scale);
        }
    }

    CHECK(beta_identity_residual(ctx, field, rho) < 1e-10);
}

TEST_CASE("spectral and analytic dressing gradients agree") {
    auto pg = std::make_shared<Grid>(Grid::build(1, 32, 8.0));
    auto bg = std::make_shared<Grid>(Grid::build(1, 32, 8.0));
    const CoefficientSet coeffs(1, 8.0, 8.0, sinusoidal(1.0, 0.3), constant(0.0),
                                constant(0.3), sinusoidal(0.8, 0.2), constant(0.1));
    const OperatorContext ctx = make_context(pg, bg, coeffs, 0.3);

    const ChargeDensity rho("gaussian", 1.0, 0.9, 1);
    DressingField field = compute_beta(ctx, rho, 1.0);

    CHECK_THROWS_AS(beta_gradient_crosscheck(ctx, field, rho), ConfigError);
    add_beta_gradients(ctx, field);
    REQUIRE(field.grad.size() == 1);
    CHECK(beta_gradient_crosscheck(ctx, field, rho) < 1e-8);
}

TEST_CASE("degenerate and invalid dressing inputs are handled") {
    auto bg = std::make_shared<Grid>(Grid::build(1, 32, 8.0));
    const CoefficientSet coeffs = constant_coeffs(1.0, 0.2, 8.0);

    SUBCASE("missing grids are rejected") {
        CHECK_THROWS_AS(make_context(nullptr, bg, coeffs, 0.25), ConfigError);
        CHECK_THROWS_AS(make_point_context(nullptr, coeffs, 0.25), ConfigError);
    }
    SUBCASE("zero source dresses to zero") {
        const OperatorContext ctx = make_point_context(bg, coeffs, 0.25);
        const DressingField field =
            compute_beta_from_rows(ctx, MatrixXcd::Zero(1, bg->size()), 1.0);
        CHECK(field.beta.cwiseAbs().maxCoeff() == 0.0);
        CHECK(field.max_imag == 0.0);
    }
    SUBCASE("mismatched rows are rejected") {
        const OperatorContext ctx = make_point_context(bg, coeffs, 0.25);
        CHECK_THROWS_AS(compute_beta_from_rows(ctx, MatrixXcd::Zero(2, bg->size()), 1.0),
                        ConfigError);
    }
    SUBCASE("gradients need a particle grid of at least 16 nodes") {
        const OperatorContext point = make_point_context(bg, coeffs, 0.25);
        DressingField field =
            compute_beta_from_rows(point, MatrixXcd::Zero(1, bg->size()), 1.0);
        CHECK_THROWS_AS(add_beta_gradients(point, field), ConfigError);

        auto coarse = std::make_shared<Grid>(Grid::build(1, 8, 8.0));
        const OperatorContext ctx = make_context(coarse, bg, coeffs, 0.25);
        DressingField small = compute_beta(ctx, ChargeDensity("gaussian", 1.0, 0.9, 1), 1.0);
        CHECK_THROWS_AS(add_beta_gradients(ctx, small), ConfigError);
    }
}

TEST_CASE("weighted norm table covers every node, kappa, and weight") {
    auto pg = std::make_shared<Grid>(Grid::build(1, 16, 8.0));
    auto bg = std::make_shared<Grid>(Grid::build(1, 32, 8.0));
    const CoefficientSet coeffs = constant_coeffs(1.0, 0.2, 8.0);
    const OperatorContext ctx = make_context(pg, bg, coeffs, 0.25);
    const ChargeDensity rho("gaussian", 1.0, 0.9, 1);

    const std::vector<double> kappas{1.0, 2.0};
    const std::vector<double> alphas{0.5, 1.0};
    const auto table = beta_weighted_norms(ctx, rho, kappas, alphas);
    REQUIRE(table.size() == kappas.size() * alphas.size() * 16);
    for (const auto& row : table) {
        CHECK(row.weighted_norm > 0.0);
        CHECK(row.ratio > 0.0);
        CHECK(row.diagnostic_only == (row.alpha >= 1.0));
    }

    CHECK_THROWS_AS(beta_weighted_norms(ctx, rho, {}, alphas), ConfigError);
    CHECK_THROWS_AS(beta_weighted_norms(ctx, rho, kappas, {-0.5}), ConfigError);
}
