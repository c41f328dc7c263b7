#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>

#include "nelsonlab/counterterm.hpp"

using namespace nelson;

namespace {

FieldSpec constant(double base) {
    FieldSpec f;
    f.base = base;
    return f;
}

CoefficientSet isotropic_coeffs(int dim, double a0, double A0, double box) {
    return CoefficientSet(dim, box, box, constant(a0), constant(0.0), constant(0.0),
                          constant(A0), constant(0.0));
}

// Simpson rule on [0, R] with an even panel count; plenty for smooth decaying
// integrands at the tolerances used below.
double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i) acc += f(a + i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("renormalization energy integral matches a direct simpson oracle in 1d") {
    const CoefficientSet coeffs = isotropic_coeffs(1, 1.3, 0.9, 8.0);
    const ChargeDensity rho("gaussian", 1.1, 0.5, 1);
    const double kappa = 3.0;

    // E = -(1/2)(2 pi)^{-1} int (1.3 xi^2 + 1)^{-1/2} K (K+1)^{-2}
    //     |rho_hat(xi/kappa)|^2 d xi,   K = 0.9 xi^2
    auto integrand = [&](double xi) {
        const double K = 0.9 * xi * xi;
        // unitary gaussian transform: q (2 pi)^{-1/2} exp(-r^2 w^2 / 2)
        const double r = std::abs(xi) / kappa;
        const double f = 1.1 / std::sqrt(2.0 * M_PI) * std::exp(-0.5 * r * r * 0.5 * 0.5);
        return std::pow(1.3 * xi * xi + 1.0, -0.5) * K / ((K + 1.0) * (K + 1.0)) * f * f;
    };
    const double oracle = -0.5 / (2.0 * M_PI) * 2.0 * simpson(integrand, 0.0, 120.0, 20000);
    const double got = E_kappa(coeffs, rho, {0.0}, kappa);
    CHECK(got == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(got < 0.0);
}

TEST_CASE("renormalization energy scales exactly with charge squared") {
    const CoefficientSet coeffs = isotropic_coeffs(3, 1.0, 0.8, 8.0);
    const ChargeDensity one("gaussian", 1.0, 0.5, 3);
    const ChargeDensity two("gaussian", 2.0, 0.5, 3);
    const double e1 = E_kappa(coeffs, one, {0.0, 0.0, 0.0}, 2.0);
    const double e2 = E_kappa(coeffs, two, {0.0, 0.0, 0.0}, 2.0);
    CHECK(e2 == doctest::Approx(4.0 * e1).epsilon(1e-10));
    CHECK(e1 < 0.0);
}

TEST_CASE("renormalization energy grows monotonically with the cutoff") {
    const CoefficientSet coeffs = isotropic_coeffs(3, 1.0, 1.0, 8.0);
    const ChargeDensity rho("gaussian", 1.0, 0.5, 3);
    double prev = 0.0;
    for (double kappa : {1.0, 2.0, 4.0, 8.0}) {
        const double e = E_kappa(coeffs, rho, {0.0, 0.0, 0.0}, kappa);
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("slope asymptote reduces to the isotropic closed form") {
    // For a = a0 I and A = A0 I in d = 3 the direction integral is
    // 4 pi / (sqrt(a0) A0), so the slope is -(1/2)(2 pi)^{-6} q^2 4 pi /
    // (sqrt(a0) A0).
    const double a0 = 1.7, A0 = 0.6, q = 1.3;
    const CoefficientSet coeffs = isotropic_coeffs(3, a0, A0, 8.0);
    const double want =
        -0.5 * std::pow(2.0 * M_PI, -6.0) * q * q * 4.0 * M_PI / (std::sqrt(a0) * A0);
    CHECK(E_slope_asymptote(coeffs, {0.0, 0.0, 0.0}, q) ==
          doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("slope asymptote averages anisotropic directions correctly") {
    // A = diag(A1, A2, A3) with a = I: the integral has the closed form
    // int dtheta / (theta.A theta) evaluated by quadrature here with a rule
    // fine enough to be an independent oracle.
    FieldSpec A;
    A.diag = {0.5, 1.0, 2.0};
    const CoefficientSet coeffs(3, 8.0, 8.0, constant(1.0), constant(0.0), constant(0.0), A,
                                constant(0.0));
    // azimuth integral in closed form: int dphi / (al cos^2 + be sin^2 + ga)
    // = 2 pi / sqrt((al + ga)(be + ga)); remaining polar integral by simpson
    auto polar = [](double c) {
        const double s2 = 1.0 - c * c;
        return 2.0 * M_PI / std::sqrt((0.5 * s2 + 2.0 * c * c) * (s2 + 2.0 * c * c));
    };
    const double acc = simpson(polar, -1.0, 1.0, 4000);
    const double want = -0.5 * std::pow(2.0 * M_PI, -6.0) * acc;
    CHECK(E_slope_asymptote(coeffs, {0.0, 0.0, 0.0}, 1.0) ==
          doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("sharp-cutoff reference energy has log increments approaching -4 pi ln 2") {
    const double mass = 1.0, sigma = 0.05;
    const double e512 = nelson_E_Lambda(512.0, mass, sigma);
    const double e1024 = nelson_E_Lambda(1024.0, mass, sigma);
    const double e2048 = nelson_E_Lambda(2048.0, mass, sigma);
    const double inc1 = e1024 - e512;
    const double inc2 = e2048 - e1024;
    const double want = -4.0 * M_PI * std::log(2.0);
    // increments carry a 4 pi / Lambda tail: 0.0245 at 512, 0.0123 at 1024
    CHECK(std::abs(inc1 - want) < 0.03);
    CHECK(std::abs(inc2 - want) < 0.016);
    CHECK(std::abs(inc2 - want) < std::abs(inc1 - want));
}

TEST_CASE("dressing potential splits exactly into regular and singular parts") {
    auto pg = std::make_shared<Grid>(Grid::build(1, 16, 8.0));
    auto bg = std::make_shared<Grid>(Grid::build(1, 32, 8.0));
    const CoefficientSet coeffs(1, 8.0, 8.0, constant(1.0), constant(0.0), constant(0.3),
                                constant(0.8), constant(0.0));
    const OperatorContext ctx = make_context(pg, bg, coeffs, 0.3);
    const ChargeDensity rho("gaussian", 1.0, 0.9, 1);

    const SplitPotential split = split_V_all(ctx, rho, 2.0);
    const VectorXd direct = V_kappa_all(ctx, rho, 2.0);
    REQUIRE(split.V.size() == 16);
    CHECK((split.V1 + split.V2 - split.V).cwiseAbs().maxCoeff() <
          1e-12 * split.V.cwiseAbs().maxCoeff());
    CHECK((split.V - direct).cwiseAbs().maxCoeff() < 1e-11 * direct.cwiseAbs().maxCoeff());
}

TEST_CASE("cutoff-removal study reports shrinking subtracted increments") {
    auto pg = std::make_shared<Grid>(Grid::build(1, 16, 8.0));
    auto bg = std::make_shared<Grid>(Grid::build(1, 64, 8.0));
    const CoefficientSet coeffs(1, 8.0, 8.0, constant(1.0), constant(0.0), constant(0.3),
                                constant(0.8), constant(0.0));
    const OperatorContext ctx = make_context(pg, bg, coeffs, 0.3);
    const ChargeDensity rho("gaussian", 1.0, 0.9, 1);

    const std::vector<double> kappas{1.0, 2.0, 4.0};
    const RenormReport report = renorm_limit_study_d1(ctx, rho, kappas);
    REQUIRE(report.kappas == kappas);
    REQUIRE(report.raw_sup.size() == 3);
    REQUIRE(report.increment_sub.size() == 2);
    CHECK(report.increments_decreasing);
    CHECK(report.increment_sub[1] < report.increment_sub[0]);

    CHECK_THROWS_AS(renorm_limit_study_d1(ctx, rho, {1.0, 2.0}), ConfigError);
}
