#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nelsonlab/quadrature.hpp"

using namespace nelson;

TEST_CASE("gauss-legendre order five integrates degree-nine polynomials") {
    const QuadRule rule = gauss_legendre(5);
    REQUIRE(rule.nodes.size() == 5);
    REQUIRE(rule.weights.size() == 5);
    for (std::size_t i = 1; i < rule.nodes.size(); ++i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);

    double wsum = 0.0, x8 = 0.0, x9 = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        wsum += rule.weights[i];
        x8 += rule.weights[i] * std::pow(rule.nodes[i], 8);
        x9 += rule.weights[i] * std::pow(rule.nodes[i], 9);
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(x8 == doctest::Approx(2.0 / 9.0).epsilon(1e-13)); // int_{-1}^{1} x^8 dx
    CHECK(std::abs(x9) < 1e-14);                            // odd power
}

TEST_CASE("adaptive line integrals hit closed forms") {
    const double s = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12);
    CHECK(s == doctest::Approx(2.0).epsilon(1e-11));
    const double g =
        integrate_adaptive([](double x) { return std::exp(-x * x); }, -12.0, 12.0, 1e-12);
    CHECK(g == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-11));
}

TEST_CASE("sphere rules have the right area and second moments") {
    SUBCASE("one dimension: two signs") {
        const SphereRule rule = sphere_rule(1, 8);
        REQUIRE(rule.directions.size() == 2);
        double area = 0.0;
        for (double w : rule.weights) area += w;
        CHECK(area == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(std::abs(std::abs(rule.directions[0][0]) - 1.0) < 1e-14);
        CHECK(rule.directions[0][0] == doctest::Approx(-rule.directions[1][0]));
    }
    SUBCASE("two dimensions: circle moments") {
        const SphereRule rule = sphere_rule(2, 16);
        double area = 0.0, m00 = 0.0, m11 = 0.0, m01 = 0.0;
        for (std::size_t i = 0; i < rule.weights.size(); ++i) {
            const auto& th = rule.directions[i];
            CHECK(std::abs(th[0] * th[0] + th[1] * th[1] - 1.0) < 1e-13);
            area += rule.weights[i];
            m00 += rule.weights[i] * th[0] * th[0];
            m11 += rule.weights[i] * th[1] * th[1];
            m01 += rule.weights[i] * th[0] * th[1];
        }
        CHECK(area == doctest::Approx(2.0 * M_PI).epsilon(1e-13));
        CHECK(m00 == doctest::Approx(M_PI).epsilon(1e-12)); // int theta_x^2 = pi
        CHECK(m11 == doctest::Approx(M_PI).epsilon(1e-12));
        CHECK(std::abs(m01) < 1e-13);
    }
    SUBCASE("three dimensions: sphere moments") {
        const SphereRule rule = sphere_rule(3, 12);
        double area = 0.0;
        double second[3][3] = {};
        double first[3] = {};
        for (std::size_t i = 0; i < rule.weights.size(); ++i) {
            const auto& th = rule.directions[i];
            area += rule.weights[i];
            for (int a = 0; a < 3; ++a) {
                first[a] += rule.weights[i] * th[a];
                for (int b = 0; b < 3; ++b) second[a][b] += rule.weights[i] * th[a] * th[b];
            }
        }
        CHECK(area == doctest::Approx(4.0 * M_PI).epsilon(1e-12));
        for (int a = 0; a < 3; ++a) {
            CHECK(std::abs(first[a]) < 1e-12); // odd moments vanish
            for (int b = 0; b < 3; ++b) {
                const double want = (a == b) ? 4.0 * M_PI / 3.0 : 0.0;
                CHECK(std::abs(second[a][b] - want) < 1e-11);
            }
        }
    }
}

TEST_CASE("radial integrals over the whole space match gaussian closed forms") {
    auto gaussian = [](const std::vector<double>& x) {
        double s = 0.0;
        for (double xi : x) s += xi * xi;
        return std::exp(-s);
    };
    CHECK(integrate_radial(3, 12, gaussian, 1e-10) ==
          doctest::Approx(std::pow(M_PI, 1.5)).epsilon(1e-8));
    CHECK(integrate_radial(2, 16, gaussian, 1e-10) == doctest::Approx(M_PI).epsilon(1e-8));
    auto exp_abs = [](const std::vector<double>& x) { return std::exp(-std::abs(x[0])); };
    CHECK(integrate_radial(1, 4, exp_abs, 1e-10) == doctest::Approx(2.0).epsilon(1e-8));
}
