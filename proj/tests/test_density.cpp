#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nelsonlab/density.hpp"

using namespace nelson;

TEST_CASE("gaussian profile matches its closed form") {
    const ChargeDensity rho("gaussian", 2.0, 0.8, 1);
    const double norm = 2.0 / std::sqrt(2.0 * M_PI * 0.64);
    CHECK(rho.value({0.0}) == doctest::Approx(norm).epsilon(1e-14));
    CHECK(rho.value({1.1}) ==
          doctest::Approx(norm * std::exp(-1.21 / (2.0 * 0.64))).epsilon(1e-14));
    // unitary transform of a gaussian is a gaussian
    CHECK(rho.fourier_radial(0.0) == doctest::Approx(2.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-14));
    const double r = 1.7;
    CHECK(rho.fourier_radial(r) ==
          doctest::Approx(2.0 / std::sqrt(2.0 * M_PI) * std::exp(-0.5 * r * r * 0.64))
              .epsilon(1e-13));
    CHECK(rho.fourier({r}) == doctest::Approx(rho.fourier_radial(r)).epsilon(1e-14));
    CHECK(rho.fourier_kappa_radial(r, 4.0) == doctest::Approx(rho.fourier_radial(r / 4.0)));
}

TEST_CASE("gradient agrees with a finite difference of the value") {
    const ChargeDensity rho("gaussian", 1.0, 0.6, 2);
    const std::vector<double> x{0.4, -0.3};
    const std::vector<double> g = rho.gradient(x);
    const double eps = 1e-6;
    for (int d = 0; d < 2; ++d) {
        std::vector<double> hi = x, lo = x;
        hi[d] += eps;
        lo[d] -= eps;
        const double fd = (rho.value(hi) - rho.value(lo)) / (2.0 * eps);
        CHECK(g[d] == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("sampled charge integrates to q across cutoffs") {
    const Grid grid = Grid::build(1, 128, 16.0);
    const ChargeDensity rho("gaussian", 1.5, 1.0, 1);
    for (double kappa : {1.0, 2.0, 4.0}) {
        const VectorXcd s = rho.sample(grid, 64, kappa);
        const Complex total = s.sum() * grid.cell_volume();
        CHECK(std::abs(total - Complex(1.5)) < 1e-10);
        CHECK(s.imag().cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("rescaling sharpens the profile around the center") {
    const Grid grid = Grid::build(1, 128, 16.0);
    const ChargeDensity rho("gaussian", 1.0, 1.0, 1);
    const VectorXcd wide = rho.sample(grid, 64, 1.0);
    const VectorXcd sharp = rho.sample(grid, 64, 4.0);
    CHECK(std::real(sharp[64]) == doctest::Approx(4.0 * std::real(wide[64])).epsilon(1e-9));
    CHECK(std::real(sharp[80]) < 1e-12);  // two box units out
    CHECK(std::real(wide[80]) > 1e-3);
}

TEST_CASE("center coordinates reproduce node centering and periodic wrap") {
    const Grid grid = Grid::build(1, 64, 16.0);
    const ChargeDensity rho("gaussian", 1.0, 1.0, 1);
    const long node = 40;
    const VectorXcd a = rho.sample(grid, node, 2.0);
    const VectorXcd b = rho.sample_at(grid, {grid.node_coord(node, 0)}, 2.0);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-14);

    const VectorXcd c = rho.sample_at(grid, {grid.node_coord(node, 0) + 16.0}, 2.0);
    CHECK((a - c).cwiseAbs().maxCoeff() < 1e-11);

    const VectorXcd g0 = rho.sample_grad(grid, node, 2.0, 0);
    const VectorXcd g1 = rho.sample_grad_at(grid, {grid.node_coord(node, 0)}, 2.0, 0);
    CHECK((g0 - g1).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("bump profile is supported in its width and carries charge q") {
    const Grid grid = Grid::build(1, 128, 16.0);
    const ChargeDensity rho("bump", 0.7, 1.2, 1);
    const VectorXcd s = rho.sample(grid, 64, 1.0);
    for (long j = 0; j < 128; ++j) {
        const double dist = std::abs(grid.node_coord(j, 0) - grid.node_coord(64, 0));
        if (dist >= 1.2) CHECK(std::abs(s[j]) < 1e-15);
    }
    CHECK(std::abs(s.sum() * grid.cell_volume() - Complex(0.7)) < 1e-9);
}

TEST_CASE("signed profile carries zero net charge") {
    const Grid grid = Grid::build(1, 128, 16.0);
    const ChargeDensity rho("signed", 1.0, 1.0, 1);
    const VectorXcd s = rho.sample(grid, 64, 1.0);
    CHECK(std::abs(s.sum() * grid.cell_volume()) < 1e-10);
    CHECK(rho.fourier_radial(0.0) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("sampling rejects cutoffs and widths the grid cannot hold") {
    const Grid grid = Grid::build(1, 64, 16.0);
    const ChargeDensity rho("gaussian", 1.0, 1.0, 1);
    CHECK(rho.aliasing_cap(grid) == doctest::Approx(0.25 * M_PI * 4.0));
    CHECK_THROWS_AS(rho.sample(grid, 32, 8.0), ConfigError);   // beyond the cap
    CHECK_THROWS_AS(rho.sample(grid, 32, 0.25), ConfigError);  // effective width 4 > box/8

    const ChargeDensity wide("gaussian", 1.0, 3.0, 1);
    CHECK_THROWS_AS(wide.sample(grid, 32, 1.0), ConfigError);  // width above box/8

    CHECK_THROWS_AS(ChargeDensity("unknown", 1.0, 1.0, 1), ConfigError);
}
