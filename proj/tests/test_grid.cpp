#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "nelsonlab/grid.hpp"

using namespace nelson;

namespace {
constexpr double kPi = 3.14159265358979323846;

VectorXcd seeded_vector(long n, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    VectorXcd v(n);
    for (long i = 0; i < n; ++i) v[i] = Complex(nd(gen), nd(gen));
    return v;
}
}  // namespace

TEST_CASE("node and frequency lattices follow the documented layout") {
    const Grid g = Grid::build(1, 8, 4.0);
    CHECK(g.size() == 8);
    CHECK(g.dim() == 1);
    CHECK(g.cell_volume() == doctest::Approx(0.5).epsilon(1e-15));
    for (int j = 0; j < 8; ++j) {
        CHECK(g.node_coord(j, 0) == doctest::Approx(-2.0 + j * 0.5).epsilon(1e-15));
        CHECK(g.freq_coord(j, 0) == doctest::Approx(2.0 * kPi * (j - 4) / 4.0).epsilon(1e-15));
    }
    CHECK(g.nyquist() == doctest::Approx(kPi * 8 / 4.0).epsilon(1e-15));
    CHECK(g.freq_sq(0) == doctest::Approx(g.nyquist() * g.nyquist()).epsilon(1e-14));
}

TEST_CASE("grid construction rejects bad sizes") {
    CHECK_THROWS_AS(Grid::build(1, 6, 1.0), ConfigError);
    CHECK_THROWS_AS(Grid::build(1, 4, 1.0), ConfigError);
    CHECK_THROWS_AS(Grid::build(0, 8, 1.0), ConfigError);
    CHECK_THROWS_AS(Grid::build(4, 8, 1.0), ConfigError);
    CHECK_THROWS_AS(Grid::build(1, 8, 0.0), ConfigError);
    CHECK_THROWS_AS(Grid::build(1, 8, -2.0), ConfigError);
}

TEST_CASE("dft is unitary and matches the explicit kernel") {
    const Grid g = Grid::build(1, 8, 2.0 * kPi);
    const MatrixXcd& F = g.dft();
    CHECK((F.adjoint() * F - MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-13);
    for (long k = 0; k < 8; ++k) {
        for (long j = 0; j < 8; ++j) {
            const Complex want =
                std::exp(Complex(0.0, -g.freq_coord(k, 0) * g.node_coord(j, 0))) / std::sqrt(8.0);
            CHECK(std::abs(F(k, j) - want) < 1e-14);
        }
    }
}

TEST_CASE("first derivative differentiates band-limited data exactly") {
    const Grid g = Grid::build(1, 16, 2.0 * kPi);
    const MatrixXcd d = g.derivative_first(0);
    CHECK((d - d.real().cast<Complex>()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((d + d.transpose()).cwiseAbs().maxCoeff() < 1e-13);

    VectorXcd f(16), want(16);
    for (long j = 0; j < 16; ++j) {
        const double x = g.node_coord(j, 0);
        f[j] = std::sin(x) + 0.25 * std::cos(3.0 * x);
        want[j] = std::cos(x) - 0.75 * std::sin(3.0 * x);
    }
    CHECK((d * f - want).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((d * VectorXcd::Ones(16)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("first derivative drops the unpaired top harmonic") {
    const Grid g = Grid::build(1, 8, 2.0 * kPi);
    const MatrixXcd d = g.derivative_first(0);
    const VectorXcd nyq = g.plane_wave(0);  // frequency index 0 holds -Nyquist
    CHECK((d * nyq).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("full derivative is the Hermitian frequency multiplier") {
    const Grid g = Grid::build(1, 16, 4.0);
    const MatrixXcd d = g.derivative_full(0);
    CHECK((d - d.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    for (long k : {0L, 3L, 8L, 13L}) {
        const VectorXcd e = g.plane_wave(k);
        CHECK((d * e - g.freq_coord(k, 0) * e).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("inner product and norm carry the cell volume") {
    const Grid g = Grid::build(1, 8, 4.0);
    const VectorXcd u = seeded_vector(8, 7);
    const VectorXcd v = seeded_vector(8, 8);
    CHECK(std::abs(g.inner(u, v) - 0.5 * u.dot(v)) < 1e-14);
    CHECK(g.norm(u) == doctest::Approx(std::sqrt(0.5) * u.norm()).epsilon(1e-14));
    CHECK(std::abs(g.norm(g.plane_wave(3)) - 1.0) < 1e-14);
}

TEST_CASE("fourier coefficients use the unitary continuum convention") {
    const double L = 5.0;
    const Grid g = Grid::build(1, 16, L);
    const long k = 10;
    VectorXcd u(16);
    for (long j = 0; j < 16; ++j)
        u[j] = std::exp(Complex(0.0, g.freq_coord(k, 0) * g.node_coord(j, 0)));
    const VectorXcd uhat = g.fourier_coeffs(u);
    for (long i = 0; i < 16; ++i) {
        const double want = (i == k) ? L / std::sqrt(2.0 * kPi) : 0.0;
        CHECK(std::abs(uhat[i] - want) < 1e-12);
    }
}

TEST_CASE("sobolev norm reduces to L2 at order zero and weights plane waves") {
    const Grid g = Grid::build(1, 32, 6.0);
    const VectorXcd u = seeded_vector(32, 21);
    CHECK(g.sobolev_norm(u, 0.0) == doctest::Approx(g.norm(u)).epsilon(1e-12));

    const long k = 24;
    const VectorXcd e = g.plane_wave(k);
    const double xi = g.freq_coord(k, 0);
    const double want = std::pow(1.0 + xi * xi, 0.75) * g.sobolev_norm(e, 0.0);
    CHECK(g.sobolev_norm(e, 1.5) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("product grids concatenate axes with the first factor slowest") {
    const Grid a = Grid::build(1, 8, 2.0);
    const Grid b = Grid::build(1, 16, 8.0);
    const Grid p = Grid::product(a, b);
    CHECK(p.dim() == 2);
    CHECK(p.size() == 128);
    CHECK(p.cell_volume() == doctest::Approx(0.25 * 0.5).epsilon(1e-15));

    for (int i : {0, 3, 7}) {
        for (int j : {0, 5, 15}) {
            const long flat = p.flat_index({i, j});
            CHECK(flat == i * 16 + j);
            CHECK(p.node_coord(flat, 0) == doctest::Approx(a.node_coord(i, 0)).epsilon(1e-15));
            CHECK(p.node_coord(flat, 1) == doctest::Approx(b.node_coord(j, 0)).epsilon(1e-15));
            const std::vector<int> multi = p.multi_index(flat);
            CHECK(multi[0] == i);
            CHECK(multi[1] == j);
        }
    }
    CHECK_THROWS_AS(p.flat_index({0}), Error);
    CHECK_THROWS_AS(p.flat_index({8, 0}), Error);
}
