#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nelsonlab/symbols.hpp"

using namespace nelson;

namespace {

double bracket(double xi) { return std::sqrt(1.0 + xi * xi); }

}  // namespace

TEST_CASE("left quantization degenerates to multiplier and multiplication") {
    const Grid grid = Grid::build(1, 16, 5.0);

    SUBCASE("x-independent symbol is the Fourier multiplier") {
        const Symbol sym{[](const std::vector<double>&, const std::vector<double>& xi) {
                             return 1.0 / (1.0 + xi[0] * xi[0]);
                         },
                         -2.0, "multiplier"};
        const MatrixXcd q = quantize_kn(sym, grid);
        for (long k = 0; k < grid.size(); ++k) {
            const VectorXcd wave = grid.plane_wave(k);
            const double want = 1.0 / (1.0 + grid.freq_coord(k, 0) * grid.freq_coord(k, 0));
            CHECK((q * wave - want * wave).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SUBCASE("xi-independent symbol is node multiplication") {
        const Symbol sym{[](const std::vector<double>& x, const std::vector<double>&) {
                             return 2.0 + std::cos(2.0 * M_PI * x[0] / 5.0);
                         },
                         0.0, "multiplication"};
        const MatrixXcd q = quantize_kn(sym, grid);
        for (long j = 0; j < grid.size(); ++j) {
            const double want = 2.0 + std::cos(2.0 * M_PI * grid.node_coord(j, 0) / 5.0);
            CHECK(std::abs(q(j, j) - want) < 1e-12);
        }
        MatrixXcd off = q;
        off.diagonal().setZero();
        CHECK(off.cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("missing evaluator is rejected") {
        CHECK_THROWS_AS(quantize_kn(Symbol{}, grid), ConfigError);
        CHECK_THROWS_AS(quantize_weyl(Symbol{}, grid), ConfigError);
    }
}

TEST_CASE("weyl quantization is hermitian and symmetrizes first-order symbols") {
    const Grid grid = Grid::build(1, 16, 5.0);

    SUBCASE("real symbol gives a hermitian matrix") {
        const Symbol sym{[](const std::vector<double>& x, const std::vector<double>& xi) {
                             return std::cos(2.0 * M_PI * x[0] / 5.0) * xi[0] * xi[0] +
                                    1.0 / (1.0 + xi[0] * xi[0]);
                         },
                         2.0, "mixed"};
        const MatrixXcd q = quantize_weyl(sym, grid);
        CHECK((q - q.adjoint()).cwiseAbs().maxCoeff() < 1e-11);
    }
    SUBCASE("w(x) xi quantizes to the symmetrized product") {
        auto w = [](double x) { return 1.0 + 0.4 * std::sin(2.0 * M_PI * x / 5.0); };
        const Symbol sym{[&w](const std::vector<double>& x, const std::vector<double>& xi) {
                             return w(x[0]) * xi[0];
                         },
                         1.0, "drift"};
        const MatrixXcd q = quantize_weyl(sym, grid);
        VectorXcd wdiag(grid.size());
        for (long j = 0; j < grid.size(); ++j) wdiag[j] = w(grid.node_coord(j, 0));
        const MatrixXcd wmat = MatrixXcd(wdiag.asDiagonal());
        const MatrixXcd d = grid.derivative_full(0);
        CHECK((q - 0.5 * (wmat * d + d * wmat)).cwiseAbs().maxCoeff() < 1e-11);
    }
}

TEST_CASE("sobolev mapping norm weighs frequencies correctly") {
    const Grid grid = Grid::build(1, 16, 2.0 * M_PI);
    const long n = grid.size();

    // <xi>^{-1} multiplier maps H^s -> H^{s+1} with norm exactly one
    VectorXcd mul(n);
    for (long k = 0; k < n; ++k) mul[k] = 1.0 / bracket(grid.freq_coord(k, 0));
    const MatrixXcd op = grid.dft().adjoint() * mul.asDiagonal() * grid.dft();
    CHECK(sobolev_mapping_norm(op, grid, 0.0, -1.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sobolev_mapping_norm(op, grid, 2.0, -1.0) == doctest::Approx(1.0).epsilon(1e-10));

    // constant multiplication has the same norm in every H^s
    const MatrixXcd scaled = 2.0 * MatrixXcd::Identity(n, n);
    CHECK(sobolev_mapping_norm(scaled, grid, 1.0, 0.0) == doctest::Approx(2.0).epsilon(1e-10));

    CHECK_THROWS_AS(sobolev_mapping_norm(MatrixXcd::Identity(4, 4), grid, 0.0, 0.0),
                    ConfigError);
}

TEST_CASE("frequency index lookup respects the lattice layout") {
    const Grid grid = Grid::build(1, 16, 4.0);
    for (long k = -8; k < 8; ++k) {
        const long flat = freq_flat_index(grid, {k});
        CHECK(grid.freq_coord(flat, 0) == doctest::Approx(2.0 * M_PI * k / 4.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(freq_flat_index(grid, {8}), ConfigError);
    CHECK_THROWS_AS(freq_flat_index(grid, {-9}), ConfigError);
    CHECK_THROWS_AS(freq_flat_index(grid, {0, 0}), ConfigError);
}

TEST_CASE("remainder decay check recovers an exact power law") {
    const Grid grid = Grid::build(1, 64, 2.0 * M_PI);
    const Symbol lead{[](const std::vector<double>&, const std::vector<double>& xi) {
                          return 1.0 + xi[0] * xi[0];
                      },
                      2.0, "lead"};
    const Symbol full{[](const std::vector<double>&, const std::vector<double>& xi) {
                          const double b = bracket(xi[0]);
                          return b * b + 3.0 * std::sqrt(b);
                      },
                      2.0, "full"};
    const MatrixXcd exact_m = quantize_kn(full, grid);
    const ExactApply exact = [&exact_m](const VectorXcd& v) { return VectorXcd(exact_m * v); };

    std::vector<long> probes;
    for (long k : {1L, 2L, 4L, 8L, 16L}) probes.push_back(freq_flat_index(grid, {k}));

    const DecayReport report = remainder_decay_check(exact, lead, grid, probes);
    REQUIRE(!report.exact_match);
    REQUIRE(report.relative_residual.size() == probes.size());
    // |full - lead| / |lead| = 3 <xi>^{-3/2} exactly on every probe
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const double want = 3.0 * std::pow(report.freq_weight[i], -1.5);
        CHECK(report.relative_residual[i] == doctest::Approx(want).epsilon(1e-10));
    }
    CHECK(report.slope == doctest::Approx(-1.5).epsilon(1e-9));
    CHECK(report.max_log_residual < 1e-9);
}

TEST_CASE("remainder decay check flags exact agreement and bad probes") {
    const Grid grid = Grid::build(1, 64, 2.0 * M_PI);
    const Symbol lead{[](const std::vector<double>&, const std::vector<double>& xi) {
                          return 1.0 + xi[0] * xi[0];
                      },
                      2.0, "lead"};
    const MatrixXcd lead_m = quantize_kn(lead, grid);
    const ExactApply exact = [&lead_m](const VectorXcd& v) { return VectorXcd(lead_m * v); };

    std::vector<long> probes;
    for (long k : {1L, 2L, 4L, 8L, 16L}) probes.push_back(freq_flat_index(grid, {k}));
    const DecayReport report = remainder_decay_check(exact, lead, grid, probes);
    CHECK(report.exact_match);
    CHECK(report.slope == 0.0);

    CHECK_THROWS_AS(remainder_decay_check(ExactApply{}, lead, grid, probes), ConfigError);
    CHECK_THROWS_AS(remainder_decay_check(exact, lead, grid, {probes[0]}), ConfigError);
    // top octave: harmonic 17 > 64/4
    CHECK_THROWS_AS(
        remainder_decay_check(exact, lead, grid, {probes[0], freq_flat_index(grid, {17})}),
        ConfigError);
    // sub-decade span of <xi>
    CHECK_THROWS_AS(remainder_decay_check(
                        exact, lead, grid,
                        {freq_flat_index(grid, {2}), freq_flat_index(grid, {8})}),
                    ConfigError);
}

TEST_CASE("default probes are log-spaced below the top octave") {
    const Grid grid = Grid::build(1, 64, 2.0 * M_PI);
    const std::vector<long> probes = default_probe_freqs(grid);
    REQUIRE(probes.size() >= 5);
    long prev = 0;
    for (long flat : probes) {
        const long harmonic = std::lround(grid.freq_coord(flat, 0)); // spacing is 1 at L = 2 pi
        CHECK(harmonic > prev);
        CHECK(harmonic <= 16);
        prev = harmonic;
    }
}

TEST_CASE("model symbols compose the documented resolvent formulas") {
    FieldSpec a;
    a.type = "sinusoidal";
    a.base = 1.2;
    a.amplitude = 0.2;
    FieldSpec v;
    v.base = 0.1;
    FieldSpec m;
    m.base = 0.3;
    FieldSpec A;
    A.diag = {0.7, 1.1};
    FieldSpec W;
    W.base = 0.2;
    const CoefficientSet coeffs(2, 6.0, 6.0, a, v, m, A, W);
    const LeadingSymbols ls(coeffs);

    const std::vector<double> x{0.3, -0.4}, xi{1.5, -2.0};
    const std::vector<double> X{-1.0, 2.0}, Xi{0.5, 1.25};
    const double h0 = coeffs.h0_symbol(x, xi);
    const double K = coeffs.K_symbol(X, xi);

    CHECK(ls.h0().eval(x, xi) == doctest::Approx(h0).epsilon(1e-14));
    CHECK(ls.h0().order == 2.0);
    CHECK(ls.kinetic().eval(X, Xi) ==
          doctest::Approx(0.7 * 0.5 * 0.5 + 1.1 * 1.25 * 1.25).epsilon(1e-14));
    CHECK(ls.kinetic().order == 2.0);
    CHECK(ls.omega_inverse().eval(x, xi) ==
          doctest::Approx(1.0 / std::sqrt(h0 + 1.0)).epsilon(1e-14));
    CHECK(ls.omega_inverse().order == -1.0);
    CHECK(ls.t_resolvent(X).eval(x, xi) ==
          doctest::Approx(1.0 / (K + std::sqrt(h0 + 1.0))).epsilon(1e-14));
    CHECK(ls.t_resolvent(X).order == -2.0);
    CHECK(ls.omega_t_resolvent(X).eval(x, xi) ==
          doctest::Approx(1.0 / (std::sqrt(h0 + 1.0) * (K + 1.0))).epsilon(1e-14));
    CHECK(ls.omega_t_resolvent(X).order == -3.0);
    CHECK(ls.t_omega_t_resolvent(X).eval(x, xi) ==
          doctest::Approx(1.0 / (std::sqrt(h0 + 1.0) * (K + 1.0) * (K + 1.0))).epsilon(1e-14));
    CHECK(ls.t_omega_t_resolvent(X).order == -5.0);

    const Symbol prod = product_t_resolvent(coeffs, 2);
    const std::vector<double> xcat{X[0], X[1], x[0], x[1]};
    const std::vector<double> xicat{Xi[0], Xi[1], xi[0], xi[1]};
    const double Kp = coeffs.K_symbol(X, Xi);
    CHECK(prod.eval(xcat, xicat) ==
          doctest::Approx(1.0 / (Kp + std::sqrt(h0 + 1.0))).epsilon(1e-14));
    CHECK(prod.order == -2.0);
}
