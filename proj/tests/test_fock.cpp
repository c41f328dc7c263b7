#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nelsonlab/fock.hpp"

using namespace nelson;

TEST_CASE("state enumeration is by degree then lexicographic") {
    const FockBasis fock(2, 2);
    REQUIRE(fock.dim() == 6); // C(2 + 2, 2)
    const std::vector<std::vector<int>> want = {{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}};
    for (long i = 0; i < 6; ++i) {
        CHECK(fock.state(i) == want[i]);
        CHECK(fock.index_of(want[i]) == i);
        CHECK(fock.total(i) == want[i][0] + want[i][1]);
    }
    CHECK_THROWS_AS(fock.index_of({0, 3}), ConfigError);
    CHECK_THROWS_AS(fock.index_of({0}), ConfigError);
}

TEST_CASE("creation matrices carry sqrt factors and drop at the cap") {
    const FockBasis fock(2, 2);
    MatrixXd c0 = MatrixXd::Zero(6, 6), c1 = MatrixXd::Zero(6, 6);
    // states: 0:(0,0) 1:(0,1) 2:(1,0) 3:(0,2) 4:(1,1) 5:(2,0)
    c0(2, 0) = 1.0;
    c0(4, 1) = 1.0;
    c0(5, 2) = std::sqrt(2.0);
    c1(1, 0) = 1.0;
    c1(3, 1) = std::sqrt(2.0);
    c1(4, 2) = 1.0;
    CHECK((MatrixXd(fock.create(0)) - c0).cwiseAbs().maxCoeff() == 0.0);
    CHECK((MatrixXd(fock.create(1)) - c1).cwiseAbs().maxCoeff() == 0.0);
    CHECK((MatrixXd(fock.annihilate(0)) - c0.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("commutation relations are exact below the cap, compressed at it") {
    const FockBasis fock(2, 4);
    for (int m = 0; m < 2; ++m) {
        for (int mp = 0; mp < 2; ++mp) {
            const MatrixXd comm = MatrixXd(fock.annihilate(m)) * MatrixXd(fock.create(mp)) -
                                  MatrixXd(fock.create(mp)) * MatrixXd(fock.annihilate(m));
            const double delta = (m == mp) ? 1.0 : 0.0;
            for (long j = 0; j < fock.dim(); ++j) {
                VectorXd want = VectorXd::Zero(fock.dim());
                if (fock.total(j) <= fock.n_max() - 1) {
                    want[j] = delta;
                    CHECK((comm.col(j) - want).cwiseAbs().maxCoeff() < 1e-14);
                } else if (m == mp) {
                    // top sector: creation is dropped, leaving -n_m
                    CHECK(comm(j, j) == doctest::Approx(-double(fock.state(j)[m])));
                }
            }
        }
    }
}

TEST_CASE("smeared operators follow the mode coefficients") {
    const FockBasis fock(3, 3);
    VectorXcd f(3);
    f << Complex(0.3, -0.7), Complex(-1.1, 0.0), Complex(0.2, 0.5);

    MatrixXcd creator_want = MatrixXcd::Zero(fock.dim(), fock.dim());
    MatrixXcd annihilator_want = MatrixXcd::Zero(fock.dim(), fock.dim());
    for (int m = 0; m < 3; ++m) {
        creator_want += f[m] * MatrixXd(fock.create(m)).cast<Complex>();
        annihilator_want += std::conj(f[m]) * MatrixXd(fock.annihilate(m)).cast<Complex>();
    }
    CHECK((MatrixXcd(fock.creator(f)) - creator_want).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((MatrixXcd(fock.annihilator(f)) - annihilator_want).cwiseAbs().maxCoeff() < 1e-14);

    const MatrixXcd phi = MatrixXcd(fock.field(f));
    CHECK((phi - (creator_want + annihilator_want) / std::sqrt(2.0)).cwiseAbs().maxCoeff() <
          1e-14);
    CHECK((phi - phi.adjoint()).cwiseAbs().maxCoeff() < 1e-14);

    CHECK_THROWS_AS(fock.creator(VectorXcd::Zero(2)), ConfigError);
    CHECK_THROWS_AS(fock.annihilator(VectorXcd::Zero(4)), ConfigError);
}

TEST_CASE("second quantization preserves degree and matches explicit sums") {
    const FockBasis fock(2, 3);
    MatrixXcd b(2, 2);
    b << Complex(0.5, 0.0), Complex(0.2, 0.4), Complex(0.2, -0.4), Complex(-0.3, 0.0);

    // the annihilator lowers before the creator raises, so the compressed
    // product c^* c agrees with the direct assembly on the whole space
    MatrixXcd want = MatrixXcd::Zero(fock.dim(), fock.dim());
    for (int m = 0; m < 2; ++m) {
        for (int mp = 0; mp < 2; ++mp) {
            want += b(m, mp) * (MatrixXd(fock.create(m)) * MatrixXd(fock.annihilate(mp)))
                                   .cast<Complex>();
        }
    }
    const MatrixXcd got = MatrixXcd(fock.dgamma(b));
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-14);
    for (long i = 0; i < fock.dim(); ++i) {
        for (long j = 0; j < fock.dim(); ++j) {
            if (fock.total(i) != fock.total(j)) CHECK(std::abs(got(i, j)) == 0.0);
        }
        Complex diag(0.0, 0.0);
        for (int m = 0; m < 2; ++m) diag += b(m, m) * double(fock.state(i)[m]);
        CHECK(std::abs(got(i, i) - diag) < 1e-14);
    }
    CHECK_THROWS_AS(fock.dgamma(MatrixXcd::Zero(3, 3)), ConfigError);
}

TEST_CASE("diagonal helpers count occupations") {
    const FockBasis fock(2, 3);
    VectorXd per_mode(2);
    per_mode << 1.5, -0.5;
    const VectorXd dg = fock.dgamma_diag(per_mode);
    const VectorXd nd = fock.number_diag();
    const VectorXd mask = fock.sector_mask(2);
    for (long i = 0; i < fock.dim(); ++i) {
        const auto& s = fock.state(i);
        CHECK(dg[i] == doctest::Approx(1.5 * s[0] - 0.5 * s[1]));
        CHECK(nd[i] == doctest::Approx(double(s[0] + s[1])));
        CHECK(mask[i] == ((s[0] + s[1] <= 2) ? 1.0 : 0.0));
    }
    CHECK_THROWS_AS(fock.dgamma_diag(VectorXd::Zero(3)), ConfigError);
}

TEST_CASE("construction guards reject unusable bases") {
    CHECK_THROWS_AS(FockBasis(0, 3), ConfigError);
    CHECK_THROWS_AS(FockBasis(2, -1), ConfigError);
    // C(40 + 12, 12) is far above the 2e5 state guard
    CHECK_THROWS_AS(FockBasis(40, 12), ConfigError);
    // boundary sanity: a one-mode chain has n_max + 1 states
    const FockBasis chain(1, 5);
    CHECK(chain.dim() == 6);
    CHECK(chain.state(5) == std::vector<int>{5});
}
