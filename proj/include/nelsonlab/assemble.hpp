#pragma once

#include "nelsonlab/coefficients.hpp"
#include "nelsonlab/spectral_operator.hpp"

#include <memory>

namespace nelson {

// Infrared-regularized square root applied to the spectrum of the field
// operator: sigma for lambda <= sigma^2, sqrt(lambda) for lambda >= 4 sigma^2,
// and a monotone C^2 quintic blend in between.  Monotonicity (the blend's
// derivative has negative discriminant) gives smoothed_sqrt >= sigma
// everywhere, and equality with sqrt above 4 sigma^2 is exact.
double smoothed_sqrt(double lambda, double sigma);

// Smooth spectral window in the dispersion value mu: 0 for mu <= 2 sigma,
// 1 for mu >= 4 sigma, quintic smoothstep in between.  Its support starts
// exactly where smoothed_sqrt(mu^2) = mu, which is what makes the dressing
// remainder identity exact rather than approximate.  The complementary low
// window is 1 - cutoff_high.
double cutoff_high(double mu, double sigma);
double cutoff_low(double mu, double sigma);

// Divergence-form second-order contraction sum_jk D_j^* field_jk(x) D_k on
// the full frequency lattice (exactly Hermitian, spectrum matches the
// quadratic symbol for constant fields, Nyquist mode included).
MatrixXcd second_order_matrix(const Grid& grid, const MatrixField& field);

// Boson one-particle operator  h = sum_jk D_j^* a_jk D_k + v + m^2.
SpectralOperator assemble_h(const std::shared_ptr<const Grid>& grid,
                            const CoefficientSet& coeffs);
// Particle kinetic operator K0 = sum_jk D_j^* A_jk D_k and K = K0 + W.
SpectralOperator assemble_K0(const std::shared_ptr<const Grid>& grid,
                             const CoefficientSet& coeffs);
SpectralOperator assemble_K(const std::shared_ptr<const Grid>& grid,
                            const CoefficientSet& coeffs);

// Trivial particle space: one point, K0 = 0 (fixed-source limit).
std::shared_ptr<SpectralOperator> point_particle();

// The boson-side operator family used by the dressing: h, its exact and
// regularized dispersions, and the high/low spectral windows at scale sigma.
// All five share the eigenbasis of h, so products among them commute exactly.
struct BosonPack {
    std::shared_ptr<const Grid> grid;
    std::shared_ptr<SpectralOperator> h;
    std::shared_ptr<SpectralOperator> omega;       // sqrt(h)
    std::shared_ptr<SpectralOperator> omega_reg;   // smoothed_sqrt(h) >= sigma
    std::shared_ptr<SpectralOperator> window_high; // cutoff_high(sqrt(h))
    std::shared_ptr<SpectralOperator> window_low;  // complementary window
    double sigma = 0.0;
};

BosonPack build_boson_pack(const std::shared_ptr<const Grid>& grid,
                           const CoefficientSet& coeffs, double sigma);

} // namespace nelson
