#pragma once

#include <memory>
#include <vector>

#include "nelsonlab/assemble.hpp"
#include "nelsonlab/density.hpp"
#include "nelsonlab/spectral_operator.hpp"

namespace nelson {

// Operator bundle shared by the dressing and renormalization routines:
// particle grid with its kinetic operator, the boson operator family, and
// the coefficient fields (which must outlive the context).
struct OperatorContext {
    std::shared_ptr<const Grid> particle_grid;  // null for a point particle
    std::shared_ptr<SpectralOperator> K0;
    BosonPack pack;
    const CoefficientSet* coeffs = nullptr;

    long particle_points() const { return K0->dim(); }
    std::vector<double> particle_coord(long node) const;

    // rho_kappa(. - X_i) sampled on the boson grid for every particle node;
    // rows index the particle node.
    MatrixXcd density_rows(const ChargeDensity& density, double kappa) const;
    // Rows of (d/dx_axis rho_kappa)(. - X_i).
    MatrixXcd density_grad_rows(const ChargeDensity& density, double kappa, int axis) const;

    // K0 (x) 1 + 1 (x) omega_reg, bounded below by sigma.
    TensorOperator shifted_generator() const;
    // K0 (x) 1 + 1 (x) omega (exact dispersion).
    TensorOperator exact_generator() const;
};

OperatorContext make_context(std::shared_ptr<const Grid> particle_grid,
                             std::shared_ptr<const Grid> boson_grid,
                             const CoefficientSet& coeffs, double sigma);
// Point-particle variant (single node, zero kinetic part).
OperatorContext make_point_context(std::shared_ptr<const Grid> boson_grid,
                                   const CoefficientSet& coeffs, double sigma);

// The dressing field beta_X = -(K0 + omega_reg)^{-1} W_high omega^{-1/2} rho_X
// for every particle node, plus optional particle-axis gradients.
struct DressingField {
    MatrixXcd beta;               // rows = particle node, cols = boson node
    std::vector<MatrixXcd> grad;  // same layout, one matrix per particle axis
    double kappa = 1.0;
    double sigma = 1.0;
    double max_imag = 0.0;  // relative size of the imaginary part (diagnostic)
};

// The coupling weight uses the regularized dispersion by default; with
// use_exact_omega the exact omega^{-1/2} is used instead. On the support of
// the high window the two dispersions coincide, so the results agree.
DressingField compute_beta(const OperatorContext& ctx, const ChargeDensity& density,
                           double kappa, bool use_exact_omega = false);
// Low-level entry point taking prepared density rows (degenerate inputs such
// as an all-zero source are allowed here).
DressingField compute_beta_from_rows(const OperatorContext& ctx, const MatrixXcd& rho_rows,
                                     double kappa, bool use_exact_omega = false);

// Max over particle nodes of the relative residual of the remainder identity
//   omega^{-1/2} rho_X + (K0 + omega) beta_X = omega^{-1/2} W_low rho_X,
// which holds exactly because the regularized and exact dispersions agree on
// the support of the high window.
double beta_identity_residual(const OperatorContext& ctx, const DressingField& field,
                              const ChargeDensity& density);

// Fills field.grad by spectral differentiation along the particle axes.
// Requires at least 16 nodes per particle axis.
void add_beta_gradients(const OperatorContext& ctx, DressingField& field);

// Independent gradient route: differentiate the density profile analytically
// and push it through the same solve; returns the max relative deviation
// from the spectral gradients.
double beta_gradient_crosscheck(const OperatorContext& ctx, const DressingField& field,
                                const ChargeDensity& density);

// Weighted norm table: |omega^alpha beta_X| per node, with the ratio against
// the H^{-1.6} norm of the sampled density. Rows with alpha >= 1 are
// diagnostics only (the uniform-in-kappa bound needs alpha < 1).
struct BetaNormRow {
    double kappa = 0.0;
    long node = 0;
    double alpha = 0.0;
    double weighted_norm = 0.0;
    double ratio = 0.0;
    bool diagnostic_only = false;
};

std::vector<BetaNormRow> beta_weighted_norms(const OperatorContext& ctx,
                                             const ChargeDensity& density,
                                             const std::vector<double>& kappas,
                                             const std::vector<double>& alphas);

}  // namespace nelson
