#pragma once

#include <vector>

#include "nelsonlab/dressing.hpp"

namespace nelson {

// Renormalization energy at particle position X and cutoff kappa:
//   E(X) = -(1/2) (2 pi)^{-d} Int (h0(X,xi)+1)^{-1/2} K(X,xi) (K(X,xi)+1)^{-2}
//                                |rho_hat(xi/kappa)|^2 d xi,
// with both symbols frozen at X and rho_hat the unitary Fourier transform of
// the unscaled profile. Always <= 0; diverges like log(kappa) in d = 3.
double E_kappa(const CoefficientSet& coeffs, const ChargeDensity& density,
               const std::vector<double>& X, double kappa, int angular_order = 16,
               double rel_tol = 1e-8);

// Large-kappa slope dE/d(log kappa) of the frozen-coefficient energy:
//   -(1/2) (2 pi)^{-2d} q^2 Int_{S^{d-1}} (th.a(X) th)^{-1/2} (th.A(X) th)^{-1} dth.
// Meaningful in d = 3, where the energy is log-divergent.
double E_slope_asymptote(const CoefficientSet& coeffs, const std::vector<double>& X,
                         double q, int angular_order = 32);

// Sharp-cutoff self-energy of the constant-coefficient reference model in
// d = 3 (point source smeared to the indicator of |k| < Lambda, no Fourier
// prefactor):
//   E_Lambda = -(1/2) Int_{|k|<Lambda} chi(omega(k) >= sigma)
//              / (omega(k) (omega(k) + |k|^2/2)) dk,   omega = sqrt(k^2+m^2).
// Its increments E_{2 Lambda} - E_Lambda approach a constant (pure log
// growth); the slope relative to E_kappa differs by the Fourier-convention
// factor (2 pi)^{2d} / q^2.
double nelson_E_Lambda(double Lambda, double mass, double sigma, double rel_tol = 1e-10);

// Exact-operator dressing potential on the tensor grid, one value per
// particle node (plain L^2 pairings in the boson variable):
//   V(X) = -(rho_X | omega^{-1} W_high T^{-1} rho_X)
//          + 1/2 (T^{-1} rho_X | W_high^2 T^{-1} rho_X)
//          + 1/2 sum_jk A_jk(X) (d_Xj T^{-1} rho_X | omega^{-1} W_high^2 d_Xk T^{-1} rho_X).
VectorXd V_kappa_all(const OperatorContext& ctx, const ChargeDensity& density,
                     double kappa);

// Split of V into the part with at least one regularized factor (V1, stays
// bounded as kappa grows) and the singular part (V2, matches the frozen
// surrogate at leading order). V1 + V2 = V exactly.
struct SplitPotential {
    VectorXd V1;
    VectorXd V2;
    VectorXd V;
};
SplitPotential split_V_all(const OperatorContext& ctx, const ChargeDensity& density,
                           double kappa);

// Frozen-coefficient surrogate of V2 via the model symbols, quantized on the
// boson grid per particle node and normalized like E_kappa:
//   (2 pi)^{-d} [ -(rho_X | c_X(x,D) rho_X)
//                 + 1/2 sum_jk A_jk(X) (d_j rho_X | d_X(x,D) d_k rho_X) ].
VectorXd V_tilde2_all(const OperatorContext& ctx, const ChargeDensity& density,
                      double kappa);

// Same surrogate with the inner metric also frozen at X, evaluated by
// quadrature (gridless, any dimension). Its difference from E_kappa stays
// bounded as kappa -> infinity: the integrand gains three orders of decay.
double V_tilde2_frozen(const CoefficientSet& coeffs, const ChargeDensity& density,
                       const std::vector<double>& X, double kappa, int angular_order = 16,
                       double rel_tol = 1e-8);

// Cutoff-removal study along a kappa ladder (at least three rungs).
// Increments are sup-norm differences of successive rungs.
struct RenormReport {
    std::vector<double> kappas;
    std::vector<double> raw_sup;          // sup_X |raw quantity| per rung
    std::vector<double> subtracted_sup;   // sup_X |subtracted quantity| per rung
    std::vector<double> increment_raw;    // successive sup differences, raw
    std::vector<double> increment_sub;    // successive sup differences, subtracted
    bool increments_decreasing = false;   // subtracted increments strictly decrease
};

// d = 1 exact-operator route: raw = V, subtracted = V - E (both converge;
// the subtracted increments must decrease).
RenormReport renorm_limit_study_d1(const OperatorContext& ctx, const ChargeDensity& density,
                                   const std::vector<double>& kappas);

// d = 3 frozen-symbol route at a single X: raw = E (log-divergent),
// subtracted = V_tilde2_frozen - E (bounded).
RenormReport renorm_limit_study_d3(const CoefficientSet& coeffs, const ChargeDensity& density,
                                   const std::vector<double>& X,
                                   const std::vector<double>& kappas, int angular_order = 16,
                                   double rel_tol = 1e-8);

}  // namespace nelson
