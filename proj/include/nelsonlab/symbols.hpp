#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nelsonlab/coefficients.hpp"
#include "nelsonlab/grid.hpp"

namespace nelson {

// Scalar phase-space symbol a(x, xi) together with its polynomial growth
// order p (|a| ~ <xi>^p), used by the Sobolev mapping checks.
struct Symbol {
    std::function<double(const std::vector<double>&, const std::vector<double>&)> eval;
    double order = 0.0;
    std::string label = "symbol";
};

// Left quantization on the grid. Acts on a lattice plane wave e_eta as
// a(x, eta) e_eta(x); for x-independent symbols this is exactly the Fourier
// multiplier, for xi-independent symbols exactly multiplication by a(x).
MatrixXcd quantize_kn(const Symbol& symbol, const Grid& grid);

// Weyl quantization assembled in the Fourier basis: the (out, in) entry is
// the discrete x-Fourier coefficient of the symbol at the harmonic
// out - in, with xi evaluated at the frequency midpoint (out + in)/2.
// Exactly Hermitian for real symbols, and for a(x, xi) = w(x) xi it equals
// the symmetrized product (w D + D w) / 2.
MatrixXcd quantize_weyl(const Symbol& symbol, const Grid& grid);

// Frozen-coefficient model symbols for the dressing kernels. The symbols
// parameterized by the particle position X freeze the outer quadratic form
// at X while the inner metric stays variable in x. The returned closures
// keep a reference to the coefficient set, which must outlive them.
class LeadingSymbols {
  public:
    explicit LeadingSymbols(const CoefficientSet& coeffs);

    Symbol h0() const;             // xi . a(x) xi
    Symbol kinetic() const;        // Xi . A(X) Xi, evaluated at (X, Xi)
    Symbol omega_inverse() const;  // (h0 + 1)^{-1/2}

    // (K(X, xi) + sqrt(h0(x, xi) + 1))^{-1}: models the inverse of the
    // shifted two-body generator at high frequency.
    Symbol t_resolvent(std::vector<double> X) const;

    // (h0 + 1)^{-1/2} (K(X, xi) + 1)^{-1} and its square-resolvent variant;
    // these drive the frozen-coefficient route to the renormalization
    // integrand.
    Symbol omega_t_resolvent(std::vector<double> X) const;
    Symbol t_omega_t_resolvent(std::vector<double> X) const;

  private:
    const CoefficientSet* coeffs_;
};

// Symbol on a product (particle x boson) grid modelling the inverse of
// K0 (x) 1 + 1 (x) omega at the concatenated frequency (Xi, xi):
// (Xi . A(X) Xi + sqrt(xi . a(x) xi + 1))^{-1}.
Symbol product_t_resolvent(const CoefficientSet& coeffs, int particle_dim);

// Operator norm of `op` from the discrete Sobolev space H^s to H^{s-p},
// computed as the largest singular value of the frequency-weighted matrix.
double sobolev_mapping_norm(const MatrixXcd& op, const Grid& grid, double s, double p);

// Flat index of the lattice frequency with per-axis harmonics k (in units
// of the frequency spacing, range [-n/2, n/2)).
long freq_flat_index(const Grid& grid, const std::vector<long>& harmonics);

// Relative residual of an exact operator against the left quantization of
// a candidate leading symbol, probed on plane waves, with a log-log decay
// fit. Probes must stay below half the Nyquist frequency on every axis
// (the top octave carries unreliable lattice artifacts) and must span at
// least one decade of <xi>.
struct DecayReport {
    std::vector<double> freq_weight;        // <xi> per probe
    std::vector<double> relative_residual;  // |(exact - lead) e| / |lead e|
    double slope = 0.0;
    double max_log_residual = 0.0;
    bool exact_match = false;  // all residuals at rounding level; fit skipped
};

using ExactApply = std::function<VectorXcd(const VectorXcd&)>;

DecayReport remainder_decay_check(const ExactApply& exact, const Symbol& lead,
                                  const Grid& grid, const std::vector<long>& probe_flat);

// Log-spaced probe frequencies along the positive diagonal of the lattice,
// excluding the top octave.
std::vector<long> default_probe_freqs(const Grid& grid);

}  // namespace nelson
