#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nelsonlab/counterterm.hpp"
#include "nelsonlab/dressing.hpp"
#include "nelsonlab/fock.hpp"
#include "nelsonlab/linalg.hpp"

namespace nelson {

// Lowest eigenmodes of the field operator h, orthonormal in the mesh-weighted
// L^2 inner product, together with the restricted spectral data.
struct ModeSpace {
    MatrixXcd modes;      // boson_points x count, L^2-orthonormal columns
    VectorXd h_eigs;      // eigenvalues of h on the kept modes
    VectorXd omega;       // dispersion sqrt(h)
    VectorXd omega_reg;   // regularized dispersion, bounded below by sigma
    VectorXd win_high;    // high-frequency window at omega
    VectorXd win_low;     // complementary window
    double sigma = 0.0;
    double cell_volume = 0.0;

    int count() const { return static_cast<int>(modes.cols()); }
    // Mode coefficients of a grid function (L^2 pairing).
    VectorXcd project(const VectorXcd& u) const;
    // Relative L^2 mass of u outside the mode span.
    double leakage(const VectorXcd& u) const;
};

ModeSpace build_mode_space(const BosonPack& pack, int count);

// Operator on (particle grid) x (truncated Fock space), stored as a sum of
// tensor products of a dense particle factor with a sparse Fock factor.
// Vectors are flattened with the particle index slowest.
class StructuredOperator {
  public:
    StructuredOperator(long particle_dim, long fock_dim)
        : particle_dim_(particle_dim), fock_dim_(fock_dim) {}

    long particle_dim() const { return particle_dim_; }
    long fock_dim() const { return fock_dim_; }
    long dim() const { return particle_dim_ * fock_dim_; }
    long term_count() const { return static_cast<long>(terms_.size()); }

    void add(MatrixXcd particle_factor, SparseC fock_factor);
    void add_particle(const MatrixXcd& particle_factor);  // tensor identity on the right
    void add_fock(const SparseC& fock_factor);            // tensor identity on the left
    void append(const StructuredOperator& other);         // concatenate term lists

    VectorXcd apply(const VectorXcd& v) const;
    VectorXcd apply_adjoint(const VectorXcd& v) const;
    LinOp linop() const;
    // Largest relative asymmetry |<u,(A - A*)v>| seen over seeded probe pairs.
    double asymmetry(int probes = 4, unsigned seed = 271828) const;
    MatrixXcd dense(long max_dimension = 5000) const;

  private:
    long particle_dim_;
    long fock_dim_;
    std::vector<std::pair<MatrixXcd, SparseC>> terms_;
};

// Mode-space dressing data at a fixed cutoff.
struct ModeDressing {
    double kappa = 0.0;
    MatrixXcd rho;                    // particle_points x modes, charge coefficients
    MatrixXcd coupling;               // omega^{-1/2} rho, the interaction coupling
    MatrixXcd coupling_low;           // omega^{-1/2} (low window) rho
    MatrixXcd beta;                   // dressing field in mode coefficients
    std::vector<MatrixXcd> beta_grad; // per particle axis
    VectorXd potential;               // effective potential at each particle node
    double max_coupling_leakage = 0.0;
    double max_beta_norm = 0.0;       // max over nodes of the l^2 mode norm of beta
};

// Hamiltonians for a particle coupled to the truncated field.
class CoupledSystem {
  public:
    CoupledSystem(std::shared_ptr<const OperatorContext> ctx, int modes, int n_max);

    const OperatorContext& context() const { return *ctx_; }
    const FockBasis& fock() const { return fock_; }
    const ModeSpace& mode_space() const { return mode_space_; }
    long particle_points() const { return particle_dim_; }
    long dim() const { return particle_dim_ * fock_.dim(); }
    const MatrixXcd& particle_operator() const { return kinetic_; }

    // K (x) 1 + 1 (x) dGamma(omega).
    StructuredOperator free_hamiltonian() const;
    // Free part plus phi(omega^{-1/2} rho_X) at cutoff kappa.
    StructuredOperator hamiltonian(const ChargeDensity& density, double kappa) const;

    ModeDressing dress(const ChargeDensity& density, double kappa) const;
    // The commutator remainder of the dressing transformation: first-order
    // derivative terms paired with single field operators plus the purely
    // quadratic field terms, all built from grad beta.
    StructuredOperator quadratic_remainder(const ModeDressing& dressing) const;
    // K (x) 1 + 1 (x) dGamma(omega) + phi(low coupling) + quadratic remainder
    // + effective potential, assembled term by term.
    StructuredOperator dressed_hamiltonian(const ModeDressing& dressing) const;
    // Frozen-symbol energy subtraction at each particle node.
    VectorXd counterterm_diag(const ChargeDensity& density, double kappa) const;

    // Per-node dressing unitaries exp((a(beta_X) - a*(beta_X))/sqrt(2)).
    std::vector<MatrixXcd> dressing_unitary_blocks(const ModeDressing& dressing) const;
    MatrixXcd dressing_unitary_block(const ModeDressing& dressing, long node) const;
    // Apply the block-diagonal unitary (adjoint = false) or its adjoint.
    VectorXcd apply_unitary(const std::vector<MatrixXcd>& blocks, const VectorXcd& v,
                            bool adjoint = false) const;

  private:
    std::shared_ptr<const OperatorContext> ctx_;
    FockBasis fock_;
    ModeSpace mode_space_;
    long particle_dim_;
    MatrixXcd kinetic_;  // K0 + W on the particle grid (zero for a point particle)
    std::vector<MatrixXcd> derivative_;  // first-order derivative per particle axis
};

// Shift of the field part under conjugation by the dressing unitary built
// from beta: U (dGamma(omega) + phi(f)) U* should equal
// dGamma(omega) + phi(omega beta + f) + Re<omega beta / 2 + f, beta>.
// The residual is measured in operator norm on the sector with total
// occupation <= protected_total (default n_max - 2), relative to the shifted
// operator. Truncating the exponential spoils the identity near the cap, so
// the residual shrinks steeply as protected_total decreases.
struct WeylShiftReport {
    double residual = 0.0;
    double beta_norm = 0.0;
    long protected_dim = 0;
    double scalar_shift = 0.0;
};

WeylShiftReport verify_weyl_shift(const FockBasis& fock, const VectorXd& omega,
                                  const VectorXcd& beta, const VectorXcd& coupling,
                                  long protected_total = -1);

// Interpolated number-weighted bounds for operator-valued smeared fields on
// (particle) x (Fock). Row ids:
//   1: (N+1)^{-s/2} a(v) (H0+1)^{-(1-s)/2}   vs ||omega^{(s-1)/2} v||
//   2: (H0+1)^{-s/2} a*(v) (N+1)^{-(1-s)/2}  vs ||omega^{-s/2} v||
//   3: (N+1)^{-s} a(v1) a(v2) (H0+1)^{-1+s}  vs product of ||omega^{-(1-s)/2} v_i||
//   4: (H0+1)^{-s} a*(v1) a*(v2) (N+1)^{-1+s} vs product of ||omega^{-s/2} v_i||
//   5: a(v) (N+1)^{-1/2}                      vs ||v||
//   6: a*(v) (N+1)^{-1/2}                     vs ||v||
// The coupling norm is the operator norm from the particle space into
// particle (x) modes. With grading_floor >= 0 the number operator counts only
// modes with omega >= grading_floor / 2 and couplings are restricted to them,
// which is the massless variant.
struct NumberBoundRow {
    int bound = 0;
    double s = 0.0;
    unsigned seed = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
};

std::vector<NumberBoundRow> number_bounds(const MatrixXcd& particle_op, const FockBasis& fock,
                                          const VectorXd& omega,
                                          const std::vector<double>& s_values,
                                          const std::vector<unsigned>& seeds,
                                          double grading_floor = -1.0);

// Relative form bound of a Hermitian perturbation B against a nonnegative
// H0: for each c in the grid, a = ||(H0+c)^{-1/2} B (H0+c)^{-1/2}|| gives
// |<u, B u>| <= a <u, H0 u> + (a c) <u, u>. c = 0 rows are valid only when
// H0 is strictly positive.
struct FormBoundRow {
    double c = 0.0;
    double a = 0.0;
    double b = 0.0;
    bool valid = false;
};

struct FormBoundReport {
    std::vector<FormBoundRow> rows;
    double best_a = 0.0;  // smallest valid a, with its b
    double best_b = 0.0;
    bool premise_holds = false;  // some valid row has a < 1
};

FormBoundReport form_bound(const MatrixXcd& h0, const MatrixXcd& perturbation,
                           const std::vector<double>& c_grid);

// Ground states with a deterministic phase: the first entry of largest
// magnitude is rotated to be real and positive.
struct GroundState {
    double energy = 0.0;
    VectorXcd vector;
    long iterations = 0;
    double residual = 0.0;
};

GroundState ground_state(const SpectralOperator& op);
GroundState ground_state(const LinOp& op, long dim, int max_iter = 600, double tol = 1e-10,
                         unsigned seed = 1234);

// (H - z)^{-1} psi for z at least one unit below the spectrum.
VectorXcd resolvent_apply(const SpectralOperator& op, double z, const VectorXcd& psi);
MatrixXcd resolvent_matrix(const SpectralOperator& op, double z);

// Closed-form ground energy of dGamma(omega) + phi(g): -<g, g/omega>/2.
double coherent_ground_energy(const VectorXd& omega, const VectorXcd& g);

}  // namespace nelson
