#pragma once

#include "nelsonlab/grid.hpp"

#include <functional>

namespace nelson {

// Named coefficient field built-ins used by scenario files.
//   constant:    f(x) = base                      (diag overrides per axis)
//   sinusoidal:  f(x) = base + amplitude * prod_d sin(2 pi harmonic x_d / L + phase)
//   plateau:     f(x) = base + amplitude * prod_d (0.5 (1 + cos(2 pi x_d / L)))^2
// Matrix-valued fields are the scalar profile times the identity, except for
// "constant" with an explicit diagonal.
struct FieldSpec {
    std::string type = "constant";
    double base = 1.0;
    double amplitude = 0.0;
    int harmonic = 1;
    double phase = 0.0;
    std::vector<double> diag; // anisotropic constant diagonal, optional
};

using ScalarField = std::function<double(const std::vector<double>&)>;
using MatrixField = std::function<MatrixXd(const std::vector<double>&)>;

ScalarField make_scalar_field(const FieldSpec& spec, double box_length);
MatrixField make_matrix_field(int dim, const FieldSpec& spec, double box_length);

// The model's coefficient data: second-order field a and potentials v, m for
// the boson side, second-order field A and potential W for the particle side.
// All fields are smooth periodic callables so they can be evaluated both on
// grid nodes and at arbitrary points (symbol-level evaluation).
class CoefficientSet {
  public:
    CoefficientSet(int dim, double boson_box, double particle_box, FieldSpec a_spec,
                   FieldSpec v_spec, FieldSpec m_spec, FieldSpec A_spec, FieldSpec W_spec);

    int dim() const { return dim_; }

    MatrixXd a_at(const std::vector<double>& x) const { return a_(x); }
    double v_at(const std::vector<double>& x) const { return v_(x); }
    double m_at(const std::vector<double>& x) const { return m_(x); }
    MatrixXd A_at(const std::vector<double>& X) const { return A_(X); }
    double W_at(const std::vector<double>& X) const { return W_(X); }

    // Principal symbols: h0(x,xi) = xi . a(x) xi,  K(X,Xi) = Xi . A(X) Xi.
    double h0_symbol(const std::vector<double>& x, const std::vector<double>& xi) const;
    double K_symbol(const std::vector<double>& X, const std::vector<double>& Xi) const;

    // Samples both second-order fields on the given grids and records the
    // ellipticity window [c0, c1] of each; c0 <= 0 or v + m^2 < 0 throws.
    void validate_on(const Grid& boson_grid, const Grid& particle_grid);

    double c0_a() const { return c0_a_; }
    double c1_a() const { return c1_a_; }
    double c0_A() const { return c0_A_; }
    double c1_A() const { return c1_A_; }

  private:
    int dim_;
    MatrixField a_;
    ScalarField v_;
    ScalarField m_;
    MatrixField A_;
    ScalarField W_;
    double c0_a_ = 0, c1_a_ = 0, c0_A_ = 0, c1_A_ = 0;
};

} // namespace nelson
