#include "nelsonlab/coefficients.hpp"

#include <cmath>

namespace nelson {

ScalarField make_scalar_field(const FieldSpec& spec, double box_length) {
    const double L = box_length;
    if (spec.type == "constant") {
        const double c = spec.base;
        return [c](const std::vector<double>&) { return c; };
    }
    if (spec.type == "sinusoidal") {
        const double base = spec.base, amp = spec.amplitude, phase = spec.phase;
        const double k = 2.0 * M_PI * spec.harmonic / L;
        return [=](const std::vector<double>& x) {
            double p = 1.0;
            for (double xd : x)
                p *= std::sin(k * xd + phase);
            return base + amp * p;
        };
    }
    if (spec.type == "plateau") {
        const double base = spec.base, amp = spec.amplitude;
        const double k = 2.0 * M_PI / L;
        return [=](const std::vector<double>& x) {
            double p = 1.0;
            for (double xd : x) {
                double c = 0.5 * (1.0 + std::cos(k * xd));
                p *= c * c;
            }
            return base + amp * p;
        };
    }
    throw ConfigError("unknown coefficient field type '" + spec.type + "'");
}

MatrixField make_matrix_field(int dim, const FieldSpec& spec, double box_length) {
    if (spec.type == "constant" && !spec.diag.empty()) {
        if (static_cast<int>(spec.diag.size()) != dim)
            throw ConfigError("constant field diagonal has wrong length");
        VectorXd d = Eigen::Map<const VectorXd>(spec.diag.data(), dim);
        MatrixXd m = d.asDiagonal();
        return [m](const std::vector<double>&) { return m; };
    }
    ScalarField f = make_scalar_field(spec, box_length);
    return [f, dim](const std::vector<double>& x) {
        return MatrixXd(f(x) * MatrixXd::Identity(dim, dim));
    };
}

CoefficientSet::CoefficientSet(int dim, double boson_box, double particle_box,
                               FieldSpec a_spec, FieldSpec v_spec, FieldSpec m_spec,
                               FieldSpec A_spec, FieldSpec W_spec)
    : dim_(dim), a_(make_matrix_field(dim, a_spec, boson_box)),
      v_(make_scalar_field(v_spec, boson_box)), m_(make_scalar_field(m_spec, boson_box)),
      A_(make_matrix_field(dim, A_spec, particle_box)),
      W_(make_scalar_field(W_spec, particle_box)) {}

double CoefficientSet::h0_symbol(const std::vector<double>& x,
                                 const std::vector<double>& xi) const {
    VectorXd v = Eigen::Map<const VectorXd>(xi.data(), dim_);
    return v.dot(a_(x) * v);
}

double CoefficientSet::K_symbol(const std::vector<double>& X,
                                const std::vector<double>& Xi) const {
    VectorXd v = Eigen::Map<const VectorXd>(Xi.data(), dim_);
    return v.dot(A_(X) * v);
}

namespace {
void scan_field(const MatrixField& f, const Grid& g, double& c0, double& c1,
                const char* name) {
    c0 = std::numeric_limits<double>::max();
    c1 = std::numeric_limits<double>::lowest();
    std::vector<double> x(g.dim());
    for (long j = 0; j < g.size(); ++j) {
        for (int d = 0; d < g.dim(); ++d)
            x[d] = g.node_coord(j, d);
        MatrixXd m = f(x);
        if ((m - m.transpose()).norm() > 1e-12 * std::max(1.0, m.norm()))
            throw NumericError(std::string(name) + ": field not symmetric at a node");
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
        c0 = std::min(c0, es.eigenvalues().minCoeff());
        c1 = std::max(c1, es.eigenvalues().maxCoeff());
    }
}
} // namespace

void CoefficientSet::validate_on(const Grid& boson_grid, const Grid& particle_grid) {
    scan_field(a_, boson_grid, c0_a_, c1_a_, "a");
    scan_field(A_, particle_grid, c0_A_, c1_A_, "A");
    if (!(c0_a_ > 0.0))
        throw ConfigError("coefficients: a fails ellipticity, c0 = " + std::to_string(c0_a_));
    if (!(c0_A_ > 0.0))
        throw ConfigError("coefficients: A fails ellipticity, c0 = " + std::to_string(c0_A_));
    std::vector<double> x(boson_grid.dim());
    for (long j = 0; j < boson_grid.size(); ++j) {
        for (int d = 0; d < boson_grid.dim(); ++d)
            x[d] = boson_grid.node_coord(j, d);
        double m = m_(x);
        if (v_(x) + m * m < 0.0)
            throw ConfigError("coefficients: v + m^2 negative at a node");
    }
}

} // namespace nelson
