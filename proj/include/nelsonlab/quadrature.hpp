#pragma once

#include <functional>
#include <vector>

namespace nelson {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1], nodes ascending.
QuadRule gauss_legendre(int n);

// Integrates f on [a, b] with panel-doubling composite Gauss-Legendre until
// two consecutive refinements agree to rel_tol (plus a small absolute floor).
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol);

// Integral of g over R^d of a radial-direction-split integrand
// g(r, theta) = f(r * theta), evaluated as
//   int_{S^{d-1}} dtheta int_0^inf f(r theta) r^{d-1} dr.
// The radial integral is truncated once panel contributions fall below the
// running total times rel_tol (integrands here decay polynomially or faster).
// `sphere` supplies direction nodes/weights summing to the sphere area.
struct SphereRule {
    std::vector<std::vector<double>> directions; // unit vectors
    std::vector<double> weights;                 // sum = |S^{d-1}|
};

// Product Gauss rules: d=1 gives {-1,+1}; d=2 a trapezoid rule in angle
// (spectrally accurate for smooth periodic integrands); d=3 Gauss-Legendre in
// cos(polar) times trapezoid in azimuth.
SphereRule sphere_rule(int dim, int order);

// Integrates f over R^d assuming enough decay; radial_tol controls both the
// per-panel refinement and the outward truncation.
double integrate_radial(int dim, int order,
                        const std::function<double(const std::vector<double>&)>& f,
                        double rel_tol);

} // namespace nelson
