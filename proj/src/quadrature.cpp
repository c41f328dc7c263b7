#include "nelsonlab/quadrature.hpp"
#include "nelsonlab/grid.hpp"

#include <cmath>

namespace nelson {
namespace {

constexpr double kPi = 3.14159265358979323846;

double legendre_pair(int n, double x, double& deriv) {
    // returns P_n(x), writes P_n'(x)
    double p0 = 1.0, p1 = x;
    if (n == 0) { deriv = 0.0; return 1.0; }
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    deriv = n * (x * p1 - p0) / (x * x - 1.0);
    return p1;
}

double panel_sum(const QuadRule& rule, const std::function<double(double)>& f,
                 double a, double b, long panels) {
    const double h = (b - a) / panels;
    double total = 0.0;
    for (long p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        for (size_t i = 0; i < rule.nodes.size(); ++i) {
            const double x = lo + 0.5 * h * (rule.nodes[i] + 1.0);
            total += 0.5 * h * rule.weights[i] * f(x);
        }
    }
    return total;
}

} // namespace

QuadRule gauss_legendre(int n) {
    if (n < 1) throw ConfigError("gauss_legendre: order must be positive");
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            const double p = legendre_pair(n, x, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        legendre_pair(n, x, dp);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;           // cos ordering gives descending roots
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol) {
    if (!(b > a)) {
        if (b == a) return 0.0;
        throw ConfigError("integrate_adaptive: bad interval");
    }
    static const QuadRule rule = gauss_legendre(16);
    double prev = panel_sum(rule, f, a, b, 1);
    for (long panels = 2; panels <= (1L << 22); panels *= 2) {
        const double cur = panel_sum(rule, f, a, b, panels);
        const double tol = rel_tol * std::max(std::abs(cur), 1e-300) + 1e-305;
        if (std::abs(cur - prev) <= tol) return cur;
        prev = cur;
    }
    throw NumericError("integrate_adaptive: no convergence on the requested interval");
}

SphereRule sphere_rule(int dim, int order) {
    if (order < 1) throw ConfigError("sphere_rule: order must be positive");
    SphereRule rule;
    if (dim == 1) {
        rule.directions = {{-1.0}, {1.0}};
        rule.weights = {1.0, 1.0};
        return rule;
    }
    if (dim == 2) {
        const int m = std::max(order, 4);
        for (int j = 0; j < m; ++j) {
            const double th = 2.0 * kPi * j / m;
            rule.directions.push_back({std::cos(th), std::sin(th)});
            rule.weights.push_back(2.0 * kPi / m);
        }
        return rule;
    }
    if (dim == 3) {
        const QuadRule polar = gauss_legendre(order);
        const int m = 2 * order;
        for (int i = 0; i < order; ++i) {
            const double u = polar.nodes[i];
            const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
            for (int j = 0; j < m; ++j) {
                const double az = 2.0 * kPi * j / m;
                rule.directions.push_back({s * std::cos(az), s * std::sin(az), u});
                rule.weights.push_back(polar.weights[i] * 2.0 * kPi / m);
            }
        }
        return rule;
    }
    throw ConfigError("sphere_rule: dim must be 1, 2, or 3");
}

double integrate_radial(int dim, int order,
                        const std::function<double(const std::vector<double>&)>& f,
                        double rel_tol) {
    const SphereRule sphere = sphere_rule(dim, order);
    std::vector<double> point(dim);
    auto shell = [&](double r) {
        double acc = 0.0;
        for (size_t j = 0; j < sphere.directions.size(); ++j) {
            for (int a = 0; a < dim; ++a) point[a] = r * sphere.directions[j][a];
            acc += sphere.weights[j] * f(point);
        }
        return acc * std::pow(r, dim - 1);
    };
    double total = 0.0;
    double lo = 0.0, hi = 1.0;
    int quiet = 0;
    while (hi < 1e8) {
        const double c = integrate_adaptive(shell, lo, hi, rel_tol);
        total += c;
        if (hi >= 8.0 && std::abs(c) <= rel_tol * (std::abs(total) + 1e-300)) {
            if (++quiet >= 2) return total;
        } else {
            quiet = 0;
        }
        lo = hi;
        hi *= 2.0;
    }
    throw NumericError("integrate_radial: integrand decays too slowly");
}

} // namespace nelson
