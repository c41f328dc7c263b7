#include "nelsonlab/density.hpp"
#include "nelsonlab/quadrature.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace nelson {
namespace {

constexpr double kPi = 3.14159265358979323846;

double sphere_area(int dim) {
    switch (dim) {
        case 1: return 2.0;
        case 2: return 2.0 * kPi;
        case 3: return 4.0 * kPi;
        default: throw ConfigError("density: dim must be 1, 2, or 3");
    }
}

// exp(-1/(1-r^2)) on [0,1), extended by zero
double bump_profile(double r) {
    if (r >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - r * r));
}

double bump_profile_deriv(double r) {
    if (r >= 1.0) return 0.0;
    const double s = 1.0 - r * r;
    return bump_profile(r) * (-2.0 * r / (s * s));
}

} // namespace

ChargeDensity::ChargeDensity(std::string kind, double q, double width, int dim)
    : kind_(std::move(kind)), q_(q), width_(width), dim_(dim) {
    if (dim < 1 || dim > 3) throw ConfigError("density: dim must be 1, 2, or 3");
    if (!(width > 0.0)) throw ConfigError("density: width must be positive");
    if (q == 0.0) throw ConfigError("density: charge amplitude must be nonzero");
    if (kind_ != "gaussian" && kind_ != "bump" && kind_ != "signed")
        throw ConfigError("density: unknown profile '" + kind_ + "'");
    if (kind_ == "bump") {
        const double mass = sphere_area(dim_) *
            integrate_adaptive([this](double r) {
                return bump_profile(r) * std::pow(r, dim_ - 1);
            }, 0.0, 1.0, 1e-12);
        bump_norm_ = 1.0 / mass;
    }
}

double ChargeDensity::value(const std::vector<double>& x) const {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    const double w2 = width_ * width_;
    if (kind_ == "gaussian") {
        return q_ * std::pow(2.0 * kPi * w2, -0.5 * dim_) * std::exp(-r2 / (2.0 * w2));
    }
    if (kind_ == "signed") {
        const double g = std::pow(2.0 * kPi * w2, -0.5 * dim_) * std::exp(-r2 / (2.0 * w2));
        return q_ * (1.0 - r2 / (dim_ * w2)) * g;
    }
    return q_ * bump_norm_ * std::pow(width_, -dim_) * bump_profile(std::sqrt(r2) / width_);
}

std::vector<double> ChargeDensity::gradient(const std::vector<double>& x) const {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    const double w2 = width_ * width_;
    std::vector<double> g(x.size(), 0.0);
    if (kind_ == "gaussian") {
        const double v = value(x);
        for (size_t i = 0; i < x.size(); ++i) g[i] = -x[i] / w2 * v;
        return g;
    }
    if (kind_ == "signed") {
        const double gauss =
            q_ * std::pow(2.0 * kPi * w2, -0.5 * dim_) * std::exp(-r2 / (2.0 * w2));
        for (size_t i = 0; i < x.size(); ++i)
            g[i] = gauss * (-2.0 * x[i] / (dim_ * w2) -
                            (1.0 - r2 / (dim_ * w2)) * x[i] / w2);
        return g;
    }
    const double r = std::sqrt(r2);
    if (r == 0.0) return g;
    const double dpsi = bump_profile_deriv(r / width_);
    const double scale = q_ * bump_norm_ * std::pow(width_, -dim_) / width_;
    for (size_t i = 0; i < x.size(); ++i) g[i] = scale * dpsi * x[i] / r;
    return g;
}

double ChargeDensity::fourier_radial(double r) const {
    const double w2 = width_ * width_;
    const double plane = std::pow(2.0 * kPi, -0.5 * dim_);
    if (kind_ == "gaussian") {
        return q_ * plane * std::exp(-0.5 * w2 * r * r);
    }
    if (kind_ == "signed") {
        return q_ * plane * std::exp(-0.5 * w2 * r * r) * (w2 * r * r / dim_);
    }
    // bump: radial transform, integrand supported on [0, width]
    const double amp = q_ * bump_norm_ * std::pow(width_, -dim_);
    auto radial = [&](double s) { return amp * bump_profile(s / width_); };
    double integral = 0.0;
    if (dim_ == 1) {
        integral = 2.0 * integrate_adaptive([&](double s) {
            return radial(s) * std::cos(r * s);
        }, 0.0, width_, 1e-10);
    } else if (dim_ == 2) {
        integral = 2.0 * kPi * integrate_adaptive([&](double s) {
            return radial(s) * std::cyl_bessel_j(0, r * s) * s;
        }, 0.0, width_, 1e-10);
    } else {
        integral = 4.0 * kPi * integrate_adaptive([&](double s) {
            const double a = r * s;
            const double sinc = a < 1e-8 ? 1.0 - a * a / 6.0 : std::sin(a) / a;
            return radial(s) * sinc * s * s;
        }, 0.0, width_, 1e-10);
    }
    return plane * integral;
}

double ChargeDensity::fourier(const std::vector<double>& xi) const {
    double r2 = 0.0;
    for (double c : xi) r2 += c * c;
    return fourier_radial(std::sqrt(r2));
}

void ChargeDensity::check(const Grid& grid, double kappa) const {
    if (grid.dim() != dim_) throw ConfigError("density: grid dimension mismatch");
    if (!(kappa > 0.0)) throw ConfigError("density: kappa must be positive");
    const double cap = aliasing_cap(grid);
    if (kappa > cap) {
        std::ostringstream msg;
        msg << "density: kappa=" << kappa << " exceeds the grid resolution cap "
            << cap << " (0.25 * nyquist * width); refine the grid or lower kappa";
        throw ConfigError(msg.str());
    }
    const double eff_width = kappa < 1.0 ? width_ / kappa : width_;
    double box = grid.axes()[0].length;
    for (const Axis& ax : grid.axes()) box = std::min(box, ax.length);
    if (eff_width > box / 8.0) {
        std::ostringstream msg;
        msg << "density: effective width " << eff_width
            << " too large for box length " << box << " (need width <= box/8)";
        throw ConfigError(msg.str());
    }
}

namespace {

// Periodized sampling of a kappa-rescaled radial profile over the grid,
// summing +/-1 neighbor images per axis (width <= box/8 makes further
// shells negligible).
VectorXcd periodized_sample(const Grid& grid, const std::vector<double>& center,
                            double kappa, double scale,
                            const std::function<double(const std::vector<double>&)>& f) {
    const int d = grid.dim();
    std::vector<double> y(d);
    VectorXcd out(grid.size());
    const int images = 1;
    for (long i = 0; i < grid.size(); ++i) {
        double acc = 0.0;
        std::vector<int> shift(d, -images);
        while (true) {
            for (int a = 0; a < d; ++a)
                y[a] = kappa * (grid.node_coord(i, a) - center[a] +
                                shift[a] * grid.axes()[a].length);
            acc += f(y);
            int a = 0;
            for (; a < d; ++a) {
                if (++shift[a] <= images) break;
                shift[a] = -images;
            }
            if (a == d) break;
        }
        out(i) = scale * acc;
    }
    return out;
}

} // namespace

VectorXcd ChargeDensity::sample_at(const Grid& grid, const std::vector<double>& center,
                                   double kappa) const {
    check(grid, kappa);
    if (static_cast<int>(center.size()) != grid.dim())
        throw ConfigError("density: center dimension does not match grid");
    return periodized_sample(grid, center, kappa, std::pow(kappa, grid.dim()),
                             [this](const std::vector<double>& y) { return value(y); });
}

VectorXcd ChargeDensity::sample_grad_at(const Grid& grid, const std::vector<double>& center,
                                        double kappa, int axis) const {
    check(grid, kappa);
    if (static_cast<int>(center.size()) != grid.dim())
        throw ConfigError("density: center dimension does not match grid");
    if (axis < 0 || axis >= grid.dim())
        throw ConfigError("density: gradient axis out of range");
    return periodized_sample(
        grid, center, kappa, std::pow(kappa, grid.dim()) * kappa,
        [this, axis](const std::vector<double>& y) { return gradient(y)[axis]; });
}

VectorXcd ChargeDensity::sample(const Grid& grid, long center_node, double kappa) const {
    std::vector<double> center(grid.dim());
    for (int a = 0; a < grid.dim(); ++a) center[a] = grid.node_coord(center_node, a);
    return sample_at(grid, center, kappa);
}

VectorXcd ChargeDensity::sample_grad(const Grid& grid, long center_node, double kappa,
                                     int axis) const {
    std::vector<double> center(grid.dim());
    for (int a = 0; a < grid.dim(); ++a) center[a] = grid.node_coord(center_node, a);
    return sample_grad_at(grid, center, kappa, axis);
}

ChargeDensity make_density(const std::string& kind, double q, double width, int dim) {
    return ChargeDensity(kind, q, width, dim);
}

} // namespace nelson
