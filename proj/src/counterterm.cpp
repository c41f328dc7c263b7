#include "nelsonlab/counterterm.hpp"

#include <cmath>

#include "nelsonlab/quadrature.hpp"
#include "nelsonlab/symbols.hpp"

namespace nelson {

namespace {

constexpr double kPi = 3.14159265358979323846;

double norm_of(const std::vector<double>& xi) {
    double s = 0.0;
    for (double c : xi) s += c * c;
    return std::sqrt(s);
}

MatrixXcd apply_rows(const MatrixXcd& rows, const MatrixXcd& boson_op) {
    return rows * boson_op.transpose();
}

ScalarMap window_high_sq(double sigma) {
    return [sigma](double lambda) {
        const double c = cutoff_high(std::sqrt(std::max(lambda, 0.0)), sigma);
        return c * c;
    };
}

// cutoff_high(mu)^power / mu, zero where the window vanishes (so the exact
// dispersion may have zero modes without poisoning the weight).
ScalarMap window_over_omega(double sigma, int power) {
    return [sigma, power](double lambda) {
        const double mu = std::sqrt(std::max(lambda, 0.0));
        double c = cutoff_high(mu, sigma);
        if (c == 0.0) return 0.0;
        if (power == 2) c *= c;
        return c / mu;
    };
}

} // namespace

double E_kappa(const CoefficientSet& coeffs, const ChargeDensity& density,
               const std::vector<double>& X, double kappa, int angular_order,
               double rel_tol) {
    const int d = coeffs.dim();
    if (density.dim() != d) throw ConfigError("E_kappa: density dimension mismatch");
    if (static_cast<int>(X.size()) != d) throw ConfigError("E_kappa: bad position");
    if (!(kappa > 0.0)) throw ConfigError("E_kappa: kappa must be positive");

    const auto integrand = [&](const std::vector<double>& xi) {
        const double h0 = coeffs.h0_symbol(X, xi);
        const double K = coeffs.K_symbol(X, xi);
        const double k1 = K + 1.0;
        const double rho_hat = density.fourier_kappa_radial(norm_of(xi), kappa);
        return K / (std::sqrt(h0 + 1.0) * k1 * k1) * rho_hat * rho_hat;
    };
    const double integral = integrate_radial(d, angular_order, integrand, rel_tol);
    return -0.5 * std::pow(2.0 * kPi, -d) * integral;
}

double E_slope_asymptote(const CoefficientSet& coeffs, const std::vector<double>& X,
                         double q, int angular_order) {
    const int d = coeffs.dim();
    if (static_cast<int>(X.size()) != d)
        throw ConfigError("E_slope_asymptote: bad position");
    const SphereRule sphere = sphere_rule(d, angular_order);
    const MatrixXd a = coeffs.a_at(X);
    const MatrixXd A = coeffs.A_at(X);
    double acc = 0.0;
    for (std::size_t i = 0; i < sphere.directions.size(); ++i) {
        const auto& th = sphere.directions[i];
        double qa = 0.0, qA = 0.0;
        for (int j = 0; j < d; ++j) {
            for (int k = 0; k < d; ++k) {
                qa += th[j] * a(j, k) * th[k];
                qA += th[j] * A(j, k) * th[k];
            }
        }
        acc += sphere.weights[i] / (std::sqrt(qa) * qA);
    }
    return -0.5 * std::pow(2.0 * kPi, -2 * d) * q * q * acc;
}

double nelson_E_Lambda(double Lambda, double mass, double sigma, double rel_tol) {
    if (!(Lambda > 0.0)) throw ConfigError("nelson_E_Lambda: Lambda must be positive");
    if (sigma < 0.0 || mass < 0.0)
        throw ConfigError("nelson_E_Lambda: mass and sigma must be >= 0");
    const double m2 = mass * mass;
    const double r0 = sigma > mass ? std::sqrt(sigma * sigma - m2) : 0.0;
    if (Lambda <= r0) return 0.0;
    const auto integrand = [m2](double r) {
        const double omega = std::sqrt(r * r + m2);
        return 4.0 * kPi * r * r / (omega * (omega + 0.5 * r * r));
    };
    return -0.5 * integrate_adaptive(integrand, r0, Lambda, rel_tol);
}

VectorXd V_kappa_all(const OperatorContext& ctx, const ChargeDensity& density,
                     double kappa) {
    const MatrixXcd rho = ctx.density_rows(density, kappa);
    const MatrixXcd u = ctx.shifted_generator().solve(rho);
    const Grid& bg = *ctx.pack.grid;
    const double sigma = ctx.pack.sigma;

    const MatrixXcd w_sq = ctx.pack.h->map_matrix(window_high_sq(sigma));
    const MatrixXcd w_over = ctx.pack.h->map_matrix(window_over_omega(sigma, 1));
    const MatrixXcd w_sq_over = ctx.pack.h->map_matrix(window_over_omega(sigma, 2));

    const MatrixXcd mixed = apply_rows(u, w_over);
    const MatrixXcd squared = apply_rows(u, w_sq);

    std::vector<MatrixXcd> grad_mixed;
    if (ctx.particle_grid) {
        for (int a = 0; a < ctx.particle_grid->dim(); ++a) {
            grad_mixed.push_back(
                apply_rows(ctx.particle_grid->derivative_first(a) * u, w_sq_over));
        }
    }

    const long p = ctx.particle_points();
    VectorXd out(p);
    for (long i = 0; i < p; ++i) {
        double val = -std::real(bg.inner(rho.row(i).transpose(), mixed.row(i).transpose())) +
                     0.5 * std::real(bg.inner(u.row(i).transpose(), squared.row(i).transpose()));
        if (ctx.particle_grid) {
            const MatrixXd A = ctx.coeffs->A_at(ctx.particle_coord(i));
            // grad_mixed already carries the omega^{-1} W^2 weight; pair it
            // with the bare gradient on the left.
            for (int j = 0; j < ctx.particle_grid->dim(); ++j) {
                const VectorXcd gj =
                    (ctx.particle_grid->derivative_first(j) * u).row(i).transpose();
                for (int k = 0; k < ctx.particle_grid->dim(); ++k) {
                    val += 0.5 * A(j, k) *
                           std::real(bg.inner(gj, grad_mixed[k].row(i).transpose()));
                }
            }
        }
        out[i] = val;
    }
    return out;
}

SplitPotential split_V_all(const OperatorContext& ctx, const ChargeDensity& density,
                           double kappa) {
    if (!ctx.particle_grid)
        throw ConfigError("split_V: needs a particle grid (not a point particle)");
    const int d = ctx.particle_grid->dim();
    const Grid& bg = *ctx.pack.grid;
    const double sigma = ctx.pack.sigma;
    const TensorOperator t = ctx.shifted_generator();

    const MatrixXcd rho = ctx.density_rows(density, kappa);
    const MatrixXcd u = t.solve(rho);
    std::vector<MatrixXcd> u_src(d), g(d), pfull(d);
    for (int a = 0; a < d; ++a) {
        u_src[a] = t.solve(ctx.density_grad_rows(density, kappa, a));
        g[a] = ctx.particle_grid->derivative_first(a) * u;
        pfull[a] = g[a] + u_src[a];
    }

    const MatrixXcd w_sq = ctx.pack.h->map_matrix(window_high_sq(sigma));
    const MatrixXcd w_over = ctx.pack.h->map_matrix(window_over_omega(sigma, 1));
    const MatrixXcd w_sq_over = ctx.pack.h->map_matrix(window_over_omega(sigma, 2));

    const long pn = ctx.particle_points();
    SplitPotential split;
    split.V1.resize(pn);
    split.V2.resize(pn);
    split.V.resize(pn);
    for (long i = 0; i < pn; ++i) {
        const MatrixXd A = ctx.coeffs->A_at(ctx.particle_coord(i));
        double v1 = 0.5 * std::real(bg.inner(u.row(i).transpose(),
                                             apply_rows(u, w_sq).row(i).transpose()));
        double v2 = -std::real(bg.inner(rho.row(i).transpose(),
                                        apply_rows(u, w_over).row(i).transpose()));
        for (int j = 0; j < d; ++j) {
            const VectorXcd pj = pfull[j].row(i).transpose();
            for (int k = 0; k < d; ++k) {
                const VectorXcd pk_w = apply_rows(pfull[k], w_sq_over).row(i).transpose();
                const VectorXcd uk_w = apply_rows(u_src[k], w_sq_over).row(i).transpose();
                v1 += A(j, k) * (0.5 * std::real(bg.inner(pj, pk_w)) -
                                 std::real(bg.inner(pj, uk_w)));
                v2 += 0.5 * A(j, k) *
                      std::real(bg.inner(u_src[j].row(i).transpose(), uk_w));
            }
        }
        split.V1[i] = v1;
        split.V2[i] = v2;
        split.V[i] = v1 + v2;
    }
    return split;
}

VectorXd V_tilde2_all(const OperatorContext& ctx, const ChargeDensity& density,
                      double kappa) {
    if (!ctx.particle_grid)
        throw ConfigError("V_tilde2: needs a particle grid (not a point particle)");
    const Grid& bg = *ctx.pack.grid;
    const int d = bg.dim();
    const LeadingSymbols symbols(*ctx.coeffs);

    const MatrixXcd rho = ctx.density_rows(density, kappa);
    std::vector<MatrixXcd> rho_grad(d);
    for (int a = 0; a < d; ++a) rho_grad[a] = ctx.density_grad_rows(density, kappa, a);

    const double prefactor = std::pow(2.0 * kPi, -d);
    const long pn = ctx.particle_points();
    VectorXd out(pn);
    for (long i = 0; i < pn; ++i) {
        const std::vector<double> X = ctx.particle_coord(i);
        const MatrixXcd c_op = quantize_kn(symbols.omega_t_resolvent(X), bg);
        const MatrixXcd d_op = quantize_kn(symbols.t_omega_t_resolvent(X), bg);
        const MatrixXd A = ctx.coeffs->A_at(X);
        double val = -std::real(
            bg.inner(rho.row(i).transpose(), c_op * rho.row(i).transpose()));
        for (int j = 0; j < d; ++j) {
            const VectorXcd dj = rho_grad[j].row(i).transpose();
            for (int k = 0; k < d; ++k) {
                val += 0.5 * A(j, k) *
                       std::real(bg.inner(dj, d_op * rho_grad[k].row(i).transpose()));
            }
        }
        out[i] = prefactor * val;
    }
    return out;
}

double V_tilde2_frozen(const CoefficientSet& coeffs, const ChargeDensity& density,
                       const std::vector<double>& X, double kappa, int angular_order,
                       double rel_tol) {
    const int d = coeffs.dim();
    if (density.dim() != d) throw ConfigError("V_tilde2_frozen: density dimension mismatch");
    if (static_cast<int>(X.size()) != d) throw ConfigError("V_tilde2_frozen: bad position");
    const auto integrand = [&](const std::vector<double>& xi) {
        const double h0 = coeffs.h0_symbol(X, xi);
        const double K = coeffs.K_symbol(X, xi);
        const double k1 = K + 1.0;
        const double root = std::sqrt(h0 + 1.0);
        const double bracket = -1.0 / (root * k1) + 0.5 * K / (root * k1 * k1);
        const double rho_hat = density.fourier_kappa_radial(norm_of(xi), kappa);
        return bracket * rho_hat * rho_hat;
    };
    return std::pow(2.0 * kPi, -d) * integrate_radial(d, angular_order, integrand, rel_tol);
}

namespace {

RenormReport finish_report(RenormReport report, const std::vector<VectorXd>& raw,
                           const std::vector<VectorXd>& sub) {
    const std::size_t rungs = report.kappas.size();
    for (std::size_t t = 0; t < rungs; ++t) {
        report.raw_sup.push_back(raw[t].cwiseAbs().maxCoeff());
        report.subtracted_sup.push_back(sub[t].cwiseAbs().maxCoeff());
        if (t > 0) {
            report.increment_raw.push_back((raw[t] - raw[t - 1]).cwiseAbs().maxCoeff());
            report.increment_sub.push_back((sub[t] - sub[t - 1]).cwiseAbs().maxCoeff());
        }
    }
    report.increments_decreasing = true;
    for (std::size_t t = 1; t < report.increment_sub.size(); ++t) {
        if (!(report.increment_sub[t] < report.increment_sub[t - 1]))
            report.increments_decreasing = false;
    }
    return report;
}

} // namespace

RenormReport renorm_limit_study_d1(const OperatorContext& ctx, const ChargeDensity& density,
                                   const std::vector<double>& kappas) {
    if (kappas.size() < 3)
        throw ConfigError("renorm study: the kappa ladder needs at least three rungs");
    RenormReport report;
    report.kappas = kappas;
    std::vector<VectorXd> raw, sub;
    for (double kappa : kappas) {
        const VectorXd v = V_kappa_all(ctx, density, kappa);
        VectorXd s(v.size());
        for (long i = 0; i < v.size(); ++i) {
            s[i] = v[i] - E_kappa(*ctx.coeffs, density, ctx.particle_coord(i), kappa);
        }
        raw.push_back(v);
        sub.push_back(s);
    }
    return finish_report(std::move(report), raw, sub);
}

RenormReport renorm_limit_study_d3(const CoefficientSet& coeffs, const ChargeDensity& density,
                                   const std::vector<double>& X,
                                   const std::vector<double>& kappas, int angular_order,
                                   double rel_tol) {
    if (kappas.size() < 3)
        throw ConfigError("renorm study: the kappa ladder needs at least three rungs");
    RenormReport report;
    report.kappas = kappas;
    std::vector<VectorXd> raw, sub;
    for (double kappa : kappas) {
        VectorXd e(1), s(1);
        e[0] = E_kappa(coeffs, density, X, kappa, angular_order, rel_tol);
        s[0] = V_tilde2_frozen(coeffs, density, X, kappa, angular_order, rel_tol) - e[0];
        raw.push_back(e);
        sub.push_back(s);
    }
    return finish_report(std::move(report), raw, sub);
}

}  // namespace nelson
