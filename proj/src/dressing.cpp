#include "nelsonlab/dressing.hpp"

#include <cmath>

namespace nelson {

namespace {

// Combined spectral weight cutoff_high(sqrt(lambda)) * dispersion^{-1/2}.
// The window vanishes identically below (2 sigma)^2, which keeps the weight
// finite even when the exact dispersion reaches zero.
ScalarMap high_window_weight(double sigma, bool use_exact_omega) {
    return [sigma, use_exact_omega](double lambda) {
        const double mu = std::sqrt(std::max(lambda, 0.0));
        const double window = cutoff_high(mu, sigma);
        if (window == 0.0) return 0.0;
        const double dispersion = use_exact_omega ? mu : smoothed_sqrt(lambda, sigma);
        return window / std::sqrt(dispersion);
    };
}

// Applies a boson-side operator to every row of a (particle x boson) matrix.
MatrixXcd apply_rows(const MatrixXcd& rows, const MatrixXcd& boson_op) {
    return rows * boson_op.transpose();
}

} // namespace

std::vector<double> OperatorContext::particle_coord(long node) const {
    if (!particle_grid) return {};
    std::vector<double> X(particle_grid->dim());
    for (int a = 0; a < particle_grid->dim(); ++a) X[a] = particle_grid->node_coord(node, a);
    return X;
}

MatrixXcd OperatorContext::density_rows(const ChargeDensity& density, double kappa) const {
    const long p = particle_points();
    MatrixXcd rows(p, pack.grid->size());
    for (long i = 0; i < p; ++i) {
        const std::vector<double> X =
            particle_grid ? particle_coord(i) : std::vector<double>(pack.grid->dim(), 0.0);
        rows.row(i) = density.sample_at(*pack.grid, X, kappa).transpose();
    }
    return rows;
}

MatrixXcd OperatorContext::density_grad_rows(const ChargeDensity& density, double kappa,
                                             int axis) const {
    const long p = particle_points();
    MatrixXcd rows(p, pack.grid->size());
    for (long i = 0; i < p; ++i) {
        const std::vector<double> X =
            particle_grid ? particle_coord(i) : std::vector<double>(pack.grid->dim(), 0.0);
        rows.row(i) = density.sample_grad_at(*pack.grid, X, kappa, axis).transpose();
    }
    return rows;
}

TensorOperator OperatorContext::shifted_generator() const {
    return TensorOperator(K0, pack.omega_reg);
}

TensorOperator OperatorContext::exact_generator() const {
    return TensorOperator(K0, pack.omega);
}

OperatorContext make_context(std::shared_ptr<const Grid> particle_grid,
                             std::shared_ptr<const Grid> boson_grid,
                             const CoefficientSet& coeffs, double sigma) {
    if (!particle_grid || !boson_grid) throw ConfigError("context: missing grid");
    OperatorContext ctx;
    ctx.particle_grid = particle_grid;
    ctx.K0 = std::make_shared<SpectralOperator>(assemble_K0(particle_grid, coeffs));
    ctx.pack = build_boson_pack(boson_grid, coeffs, sigma);
    ctx.coeffs = &coeffs;
    return ctx;
}

OperatorContext make_point_context(std::shared_ptr<const Grid> boson_grid,
                                   const CoefficientSet& coeffs, double sigma) {
    if (!boson_grid) throw ConfigError("context: missing boson grid");
    OperatorContext ctx;
    ctx.particle_grid = nullptr;
    ctx.K0 = point_particle();
    ctx.pack = build_boson_pack(boson_grid, coeffs, sigma);
    ctx.coeffs = &coeffs;
    return ctx;
}

DressingField compute_beta_from_rows(const OperatorContext& ctx, const MatrixXcd& rho_rows,
                                     double kappa, bool use_exact_omega) {
    if (rho_rows.rows() != ctx.particle_points() ||
        rho_rows.cols() != ctx.pack.grid->size())
        throw ConfigError("compute_beta: density rows do not match the context");

    const MatrixXcd weight =
        ctx.pack.h->map_matrix(high_window_weight(ctx.pack.sigma, use_exact_omega));
    const MatrixXcd rhs = -apply_rows(rho_rows, weight);
    DressingField field;
    field.beta = ctx.shifted_generator().solve(rhs);
    field.kappa = kappa;
    field.sigma = ctx.pack.sigma;
    const double re_scale = std::max(field.beta.real().cwiseAbs().maxCoeff(), 1e-300);
    field.max_imag = field.beta.imag().cwiseAbs().maxCoeff() / re_scale;
    return field;
}

DressingField compute_beta(const OperatorContext& ctx, const ChargeDensity& density,
                           double kappa, bool use_exact_omega) {
    return compute_beta_from_rows(ctx, ctx.density_rows(density, kappa), kappa,
                                  use_exact_omega);
}

double beta_identity_residual(const OperatorContext& ctx, const DressingField& field,
                              const ChargeDensity& density) {
    const MatrixXcd rho = ctx.density_rows(density, field.kappa);
    const MatrixXcd omega_half_inv = ctx.pack.h->map_matrix([](double lambda) {
        const double mu = std::sqrt(std::max(lambda, 0.0));
        if (!(mu > 0.0))
            throw NumericError("beta identity: exact dispersion has a zero mode; "
                               "use a positive mass floor");
        return 1.0 / std::sqrt(mu);
    });
    const MatrixXcd weighted = apply_rows(rho, omega_half_inv);
    const MatrixXcd low = apply_rows(weighted, ctx.pack.window_low->matrix());
    const MatrixXcd residual = weighted + ctx.exact_generator().apply(field.beta) - low;

    const Grid& bg = *ctx.pack.grid;
    double worst = 0.0;
    for (long i = 0; i < residual.rows(); ++i) {
        const double scale = std::max(bg.norm(weighted.row(i).transpose()), 1e-300);
        worst = std::max(worst, bg.norm(residual.row(i).transpose()) / scale);
    }
    return worst;
}

void add_beta_gradients(const OperatorContext& ctx, DressingField& field) {
    if (!ctx.particle_grid)
        throw ConfigError("beta gradients: point particle has no particle axes");
    for (const Axis& ax : ctx.particle_grid->axes()) {
        if (ax.n < 16)
            throw ConfigError("beta gradients: particle grid too coarse for spectral "
                              "differentiation (need at least 16 nodes per axis)");
    }
    field.grad.clear();
    for (int a = 0; a < ctx.particle_grid->dim(); ++a) {
        field.grad.push_back(ctx.particle_grid->derivative_first(a) * field.beta);
    }
}

double beta_gradient_crosscheck(const OperatorContext& ctx, const DressingField& field,
                                const ChargeDensity& density) {
    if (field.grad.empty())
        throw ConfigError("beta gradients: call add_beta_gradients first");
    const MatrixXcd weight = ctx.pack.h->map_matrix(high_window_weight(field.sigma, false));
    const TensorOperator t = ctx.shifted_generator();
    const Grid& bg = *ctx.pack.grid;

    double worst = 0.0;
    for (int a = 0; a < ctx.particle_grid->dim(); ++a) {
        // d/dX beta_X = T^{-1} W (grad rho)(. - X) - T^{-1} [d/dX, K0] beta_X;
        // the commutator term vanishes for constant coefficients.
        const MatrixXcd d = ctx.particle_grid->derivative_first(a);
        const MatrixXcd& k0 = ctx.K0->matrix();
        const MatrixXcd analytic =
            t.solve(apply_rows(ctx.density_grad_rows(density, field.kappa, a), weight)) -
            t.solve(MatrixXcd((d * k0 - k0 * d) * field.beta));
        double scale = 0.0;
        for (long i = 0; i < analytic.rows(); ++i)
            scale = std::max(scale, bg.norm(analytic.row(i).transpose()));
        scale = std::max(scale, 1e-300);
        for (long i = 0; i < analytic.rows(); ++i) {
            const double dev =
                bg.norm((field.grad[a].row(i) - analytic.row(i)).transpose()) / scale;
            worst = std::max(worst, dev);
        }
    }
    return worst;
}

std::vector<BetaNormRow> beta_weighted_norms(const OperatorContext& ctx,
                                             const ChargeDensity& density,
                                             const std::vector<double>& kappas,
                                             const std::vector<double>& alphas) {
    if (kappas.empty() || alphas.empty())
        throw ConfigError("beta norms: empty kappa or alpha list");
    const Grid& bg = *ctx.pack.grid;
    std::vector<BetaNormRow> table;
    for (double kappa : kappas) {
        const MatrixXcd rho = ctx.density_rows(density, kappa);
        const DressingField field = compute_beta_from_rows(ctx, rho, kappa, false);
        for (double alpha : alphas) {
            if (alpha < 0.0) throw ConfigError("beta norms: alpha must be >= 0");
            const MatrixXcd weighted = apply_rows(
                field.beta, ctx.pack.h->map_matrix([alpha](double lambda) {
                    return std::pow(std::sqrt(std::max(lambda, 0.0)), alpha);
                }));
            for (long i = 0; i < weighted.rows(); ++i) {
                BetaNormRow row;
                row.kappa = kappa;
                row.node = i;
                row.alpha = alpha;
                row.weighted_norm = bg.norm(weighted.row(i).transpose());
                const double source = bg.sobolev_norm(rho.row(i).transpose(), -1.6);
                row.ratio = row.weighted_norm / std::max(source, 1e-300);
                row.diagnostic_only = alpha >= 1.0;
                table.push_back(row);
            }
        }
    }
    return table;
}

}  // namespace nelson
