#include "nelsonlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "nelsonlab/coupled.hpp"
#include "nelsonlab/symbols.hpp"

namespace nelson {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

void put(RunResult& r, const std::string& name, double value) {
    r.metrics.push_back(Metric{name, value});
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1])) return false;
    }
    return !v.empty();
}

double max_row_rel_error(const MatrixXcd& got, const MatrixXcd& want) {
    double worst = 0.0;
    for (long i = 0; i < got.rows(); ++i) {
        const double scale = std::max(want.row(i).norm(), 1e-300);
        worst = std::max(worst, (got.row(i) - want.row(i)).norm() / scale);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// variable-1d: exact remainder identity of the dressing field

RunResult exp_dressing_identity(const Scenario& s) {
    RunResult r;
    r.id = "dressing_identity";
    const ScenarioRuntime rt = make_runtime(s);
    const OperatorContext& ctx = *rt.context;

    r.table_header = {"kappa", "identity_residual", "weight_agreement", "max_imag"};
    double worst_resid = 0.0, worst_weight = 0.0, worst_imag = 0.0;
    for (double kappa : s.kappa_ladder) {
        DressingField field = compute_beta(ctx, rt.density, kappa);
        const DressingField exact = compute_beta(ctx, rt.density, kappa, true);
        const double resid = beta_identity_residual(ctx, field, rt.density);
        const double wdiff = max_row_rel_error(exact.beta, field.beta);
        r.table_rows.push_back({kappa, resid, wdiff, field.max_imag});
        worst_resid = std::max(worst_resid, resid);
        worst_weight = std::max(worst_weight, wdiff);
        worst_imag = std::max(worst_imag, field.max_imag);
    }

    DressingField field = compute_beta(ctx, rt.density, s.kappa_ladder.front());
    add_beta_gradients(ctx, field);
    const double grad_dev = beta_gradient_crosscheck(ctx, field, rt.density);

    put(r, "max_identity_residual", worst_resid);
    put(r, "max_weight_agreement", worst_weight);
    put(r, "max_imag", worst_imag);
    put(r, "gradient_crosscheck", grad_dev);
    r.pass = worst_resid <= 1e-9 && worst_weight <= 1e-10 && worst_imag <= 1e-10 &&
             grad_dev <= 1e-6;
    r.detail = "identity residual " + fmt(worst_resid) + ", gradient crosscheck " +
               fmt(grad_dev);
    return r;
}

// ---------------------------------------------------------------------------
// constant-1d: dressing field against the closed Fourier form

RunResult exp_beta_oracle(const Scenario& s) {
    RunResult r;
    r.id = "beta_oracle";
    const ScenarioRuntime rt = make_runtime(s);
    const OperatorContext& ctx = *rt.context;
    const Grid& bg = *ctx.pack.grid;
    if (!ctx.particle_grid || ctx.particle_grid->size() != bg.size() ||
        ctx.particle_grid->axes()[0].length != bg.axes()[0].length) {
        throw ConfigError("beta oracle needs matching particle and boson grids");
    }

    const std::vector<double> origin(s.dim, 0.0);
    const double a0 = rt.coeffs->a_at(origin)(0, 0);
    const double A0 = rt.coeffs->A_at(origin)(0, 0);
    const double v0 = rt.coeffs->v_at(origin);
    const double m0 = rt.coeffs->m_at(origin);

    const MatrixXcd& F = bg.dft();
    VectorXcd scal(bg.size());
    for (long k = 0; k < bg.size(); ++k) {
        double xi_sq = 0.0;
        for (int ax = 0; ax < bg.dim(); ++ax) {
            const double xi = bg.freq_coord(k, ax);
            xi_sq += xi * xi;
        }
        const double lam = a0 * xi_sq + v0 + m0 * m0;
        const double omega = std::sqrt(lam);
        const double win = cutoff_high(omega, s.sigma);
        const double weight = win > 0.0 ? win / std::sqrt(omega) : 0.0;
        scal[k] = -weight / (A0 * xi_sq + smoothed_sqrt(lam, s.sigma));
    }

    r.table_header = {"kappa", "max_rel_error"};
    double worst = 0.0;
    for (double kappa : s.kappa_ladder) {
        const MatrixXcd rows = ctx.density_rows(rt.density, kappa);
        const DressingField field = compute_beta(ctx, rt.density, kappa);
        MatrixXcd oracle(rows.rows(), rows.cols());
        for (long i = 0; i < rows.rows(); ++i) {
            const VectorXcd hat = F * rows.row(i).transpose();
            oracle.row(i) = (F.adjoint() * scal.cwiseProduct(hat)).transpose();
        }
        const double err = max_row_rel_error(field.beta, oracle);
        r.table_rows.push_back({kappa, err});
        worst = std::max(worst, err);
    }
    put(r, "max_rel_error", worst);
    r.pass = worst <= 1e-8;
    r.detail = "max relative deviation from the Fourier form " + fmt(worst);
    return r;
}

// ---------------------------------------------------------------------------
// constant-1d: canonical commutators and the basic number bound

RunResult exp_ccr_ju88(const Scenario& s) {
    RunResult r;
    r.id = "ccr_ju88";
    const ScenarioRuntime rt = make_runtime(s);
    const FockBasis fock(s.modes, s.n_max);

    std::mt19937 gen(s.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    const auto draw = [&]() {
        VectorXcd f(s.modes);
        for (int m = 0; m < s.modes; ++m) f[m] = Complex(nd(gen), nd(gen));
        return f;
    };
    const VectorXcd f = draw();
    const VectorXcd g = draw();

    const MatrixXcd af = MatrixXcd(fock.annihilator(f));
    const MatrixXcd ag = MatrixXcd(fock.annihilator(g));
    const MatrixXcd cf = MatrixXcd(fock.creator(f));
    const MatrixXcd cg = MatrixXcd(fock.creator(g));

    const auto masked_max = [&](const MatrixXcd& mat, int cap) {
        double worst = 0.0;
        for (long i = 0; i < fock.dim(); ++i) {
            if (fock.total(i) > cap) continue;
            for (long j = 0; j < fock.dim(); ++j) {
                if (fock.total(j) > cap) continue;
                worst = std::max(worst, std::abs(mat(i, j)));
            }
        }
        return worst;
    };

    MatrixXcd mixed = af * cg - cg * af;
    mixed.diagonal().array() -= f.dot(g);
    const double err_mixed = masked_max(mixed, s.n_max - 1);
    const double err_lower = (af * ag - ag * af).cwiseAbs().maxCoeff();
    const double err_raise = masked_max(cf * cg - cg * cf, s.n_max - 2);

    // Basic bound ||a#(v) (N+1)^{-1/2}|| <= ||v|| over seeded draws.
    const ModeSpace ms = build_mode_space(rt.context->pack, s.modes);
    std::vector<unsigned> seeds;
    for (unsigned i = 0; i < 20; ++i) seeds.push_back(s.seed + i);
    const auto rows = number_bounds(MatrixXcd::Zero(1, 1), fock, ms.omega, {}, seeds);
    double min_slack = std::numeric_limits<double>::infinity();
    r.table_header = {"bound", "s", "seed", "lhs", "rhs", "slack"};
    for (const NumberBoundRow& row : rows) {
        min_slack = std::min(min_slack, row.slack);
        r.table_rows.push_back({double(row.bound), row.s, double(row.seed), row.lhs, row.rhs,
                                row.slack});
    }

    put(r, "ccr_mixed", err_mixed);
    put(r, "ccr_lowering", err_lower);
    put(r, "ccr_raising", err_raise);
    put(r, "min_slack", min_slack);
    r.pass = err_mixed <= 1e-12 && err_lower <= 1e-13 && err_raise <= 1e-12 &&
             min_slack >= -1e-9;
    r.detail = "commutator defects " + fmt(err_mixed) + "/" + fmt(err_lower) + "/" +
               fmt(err_raise) + ", min slack " + fmt(min_slack);
    return r;
}

// ---------------------------------------------------------------------------
// variable-1d: interpolated number-weighted bounds

RunResult exp_a6_bounds(const Scenario& s) {
    RunResult r;
    r.id = "a6_bounds";
    const ScenarioRuntime rt = make_runtime(s);
    const MatrixXcd K = assemble_K(rt.context->particle_grid, *rt.coeffs).matrix();
    const ModeSpace ms = build_mode_space(rt.context->pack, s.modes);
    const FockBasis fock(s.modes, s.n_max);

    std::vector<unsigned> seeds;
    for (unsigned i = 0; i < 20; ++i) seeds.push_back(s.seed + i);
    const std::vector<double> svals{0.0, 0.5, 1.0};
    const auto rows = number_bounds(K, fock, ms.omega, svals, seeds);

    double min_slack = std::numeric_limits<double>::infinity();
    r.table_header = {"bound", "s", "seed", "lhs", "rhs", "slack"};
    for (const NumberBoundRow& row : rows) {
        min_slack = std::min(min_slack, row.slack);
        r.table_rows.push_back({double(row.bound), row.s, double(row.seed), row.lhs, row.rhs,
                                row.slack});
    }
    put(r, "min_slack", min_slack);
    put(r, "rows", double(rows.size()));
    r.pass = min_slack >= -1e-9;
    r.detail = "min slack " + fmt(min_slack) + " over " + std::to_string(rows.size()) +
               " bound instances";
    return r;
}

// ---------------------------------------------------------------------------
// constant-1d: fixed-source model against the closed-form energy

RunResult exp_van_hove(const Scenario& s) {
    RunResult r;
    r.id = "van_hove";
    const ScenarioRuntime rt = make_runtime(s);
    const OperatorContext& ctx = *rt.context;
    if (ctx.particle_grid) throw ConfigError("the fixed-source check expects a point particle");
    const double kappa = s.kappa_ladder.front();

    const VectorXcd rho = ctx.density_rows(rt.density, kappa).row(0).transpose();
    const VectorXcd hinv_rho =
        ctx.pack.h->apply_map([](double t) { return 1.0 / t; }, rho);
    const double e_full = -0.5 * std::real(ctx.pack.grid->inner(rho, hinv_rho));

    const ModeSpace ms = build_mode_space(ctx.pack, s.modes);
    const VectorXcd g = ms.project(rho);
    VectorXcd coupling(s.modes);
    for (int m = 0; m < s.modes; ++m) coupling[m] = g[m] / std::sqrt(ms.omega[m]);
    const double e_modes = coherent_ground_energy(ms.omega, coupling);

    r.table_header = {"n_max", "dim", "energy", "abs_error"};
    std::vector<double> errors;
    for (int n = 2; n <= s.n_max; n += 2) {
        const CoupledSystem sys(rt.context, s.modes, n);
        const StructuredOperator h = sys.hamiltonian(rt.density, kappa);
        const GroundState gs = ground_state(h.linop(), h.dim(), 400, 1e-9, s.seed);
        const double err = std::abs(gs.energy - e_modes);
        errors.push_back(err);
        r.table_rows.push_back({double(n), double(h.dim()), gs.energy, err});
    }

    const double mode_defect = std::abs(e_modes - e_full) / std::abs(e_full);
    const double final_rel = errors.back() / std::abs(e_modes);
    put(r, "e_closed_form", e_full);
    put(r, "e_mode_closed_form", e_modes);
    put(r, "projection_leakage", ms.leakage(rho));
    put(r, "mode_defect", mode_defect);
    put(r, "final_rel_error", final_rel);
    r.pass = strictly_decreasing(errors) && final_rel <= 1e-6 && mode_defect <= 1e-6;
    r.detail = "truncation errors decrease to " + fmt(final_rel) + " rel, mode defect " +
               fmt(mode_defect);
    return r;
}

// ---------------------------------------------------------------------------
// counterterm-3d: logarithmic slope of the energy subtraction

RunResult exp_counterterm_slope(const Scenario& s) {
    RunResult r;
    r.id = "counterterm_slope";
    const ScenarioRuntime rt = make_runtime(s);
    const std::vector<double> X(s.dim, 0.0);

    r.table_header = {"kappa", "energy", "slope"};
    std::vector<double> energies;
    for (double kappa : s.kappa_ladder) {
        energies.push_back(E_kappa(*rt.coeffs, rt.density, X, kappa));
    }
    bool negative_decreasing = true;
    for (std::size_t i = 0; i < energies.size(); ++i) {
        double slope = 0.0;
        if (i > 0) {
            slope = (energies[i] - energies[i - 1]) /
                    std::log(s.kappa_ladder[i] / s.kappa_ladder[i - 1]);
        }
        r.table_rows.push_back({s.kappa_ladder[i], energies[i], slope});
        if (energies[i] > 0.0) negative_decreasing = false;
        if (i > 0 && energies[i] >= energies[i - 1]) negative_decreasing = false;
    }

    const std::size_t n = energies.size();
    const double slope_last = (energies[n - 1] - energies[n - 2]) /
                              std::log(s.kappa_ladder[n - 1] / s.kappa_ladder[n - 2]);
    const double asym = E_slope_asymptote(*rt.coeffs, X, s.density.q);
    const double slope_dev = std::abs(slope_last / asym - 1.0);

    bool isotropic = s.a.type == "constant" && s.a.diag.empty() && s.A.type == "constant" &&
                     s.A.diag.empty();
    double iso_dev = 0.0;
    if (isotropic && s.dim == 3) {
        // For a = a0, A = A0 the angular integral collapses:
        // slope = -(q^2 / 2) (2 pi)^{-6} 4 pi / (sqrt(a0) A0).
        const double a0 = s.a.base;
        const double A0 = s.A.base;
        const double closed = -0.5 * std::pow(2.0 * kPi, -6.0) * s.density.q * s.density.q *
                              4.0 * kPi / (std::sqrt(a0) * A0);
        iso_dev = std::abs(asym / closed - 1.0);
    }

    put(r, "slope_last", slope_last);
    put(r, "slope_asymptote", asym);
    put(r, "slope_rel_dev", slope_dev);
    put(r, "isotropic_closed_form_dev", iso_dev);
    r.pass = negative_decreasing && slope_dev <= 0.02 && iso_dev <= 1e-6;
    r.detail = "log-slope " + fmt(slope_last) + " vs asymptote " + fmt(asym) + " (dev " +
               fmt(slope_dev) + ")";
    return r;
}

// ---------------------------------------------------------------------------
// counterterm-3d: sharp-cutoff reference model ladder

RunResult exp_nelson_ladder(const Scenario& s) {
    RunResult r;
    r.id = "nelson_ladder";
    const ScenarioRuntime rt = make_runtime(s);
    const double mass = s.m.base;
    if (s.kappa_ladder.size() % 2 != 0 || s.kappa_ladder.size() < 2) {
        throw ConfigError("the reference ladder needs doubling pairs");
    }

    const double target = -4.0 * kPi * std::log(2.0);
    r.table_header = {"Lambda", "E", "doubling_increment", "rel_dev"};
    std::vector<double> increments;
    for (std::size_t i = 0; i + 1 < s.kappa_ladder.size(); i += 2) {
        const double lam = s.kappa_ladder[i];
        const double lam2 = s.kappa_ladder[i + 1];
        if (std::abs(lam2 / lam - 2.0) > 1e-12) {
            throw ConfigError("the reference ladder pairs must double the cutoff");
        }
        const double e1 = nelson_E_Lambda(lam, mass, s.sigma);
        const double e2 = nelson_E_Lambda(lam2, mass, s.sigma);
        const double inc = e2 - e1;
        increments.push_back(inc);
        r.table_rows.push_back({lam, e1, inc, std::abs(inc / target - 1.0)});
    }

    bool within = true;
    for (double inc : increments) {
        if (std::abs(inc / target - 1.0) > 0.05) within = false;
    }
    const double flatness =
        std::abs(increments.back() - increments.front()) / std::abs(increments.front());

    // Slope ratio against the smeared-charge route: the Fourier conventions
    // differ by (2 pi)^{2d} / q^2.
    const std::vector<double> X(s.dim, 0.0);
    const double e512 = E_kappa(*rt.coeffs, rt.density, X, 512.0);
    const double e1024 = E_kappa(*rt.coeffs, rt.density, X, 1024.0);
    const double slope_kappa = (e1024 - e512) / std::log(2.0);
    const double slope_lambda = increments.back() / std::log(2.0);
    const double expected = std::pow(2.0 * kPi, 2.0 * s.dim) / (s.density.q * s.density.q);
    const double ratio_dev = std::abs(slope_lambda / slope_kappa / expected - 1.0);

    put(r, "increment_last", increments.back());
    put(r, "flatness", flatness);
    put(r, "convention_ratio_dev", ratio_dev);
    r.pass = within && flatness <= 0.05 && ratio_dev <= 0.05;
    r.detail = "doubling increments within " + fmt(flatness) + " of flat, convention ratio dev " +
               fmt(ratio_dev);
    return r;
}

// ---------------------------------------------------------------------------
// counterterm-3d: the subtraction removes the divergence

RunResult exp_renorm_cancellation(const Scenario& s) {
    RunResult r;
    r.id = "renorm_cancellation";
    const ScenarioRuntime rt = make_runtime(s);
    const std::vector<double> X(s.dim, 0.0);
    const RenormReport rep =
        renorm_limit_study_d3(*rt.coeffs, rt.density, X, s.kappa_ladder);

    r.table_header = {"kappa", "raw", "subtracted"};
    for (std::size_t i = 0; i < rep.kappas.size(); ++i) {
        r.table_rows.push_back({rep.kappas[i], rep.raw_sup[i], rep.subtracted_sup[i]});
    }
    const double top_raw = rep.increment_raw.back();
    const double top_sub = rep.increment_sub.back();
    put(r, "top_increment_raw", top_raw);
    put(r, "top_increment_subtracted", top_sub);
    put(r, "increment_ratio", top_sub / top_raw);
    r.pass = rep.increments_decreasing && top_sub <= top_raw / 10.0;
    r.detail = "top-rung increment drops from " + fmt(top_raw) + " to " + fmt(top_sub) +
               " after subtraction";
    return r;
}

// ---------------------------------------------------------------------------
// variable-1d: dressed decomposition against the conjugation route

RunResult exp_dressed_consistency(const Scenario& s) {
    RunResult r;
    r.id = "dressed_consistency";
    const ScenarioRuntime rt = make_runtime(s);
    const double kappa = s.kappa_ladder.front();

    const CoupledSystem top(rt.context, s.modes, s.n_max);
    const ModeDressing dr = top.dress(rt.density, kappa);
    const ModeSpace& ms = top.mode_space();
    const long pcount = top.particle_points();

    // Scalar produced by conjugating the field part, node by node.
    const int axes = rt.context->particle_grid ? rt.context->particle_grid->dim() : 0;
    double scalar_dev = 0.0;
    {
        double vmax = dr.potential.cwiseAbs().maxCoeff();
        for (long i = 0; i < pcount; ++i) {
            const VectorXcd beta_i = dr.beta.row(i).transpose();
            const VectorXcd g_i = dr.coupling.row(i).transpose();
            const VectorXcd half =
                0.5 * ms.omega.cast<Complex>().cwiseProduct(beta_i) + g_i;
            double scalar = std::real(half.dot(beta_i));
            const MatrixXd A = rt.coeffs->A_at(rt.context->particle_coord(i));
            for (int a = 0; a < axes; ++a) {
                for (int b = 0; b < axes; ++b) {
                    const VectorXcd ga = dr.beta_grad[a].row(i).transpose();
                    const VectorXcd gb = dr.beta_grad[b].row(i).transpose();
                    scalar += 0.5 * A(a, b) * std::real(ga.dot(gb));
                }
            }
            scalar_dev = std::max(scalar_dev, std::abs(scalar - dr.potential[i]) / vmax);
        }
    }

    // Unitarity of the dressing block at the center node.
    const long center = pcount / 2;
    const MatrixXcd u0 = top.dressing_unitary_block(dr, center);
    const double unit_defect =
        (u0.adjoint() * u0 - MatrixXcd::Identity(u0.rows(), u0.cols())).cwiseAbs().maxCoeff();

    // Assembled decomposition vs the plain route along the occupation ladder.
    // At each cap the truncated conjugation identity is checked on the sector
    // with total occupation <= 4; the residual is pure truncation tail, so it
    // falls steeply as the cap grows, and conjugation invariance of the
    // spectrum forces the two ground energies together at the same rate.
    const VectorXd counterterm = top.counterterm_diag(rt.density, kappa);
    r.table_header = {"n_max", "dim", "shift_residual", "ground_plain", "ground_assembled",
                      "gap"};
    std::vector<double> residuals;
    std::vector<double> gaps;
    bool gap_within_residual = true;
    for (int n = s.n_max - 4; n <= s.n_max; n += 2) {
        const CoupledSystem sys(rt.context, s.modes, n);
        const ModeDressing drn = sys.dress(rt.density, kappa);
        const WeylShiftReport shift =
            verify_weyl_shift(sys.fock(), ms.omega, drn.beta.row(center).transpose(),
                              drn.coupling.row(center).transpose(), 4);
        residuals.push_back(shift.residual);

        StructuredOperator plain = sys.hamiltonian(rt.density, kappa);
        plain.add_particle(MatrixXcd((-counterterm).cast<Complex>().asDiagonal()));
        const GroundState g_plain = ground_state(plain.linop(), plain.dim(), 600, 1e-10, s.seed);

        StructuredOperator assembled = sys.dressed_hamiltonian(drn);
        assembled.add_particle(MatrixXcd((-counterterm).cast<Complex>().asDiagonal()));
        const GroundState g_asm =
            ground_state(assembled.linop(), assembled.dim(), 600, 1e-10, s.seed);

        const double gap = std::abs(g_asm.energy - g_plain.energy);
        gaps.push_back(gap);
        gap_within_residual = gap_within_residual && gap <= shift.residual;
        r.table_rows.push_back({double(n), double(plain.dim()), shift.residual, g_plain.energy,
                                g_asm.energy, gap});
    }

    put(r, "max_beta_norm", dr.max_beta_norm);
    put(r, "coupling_leakage", dr.max_coupling_leakage);
    put(r, "potential_vs_conjugation", scalar_dev);
    put(r, "unitary_defect", unit_defect);
    put(r, "final_shift_residual", residuals.back());
    put(r, "final_gap", gaps.back());
    r.pass = dr.max_beta_norm <= 0.5 && scalar_dev <= 1e-10 && unit_defect <= 1e-12 &&
             strictly_decreasing(residuals) && residuals.back() <= 1e-6 && gap_within_residual &&
             gaps.back() <= 1e-8;
    r.detail = "shift residual falls to " + fmt(residuals.back()) + ", route gap to " +
               fmt(gaps.back());
    return r;
}

// ---------------------------------------------------------------------------
// variable-1d: resolvent convergence along the cutoff ladder

RunResult exp_resolvent_cauchy(const Scenario& s) {
    RunResult r;
    r.id = "resolvent_cauchy";
    const ScenarioRuntime rt = make_runtime(s);
    const CoupledSystem sys(rt.context, s.modes, s.n_max);

    std::vector<MatrixXcd> dressed, plain;
    double min_eig = std::numeric_limits<double>::infinity();
    for (double kappa : s.kappa_ladder) {
        const VectorXd counterterm = sys.counterterm_diag(rt.density, kappa);
        const MatrixXcd shift = MatrixXcd((-counterterm).cast<Complex>().asDiagonal());

        const ModeDressing dr = sys.dress(rt.density, kappa);
        StructuredOperator hd = sys.dressed_hamiltonian(dr);
        hd.add_particle(shift);
        dressed.push_back(hd.dense());

        StructuredOperator hp = sys.hamiltonian(rt.density, kappa);
        hp.add_particle(shift);
        plain.push_back(hp.dense());
    }

    std::vector<std::shared_ptr<SpectralOperator>> rds, rps;
    for (std::size_t i = 0; i < dressed.size(); ++i) {
        rds.push_back(std::make_shared<SpectralOperator>(dressed[i], nullptr, "dressed"));
        rps.push_back(std::make_shared<SpectralOperator>(plain[i], nullptr, "plain"));
        min_eig = std::min(min_eig, rds.back()->min_eigenvalue());
        min_eig = std::min(min_eig, rps.back()->min_eigenvalue());
    }
    const double z = min_eig - 5.0;

    // Probes: free ground state plus seeded random vectors.
    const StructuredOperator free_op = sys.free_hamiltonian();
    const SpectralOperator free_dense(free_op.dense(), nullptr, "free");
    std::vector<VectorXcd> probes;
    probes.push_back(ground_state(free_dense).vector);
    std::mt19937 gen(s.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int t = 0; t < 2; ++t) {
        VectorXcd v(free_dense.dim());
        for (long i = 0; i < v.size(); ++i) v[i] = Complex(nd(gen), nd(gen));
        probes.push_back(v / v.norm());
    }

    r.table_header = {"kappa_low", "kappa_high", "dressed_norm_diff", "plain_probe_diff"};
    std::vector<double> norm_diffs, probe_diffs;
    MatrixXcd prev_d = resolvent_matrix(*rds[0], z);
    MatrixXcd prev_p = resolvent_matrix(*rps[0], z);
    for (std::size_t i = 1; i < rds.size(); ++i) {
        const MatrixXcd cur_d = resolvent_matrix(*rds[i], z);
        const MatrixXcd cur_p = resolvent_matrix(*rps[i], z);
        const MatrixXcd diff_d = cur_d - prev_d;
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(diff_d, Eigen::EigenvaluesOnly);
        const double nd_ = es.eigenvalues().cwiseAbs().maxCoeff();
        double pd = 0.0;
        for (const VectorXcd& probe : probes) {
            pd = std::max(pd, ((cur_p - prev_p) * probe).norm());
        }
        norm_diffs.push_back(nd_);
        probe_diffs.push_back(pd);
        r.table_rows.push_back({s.kappa_ladder[i - 1], s.kappa_ladder[i], nd_, pd});
        prev_d = cur_d;
        prev_p = cur_p;
    }

    put(r, "z", z);
    put(r, "final_norm_diff", norm_diffs.back());
    put(r, "final_probe_diff", probe_diffs.back());
    r.pass = strictly_decreasing(norm_diffs) && strictly_decreasing(probe_diffs);
    r.detail = "norm-resolvent increments decrease to " + fmt(norm_diffs.back()) +
               ", strong increments to " + fmt(probe_diffs.back());
    return r;
}

// ---------------------------------------------------------------------------
// variable-1d: relative form bound of the commutator remainder

RunResult exp_form_bound_klmn(const Scenario& s) {
    RunResult r;
    r.id = "form_bound_klmn";
    const ScenarioRuntime rt = make_runtime(s);
    const CoupledSystem sys(rt.context, s.modes, s.n_max);
    const MatrixXcd h0 = sys.free_hamiltonian().dense();
    const std::vector<double> c_grid{0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0};

    r.table_header = {"kappa", "c", "a", "b", "valid"};
    std::vector<double> max_a(c_grid.size(), 0.0);
    std::vector<bool> all_valid(c_grid.size(), true);
    for (double kappa : s.kappa_ladder) {
        const ModeDressing dr = sys.dress(rt.density, kappa);
        const MatrixXcd remainder = sys.quadratic_remainder(dr).dense();
        const FormBoundReport rep = form_bound(h0, remainder, c_grid);
        for (std::size_t i = 0; i < rep.rows.size(); ++i) {
            const FormBoundRow& row = rep.rows[i];
            r.table_rows.push_back({kappa, row.c, row.a, row.b, row.valid ? 1.0 : 0.0});
            if (!row.valid) {
                all_valid[i] = false;
            } else {
                max_a[i] = std::max(max_a[i], row.a);
            }
        }
    }

    double best = std::numeric_limits<double>::infinity();
    double best_c = 0.0;
    for (std::size_t i = 0; i < c_grid.size(); ++i) {
        if (all_valid[i] && max_a[i] < best) {
            best = max_a[i];
            best_c = c_grid[i];
        }
    }

    // Diagnostic: the full interaction against the free part at the top rung.
    const MatrixXcd full =
        sys.hamiltonian(rt.density, s.kappa_ladder.back()).dense() - h0;
    const FormBoundReport full_rep = form_bound(h0, full, c_grid);

    put(r, "best_uniform_a", best);
    put(r, "best_c", best_c);
    put(r, "full_interaction_best_a", full_rep.best_a);
    r.pass = std::isfinite(best) && best < 1.0;
    r.detail = "uniform form constant a = " + fmt(best) + " at c = " + fmt(best_c);
    return r;
}

// ---------------------------------------------------------------------------
// variable-1d: frozen-symbol remainders decay with frequency

RunResult exp_symbol_decay(const Scenario& s) {
    RunResult r;
    r.id = "symbol_decay";
    const ScenarioRuntime rt = make_runtime(s);
    const auto& pack = rt.context->pack;
    const Grid& bg = *pack.grid;
    const LeadingSymbols lead(*rt.coeffs);
    const auto inv_sqrt = [](double t) { return 1.0 / std::sqrt(t); };

    // Variable-coefficient inverse dispersion against its leading symbol.
    const ExactApply apply_omega_inv = [&](const VectorXcd& e) {
        return pack.h->apply_map(inv_sqrt, e);
    };
    const DecayReport rep_var =
        remainder_decay_check(apply_omega_inv, lead.omega_inverse(), bg,
                              default_probe_freqs(bg));

    // Constant coefficients: the leading symbol is the whole story.
    const CoefficientSet const_coeffs(s.dim, s.boson_box, s.particle_box, FieldSpec{},
                                      constant_field(1.0), constant_field(0.0), s.A, s.W);
    const auto h_const = std::make_shared<SpectralOperator>(
        assemble_h(std::make_shared<Grid>(Grid::build(s.dim, static_cast<int>(s.boson_points),
                                                      s.boson_box)),
                   const_coeffs));
    const ExactApply apply_const = [&](const VectorXcd& e) {
        return h_const->apply_map(inv_sqrt, e);
    };
    const LeadingSymbols lead_const(const_coeffs);
    const DecayReport rep_const = remainder_decay_check(
        apply_const, lead_const.omega_inverse(), h_const->grid(), default_probe_freqs(bg));

    // Shifted generator on the product grid against the frozen resolvent.
    const auto pg64 = std::make_shared<Grid>(Grid::build(s.dim, 64, s.particle_box));
    const auto bg64 = std::make_shared<Grid>(Grid::build(s.dim, 64, s.boson_box));
    const auto K0_64 = std::make_shared<SpectralOperator>(assemble_K0(pg64, *rt.coeffs));
    const BosonPack pack64 = build_boson_pack(bg64, *rt.coeffs, s.sigma);
    const TensorOperator t64(K0_64, pack64.omega_reg);
    const Grid product = Grid::product(*pg64, *bg64);
    const ExactApply apply_t = [&](const VectorXcd& e) { return t64.solve(e); };
    // Slanted ray through both factors; the pre-asymptotic transition along
    // the pure particle direction is long, so weight the boson axis double.
    std::vector<long> ray_probes;
    for (auto [hp, hb] : std::vector<std::pair<long, long>>{
             {0, 1}, {1, 2}, {2, 4}, {3, 6}, {4, 8}, {6, 11}, {8, 16}}) {
        ray_probes.push_back(freq_flat_index(product, {hp, hb}));
    }
    const DecayReport rep_prod = remainder_decay_check(
        apply_t, product_t_resolvent(*rt.coeffs, s.dim), product, ray_probes);

    // Midpoint vs left quantization of the principal symbol.
    const Grid grid128 = Grid::build(s.dim, 128, s.boson_box);
    const Symbol h0_sym = lead.h0();
    const MatrixXcd weyl = quantize_weyl(h0_sym, grid128);
    const ExactApply apply_weyl = [&](const VectorXcd& e) { return VectorXcd(weyl * e); };
    const DecayReport rep_weyl =
        remainder_decay_check(apply_weyl, h0_sym, grid128, default_probe_freqs(grid128));

    // Mapping norms on the Sobolev scale stay bounded under refinement.
    std::vector<double> norms_s0, norms_s1;
    for (int n : {64, 128, 256}) {
        const auto grid_n = std::make_shared<Grid>(Grid::build(s.dim, n, s.boson_box));
        const SpectralOperator h_n = assemble_h(grid_n, *rt.coeffs);
        const MatrixXcd op = h_n.map_matrix(inv_sqrt);
        norms_s0.push_back(sobolev_mapping_norm(op, *grid_n, 0.0, -1.0));
        norms_s1.push_back(sobolev_mapping_norm(op, *grid_n, 1.0, -1.0));
    }
    const auto ratio = [](const std::vector<double>& v) {
        return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
    };

    const auto in_window = [](double slope) { return slope >= -1.4 && slope <= -0.6; };
    r.table_header = {"check", "slope_or_ratio", "max_residual"};
    r.table_rows.push_back({1.0, rep_var.slope, rep_var.relative_residual.front()});
    r.table_rows.push_back({2.0, 0.0, rep_const.relative_residual.front()});
    r.table_rows.push_back({3.0, rep_prod.slope, rep_prod.relative_residual.front()});
    r.table_rows.push_back({4.0, rep_weyl.slope, rep_weyl.relative_residual.front()});
    r.table_rows.push_back({5.0, ratio(norms_s0), norms_s0.back()});
    r.table_rows.push_back({6.0, ratio(norms_s1), norms_s1.back()});

    put(r, "slope_variable", rep_var.slope);
    put(r, "slope_product", rep_prod.slope);
    put(r, "slope_weyl_vs_left", rep_weyl.slope);
    put(r, "constant_exact", rep_const.exact_match ? 1.0 : 0.0);
    put(r, "mapping_ratio_s0", ratio(norms_s0));
    put(r, "mapping_ratio_s1", ratio(norms_s1));
    r.pass = in_window(rep_var.slope) && rep_const.exact_match && in_window(rep_prod.slope) &&
             in_window(rep_weyl.slope) && ratio(norms_s0) <= 2.0 && ratio(norms_s1) <= 2.0;
    r.detail = "remainder slopes " + fmt(rep_var.slope) + "/" + fmt(rep_prod.slope) + "/" +
               fmt(rep_weyl.slope) + ", mapping ratios " + fmt(ratio(norms_s0)) + "/" +
               fmt(ratio(norms_s1));
    return r;
}

// ---------------------------------------------------------------------------
// variable-1d extras

RunResult exp_beta_norms(const Scenario& s) {
    RunResult r;
    r.id = "beta_norms";
    const ScenarioRuntime rt = make_runtime(s);
    const std::vector<double> alphas{0.0, 0.4, 0.9, 1.0};
    const auto rows = beta_weighted_norms(*rt.context, rt.density, s.kappa_ladder, alphas);

    r.table_header = {"kappa", "node", "alpha", "weighted_norm", "ratio", "diagnostic"};
    std::map<std::pair<double, double>, double> sup;  // (alpha, kappa) -> sup over nodes
    for (const BetaNormRow& row : rows) {
        r.table_rows.push_back({row.kappa, double(row.node), row.alpha, row.weighted_norm,
                                row.ratio, row.diagnostic_only ? 1.0 : 0.0});
        auto key = std::make_pair(row.alpha, row.kappa);
        sup[key] = std::max(sup[key], row.weighted_norm);
    }

    bool ok = true;
    double worst_tail = 0.0;
    for (double alpha : alphas) {
        if (alpha >= 1.0) continue;
        std::vector<double> increments;
        double prev = 0.0;
        bool first = true;
        for (double kappa : s.kappa_ladder) {
            const double cur = sup[{alpha, kappa}];
            if (!first) increments.push_back(std::abs(cur - prev));
            prev = cur;
            first = false;
        }
        if (!strictly_decreasing(increments)) ok = false;
        worst_tail = std::max(worst_tail, increments.back());
    }
    put(r, "final_increment", worst_tail);
    r.pass = ok;
    r.detail = "weighted-norm increments decrease along the ladder (final " + fmt(worst_tail) +
               ")";
    return r;
}

RunResult exp_renorm_limit_d1(const Scenario& s) {
    RunResult r;
    r.id = "renorm_limit_d1";
    const ScenarioRuntime rt = make_runtime(s);
    const RenormReport rep = renorm_limit_study_d1(*rt.context, rt.density, s.kappa_ladder);

    r.table_header = {"kappa", "raw_sup", "subtracted_sup"};
    for (std::size_t i = 0; i < rep.kappas.size(); ++i) {
        r.table_rows.push_back({rep.kappas[i], rep.raw_sup[i], rep.subtracted_sup[i]});
    }
    put(r, "final_increment_subtracted", rep.increment_sub.back());
    r.pass = rep.increments_decreasing;
    r.detail = "subtracted increments decrease to " + fmt(rep.increment_sub.back());
    return r;
}

// ---------------------------------------------------------------------------
// constant-1d extra: the scaled profile concentrates to the point charge

RunResult exp_density_limit(const Scenario& s) {
    RunResult r;
    r.id = "density_limit";
    const ScenarioRuntime rt = make_runtime(s);
    const Grid& bg = *rt.context->pack.grid;

    std::vector<int> center_idx(s.dim, static_cast<int>(s.boson_points) / 2);
    const long center = bg.flat_index(center_idx);
    VectorXcd delta = VectorXcd::Zero(bg.size());
    delta[center] = s.density.q / bg.cell_volume();

    r.table_header = {"kappa", "h_minus2_distance", "mass_defect"};
    std::vector<double> dists;
    for (double kappa : s.kappa_ladder) {
        const VectorXcd rho =
            rt.density.sample_at(bg, std::vector<double>(s.dim, 0.0), kappa);
        const double dist = bg.sobolev_norm(rho - delta, -2.0);
        const double mass =
            std::abs(bg.cell_volume() * rho.sum() - s.density.q) / std::abs(s.density.q);
        dists.push_back(dist);
        r.table_rows.push_back({kappa, dist, mass});
    }
    put(r, "final_distance", dists.back());
    r.pass = strictly_decreasing(dists);
    r.detail = "negative-order Sobolev distance to the point charge decreases to " +
               fmt(dists.back());
    return r;
}

// ---------------------------------------------------------------------------
// massless-floor-1d: grading restricted to modes above the floor

RunResult exp_massless_checks(const Scenario& s) {
    RunResult r;
    r.id = "massless_checks";
    const ScenarioRuntime rt = make_runtime(s);
    const ModeSpace ms = build_mode_space(rt.context->pack, s.modes);
    const MatrixXcd K = assemble_K(rt.context->particle_grid, *rt.coeffs).matrix();
    const FockBasis fock(s.modes, s.n_max);

    // The zero mode is regularized to exactly sigma and the high window
    // only opens well above the grading floor.
    const double reg_floor_dev = std::abs(ms.omega_reg.minCoeff() - s.sigma);
    bool window_consistent = ms.omega.minCoeff() < 1e-12;  // a genuine zero mode exists
    for (int m = 0; m < s.modes; ++m) {
        if (ms.win_high[m] > 0.0 && ms.omega[m] < 2.0 * s.sigma - 1e-9) window_consistent = false;
        if (ms.win_high[m] > 0.0 && ms.omega[m] < s.grading_floor / 2.0) window_consistent = false;
    }

    std::vector<unsigned> seeds;
    for (unsigned i = 0; i < 10; ++i) seeds.push_back(s.seed + i);
    const auto rows =
        number_bounds(K, fock, ms.omega, {0.0, 0.5, 1.0}, seeds, s.grading_floor);
    double min_slack = std::numeric_limits<double>::infinity();
    r.table_header = {"bound", "s", "seed", "lhs", "rhs", "slack"};
    for (const NumberBoundRow& row : rows) {
        min_slack = std::min(min_slack, row.slack);
        r.table_rows.push_back({double(row.bound), row.s, double(row.seed), row.lhs, row.rhs,
                                row.slack});
    }

    put(r, "reg_floor_dev", reg_floor_dev);
    put(r, "min_slack", min_slack);
    r.pass = reg_floor_dev <= 1e-12 && window_consistent && min_slack >= -1e-9;
    r.detail = "floor-graded bounds hold with min slack " + fmt(min_slack);
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------

const std::map<std::string, ExperimentFn>& experiment_registry() {
    static const std::map<std::string, ExperimentFn> registry = {
        {"dressing_identity", exp_dressing_identity},
        {"beta_oracle", exp_beta_oracle},
        {"ccr_ju88", exp_ccr_ju88},
        {"a6_bounds", exp_a6_bounds},
        {"van_hove", exp_van_hove},
        {"counterterm_slope", exp_counterterm_slope},
        {"nelson_ladder", exp_nelson_ladder},
        {"renorm_cancellation", exp_renorm_cancellation},
        {"dressed_consistency", exp_dressed_consistency},
        {"resolvent_cauchy", exp_resolvent_cauchy},
        {"form_bound_klmn", exp_form_bound_klmn},
        {"symbol_decay", exp_symbol_decay},
        {"beta_norms", exp_beta_norms},
        {"renorm_limit_d1", exp_renorm_limit_d1},
        {"density_limit", exp_density_limit},
        {"massless_checks", exp_massless_checks},
    };
    return registry;
}

std::vector<std::string> experiment_ids() {
    std::vector<std::string> ids;
    for (const auto& [id, fn] : experiment_registry()) ids.push_back(id);
    return ids;
}

RunResult run_experiment(const std::string& id, const Scenario& scenario) {
    const auto& registry = experiment_registry();
    const auto it = registry.find(id);
    if (it == registry.end()) throw ConfigError("unknown experiment id: " + id);
    return it->second(scenario.for_experiment(id));
}

void parallel_for(long count, int threads, const std::function<void(long)>& fn) {
    if (count <= 0) return;
    const int workers = static_cast<int>(std::min<long>(std::max(threads, 1), count));
    if (workers == 1) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                const long i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<RunResult> run_scenario(const Scenario& scenario,
                                    const std::vector<std::string>& only, int threads) {
    std::vector<std::string> ids = only.empty() ? scenario.experiments : only;
    for (const std::string& id : ids) {
        if (!experiment_registry().count(id)) throw ConfigError("unknown experiment id: " + id);
    }
    std::vector<RunResult> results(ids.size());
    parallel_for(static_cast<long>(ids.size()), threads,
                 [&](long i) { results[i] = run_experiment(ids[i], scenario); });
    return results;
}

}  // namespace nelson
