#include "nelsonlab/coupled.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace nelson {

namespace {

constexpr double kRoot2 = 1.4142135623730951;

SparseC sparse_diag(const VectorXcd& d) {
    SparseC out(d.size(), d.size());
    out.reserve(Eigen::VectorXi::Constant(static_cast<int>(d.size()), 1));
    for (long i = 0; i < d.size(); ++i) out.insert(i, i) = d[i];
    out.makeCompressed();
    return out;
}

SparseC sparse_identity(long n) {
    SparseC out(n, n);
    out.setIdentity();
    return out;
}

// Largest |eigenvalue| of a Hermitian matrix.
double hermitian_norm(const MatrixXcd& m) {
    if (m.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double singular_norm(const MatrixXcd& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    const MatrixXcd gram = m.rows() >= m.cols() ? MatrixXcd(m.adjoint() * m)
                                                : MatrixXcd(m * m.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

void phase_fix(VectorXcd& v) {
    if (v.size() == 0) return;
    long pick = 0;
    double best = -1.0;
    for (long i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > best * (1.0 + 1e-14)) {
            best = std::abs(v[i]);
            pick = i;
        }
    }
    if (best <= 0.0) return;
    v *= std::conj(v[pick]) / best;
    v /= v.norm();
}

MatrixXcd unitary_from_displacement(const FockBasis& fock, const VectorXcd& b) {
    const MatrixXcd gen =
        (MatrixXcd(fock.annihilator(b)) - MatrixXcd(fock.creator(b))) / kRoot2;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(Complex(0.0, 1.0) * gen);
    const VectorXcd phases =
        es.eigenvalues().unaryExpr([](double t) { return std::exp(Complex(0.0, -t)); });
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

MatrixXcd random_complex(long rows, long cols, std::mt19937& gen) {
    std::normal_distribution<double> nd(0.0, 1.0);
    MatrixXcd out(rows, cols);
    for (long j = 0; j < cols; ++j)
        for (long i = 0; i < rows; ++i) out(i, j) = Complex(nd(gen), nd(gen));
    return out / std::sqrt(2.0 * rows);
}

}  // namespace

// ---------------------------------------------------------------------------
// ModeSpace

VectorXcd ModeSpace::project(const VectorXcd& u) const {
    if (u.size() != modes.rows()) throw ConfigError("mode projection: wrong grid size");
    return cell_volume * (modes.adjoint() * u);
}

double ModeSpace::leakage(const VectorXcd& u) const {
    const double total = cell_volume * u.squaredNorm();
    if (total <= 0.0) return 0.0;
    const double captured = project(u).squaredNorm();
    return std::max(0.0, total - captured) / total;
}

ModeSpace build_mode_space(const BosonPack& pack, int count) {
    const long n = pack.grid->size();
    if (count < 1 || count > n) throw ConfigError("mode count outside the grid range");
    ModeSpace ms;
    ms.sigma = pack.sigma;
    ms.cell_volume = pack.grid->cell_volume();
    ms.modes = pack.h->eigenvectors().leftCols(count) / std::sqrt(ms.cell_volume);
    ms.h_eigs = pack.h->eigenvalues().head(count);
    ms.omega.resize(count);
    ms.omega_reg.resize(count);
    ms.win_high.resize(count);
    ms.win_low.resize(count);
    for (int m = 0; m < count; ++m) {
        const double lam = std::max(ms.h_eigs[m], 0.0);
        ms.omega[m] = std::sqrt(lam);
        ms.omega_reg[m] = smoothed_sqrt(lam, pack.sigma);
        ms.win_high[m] = cutoff_high(ms.omega[m], pack.sigma);
        ms.win_low[m] = 1.0 - ms.win_high[m];
    }
    return ms;
}

// ---------------------------------------------------------------------------
// StructuredOperator

void StructuredOperator::add(MatrixXcd particle_factor, SparseC fock_factor) {
    if (particle_factor.rows() != particle_dim_ || particle_factor.cols() != particle_dim_ ||
        fock_factor.rows() != fock_dim_ || fock_factor.cols() != fock_dim_) {
        throw ConfigError("structured term has mismatched factor dimensions");
    }
    terms_.emplace_back(std::move(particle_factor), std::move(fock_factor));
}

void StructuredOperator::add_particle(const MatrixXcd& particle_factor) {
    add(particle_factor, sparse_identity(fock_dim_));
}

void StructuredOperator::add_fock(const SparseC& fock_factor) {
    add(MatrixXcd::Identity(particle_dim_, particle_dim_), fock_factor);
}

void StructuredOperator::append(const StructuredOperator& other) {
    if (other.particle_dim_ != particle_dim_ || other.fock_dim_ != fock_dim_) {
        throw ConfigError("cannot append a structured operator of different shape");
    }
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
}

VectorXcd StructuredOperator::apply(const VectorXcd& v) const {
    if (v.size() != dim()) throw ConfigError("structured apply: wrong vector length");
    Eigen::Map<const MatrixXcd> w(v.data(), fock_dim_, particle_dim_);
    MatrixXcd out = MatrixXcd::Zero(fock_dim_, particle_dim_);
    for (const auto& [a, s] : terms_) {
        const MatrixXcd tmp = s * w;
        out.noalias() += tmp * a.transpose();
    }
    return Eigen::Map<const VectorXcd>(out.data(), dim());
}

VectorXcd StructuredOperator::apply_adjoint(const VectorXcd& v) const {
    if (v.size() != dim()) throw ConfigError("structured apply: wrong vector length");
    Eigen::Map<const MatrixXcd> w(v.data(), fock_dim_, particle_dim_);
    MatrixXcd out = MatrixXcd::Zero(fock_dim_, particle_dim_);
    for (const auto& [a, s] : terms_) {
        const MatrixXcd tmp = SparseC(s.adjoint()) * w;
        out.noalias() += tmp * a.conjugate();
    }
    return Eigen::Map<const VectorXcd>(out.data(), dim());
}

LinOp StructuredOperator::linop() const {
    return [op = *this](const VectorXcd& v) { return op.apply(v); };
}

double StructuredOperator::asymmetry(int probes, unsigned seed) const {
    std::mt19937 gen(seed);
    double worst = 0.0;
    for (int p = 0; p < probes; ++p) {
        VectorXcd u = random_complex(dim(), 1, gen);
        VectorXcd v = random_complex(dim(), 1, gen);
        u /= u.norm();
        v /= v.norm();
        const VectorXcd av = apply(v);
        const VectorXcd au = apply(u);
        const double scale = av.norm() + au.norm() + 1e-300;
        worst = std::max(worst, std::abs(u.dot(av) - au.dot(v)) / scale);
    }
    return worst;
}

MatrixXcd StructuredOperator::dense(long max_dimension) const {
    if (dim() > max_dimension) throw ConfigError("structured operator too large to densify");
    MatrixXcd out = MatrixXcd::Zero(dim(), dim());
    for (const auto& [a, s] : terms_) {
        const MatrixXcd sd = MatrixXcd(s);
        for (long i = 0; i < particle_dim_; ++i) {
            for (long ip = 0; ip < particle_dim_; ++ip) {
                if (a(i, ip) == Complex(0.0, 0.0)) continue;
                out.block(i * fock_dim_, ip * fock_dim_, fock_dim_, fock_dim_) += a(i, ip) * sd;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// CoupledSystem

CoupledSystem::CoupledSystem(std::shared_ptr<const OperatorContext> ctx, int modes, int n_max)
    : ctx_(std::move(ctx)),
      fock_(modes, n_max),
      mode_space_(build_mode_space(ctx_->pack, modes)),
      particle_dim_(ctx_->particle_points()) {
    if (ctx_->particle_grid) {
        kinetic_ = assemble_K(ctx_->particle_grid, *ctx_->coeffs).matrix();
        for (int a = 0; a < ctx_->particle_grid->dim(); ++a) {
            derivative_.push_back(ctx_->particle_grid->derivative_first(a));
        }
    } else {
        kinetic_ = MatrixXcd::Zero(1, 1);
    }
}

StructuredOperator CoupledSystem::free_hamiltonian() const {
    StructuredOperator op(particle_dim_, fock_.dim());
    op.add_particle(kinetic_);
    op.add_fock(sparse_diag(fock_.dgamma_diag(mode_space_.omega).cast<Complex>()));
    return op;
}

StructuredOperator CoupledSystem::hamiltonian(const ChargeDensity& density, double kappa) const {
    const ModeDressing dr = dress(density, kappa);
    StructuredOperator op = free_hamiltonian();
    for (int m = 0; m < fock_.modes(); ++m) {
        const VectorXcd g = dr.coupling.col(m) / kRoot2;
        op.add(MatrixXcd(g.asDiagonal()), SparseC(fock_.create(m).cast<Complex>()));
        op.add(MatrixXcd(g.conjugate().asDiagonal()), SparseC(fock_.annihilate(m).cast<Complex>()));
    }
    return op;
}

ModeDressing CoupledSystem::dress(const ChargeDensity& density, double kappa) const {
    const int M = fock_.modes();
    const ModeSpace& ms = mode_space_;
    for (int m = 0; m < M; ++m) {
        if (ms.omega[m] <= 1e-12) {
            throw NumericError("zero dispersion mode in the coupling; use a positive mass floor");
        }
    }

    ModeDressing dr;
    dr.kappa = kappa;
    const MatrixXcd rho_rows = ctx_->density_rows(density, kappa);
    dr.rho = ms.cell_volume * (rho_rows * ms.modes.conjugate());

    for (long i = 0; i < rho_rows.rows(); ++i) {
        const VectorXcd row = rho_rows.row(i).transpose();
        dr.max_coupling_leakage = std::max(dr.max_coupling_leakage, ms.leakage(row));
    }

    dr.coupling.resize(particle_dim_, M);
    dr.coupling_low.resize(particle_dim_, M);
    dr.beta.resize(particle_dim_, M);

    // Shifted inverses through the particle eigenbasis.
    const MatrixXcd& q = ctx_->K0->eigenvectors();
    const VectorXd& lam = ctx_->K0->eigenvalues();
    const auto solve_shift = [&](const VectorXcd& rhs, double shift) -> VectorXcd {
        const VectorXcd coeff = q.adjoint() * rhs;
        return q * (coeff.array() / (lam.array() + shift)).matrix();
    };

    MatrixXcd u(particle_dim_, M);
    for (int m = 0; m < M; ++m) {
        const double w = ms.omega[m];
        dr.coupling.col(m) = dr.rho.col(m) / std::sqrt(w);
        dr.coupling_low.col(m) = ms.win_low[m] * dr.coupling.col(m);
        u.col(m) = solve_shift(dr.rho.col(m), ms.omega_reg[m]);
        const double weight = ms.win_high[m] > 0.0 ? ms.win_high[m] / std::sqrt(w) : 0.0;
        dr.beta.col(m) = -weight * u.col(m);
    }
    for (long i = 0; i < particle_dim_; ++i) {
        dr.max_beta_norm = std::max(dr.max_beta_norm, dr.beta.row(i).norm());
    }

    std::vector<MatrixXcd> grad;
    for (const MatrixXcd& d : derivative_) grad.push_back(d * u);
    for (const MatrixXcd& d : derivative_) dr.beta_grad.push_back(d * dr.beta);

    dr.potential = VectorXd::Zero(particle_dim_);
    const int axes = static_cast<int>(derivative_.size());
    for (long i = 0; i < particle_dim_; ++i) {
        double val = 0.0;
        for (int m = 0; m < M; ++m) {
            const double f = ms.win_high[m];
            if (f <= 0.0) continue;
            val -= (f / ms.omega[m]) * std::real(std::conj(dr.rho(i, m)) * u(i, m));
            val += 0.5 * f * f * std::norm(u(i, m));
        }
        if (axes > 0) {
            const MatrixXd A = ctx_->coeffs->A_at(ctx_->particle_coord(i));
            for (int a = 0; a < axes; ++a) {
                for (int b = 0; b < axes; ++b) {
                    double pair = 0.0;
                    for (int m = 0; m < M; ++m) {
                        const double f = ms.win_high[m];
                        if (f <= 0.0) continue;
                        pair += (f * f / ms.omega[m]) *
                                std::real(std::conj(grad[a](i, m)) * grad[b](i, m));
                    }
                    val += 0.5 * A(a, b) * pair;
                }
            }
        }
        dr.potential[i] = val;
    }
    return dr;
}

StructuredOperator CoupledSystem::quadratic_remainder(const ModeDressing& dressing) const {
    const int M = fock_.modes();
    if (dressing.beta.rows() != particle_dim_ || dressing.beta.cols() != M) {
        throw ConfigError("dressing data does not match the coupled system");
    }
    const int axes = static_cast<int>(derivative_.size());
    StructuredOperator op(particle_dim_, fock_.dim());
    if (axes == 0) return op;

    // A(X) evaluated on the particle nodes, entry by entry.
    std::vector<std::vector<VectorXd>> aval(axes, std::vector<VectorXd>(axes));
    for (int a = 0; a < axes; ++a)
        for (int b = 0; b < axes; ++b) aval[a][b] = VectorXd(particle_dim_);
    for (long i = 0; i < particle_dim_; ++i) {
        const MatrixXd A = ctx_->coeffs->A_at(ctx_->particle_coord(i));
        for (int a = 0; a < axes; ++a)
            for (int b = 0; b < axes; ++b) aval[a][b][i] = A(a, b);
    }

    std::vector<MatrixXcd> w;  // (1/sqrt2) grad beta per axis
    for (int a = 0; a < axes; ++a) w.push_back(dressing.beta_grad[a] / kRoot2);

    for (int m = 0; m < M; ++m) {
        MatrixXcd left_lower = MatrixXcd::Zero(particle_dim_, particle_dim_);
        MatrixXcd left_raise = MatrixXcd::Zero(particle_dim_, particle_dim_);
        for (int a = 0; a < axes; ++a) {
            for (int b = 0; b < axes; ++b) {
                const VectorXcd right =
                    aval[a][b].cast<Complex>().cwiseProduct(w[b].col(m).conjugate());
                left_lower += 2.0 * derivative_[a] * MatrixXcd(right.asDiagonal());
                const VectorXcd leftv = w[a].col(m).cwiseProduct(aval[a][b].cast<Complex>());
                left_raise -= 2.0 * MatrixXcd(leftv.asDiagonal()) * derivative_[b];
            }
        }
        op.add(std::move(left_lower), SparseC(fock_.annihilate(m).cast<Complex>()));
        op.add(std::move(left_raise), SparseC(fock_.create(m).cast<Complex>()));
    }

    // Second commutator of the node displacement with the derivative:
    // gamma_a(X) = sum_m Im(conj(beta_m) d_a beta_m). Conjugating a plain
    // derivative shifts it by grad beta paired with field operators plus
    // gamma/2; for a mode set closed under conjugate pairs gamma vanishes,
    // but an arbitrary cut leaves these curvature terms behind.
    std::vector<VectorXd> gamma(axes);
    double gamma_scale = 0.0;
    for (int a = 0; a < axes; ++a) {
        gamma[a] =
            dressing.beta.conjugate().cwiseProduct(dressing.beta_grad[a]).imag().rowwise().sum();
        gamma_scale = std::max(gamma_scale, gamma[a].cwiseAbs().maxCoeff());
    }
    if (gamma_scale > 0.0) {
        const Complex ihalf(0.0, 0.5);
        MatrixXcd drift = MatrixXcd::Zero(particle_dim_, particle_dim_);
        VectorXd square = VectorXd::Zero(particle_dim_);
        for (int a = 0; a < axes; ++a) {
            for (int b = 0; b < axes; ++b) {
                const VectorXcd ag = aval[a][b].cwiseProduct(gamma[b]).cast<Complex>();
                drift -= ihalf * (derivative_[a] * MatrixXcd(ag.asDiagonal()) +
                                  MatrixXcd(ag.asDiagonal()) * derivative_[a]);
                square += 0.25 * gamma[a].cwiseProduct(aval[a][b].cwiseProduct(gamma[b]));
            }
        }
        drift += MatrixXcd(square.cast<Complex>().asDiagonal());
        op.add_particle(drift);
        const Complex iunit(0.0, 1.0);
        for (int m = 0; m < M; ++m) {
            VectorXcd cross = VectorXcd::Zero(particle_dim_);
            for (int a = 0; a < axes; ++a)
                for (int b = 0; b < axes; ++b)
                    cross += gamma[a]
                                 .cwiseProduct(aval[a][b])
                                 .cast<Complex>()
                                 .cwiseProduct(w[b].col(m).conjugate());
            op.add(MatrixXcd((iunit * cross).asDiagonal()),
                   SparseC(fock_.annihilate(m).cast<Complex>()));
            op.add(MatrixXcd((-iunit * cross.conjugate()).asDiagonal()),
                   SparseC(fock_.create(m).cast<Complex>()));
        }
    }

    for (int m = 0; m < M; ++m) {
        for (int mp = 0; mp < M; ++mp) {
            VectorXcd keep = VectorXcd::Zero(particle_dim_);
            VectorXcd pair = VectorXcd::Zero(particle_dim_);
            for (int a = 0; a < axes; ++a) {
                for (int b = 0; b < axes; ++b) {
                    keep += aval[a][b].cast<Complex>().cwiseProduct(
                        w[a].col(m).cwiseProduct(w[b].col(mp).conjugate()));
                    pair += aval[a][b].cast<Complex>().cwiseProduct(
                        w[a].col(m).cwiseProduct(w[b].col(mp)));
                }
            }
            if (keep.cwiseAbs().maxCoeff() > 0.0) {
                const SparseD prod = fock_.create(m) * fock_.annihilate(mp);
                op.add(MatrixXcd((2.0 * keep).asDiagonal()), SparseC(prod.cast<Complex>()));
            }
            if (pair.cwiseAbs().maxCoeff() > 0.0) {
                const SparseD raise2 = fock_.create(m) * fock_.create(mp);
                op.add(MatrixXcd((-pair).asDiagonal()), SparseC(raise2.cast<Complex>()));
                const SparseD lower2 = fock_.annihilate(m) * fock_.annihilate(mp);
                op.add(MatrixXcd((-pair.conjugate()).asDiagonal()),
                       SparseC(lower2.cast<Complex>()));
            }
        }
    }
    return op;
}

StructuredOperator CoupledSystem::dressed_hamiltonian(const ModeDressing& dressing) const {
    const int M = fock_.modes();
    if (dressing.coupling_low.rows() != particle_dim_ || dressing.coupling_low.cols() != M) {
        throw ConfigError("dressing data does not match the coupled system");
    }
    StructuredOperator op(particle_dim_, fock_.dim());
    op.add_particle(kinetic_ + MatrixXcd(dressing.potential.cast<Complex>().asDiagonal()));
    op.add_fock(sparse_diag(fock_.dgamma_diag(mode_space_.omega).cast<Complex>()));
    for (int m = 0; m < M; ++m) {
        op.add(MatrixXcd((dressing.coupling_low.col(m) / kRoot2).asDiagonal()),
               SparseC(fock_.create(m).cast<Complex>()));
        op.add(MatrixXcd((dressing.coupling_low.col(m).conjugate() / kRoot2).asDiagonal()),
               SparseC(fock_.annihilate(m).cast<Complex>()));
    }
    op.append(quadratic_remainder(dressing));

    const double asym = op.asymmetry();
    if (asym > 1e-10) throw NumericError("dressed assembly lost hermiticity");
    return op;
}

VectorXd CoupledSystem::counterterm_diag(const ChargeDensity& density, double kappa) const {
    VectorXd out(particle_dim_);
    for (long i = 0; i < particle_dim_; ++i) {
        const std::vector<double> X = ctx_->particle_grid
                                          ? ctx_->particle_coord(i)
                                          : std::vector<double>(ctx_->pack.grid->dim(), 0.0);
        out[i] = E_kappa(*ctx_->coeffs, density, X, kappa);
    }
    return out;
}

std::vector<MatrixXcd> CoupledSystem::dressing_unitary_blocks(const ModeDressing& dressing) const {
    std::vector<MatrixXcd> blocks;
    blocks.reserve(particle_dim_);
    for (long i = 0; i < particle_dim_; ++i) blocks.push_back(dressing_unitary_block(dressing, i));
    return blocks;
}

MatrixXcd CoupledSystem::dressing_unitary_block(const ModeDressing& dressing, long node) const {
    if (node < 0 || node >= particle_dim_) throw ConfigError("dressing block node out of range");
    return unitary_from_displacement(fock_, dressing.beta.row(node).transpose());
}

VectorXcd CoupledSystem::apply_unitary(const std::vector<MatrixXcd>& blocks, const VectorXcd& v,
                                       bool adjoint) const {
    if (static_cast<long>(blocks.size()) != particle_dim_ || v.size() != dim()) {
        throw ConfigError("unitary blocks do not match the coupled system");
    }
    Eigen::Map<const MatrixXcd> w(v.data(), fock_.dim(), particle_dim_);
    MatrixXcd out(fock_.dim(), particle_dim_);
    for (long i = 0; i < particle_dim_; ++i) {
        out.col(i) = adjoint ? VectorXcd(blocks[i].adjoint() * w.col(i))
                             : VectorXcd(blocks[i] * w.col(i));
    }
    return Eigen::Map<const VectorXcd>(out.data(), dim());
}

// ---------------------------------------------------------------------------
// Weyl shift of the field part under the dressing unitary

WeylShiftReport verify_weyl_shift(const FockBasis& fock, const VectorXd& omega,
                                  const VectorXcd& beta, const VectorXcd& coupling,
                                  long protected_total) {
    const int M = fock.modes();
    if (omega.size() != M || beta.size() != M || coupling.size() != M) {
        throw ConfigError("weyl shift: mode data does not match the basis");
    }
    if (fock.n_max() < 2) throw ConfigError("weyl shift needs occupation cap >= 2");
    if (protected_total < 0) protected_total = fock.n_max() - 2;
    if (protected_total > fock.n_max() - 2) {
        throw ConfigError("weyl shift: protected sector must leave two levels of headroom");
    }

    WeylShiftReport report;
    report.beta_norm = beta.norm();
    if (report.beta_norm > 1.0) {
        throw ConfigError("weyl shift: displacement too large for the truncated expansion");
    }

    const MatrixXcd dgamma =
        MatrixXcd(fock.dgamma_diag(omega).cast<Complex>().asDiagonal());
    const MatrixXcd base = dgamma + MatrixXcd(fock.field(coupling));
    const MatrixXcd u = unitary_from_displacement(fock, beta);
    const MatrixXcd lhs = u * base * u.adjoint();

    const VectorXcd shifted =
        omega.cast<Complex>().cwiseProduct(beta) + coupling;
    const VectorXcd half = 0.5 * omega.cast<Complex>().cwiseProduct(beta) + coupling;
    report.scalar_shift = std::real(half.dot(beta));
    MatrixXcd rhs = dgamma + MatrixXcd(fock.field(shifted));
    rhs.diagonal().array() += report.scalar_shift;

    std::vector<long> keep;
    for (long i = 0; i < fock.dim(); ++i) {
        if (fock.total(i) <= protected_total) keep.push_back(i);
    }
    report.protected_dim = static_cast<long>(keep.size());
    MatrixXcd diff(keep.size(), keep.size());
    MatrixXcd ref(keep.size(), keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        for (std::size_t c = 0; c < keep.size(); ++c) {
            diff(r, c) = lhs(keep[r], keep[c]) - rhs(keep[r], keep[c]);
            ref(r, c) = rhs(keep[r], keep[c]);
        }
    }
    report.residual = hermitian_norm(diff) / std::max(hermitian_norm(ref), 1e-300);
    return report;
}

// ---------------------------------------------------------------------------
// Number-weighted bounds

namespace {

// Operator norm of v as a map from the particle space to particle (x) modes,
// with the mode blocks rescaled by omega^t.
double coupling_norm(const std::vector<MatrixXcd>& blocks, const VectorXd& omega, double t) {
    const long p = blocks.empty() ? 0 : blocks[0].rows();
    MatrixXcd stacked(static_cast<long>(blocks.size()) * p, p);
    for (std::size_t m = 0; m < blocks.size(); ++m) {
        double scale = 1.0;
        if (t != 0.0) scale = omega[m] > 0.0 ? std::pow(omega[m], t) : 0.0;
        stacked.middleRows(static_cast<long>(m) * p, p) = scale * blocks[m];
    }
    return singular_norm(stacked);
}

}  // namespace

std::vector<NumberBoundRow> number_bounds(const MatrixXcd& particle_op, const FockBasis& fock,
                                          const VectorXd& omega,
                                          const std::vector<double>& s_values,
                                          const std::vector<unsigned>& seeds,
                                          double grading_floor) {
    const long p = particle_op.rows();
    const long f = fock.dim();
    const long dim = p * f;
    const int M = fock.modes();
    if (particle_op.cols() != p) throw ConfigError("particle operator must be square");
    if (omega.size() != M) throw ConfigError("dispersion vector does not match the mode count");
    if (dim > 5000) throw ConfigError("number bounds need a dense space below dimension 5000");

    // Free operator and its nonnegative eigensystem.
    const VectorXd field_diag = fock.dgamma_diag(omega);
    MatrixXcd h0 = MatrixXcd::Zero(dim, dim);
    for (long i = 0; i < p; ++i)
        for (long ip = 0; ip < p; ++ip)
            for (long j = 0; j < f; ++j) h0(i * f + j, ip * f + j) += particle_op(i, ip);
    for (long i = 0; i < p; ++i)
        for (long j = 0; j < f; ++j) h0(i * f + j, i * f + j) += field_diag[j];

    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h0);
    VectorXd lam = es.eigenvalues();
    const double scale = 1.0 + std::abs(lam[dim - 1]);
    if (lam[0] < -1e-9 * scale) {
        throw ConfigError("number bounds need a nonnegative free operator");
    }
    lam = lam.cwiseMax(0.0);
    const MatrixXcd& q = es.eigenvectors();
    std::map<double, VectorXd> h0_powers;
    const auto h0_pow_diag = [&](double t) -> const VectorXd& {
        auto it = h0_powers.find(t);
        if (it == h0_powers.end()) {
            it = h0_powers.emplace(t, VectorXd((lam.array() + 1.0).pow(t))).first;
        }
        return it->second;
    };
    const auto apply_h0_pow = [&](double t, const VectorXcd& x) {
        VectorXcd y = q.adjoint() * x;
        y.array() *= h0_pow_diag(t).array();
        return VectorXcd(q * y);
    };

    // Grading operator: either the full number operator or the count of the
    // modes above the floor.
    VectorXd keep_mode(M);
    for (int m = 0; m < M; ++m) {
        keep_mode[m] = (grading_floor < 0.0 || omega[m] >= grading_floor / 2.0) ? 1.0 : 0.0;
    }
    const VectorXd grade_fock =
        grading_floor < 0.0 ? fock.number_diag() : fock.dgamma_diag(keep_mode);
    VectorXd grade(dim);
    for (long i = 0; i < p; ++i)
        for (long j = 0; j < f; ++j) grade[i * f + j] = grade_fock[j];
    const auto pow_n = [&](double t) { return VectorXd((grade.array() + 1.0).pow(t)); };

    std::vector<SparseD> lowers;
    for (int m = 0; m < M; ++m) lowers.push_back(SparseD(fock.create(m).transpose()));

    // a(v) = sum_m v_m^* (x) c_m, assembled sparse: each mode lowering
    // operator has at most one entry per column.
    const auto annihilator_of = [&](const std::vector<MatrixXcd>& blocks) {
        std::vector<Eigen::Triplet<Complex>> trips;
        for (int m = 0; m < M; ++m) {
            for (long i = 0; i < p; ++i)
                for (long ip = 0; ip < p; ++ip) {
                    const Complex coeff = std::conj(blocks[m](ip, i));
                    if (coeff == Complex(0.0, 0.0)) continue;
                    for (int k = 0; k < lowers[m].outerSize(); ++k) {
                        for (SparseD::InnerIterator it(lowers[m], k); it; ++it) {
                            trips.emplace_back(i * f + it.row(), ip * f + it.col(),
                                               coeff * it.value());
                        }
                    }
                }
        }
        SparseC out(dim, dim);
        out.setFromTriplets(trips.begin(), trips.end());
        return out;
    };

    const auto draw_blocks = [&](std::mt19937& gen) {
        std::vector<MatrixXcd> blocks;
        for (int m = 0; m < M; ++m) {
            MatrixXcd b = random_complex(p, p, gen);
            if (keep_mode[m] == 0.0) b.setZero();
            blocks.push_back(std::move(b));
        }
        return blocks;
    };

    const auto scaled = [](const VectorXd& d, VectorXcd x) {
        x.array() *= d.array().cast<Complex>();
        return x;
    };
    const auto mf_norm = [&](const LinOp& fwd, const LinOp& adj) {
        const LinOp gram = [&](const VectorXcd& x) { return adj(fwd(x)); };
        return std::sqrt(std::max(0.0, operator_norm(gram, dim, 400, 1e-10)));
    };

    std::vector<NumberBoundRow> rows;
    for (unsigned seed : seeds) {
        std::mt19937 gen(seed);
        const auto v1 = draw_blocks(gen);
        const auto v2 = draw_blocks(gen);
        const SparseC a1 = annihilator_of(v1);
        const SparseC a2 = annihilator_of(v2);
        const SparseC a1h = a1.adjoint();
        const SparseC a2h = a2.adjoint();

        for (double s : s_values) {
            if (s < 0.0 || s > 1.0) throw ConfigError("interpolation parameter must be in [0,1]");
            NumberBoundRow row;
            row.s = s;
            row.seed = seed;

            row.bound = 1;
            {
                const VectorXd dn = pow_n(-s / 2.0);
                const double th = -(1.0 - s) / 2.0;
                row.lhs = mf_norm(
                    [&](const VectorXcd& x) { return scaled(dn, a1 * apply_h0_pow(th, x)); },
                    [&](const VectorXcd& x) { return apply_h0_pow(th, a1h * scaled(dn, x)); });
            }
            row.rhs = coupling_norm(v1, omega, (s - 1.0) / 2.0);
            row.slack = row.rhs - row.lhs;
            rows.push_back(row);

            row.bound = 2;
            {
                const VectorXd dn = pow_n(-(1.0 - s) / 2.0);
                const double th = -s / 2.0;
                row.lhs = mf_norm(
                    [&](const VectorXcd& x) { return apply_h0_pow(th, a1h * scaled(dn, x)); },
                    [&](const VectorXcd& x) { return scaled(dn, a1 * apply_h0_pow(th, x)); });
            }
            row.rhs = coupling_norm(v1, omega, -s / 2.0);
            row.slack = row.rhs - row.lhs;
            rows.push_back(row);

            row.bound = 3;
            {
                const VectorXd dn = pow_n(-s);
                const double th = -(1.0 - s);
                row.lhs = mf_norm(
                    [&](const VectorXcd& x) {
                        return scaled(dn, a1 * (a2 * apply_h0_pow(th, x)));
                    },
                    [&](const VectorXcd& x) {
                        return apply_h0_pow(th, a2h * (a1h * scaled(dn, x)));
                    });
            }
            row.rhs = coupling_norm(v1, omega, -(1.0 - s) / 2.0) *
                      coupling_norm(v2, omega, -(1.0 - s) / 2.0);
            row.slack = row.rhs - row.lhs;
            rows.push_back(row);

            row.bound = 4;
            {
                const VectorXd dn = pow_n(-(1.0 - s));
                const double th = -s;
                row.lhs = mf_norm(
                    [&](const VectorXcd& x) {
                        return apply_h0_pow(th, a1h * (a2h * scaled(dn, x)));
                    },
                    [&](const VectorXcd& x) {
                        return scaled(dn, a2 * (a1 * apply_h0_pow(th, x)));
                    });
            }
            row.rhs = coupling_norm(v1, omega, -s / 2.0) * coupling_norm(v2, omega, -s / 2.0);
            row.slack = row.rhs - row.lhs;
            rows.push_back(row);
        }

        NumberBoundRow row;
        row.s = 0.0;
        row.seed = seed;
        const VectorXd dn = pow_n(-0.5);
        row.bound = 5;
        row.lhs = mf_norm([&](const VectorXcd& x) { return VectorXcd(a1 * scaled(dn, x)); },
                          [&](const VectorXcd& x) { return scaled(dn, a1h * x); });
        row.rhs = coupling_norm(v1, omega, 0.0);
        row.slack = row.rhs - row.lhs;
        rows.push_back(row);
        row.bound = 6;
        row.lhs = mf_norm([&](const VectorXcd& x) { return VectorXcd(a1h * scaled(dn, x)); },
                          [&](const VectorXcd& x) { return scaled(dn, a1 * x); });
        row.rhs = coupling_norm(v1, omega, 0.0);
        row.slack = row.rhs - row.lhs;
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Form bound

FormBoundReport form_bound(const MatrixXcd& h0, const MatrixXcd& perturbation,
                           const std::vector<double>& c_grid) {
    if (h0.rows() != h0.cols() || perturbation.rows() != perturbation.cols() ||
        h0.rows() != perturbation.rows()) {
        throw ConfigError("form bound needs square matrices of equal size");
    }
    const double h_scale = std::max(h0.cwiseAbs().maxCoeff(), 1e-300);
    if ((h0 - h0.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * h_scale) {
        throw NumericError("form bound: base operator is not Hermitian");
    }
    const double b_scale = std::max(perturbation.cwiseAbs().maxCoeff(), 1e-300);
    if ((perturbation - perturbation.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * b_scale) {
        throw NumericError("form bound: perturbation is not Hermitian");
    }

    Eigen::SelfAdjointEigenSolver<MatrixXcd> es((h0 + h0.adjoint()) / 2.0);
    const VectorXd lam = es.eigenvalues();
    const MatrixXcd bsym = (perturbation + perturbation.adjoint()) / 2.0;
    const MatrixXcd b_eig = es.eigenvectors().adjoint() * bsym * es.eigenvectors();
    const double floor = 1e-12 * (1.0 + std::abs(lam[lam.size() - 1]));

    FormBoundReport report;
    report.best_a = std::numeric_limits<double>::infinity();
    for (double c : c_grid) {
        FormBoundRow row;
        row.c = c;
        row.valid = lam[0] + c > floor;
        if (row.valid) {
            const VectorXd half = (lam.array() + c).pow(-0.5);
            const MatrixXcd sandwich = half.cast<Complex>().asDiagonal() * b_eig *
                                       half.cast<Complex>().asDiagonal();
            row.a = hermitian_norm(sandwich);
            row.b = row.a * c;
            if (row.a < report.best_a) {
                report.best_a = row.a;
                report.best_b = row.b;
            }
            if (row.a < 1.0) report.premise_holds = true;
        }
        report.rows.push_back(row);
    }
    if (!std::isfinite(report.best_a)) {
        report.best_a = 0.0;
        report.best_b = 0.0;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Ground states and resolvents

GroundState ground_state(const SpectralOperator& op) {
    GroundState gs;
    gs.energy = op.eigenvalues()(0);
    gs.vector = op.eigenvectors().col(0);
    phase_fix(gs.vector);
    gs.residual = (op.matrix() * gs.vector - gs.energy * gs.vector).norm();
    return gs;
}

GroundState ground_state(const LinOp& op, long dim, int max_iter, double tol, unsigned seed) {
    const LanczosResult res = lanczos_lowest(op, dim, max_iter, tol, seed);
    GroundState gs;
    gs.energy = res.eigenvalue;
    gs.vector = res.eigenvector;
    phase_fix(gs.vector);
    gs.iterations = res.iterations;
    gs.residual = res.residual;
    return gs;
}

VectorXcd resolvent_apply(const SpectralOperator& op, double z, const VectorXcd& psi) {
    if (z > op.min_eigenvalue() - 1.0) {
        throw ConfigError("resolvent probe must sit at least one unit below the spectrum");
    }
    return op.apply_map([z](double t) { return 1.0 / (t - z); }, psi);
}

MatrixXcd resolvent_matrix(const SpectralOperator& op, double z) {
    if (z > op.min_eigenvalue() - 1.0) {
        throw ConfigError("resolvent probe must sit at least one unit below the spectrum");
    }
    return op.map_matrix([z](double t) { return 1.0 / (t - z); });
}

double coherent_ground_energy(const VectorXd& omega, const VectorXcd& g) {
    if (omega.size() != g.size()) throw ConfigError("mode data lengths differ");
    double sum = 0.0;
    for (long m = 0; m < omega.size(); ++m) {
        if (omega[m] <= 0.0) throw ConfigError("coherent energy needs positive dispersion");
        sum += std::norm(g[m]) / omega[m];
    }
    return -0.5 * sum;
}

}  // namespace nelson
