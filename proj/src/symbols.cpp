#include "nelsonlab/symbols.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "nelsonlab/linalg.hpp"

namespace nelson {

namespace {

std::vector<double> node_of(const Grid& grid, long flat) {
    std::vector<double> x(grid.dim());
    for (int a = 0; a < grid.dim(); ++a) x[a] = grid.node_coord(flat, a);
    return x;
}

std::vector<double> freq_of(const Grid& grid, long flat) {
    std::vector<double> xi(grid.dim());
    for (int a = 0; a < grid.dim(); ++a) xi[a] = grid.freq_coord(flat, a);
    return xi;
}

} // namespace

MatrixXcd quantize_kn(const Symbol& symbol, const Grid& grid) {
    if (!symbol.eval) throw ConfigError("quantize_kn: symbol has no evaluator");
    const long n = grid.size();
    // Rows scaled by the symbol sample in the mixed (node, frequency) table:
    // KN = (F^* .* a(x_i, xi_k)) F acts on a plane wave e_eta as a(x, eta) e_eta.
    MatrixXcd left = grid.dft().adjoint();
    for (long i = 0; i < n; ++i) {
        const std::vector<double> x = node_of(grid, i);
        for (long k = 0; k < n; ++k) {
            left(i, k) *= symbol.eval(x, freq_of(grid, k));
        }
    }
    return left * grid.dft();
}

MatrixXcd quantize_weyl(const Symbol& symbol, const Grid& grid) {
    if (!symbol.eval) throw ConfigError("quantize_weyl: symbol has no evaluator");
    for (const Axis& ax : grid.axes()) {
        if (ax.n % 2 != 0) throw ConfigError("quantize_weyl: axis size must be even");
    }
    const long n = grid.size();
    const int d = grid.dim();
    const MatrixXcd& F = grid.dft();

    std::vector<std::vector<double>> nodes(n);
    std::vector<std::vector<double>> freqs(n);
    for (long i = 0; i < n; ++i) {
        nodes[i] = node_of(grid, i);
        freqs[i] = freq_of(grid, i);
    }

    // In the Fourier basis the (out, in) entry is the x-average of the
    // symbol at the midpoint frequency against the harmonic out - in. The
    // raw frequency difference equals the wrapped lattice harmonic at every
    // node because the axis sizes are even.
    MatrixXcd wf(n, n);
    std::vector<double> mid(d);
    for (long j = 0; j < n; ++j) {
        for (long k = 0; k < n; ++k) {
            for (int a = 0; a < d; ++a) mid[a] = 0.5 * (freqs[j][a] + freqs[k][a]);
            Complex acc(0.0, 0.0);
            for (long x = 0; x < n; ++x) {
                acc += F(j, x) * std::conj(F(k, x)) * symbol.eval(nodes[x], mid);
            }
            wf(j, k) = acc;
        }
    }
    return F.adjoint() * wf * F;
}

LeadingSymbols::LeadingSymbols(const CoefficientSet& coeffs) : coeffs_(&coeffs) {}

Symbol LeadingSymbols::h0() const {
    const CoefficientSet* c = coeffs_;
    return Symbol{[c](const std::vector<double>& x, const std::vector<double>& xi) {
                      return c->h0_symbol(x, xi);
                  },
                  2.0, "h0"};
}

Symbol LeadingSymbols::kinetic() const {
    const CoefficientSet* c = coeffs_;
    return Symbol{[c](const std::vector<double>& X, const std::vector<double>& Xi) {
                      return c->K_symbol(X, Xi);
                  },
                  2.0, "kinetic"};
}

Symbol LeadingSymbols::omega_inverse() const {
    const CoefficientSet* c = coeffs_;
    return Symbol{[c](const std::vector<double>& x, const std::vector<double>& xi) {
                      return 1.0 / std::sqrt(c->h0_symbol(x, xi) + 1.0);
                  },
                  -1.0, "omega_inverse"};
}

Symbol LeadingSymbols::t_resolvent(std::vector<double> X) const {
    const CoefficientSet* c = coeffs_;
    return Symbol{[c, X](const std::vector<double>& x, const std::vector<double>& xi) {
                      return 1.0 / (c->K_symbol(X, xi) + std::sqrt(c->h0_symbol(x, xi) + 1.0));
                  },
                  -2.0, "t_resolvent"};
}

Symbol LeadingSymbols::omega_t_resolvent(std::vector<double> X) const {
    const CoefficientSet* c = coeffs_;
    return Symbol{[c, X](const std::vector<double>& x, const std::vector<double>& xi) {
                      return 1.0 /
                             (std::sqrt(c->h0_symbol(x, xi) + 1.0) * (c->K_symbol(X, xi) + 1.0));
                  },
                  -3.0, "omega_t_resolvent"};
}

Symbol LeadingSymbols::t_omega_t_resolvent(std::vector<double> X) const {
    const CoefficientSet* c = coeffs_;
    return Symbol{[c, X](const std::vector<double>& x, const std::vector<double>& xi) {
                      const double k1 = c->K_symbol(X, xi) + 1.0;
                      return 1.0 / (std::sqrt(c->h0_symbol(x, xi) + 1.0) * k1 * k1);
                  },
                  -5.0, "t_omega_t_resolvent"};
}

LeadingSymbols leading_symbols(const CoefficientSet& coeffs) { return LeadingSymbols(coeffs); }

Symbol product_t_resolvent(const CoefficientSet& coeffs, int particle_dim) {
    const CoefficientSet* c = &coeffs;
    const int pd = particle_dim;
    return Symbol{[c, pd](const std::vector<double>& xcat, const std::vector<double>& xicat) {
                      const std::vector<double> X(xcat.begin(), xcat.begin() + pd);
                      const std::vector<double> x(xcat.begin() + pd, xcat.end());
                      const std::vector<double> Xi(xicat.begin(), xicat.begin() + pd);
                      const std::vector<double> xi(xicat.begin() + pd, xicat.end());
                      return 1.0 / (c->K_symbol(X, Xi) + std::sqrt(c->h0_symbol(x, xi) + 1.0));
                  },
                  -2.0, "product_t_resolvent"};
}

double sobolev_mapping_norm(const MatrixXcd& op, const Grid& grid, double s, double p) {
    const long n = grid.size();
    if (op.rows() != n || op.cols() != n)
        throw ConfigError("sobolev_mapping_norm: operator does not match grid");
    VectorXd w_out(n), w_in_inv(n);
    for (long k = 0; k < n; ++k) {
        const double bracket = std::sqrt(1.0 + grid.freq_sq(k));
        w_out[k] = std::pow(bracket, s - p);
        w_in_inv[k] = std::pow(bracket, -s);
    }
    const MatrixXcd weighted = w_out.asDiagonal() * (grid.dft() * op * grid.dft().adjoint()) *
                               w_in_inv.asDiagonal();
    Eigen::BDCSVD<MatrixXcd> svd(weighted);
    return svd.singularValues()(0);
}

long freq_flat_index(const Grid& grid, const std::vector<long>& harmonics) {
    if (static_cast<int>(harmonics.size()) != grid.dim())
        throw ConfigError("freq_flat_index: harmonic count does not match grid dimension");
    std::vector<int> multi(grid.dim());
    for (int a = 0; a < grid.dim(); ++a) {
        const int n = grid.axes()[a].n;
        const long k = harmonics[a];
        if (k < -n / 2 || k >= n / 2)
            throw ConfigError("freq_flat_index: harmonic outside the lattice");
        multi[a] = static_cast<int>(k + n / 2);
    }
    return grid.flat_index(multi);
}

DecayReport remainder_decay_check(const ExactApply& exact, const Symbol& lead,
                                  const Grid& grid, const std::vector<long>& probe_flat) {
    if (!exact) throw ConfigError("remainder_decay_check: missing exact operator");
    if (probe_flat.size() < 2)
        throw ConfigError("remainder_decay_check: need at least two probe frequencies");

    DecayReport report;
    for (long flat : probe_flat) {
        if (flat < 0 || flat >= grid.size())
            throw ConfigError("remainder_decay_check: probe index out of range");
        const std::vector<int> multi = grid.multi_index(flat);
        for (int a = 0; a < grid.dim(); ++a) {
            const int n = grid.axes()[a].n;
            const int harmonic = multi[a] - n / 2;
            if (std::abs(harmonic) > n / 4)
                throw ConfigError(
                    "remainder_decay_check: probe in the top frequency octave; "
                    "lattice artifacts dominate there");
        }
        report.freq_weight.push_back(std::sqrt(1.0 + grid.freq_sq(flat)));
    }
    const auto [lo, hi] =
        std::minmax_element(report.freq_weight.begin(), report.freq_weight.end());
    if (*hi < 10.0 * *lo * (1.0 - 1e-12))
        throw ConfigError("remainder_decay_check: probes span less than one decade of <xi>");

    for (long flat : probe_flat) {
        const VectorXcd wave = grid.plane_wave(flat);
        const std::vector<double> xi = freq_of(grid, flat);
        VectorXcd lead_vec(grid.size());
        for (long i = 0; i < grid.size(); ++i) {
            lead_vec[i] = lead.eval(node_of(grid, i), xi) * wave[i];
        }
        const double denom = grid.norm(lead_vec);
        if (!(denom > 0.0))
            throw NumericError("remainder_decay_check: leading symbol vanishes on a probe");
        report.relative_residual.push_back(grid.norm(exact(wave) - lead_vec) / denom);
    }

    const double top = *std::max_element(report.relative_residual.begin(),
                                         report.relative_residual.end());
    if (top < 1e-12) {
        report.exact_match = true;
        return report;
    }
    std::vector<double> clamped = report.relative_residual;
    for (double& r : clamped) r = std::max(r, 1e-16);
    const PowerFit fit = fit_power_law(report.freq_weight, clamped);
    report.slope = fit.exponent;
    report.max_log_residual = fit.max_log_residual;
    return report;
}

std::vector<long> default_probe_freqs(const Grid& grid) {
    int cap = grid.axes()[0].n;
    for (const Axis& ax : grid.axes()) cap = std::min(cap, ax.n);
    cap /= 4;
    std::vector<long> probes;
    long prev = 0;
    for (double k = 2.0; k <= cap + 0.5; k *= std::sqrt(2.0)) {
        const long h = std::lround(k);
        if (h == prev || h > cap) continue;
        prev = h;
        probes.push_back(freq_flat_index(grid, std::vector<long>(grid.dim(), h)));
    }
    return probes;
}

}  // namespace nelson
