#include "nelsonlab/fock.hpp"

#include <cmath>

namespace nelson {

namespace {

void enumerate_degree(int modes, int degree, std::vector<int>& partial,
                      std::vector<std::vector<int>>& out) {
    if (static_cast<int>(partial.size()) == modes - 1) {
        partial.push_back(degree);
        out.push_back(partial);
        partial.pop_back();
        return;
    }
    for (int n = 0; n <= degree; ++n) {
        partial.push_back(n);
        enumerate_degree(modes, degree - n, partial, out);
        partial.pop_back();
    }
}

}  // namespace

FockBasis::FockBasis(int modes, int n_max) : modes_(modes), n_max_(n_max) {
    if (modes < 1) throw ConfigError("FockBasis needs at least one mode");
    if (n_max < 0) throw ConfigError("FockBasis occupation cap must be nonnegative");
    double dim_estimate = 1.0;
    for (int i = 1; i <= modes; ++i) dim_estimate *= static_cast<double>(n_max + i) / i;
    if (dim_estimate > 2.0e5) throw ConfigError("FockBasis dimension above the supported range");

    std::vector<int> partial;
    for (int degree = 0; degree <= n_max; ++degree) {
        enumerate_degree(modes, degree, partial, states_);
    }
    totals_.reserve(states_.size());
    for (long i = 0; i < dim(); ++i) {
        int t = 0;
        for (int n : states_[i]) t += n;
        totals_.push_back(t);
        index_.emplace(states_[i], i);
    }

    create_.resize(modes_);
    for (int m = 0; m < modes_; ++m) {
        std::vector<Eigen::Triplet<double>> triplets;
        for (long i = 0; i < dim(); ++i) {
            if (totals_[i] >= n_max_) continue;
            std::vector<int> raised = states_[i];
            raised[m] += 1;
            triplets.emplace_back(index_.at(raised), i, std::sqrt(double(raised[m])));
        }
        create_[m].resize(dim(), dim());
        create_[m].setFromTriplets(triplets.begin(), triplets.end());
    }
}

long FockBasis::index_of(const std::vector<int>& occupation) const {
    auto it = index_.find(occupation);
    if (it == index_.end()) throw ConfigError("occupation tuple outside the truncated basis");
    return it->second;
}

SparseC FockBasis::annihilator(const VectorXcd& f) const {
    if (f.size() != modes_) throw ConfigError("mode-coefficient vector has wrong length");
    SparseC out(dim(), dim());
    for (int m = 0; m < modes_; ++m) {
        if (f[m] == Complex(0.0, 0.0)) continue;
        out += std::conj(f[m]) * SparseC(create_[m].transpose().cast<Complex>());
    }
    return out;
}

SparseC FockBasis::creator(const VectorXcd& f) const {
    if (f.size() != modes_) throw ConfigError("mode-coefficient vector has wrong length");
    SparseC out(dim(), dim());
    for (int m = 0; m < modes_; ++m) {
        if (f[m] == Complex(0.0, 0.0)) continue;
        out += f[m] * SparseC(create_[m].cast<Complex>());
    }
    return out;
}

SparseC FockBasis::field(const VectorXcd& f) const {
    SparseC out = creator(f) + annihilator(f);
    return SparseC(out / std::sqrt(2.0));
}

SparseC FockBasis::dgamma(const MatrixXcd& b) const {
    if (b.rows() != modes_ || b.cols() != modes_) {
        throw ConfigError("dGamma needs a modes x modes one-particle matrix");
    }
    std::vector<Eigen::Triplet<Complex>> triplets;
    std::vector<int> shifted;
    for (long i = 0; i < dim(); ++i) {
        const std::vector<int>& occ = states_[i];
        for (int src = 0; src < modes_; ++src) {
            if (occ[src] == 0) continue;
            for (int dst = 0; dst < modes_; ++dst) {
                if (b(dst, src) == Complex(0.0, 0.0)) continue;
                if (dst == src) {
                    triplets.emplace_back(i, i, b(src, src) * double(occ[src]));
                    continue;
                }
                shifted = occ;
                shifted[src] -= 1;
                shifted[dst] += 1;
                double amp = std::sqrt(double(occ[src]) * double(shifted[dst]));
                triplets.emplace_back(index_.at(shifted), i, b(dst, src) * amp);
            }
        }
    }
    SparseC out(dim(), dim());
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

VectorXd FockBasis::dgamma_diag(const VectorXd& per_mode) const {
    if (per_mode.size() != modes_) throw ConfigError("per-mode weight vector has wrong length");
    VectorXd out = VectorXd::Zero(dim());
    for (long i = 0; i < dim(); ++i) {
        for (int m = 0; m < modes_; ++m) out[i] += per_mode[m] * states_[i][m];
    }
    return out;
}

VectorXd FockBasis::number_diag() const {
    VectorXd out(dim());
    for (long i = 0; i < dim(); ++i) out[i] = totals_[i];
    return out;
}

VectorXd FockBasis::sector_mask(int cap) const {
    VectorXd out(dim());
    for (long i = 0; i < dim(); ++i) out[i] = (totals_[i] <= cap) ? 1.0 : 0.0;
    return out;
}

}  // namespace nelson
