#pragma once

#include <Eigen/Sparse>
#include <unordered_map>
#include <vector>

#include "nelsonlab/grid.hpp"

namespace nelson {

using SparseD = Eigen::SparseMatrix<double>;
using SparseC = Eigen::SparseMatrix<Complex>;

// Symmetric Fock space over M one-particle modes, truncated at total
// occupation n_max, with states enumerated by degree and then
// lexicographically within each degree. dim = C(M + n_max, M).
//
// Creation is compressed: transitions that would leave the truncation are
// dropped, so canonical commutation relations hold exactly on the sector
// with total occupation <= n_max - 1 and operator bounds proved on the full
// space survive as bounds for the compressions.
class FockBasis {
  public:
    FockBasis(int modes, int n_max);

    int modes() const { return modes_; }
    int n_max() const { return n_max_; }
    long dim() const { return static_cast<long>(states_.size()); }
    const std::vector<int>& state(long index) const { return states_.at(index); }
    int total(long index) const { return totals_.at(index); }
    long index_of(const std::vector<int>& occupation) const;

    // Per-mode creation matrix c_m^*; annihilation is its transpose.
    const SparseD& create(int mode) const { return create_.at(mode); }
    SparseD annihilate(int mode) const { return SparseD(create_.at(mode).transpose()); }

    // Smeared operators for a mode-coefficient vector f: a(f) is antilinear
    // in f, a*(f) linear, phi(f) = (a*(f) + a(f)) / sqrt(2).
    SparseC annihilator(const VectorXcd& f) const;
    SparseC creator(const VectorXcd& f) const;
    SparseC field(const VectorXcd& f) const;

    // Second quantization dGamma(b) = sum_{m m'} b_{m m'} c_m^* c_{m'},
    // exact on the truncated space (it preserves the total occupation).
    SparseC dgamma(const MatrixXcd& b) const;
    // Diagonal of dGamma(diag(per_mode)).
    VectorXd dgamma_diag(const VectorXd& per_mode) const;
    // Diagonal of the number operator dGamma(1).
    VectorXd number_diag() const;
    // 0/1 diagonal of the projector onto total occupation <= cap.
    VectorXd sector_mask(int cap) const;

  private:
    struct VecHash {
        std::size_t operator()(const std::vector<int>& v) const {
            std::size_t h = 1469598103934665603ull;
            for (int x : v) {
                h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            }
            return h;
        }
    };

    int modes_ = 0;
    int n_max_ = 0;
    std::vector<std::vector<int>> states_;
    std::vector<int> totals_;
    std::unordered_map<std::vector<int>, long, VecHash> index_;
    std::vector<SparseD> create_;
};

}  // namespace nelson
