#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace nelson {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Base error type. ConfigError maps to CLI exit code 2, NumericError to 3.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};
struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

struct Axis {
    int n = 0;           // samples per axis, power of two, >= 8
    double length = 0.0; // torus period
};

// Uniform periodic grid together with its dual frequency lattice.
//
// Nodes along an axis: x_j = -L/2 + j*L/n.  Dual frequencies: xi_k = 2*pi*k/L
// for k = -n/2 .. n/2-1, stored ascending.  Flat indices are row-major with
// the first axis slowest; node and frequency lattices share the indexing.
//
// Inner products and norms are those of L^2 of the torus: the Euclidean dot
// product scaled by the cell volume.  Fourier coefficients follow the unitary
// convention  u_hat(xi) = (2*pi)^(-d/2) * integral u(x) e^{-i xi x} dx,
// discretized by the trapezoid rule (exact for band-limited data).
class Grid {
  public:
    static Grid build(int dim, int n_points, double box_length);
    // Concatenates the axes of two grids (used for operators on product
    // spaces, e.g. particle x boson checks). First factor is slowest.
    static Grid product(const Grid& a, const Grid& b);

    int dim() const { return static_cast<int>(axes_.size()); }
    const std::vector<Axis>& axes() const { return axes_; }
    long size() const { return size_; }
    // Cell volume (L/n)^d; weight of the discrete L^2 inner product.
    double cell_volume() const { return cell_volume_; }

    double node_coord(long flat, int axis) const;
    double freq_coord(long flat, int axis) const;
    // |xi|^2 of the flat frequency index.
    double freq_sq(long flat) const;
    // Largest |xi| along any axis (Nyquist frequency), the resolution limit.
    double nyquist() const;

    // Unitary DFT matrix: (F u)_k = size^{-1/2} sum_j u(x_j) e^{-i xi_k x_j}.
    const MatrixXcd& dft() const { return dft_; }

    // Spectral derivative multiplier along an axis, full lattice. Used for
    // second-order assemblies where the symbol is even in xi.
    MatrixXcd derivative_full(int axis) const;
    // First-order derivative d/dx_axis with the unpaired Nyquist mode dropped,
    // so the matrix is real antisymmetric and maps real fields to real fields.
    MatrixXcd derivative_first(int axis) const;

    // Normalized plane wave sample: e_k(x_j) = e^{i xi_k x_j}, unit L^2 norm.
    VectorXcd plane_wave(long flat_freq) const;

    Complex inner(const VectorXcd& u, const VectorXcd& v) const;
    double norm(const VectorXcd& u) const;

    // Physical Fourier coefficients u_hat(xi_k) in the unitary convention.
    VectorXcd fourier_coeffs(const VectorXcd& u) const;
    // H^s Sobolev norm: (sum_k <xi_k>^{2s} |u_hat(xi_k)|^2 dxi^d)^{1/2}.
    // Reduces to the L^2 norm at s = 0.
    double sobolev_norm(const VectorXcd& u, double s) const;

    long flat_index(const std::vector<int>& multi) const;
    std::vector<int> multi_index(long flat) const;

  private:
    explicit Grid(std::vector<Axis> axes);

    std::vector<Axis> axes_;
    long size_ = 0;
    double cell_volume_ = 1.0;
    std::vector<std::vector<double>> node_1d_;
    std::vector<std::vector<double>> freq_1d_;
    std::vector<long> stride_;
    MatrixXcd dft_;
};

} // namespace nelson
