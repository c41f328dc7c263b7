#include "nelsonlab/grid.hpp"

#include <cmath>

namespace nelson {

namespace {
bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}

Grid Grid::build(int dim, int n_points, double box_length) {
    if (dim < 1 || dim > 3)
        throw ConfigError("grid: dim must be 1, 2 or 3, got " + std::to_string(dim));
    if (!power_of_two(n_points) || n_points < 8)
        throw ConfigError("grid: n_points must be a power of two >= 8, got " +
                          std::to_string(n_points));
    if (!(box_length > 0.0))
        throw ConfigError("grid: box_length must be positive");
    std::vector<Axis> axes(dim, Axis{n_points, box_length});
    return Grid(std::move(axes));
}

Grid Grid::product(const Grid& a, const Grid& b) {
    std::vector<Axis> axes = a.axes_;
    axes.insert(axes.end(), b.axes_.begin(), b.axes_.end());
    return Grid(std::move(axes));
}

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
    size_ = 1;
    cell_volume_ = 1.0;
    for (const Axis& ax : axes_) {
        size_ *= ax.n;
        cell_volume_ *= ax.length / ax.n;
        std::vector<double> nodes(ax.n), freqs(ax.n);
        for (int j = 0; j < ax.n; ++j)
            nodes[j] = -0.5 * ax.length + j * ax.length / ax.n;
        for (int k = 0; k < ax.n; ++k)
            freqs[k] = 2.0 * M_PI * (k - ax.n / 2) / ax.length;
        node_1d_.push_back(std::move(nodes));
        freq_1d_.push_back(std::move(freqs));
    }
    stride_.assign(axes_.size(), 1);
    for (int d = static_cast<int>(axes_.size()) - 2; d >= 0; --d)
        stride_[d] = stride_[d + 1] * axes_[d + 1].n;

    dft_ = MatrixXcd(size_, size_);
    const double scale = 1.0 / std::sqrt(static_cast<double>(size_));
    for (long k = 0; k < size_; ++k) {
        for (long j = 0; j < size_; ++j) {
            double phase = 0.0;
            for (int d = 0; d < dim(); ++d)
                phase += freq_coord(k, d) * node_coord(j, d);
            dft_(k, j) = scale * std::exp(Complex(0.0, -phase));
        }
    }
}

double Grid::node_coord(long flat, int axis) const {
    return node_1d_[axis][(flat / stride_[axis]) % axes_[axis].n];
}

double Grid::freq_coord(long flat, int axis) const {
    return freq_1d_[axis][(flat / stride_[axis]) % axes_[axis].n];
}

double Grid::freq_sq(long flat) const {
    double s = 0.0;
    for (int d = 0; d < dim(); ++d) {
        double f = freq_coord(flat, d);
        s += f * f;
    }
    return s;
}

double Grid::nyquist() const {
    double ny = 0.0;
    for (const Axis& ax : axes_)
        ny = std::max(ny, M_PI * ax.n / ax.length);
    return ny;
}

MatrixXcd Grid::derivative_full(int axis) const {
    VectorXcd mult(size_);
    for (long k = 0; k < size_; ++k)
        mult(k) = freq_coord(k, axis);
    return dft_.adjoint() * mult.asDiagonal() * dft_;
}

MatrixXcd Grid::derivative_first(int axis) const {
    const int n = axes_[axis].n;
    VectorXcd mult(size_);
    for (long k = 0; k < size_; ++k) {
        long idx = (k / stride_[axis]) % n;
        double f = (idx == 0) ? 0.0 : freq_1d_[axis][idx]; // idx 0 is -Nyquist
        mult(k) = Complex(0.0, f);
    }
    return dft_.adjoint() * mult.asDiagonal() * dft_;
}

VectorXcd Grid::plane_wave(long flat_freq) const {
    VectorXcd v(size_);
    for (long j = 0; j < size_; ++j) {
        double phase = 0.0;
        for (int d = 0; d < dim(); ++d)
            phase += freq_coord(flat_freq, d) * node_coord(j, d);
        v(j) = std::exp(Complex(0.0, phase));
    }
    return v / norm(v);
}

Complex Grid::inner(const VectorXcd& u, const VectorXcd& v) const {
    return cell_volume_ * u.dot(v);
}

double Grid::norm(const VectorXcd& u) const {
    return std::sqrt(cell_volume_) * u.norm();
}

VectorXcd Grid::fourier_coeffs(const VectorXcd& u) const {
    const double scale =
        std::pow(2.0 * M_PI, -0.5 * dim()) * cell_volume_ * std::sqrt(static_cast<double>(size_));
    return scale * (dft_ * u);
}

double Grid::sobolev_norm(const VectorXcd& u, double s) const {
    VectorXcd uhat = fourier_coeffs(u);
    double dxi = 1.0;
    for (const Axis& ax : axes_)
        dxi *= 2.0 * M_PI / ax.length;
    double acc = 0.0;
    for (long k = 0; k < size_; ++k) {
        double w = std::pow(1.0 + freq_sq(k), s);
        acc += w * std::norm(uhat(k));
    }
    return std::sqrt(acc * dxi);
}

long Grid::flat_index(const std::vector<int>& multi) const {
    if (static_cast<int>(multi.size()) != dim())
        throw Error("grid: multi index rank mismatch");
    long flat = 0;
    for (int d = 0; d < dim(); ++d) {
        if (multi[d] < 0 || multi[d] >= axes_[d].n)
            throw Error("grid: multi index out of range");
        flat += multi[d] * stride_[d];
    }
    return flat;
}

std::vector<int> Grid::multi_index(long flat) const {
    std::vector<int> multi(dim());
    for (int d = 0; d < dim(); ++d)
        multi[d] = static_cast<int>((flat / stride_[d]) % axes_[d].n);
    return multi;
}

} // namespace nelson
