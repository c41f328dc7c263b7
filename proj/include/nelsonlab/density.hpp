#pragma once

#include "nelsonlab/grid.hpp"

namespace nelson {

// Smooth approximate point charge.  Profiles:
//   gaussian:  rho(x) = q (2 pi w^2)^(-d/2) exp(-|x|^2 / 2 w^2)
//   bump:      rho(x) = q c_d w^-d exp(-1/(1-(|x|/w)^2)) on |x| < w
//   signed:    rho(x) = q (1 - |x|^2/(d w^2)) (2 pi w^2)^(-d/2) exp(-|x|^2/2w^2),
//              total charge zero (q acts as an amplitude).
// The kappa-rescaled family is rho_kappa(x) = kappa^d rho(kappa x), so the
// unitary Fourier transform obeys rho_kappa_hat(xi) = rho_hat(xi/kappa) and
// rho_hat(0) = (2 pi)^(-d/2) q for the charge-carrying profiles.
class ChargeDensity {
  public:
    ChargeDensity(std::string kind, double q, double width, int dim);

    const std::string& kind() const { return kind_; }
    double q() const { return q_; }
    double width() const { return width_; }
    int dim() const { return dim_; }

    double value(const std::vector<double>& x) const;
    std::vector<double> gradient(const std::vector<double>& x) const;
    // Unitary Fourier transform at |xi| = r (profiles are radial).
    double fourier_radial(double r) const;
    double fourier(const std::vector<double>& xi) const;
    // Fourier transform of the kappa-rescaled profile.
    double fourier_kappa_radial(double r, double kappa) const {
        return fourier_radial(r / kappa);
    }

    // Largest kappa the grid can represent: kappa <= 0.25 * nyquist * width.
    double aliasing_cap(const Grid& grid) const { return 0.25 * grid.nyquist() * width_; }

    // Samples rho_kappa centered at grid node X (periodized over neighbor
    // images).  Exceeding the aliasing cap or a width above box/8 is an error.
    VectorXcd sample(const Grid& grid, long center_node, double kappa) const;
    // Same for the gradient component d/dx_axis of rho_kappa(. - X).
    VectorXcd sample_grad(const Grid& grid, long center_node, double kappa, int axis) const;
    // Center given as a coordinate (the particle position need not be a
    // node of the boson grid).
    VectorXcd sample_at(const Grid& grid, const std::vector<double>& center,
                        double kappa) const;
    VectorXcd sample_grad_at(const Grid& grid, const std::vector<double>& center,
                             double kappa, int axis) const;

  private:
    void check(const Grid& grid, double kappa) const;

    std::string kind_;
    double q_;
    double width_;
    int dim_;
    double bump_norm_ = 0.0; // cached normalization for the bump profile
};

ChargeDensity make_density(const std::string& kind, double q, double width, int dim);

} // namespace nelson
