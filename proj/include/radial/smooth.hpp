#pragma once

#include <array>
#include <vector>

namespace radial {

// C-infinity step: 0 for t <= 0, 1 for t >= 1, built from exp(-1/t).
double smooth_step(double t);
double smooth_step_d1(double t);
double smooth_step_d2(double t);

// Unnormalized bump exp(-1/(1-y^2)) on (-1, 1).
double bump_raw(double y);

// The mollifier kernel on [-1, 1] with unit integral.  The normalization is
// computed once with the same 33-point Gauss-Legendre rule used for
// convolution, so the discrete kernel integrates to 1 to rounding.
class Kernel {
public:
    static constexpr int kPoints = 33;
    static const Kernel& instance();

    double operator()(double y) const { return bump_raw(y) / norm_; }
    double norm() const { return norm_; }
    const std::array<double, kPoints>& nodes() const { return x_; }
    const std::array<double, kPoints>& weights() const { return w_; }
    // w_k * kernel(x_k); sums to 1.
    const std::array<double, kPoints>& kernel_weights() const { return kw_; }
    // Integral of the kernel over [-1, y], from a per-cell Gauss table.
    double cdf(double y) const;
    // Integral of cdf over [-1, y].
    double cdf_integral(double y) const;

private:
    Kernel();
    double norm_ = 1;
    double exact_norm_ = 1;
    std::array<double, kPoints> x_{}, w_{}, kw_{};
    std::vector<double> cdf_, icdf_;
};

// Nodes and weights of n-point Gauss-Legendre on [-1, 1].
void gauss_legendre(int n, double* x, double* w);

}  // namespace radial
