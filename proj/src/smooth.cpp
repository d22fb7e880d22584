#include "radial/smooth.hpp"

#include <algorithm>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>

namespace radial {

namespace {

double f(double t) { return t > 0 ? std::exp(-1 / t) : 0.0; }
double f1(double t) { return t > 0 ? std::exp(-1 / t) / (t * t) : 0.0; }
double f2(double t) { return t > 0 ? std::exp(-1 / t) * (1 - 2 * t) / (t * t * t * t) : 0.0; }

}  // namespace

double smooth_step(double t) {
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    double a = f(t), b = f(1 - t);
    return a / (a + b);
}

double smooth_step_d1(double t) {
    if (t <= 0 || t >= 1) return 0;
    double a = f(t), b = f(1 - t), a1 = f1(t), b1 = -f1(1 - t);
    double s = a + b;
    return (a1 * s - a * (a1 + b1)) / (s * s);
}

double smooth_step_d2(double t) {
    if (t <= 0 || t >= 1) return 0;
    double a = f(t), b = f(1 - t), a1 = f1(t), b1 = -f1(1 - t), a2 = f2(t), b2 = f2(1 - t);
    double s = a + b, s1 = a1 + b1, s2 = a2 + b2;
    // (a/s)'' = a''/s - 2 a' s'/s^2 - a s''/s^2 + 2 a s'^2/s^3
    return a2 / s - 2 * a1 * s1 / (s * s) - a * s2 / (s * s) + 2 * a * s1 * s1 / (s * s * s);
}

double bump_raw(double y) {
    if (std::abs(y) >= 1) return 0;
    return std::exp(-1 / (1 - y * y));
}

void gauss_legendre(int n, double* x, double* w) {
    auto zeros = boost::math::legendre_p_zeros<double>(n);
    // zeros holds the nonnegative roots in increasing order
    int k = 0;
    for (int i = static_cast<int>(zeros.size()) - 1; i >= 0; --i) {
        if (zeros[i] == 0) continue;
        x[k++] = -zeros[i];
    }
    if (n % 2 == 1) x[k++] = 0;
    for (size_t i = 0; i < zeros.size(); ++i)
        if (zeros[i] != 0) x[k++] = zeros[i];
    for (int i = 0; i < n; ++i) {
        double d = boost::math::legendre_p_prime(n, x[i]);
        w[i] = 2 / ((1 - x[i] * x[i]) * d * d);
    }
}

namespace {

constexpr int kCells = 256;

struct GL20 {
    double x[20], w[20];
    GL20() { gauss_legendre(20, x, w); }
};

const GL20& gl20() {
    static const GL20 q;
    return q;
}

template <class F>
double gl_cell(F&& f, double a, double b) {
    const GL20& q = gl20();
    double c = 0.5 * (a + b), h = 0.5 * (b - a), s = 0;
    for (int k = 0; k < 20; ++k) s += q.w[k] * f(c + h * q.x[k]);
    return s * h;
}

double cell_edge(int k) { return -1.0 + 2.0 * k / kCells; }

int cell_of(double y) { return std::clamp(static_cast<int>((y + 1) * kCells / 2), 0, kCells - 1); }

}  // namespace

Kernel::Kernel() {
    gauss_legendre(kPoints, x_.data(), w_.data());
    double s = 0;
    for (int k = 0; k < kPoints; ++k) s += w_[k] * bump_raw(x_[k]);
    norm_ = s;
    for (int k = 0; k < kPoints; ++k) kw_[k] = w_[k] * bump_raw(x_[k]) / norm_;

    cdf_.assign(kCells + 1, 0.0);
    for (int k = 0; k < kCells; ++k) cdf_[k + 1] = cdf_[k] + gl_cell(bump_raw, cell_edge(k), cell_edge(k + 1));
    exact_norm_ = cdf_.back();
    for (double& c : cdf_) c /= exact_norm_;
    icdf_.assign(kCells + 1, 0.0);
    for (int k = 0; k < kCells; ++k)
        icdf_[k + 1] = icdf_[k] + gl_cell([this](double t) { return cdf(t); }, cell_edge(k), cell_edge(k + 1));
}

const Kernel& Kernel::instance() {
    static const Kernel k;
    return k;
}

double Kernel::cdf(double y) const {
    if (y <= -1) return 0;
    if (y >= 1) return 1;
    int k = cell_of(y);
    return cdf_[k] + gl_cell(bump_raw, cell_edge(k), y) / exact_norm_;
}

double Kernel::cdf_integral(double y) const {
    if (y <= -1) return 0;
    if (y >= 1) return icdf_.back() + (y - 1);
    int k = cell_of(y);
    return icdf_[k] + gl_cell([this](double t) { return cdf(t); }, cell_edge(k), y);
}

}  // namespace radial
