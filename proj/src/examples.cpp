#include "radial/examples.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "radial/errors.hpp"
#include "radial/smooth.hpp"

namespace radial {

namespace {

using GK15 = boost::math::quadrature::gauss_kronrod<double, 15>;

// Adaptive GK15 that refuses to return an unconverged value.
template <class F>
double gk(F&& f, double a, double b, double tol = 1e-13) {
    if (a == b) return 0.0;
    double err = 0;
    double v = GK15::integrate(f, a, b, 10, tol, &err);
    // the reported error is |Kronrod - Gauss|, far above the true error
    if (!(std::abs(err) <= 1e-7 * std::max(1e-3, std::abs(v))) || !std::isfinite(v))
        throw ResolutionError("quadrature did not converge on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]");
    return v;
}

// Fixed 20-point Gauss-Legendre.  Nested integrals need a rule whose nodes do
// not depend on the integrand, otherwise the inner noise stalls the outer one.
struct GL {
    double x20[20], w20[20], x10[10], w10[10];
    GL() {
        gauss_legendre(20, x20, w20);
        gauss_legendre(10, x10, w10);
    }
    static const GL& get() {
        static const GL g;
        return g;
    }
};

template <class F>
double gl20(F&& f, double a, double b) {
    const GL& q = GL::get();
    double c = 0.5 * (a + b), h = 0.5 * (b - a), s = 0;
    for (int k = 0; k < 20; ++k) s += q.w20[k] * f(c + h * q.x20[k]);
    return s * h;
}

// gl20 on one cell, raising ResolutionError when the 10-point rule disagrees.
template <class F>
double gl_checked(F&& f, double a, double b, double scale) {
    const GL& q = GL::get();
    double c = 0.5 * (a + b), h = 0.5 * (b - a), s10 = 0;
    for (int k = 0; k < 10; ++k) s10 += q.w10[k] * f(c + h * q.x10[k]);
    double s20 = gl20(f, a, b);
    if (!(std::abs(s20 - s10 * h) <= 1e-12 * (std::abs(s20) + scale)))
        throw ResolutionError("quadrature did not converge on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    return s20;
}

}  // namespace

WarpedMetric make_cone(const ConeSpec& spec, const RadialGrid& grid) {
    if (!(spec.alpha > 0) || !(spec.beta > 0)) throw PreconditionError("cone: alpha and beta must be positive");
    if (spec.dim < 2) throw PreconditionError("cone: dim must be >= 2");
    bool regular = spec.alpha == 1.0 && spec.beta == 1.0 && grid.tip();
    double al = spec.alpha, be = spec.beta;
    return WarpedMetric::warped(spec.dim, grid, [&](double r) { return al * std::pow(r, be); }, regular);
}

// ---------------------------------------------------------------------------
// Positive-mass cone

PositiveMassCone::PositiveMassCone(double eps) : eps_(eps) {
    if (!(eps > 0 && eps < 0.5)) throw PreconditionError("positive mass cone: eps must lie in (0, 1/2)");

    // geometric sub-grid on [kRmin, 1], uniform on [1, 2]
    const int K1 = 400, K2 = 200;
    for (int k = 0; k <= K1; ++k) s_.push_back(kRmin * std::pow(1.0 / kRmin, double(k) / K1));
    s_.back() = 1.0;
    for (int k = 1; k <= K2; ++k) s_.push_back(1.0 + double(k) / K2);
    s_.back() = 2.0;

    auto t2eta = [this](double t) { return t * t * eta(t); };
    I_.assign(s_.size(), 0.0);
    I_[0] = -eps_ * std::pow(kRmin, 1 - eps_);  // exact on (0, kRmin]
    for (size_t k = 0; k + 1 < s_.size(); ++k)
        I_[k + 1] = I_[k] + gl_checked(t2eta, s_[k], s_[k + 1], std::abs(I_[k]));

    std::vector<double> F(s_.size(), 0.0);
    for (size_t k = 0; k + 1 < s_.size(); ++k) {
        int kk = static_cast<int>(k);
        F[k + 1] = F[k] + gl_checked([&](double s) { return I_from(kk, s) / (s * s); }, s_[k], s_[k + 1],
                                     std::abs(F[k]) + 1e-3);
    }
    const double F1 = F[K1];
    Phi_.resize(s_.size());
    for (size_t k = 0; k < s_.size(); ++k) Phi_[k] = F[k] - F1;

    a_ = -I_.back();
    phi2_ = Phi_.back();
    b_ = -phi2_;
    c0_ = (Phi_[0] + b_ + a_ / 2 + 1) - std::pow(kRmin, -eps_);
    if (!(a_ > 0)) throw ConstructionError("positive mass cone: a is not positive");
}

double PositiveMassCone::eta(double r) const {
    const double c = -eps_ * (1 - eps_);
    if (r <= 1) return c * std::pow(r, -eps_ - 2);
    if (r < 2) return c * (1 - smooth_step(r - 1));
    return 0.0;
}

int PositiveMassCone::cell(double r) const {
    auto it = std::upper_bound(s_.begin(), s_.end(), r);
    int k = static_cast<int>(it - s_.begin()) - 1;
    return std::clamp(k, 0, static_cast<int>(s_.size()) - 2);
}

double PositiveMassCone::I_from(int k, double s) const {
    return I_[k] + gl20([this](double t) { return t * t * eta(t); }, s_[k], s);
}

double PositiveMassCone::inner_integral(double s) const {
    if (s <= 0) return 0.0;
    if (s <= kRmin) return -eps_ * std::pow(s, 1 - eps_);
    if (s >= 2) return -a_;
    return I_from(cell(s), s);
}

double PositiveMassCone::phi(double r) const {
    if (!(r > 0)) throw DomainError("positive mass cone: r must be positive");
    if (r <= kRmin) return Phi_[0] + std::pow(r, -eps_) - std::pow(kRmin, -eps_);
    if (r >= 2) return phi2_ + a_ * (1 / r - 0.5);
    int k = cell(r);
    return Phi_[k] + gl20([&](double s) { return I_from(k, s) / (s * s); }, s_[k], r);
}

double PositiveMassCone::arclength(double r) const {
    if (r <= 0) return 0.0;
    // u = r^-eps + c0 on (0, kRmin]
    auto head = [&](double x) {
        return std::pow(x, 1 - 2 * eps_) / (1 - 2 * eps_) + 2 * c0_ * std::pow(x, 1 - eps_) / (1 - eps_) +
               c0_ * c0_ * x;
    };
    if (r <= kRmin) return head(r);
    boost::math::quadrature::tanh_sinh<double> ts;
    auto u2 = [this](double x) { double v = u(x); return v * v; };
    // tail in pieces so the nested quadrature inside u stays cheap
    double acc = head(kRmin), lo = kRmin;
    for (double edge : {1e-3, 1e-2, 1e-1, 1.0, 2.0}) {
        if (edge <= lo) continue;
        double hi = std::min(edge, r);
        acc += ts.integrate(u2, lo, hi, 1e-12);
        lo = hi;
        if (lo >= r) return acc;
    }
    // beyond 2 u = 1 + a/x exactly
    auto F = [&](double x) { return x + 2 * a_ * std::log(x) - a_ * a_ / x; };
    return acc + F(r) - F(2.0);
}

ConformalMetric PositiveMassCone::metric(const RadialGrid& grid) const {
    auto prof = RadialProfile::from(grid, [this](double r) {
        double v = u(r);
        if (!(v > 0)) throw ConstructionError("positive mass cone: u <= 0 at r = " + std::to_string(r));
        return v;
    });
    return ConformalMetric(3, std::move(prof));
}

double PositiveMassCone::cone_angle_fit() const {
    double q[3];
    const double rs[3] = {1e-6, 1e-8, 1e-10};
    for (int i = 0; i < 3; ++i) {
        double r = rs[i], v = u(r);
        q[i] = v * v * r / arclength(r);
    }
    double den = q[2] - 2 * q[1] + q[0];
    if (std::abs(den) < 1e-300) return q[2];
    return q[2] - (q[2] - q[1]) * (q[2] - q[1]) / den;
}

ConformalMetric make_positive_mass_cone(double eps, const RadialGrid& grid) {
    return PositiveMassCone(eps).metric(grid);
}

// ---------------------------------------------------------------------------
// Zero-area singularity

ZeroAreaSingularity::ZeroAreaSingularity(double m) : m_(m) {
    if (!(m > 0)) throw PreconditionError("zero-area singularity: m must be positive");
}

double ZeroAreaSingularity::arclength(double t) const {
    if (t < 0) throw DomainError("zero-area singularity: t must be >= 0");
    const double m2 = 2 * m_;
    return gk([&](double s) { double q = s / (s + m2); return q * q; }, 0.0, t);
}

ConformalMetric ZeroAreaSingularity::metric(const RadialGrid& grid) const {
    if (!(grid.r_min() > 2 * m_))
        throw DomainError("zero-area singularity: the grid must lie in r > 2m");
    return ConformalMetric(3, RadialProfile::from(grid, [this](double r) { return u(r); }));
}

double ZeroAreaSingularity::exponent_fit() const {
    // least squares of log B against log rho for t in [1e-6, 1e-4] m
    const int N = 21;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < N; ++i) {
        double t = m_ * std::pow(10.0, -6.0 + 2.0 * i / (N - 1));
        double r = t + 2 * m_, v = u(r);
        double x = std::log(arclength(t)), y = std::log(v * v * v * v * r * r);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    return (N * sxy - sx * sy) / (N * sxx - sx * sx);
}

ConformalMetric make_zero_area_singularity(double m, const RadialGrid& grid) {
    return ZeroAreaSingularity(m).metric(grid);
}

// ---------------------------------------------------------------------------
// Glued Schwarzschild

GluedSchwarzschild::GluedSchwarzschild(double m, double r0, double r1, Normalization mode)
    : m_(m), r0_(r0), r1_(r1) {
    if (!(m > 0)) throw PreconditionError("glued Schwarzschild: m must be positive");
    if (!(r0 > 2 * m) || !(r1 > r0)) throw PreconditionError("glued Schwarzschild: need r1 > r0 > 2m");

    if (mode == Normalization::amplitude) {
        kappa_ = 1.0 / unnormalized_limit();
        return;
    }
    // Literal: bisection on r1 for y(oo) = 1.  y(oo) increases with r1 but
    // stays below 2m * int_{2m}^oo r^-2 = 1, so check the far end first.
    double lo = r0 * (1 + 1e-9), hi = 1e6 * m;
    r1_ = hi;
    if (unnormalized_limit() < 1 - 1e-10)
        throw ConstructionError("glued Schwarzschild: normalization infeasible, y(oo) = " +
                                std::to_string(unnormalized_limit()) + " < 1 for every r1 up to 1e6 m");
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        r1_ = 0.5 * (lo + hi);
        (unnormalized_limit() < 1 ? lo : hi) = r1_;
    }
    r1_ = hi;
}

GluedSchwarzschild GluedSchwarzschild::literal(double m) {
    return GluedSchwarzschild(m, 3 * m, 6 * m, Normalization::literal);
}

double GluedSchwarzschild::eta(double r) const {
    if (r <= r0_) return 2 * m_ * kappa_;
    if (r >= r1_) return 0.0;
    return 2 * m_ * kappa_ * (1 - smooth_step((r - r0_) / (r1_ - r0_)));
}

double GluedSchwarzschild::eta_d1(double r) const {
    if (r <= r0_ || r >= r1_) return 0.0;
    double L = r1_ - r0_;
    return -2 * m_ * kappa_ * smooth_step_d1((r - r0_) / L) / L;
}

double GluedSchwarzschild::unnormalized_limit() const {
    // in x = (s - r0)/L the integrand is concentrated near x = 0 once L >> r0
    const double L = r1_ - r0_;
    auto f = [&](double x) {
        double s = r0_ + L * x;
        return 2 * m_ * (1 - smooth_step(x)) * L / (s * s);
    };
    double acc = 1 - 2 * m_ / r0_, lo = 0;
    for (double hi = std::min(1.0, r0_ / L) / 32; lo < 1; lo = hi, hi = std::min({1.0, 1.5 * hi, hi + 1.0 / 32}))
        acc += gl_checked(f, lo, hi, acc);
    return acc;
}

double GluedSchwarzschild::y(double r) const {
    if (r < 2 * m_) throw DomainError("glued Schwarzschild: r < 2m");
    if (r <= r0_) return kappa_ * (1 - 2 * m_ / r);
    double top = std::min(r, r1_);
    double v = kappa_ * (1 - 2 * m_ / r0_) + gk([this](double s) { return eta(s) / (s * s); }, r0_, top);
    return v;
}

ConformalMetric GluedSchwarzschild::metric(const RadialGrid& grid) const {
    if (!(grid.r_min() > 2 * m_)) throw DomainError("glued Schwarzschild: the grid must lie in r > 2m");
    return ConformalMetric(3, RadialProfile::from(grid, [this](double r) { return y(r); }));
}

ConformalMetric make_glued_schwarzschild(double m, double r0, double r1, const RadialGrid& grid,
                                         GluedSchwarzschild::Normalization mode) {
    return GluedSchwarzschild(m, r0, r1, mode).metric(grid);
}

// ---------------------------------------------------------------------------
// Cone-ball gluing

CornerMetric make_cone_ball_gluing(int n, double alpha, double rbar, double outer_length, int nodes,
                                   bool allow_bad_corner) {
    if (n < 2) throw PreconditionError("cone-ball gluing: n must be >= 2");
    if (!(alpha > 0) || !(rbar > 0) || !(outer_length > 0)) throw PreconditionError("cone-ball gluing: bad parameters");
    if (alpha > 1 && !allow_bad_corner)
        throw PreconditionError("cone-ball gluing: alpha > 1 gives H_- < H_+ at the corner");

    const double s0 = alpha * rbar;
    CornerSide in{[](double s) { return s; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
    CornerSide out{[=](double s) { return alpha * (s - s0 + rbar); }, [=](double) { return alpha; },
                   [](double) { return 0.0; }};

    auto gi = RadialGrid::uniform(0.0, s0, nodes);
    auto go = RadialGrid::uniform(s0, s0 + outer_length, nodes);
    auto inner = WarpedMetric::warped(n, gi, in.phi, true);
    auto outer = WarpedMetric::warped(n, go, out.phi, false);
    return CornerMetric{n, s0, std::move(inner), std::move(outer), (n - 1) / s0, (n - 1) / rbar, in, out};
}

}  // namespace radial
