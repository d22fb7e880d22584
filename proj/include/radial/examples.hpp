#pragma once

#include <functional>
#include <vector>

#include "radial/metric.hpp"

namespace radial {

struct ConeSpec {
    int dim = 3;
    double alpha = 1;
    double beta = 1;
};

// dr^2 + (alpha r^beta)^2 h0
WarpedMetric make_cone(const ConeSpec& spec, const RadialGrid& grid);

// u = phi + b + a/2 + 1 with Delta_0 phi = eta, eta = -eps(1-eps) r^{-eps-2}
// on (0, 1], a smooth negative bridge on [1, 2] and zero beyond 2.
class PositiveMassCone {
public:
    explicit PositiveMassCone(double eps);

    double eps() const { return eps_; }
    double a() const { return a_; }
    double b() const { return b_; }

    double eta(double r) const;
    double inner_integral(double s) const;  // int_0^s t^2 eta dt
    double phi(double r) const;
    double u(double r) const { return phi(r) + b_ + a_ / 2 + 1; }
    // rho = int_0^r u^2 dt, the radial arclength
    double arclength(double r) const;

    ConformalMetric metric(const RadialGrid& grid) const;

    // Cone parameter from sqrt(B)/rho -> alpha as r -> 0, extrapolated by
    // Aitken's delta-squared over r = 1e-6, 1e-8, 1e-10.
    double cone_angle_fit() const;

    static constexpr double kRmin = 1e-4;

private:
    double eps_, a_ = 0, b_ = 0, phi2_ = 0, c0_ = 0;
    std::vector<double> s_, I_, Phi_;  // nested-quadrature table on [kRmin, 2]
    int cell(double r) const;
    double I_from(int k, double s) const;
};

ConformalMetric make_positive_mass_cone(double eps, const RadialGrid& grid);

// u = 1 - 2m/r on r > 2m.
class ZeroAreaSingularity {
public:
    explicit ZeroAreaSingularity(double m);
    double m() const { return m_; }
    double u(double r) const { return 1 - 2 * m_ / r; }
    // rho(t) = int_0^t s^2/(s + 2m)^2 ds, t = r - 2m
    double arclength(double t) const;
    ConformalMetric metric(const RadialGrid& grid) const;
    // log-log slope of the sphere coefficient u^4 r^2 against rho near rho = 0
    double exponent_fit() const;

private:
    double m_;
};

// Schwarzschild factor glued to 1 through a nonincreasing eta.
class GluedSchwarzschild {
public:
    enum class Normalization {
        literal,    // search r1 with r0 = 3m so that y(oo) = 1 exactly
        amplitude,  // fix r0, r1 and scale eta so that y(oo) = 1
    };

    GluedSchwarzschild(double m, double r0, double r1, Normalization mode);
    static GluedSchwarzschild literal(double m);

    double m() const { return m_; }
    double r0() const { return r0_; }
    double r1() const { return r1_; }
    double kappa() const { return kappa_; }  // eta = kappa * 2m on [2m, r0]
    double eta(double r) const;
    double eta_d1(double r) const;
    double y(double r) const;
    ConformalMetric metric(const RadialGrid& grid) const;

private:
    double m_, r0_, r1_, kappa_ = 1;
    double unnormalized_limit() const;  // y(oo) with kappa = 1
};

ConformalMetric make_zero_area_singularity(double m, const RadialGrid& grid);
ConformalMetric make_glued_schwarzschild(double m, double r0, double r1, const RadialGrid& grid,
                                         GluedSchwarzschild::Normalization mode);

// One side of a corner: phi with two derivatives as functions of arclength.
struct CornerSide {
    std::function<double(double)> phi, dphi, ddphi;
};

// Two warped pieces dr^2 + phi^2 h0 meeting at r0 with matching phi(r0).
struct CornerMetric {
    int dim;
    double r0;
    WarpedMetric inner;  // on [0, r0]
    WarpedMetric outer;  // on [r0, r_max]
    double H_minus, H_plus;
    CornerSide in, out;
};

// Ball of radius alpha*rbar glued to the cone phi = alpha r (r >= rbar),
// written in the arclength coordinate so the corner sits at alpha*rbar.
CornerMetric make_cone_ball_gluing(int n, double alpha, double rbar, double outer_length = 2.0, int nodes = 256,
                                   bool allow_bad_corner = false);

}  // namespace radial
