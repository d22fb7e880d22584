#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "radial/examples.hpp"
#include "radial/metric.hpp"

namespace radial {

// eps: smoothing scale.  lambda <= 0 selects 0.25 / sup|rho'|.  The kernel is
// Kernel::instance().  sigma is the singular set (none: nothing to smooth);
// a degenerate region [0, 0] on a tip grid is the cone point.
struct MollifierSpec {
    double eps;
    std::optional<Region> sigma;
    double lambda = 0;
};

// rho = eps on Sigma(eps), 0 outside Sigma(2 eps), smooth in between.
struct Cutoff {
    RadialProfile profile;
    double eps;
    Region sigma;
    double C1 = 0;  // measured sup |rho'|
    double C2 = 0;  // measured eps * sup |rho''|

    double distance(double r) const;
    double value(double r) const;
    double d1(double r) const;
    double d2(double r) const;
};

Cutoff make_cutoff(double eps, const Region& sigma, const RadialGrid& grid);

// v(r) = int f(r - lambda rho(r) y) phi(y) dy, split at the ends of Sigma
// where f may have a kink.  Nodes with rho = 0 are copied unchanged.
RadialProfile mollify_variable(const RadialProfile& f, const MollifierSpec& spec);
SymTensor2Radial mollify_variable(const SymTensor2Radial& T, const MollifierSpec& spec);

struct MollifyReport {
    double lambda = 0;
    double eig_ratio_min = 1, eig_ratio_max = 1;  // output/input metric eigenvalues
    // input radius of every output node (identity unless a cone tip was
    // flattened in the conformal radius)
    std::vector<double> input_radius;
};

// Codimension-one Sigma: A and B mollified separately.  Sigma at a tip: the
// conformal factor is clamped by a smooth concave (or convex) map that is the
// identity for r >= 2 eps and constant for r <= eps.
WarpedMetric mollify_metric(const WarpedMetric& g, const MollifierSpec& spec, MollifyReport* report = nullptr);
WarpedMetric mollify_metric(const ConformalMetric& g, const MollifierSpec& spec, MollifyReport* report = nullptr);

// Corner smoothing: phi_s is blended from the inner to the outer slope by a
// mollified Heaviside of width delta = eps^2/100.  Everything is analytic in
// the arclength s, so the window can be far below grid resolution.
class SmoothedCorner {
public:
    SmoothedCorner(const CornerMetric& cm, double eps);

    double eps() const { return eps_; }
    double delta() const { return delta_; }
    double corner() const { return s0_; }
    int dim() const { return n_; }

    double phi(double s) const;
    double dphi(double s) const;
    double ddphi(double s) const;
    double scalar(double s) const;

    // integrals of f(S) dv over [a, b]
    double integrate_S(double a, double b, const std::function<double(double)>& f) const;
    double positive_part_integral() const;  // |s - s0| <= eps
    double negative_part_integral(double sigma = 0) const;
    // Smallest c with S >= -c + (H- - H+) eps^-2 phi(100 t / eps^2) on |s - s0| <= eps
    double clause_constant() const;

    WarpedMetric metric(const RadialGrid& grid) const;

private:
    CornerSide in_, out_;
    int n_;
    double eps_, delta_, s0_, s_end_;
    double H_minus_, H_plus_;
    double window_excess_;  // int over the window of H (f_R - f_L)
    double blend(double s) const;  // H((s - s0)/delta)
};

WarpedMetric smooth_corner(const CornerMetric& cm, double eps, const RadialGrid& grid);

}  // namespace radial
