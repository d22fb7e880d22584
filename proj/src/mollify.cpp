#include "radial/mollify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "radial/curvature.hpp"
#include "radial/errors.hpp"
#include "radial/smooth.hpp"

namespace radial {

namespace {

struct GL20 {
    double x[20], w[20];
    GL20() { gauss_legendre(20, x, w); }
};

template <class F>
double gl20(F&& f, double a, double b) {
    static const GL20 q;
    double c = 0.5 * (a + b), h = 0.5 * (b - a), s = 0;
    for (int k = 0; k < 20; ++k) s += q.w[k] * f(c + h * q.x[k]);
    return s * h;
}

template <class F>
double gl_cells(F&& f, double a, double b, int cells) {
    double s = 0, h = (b - a) / cells;
    for (int k = 0; k < cells; ++k) s += gl20(f, a + k * h, a + (k + 1) * h);
    return s;
}

// sup |step'| and sup |step''| of the smooth step, sampled finely
struct StepBounds {
    double d1 = 0, d2 = 0;
    StepBounds() {
        for (int i = 0; i <= 20000; ++i) {
            double t = i / 20000.0;
            d1 = std::max(d1, std::abs(smooth_step_d1(t)));
            d2 = std::max(d2, std::abs(smooth_step_d2(t)));
        }
    }
};

const StepBounds& step_bounds() {
    static const StepBounds b;
    return b;
}

// G(tau) = int_0^tau (1 - step(t)) dt on [0, 1]; G(1) = 1/2
double clamp_profile(double tau) {
    if (tau <= 0) return tau;
    if (tau >= 1) return 0.5;
    return tau - gl_cells(smooth_step, 0.0, tau, 4);
}

// Smooth monotone map that is the identity on one side of x2 and constant
// beyond x1.  Concave when x1 > x2, convex when x1 < x2.
double clamp_value(double x, double x1, double x2) {
    double span = x1 - x2;
    if (span == 0) return x;
    double tau = (x - x2) / span;
    if (tau <= 0) return x;
    return x2 + span * clamp_profile(tau);
}

bool tip_sigma(const Region& s, const RadialGrid& g) { return g.tip() && s.a == 0; }

}  // namespace

// ---------------------------------------------------------------------------
// Cutoff

double Cutoff::distance(double r) const { return std::max({sigma.a - r, r - sigma.b, 0.0}); }

double Cutoff::value(double r) const { return eps * (1 - smooth_step((distance(r) - eps) / eps)); }

double Cutoff::d1(double r) const {
    double d = distance(r);
    if (d <= 0) return 0;
    double sgn = r > sigma.b ? 1.0 : -1.0;
    return -smooth_step_d1((d - eps) / eps) * sgn;
}

double Cutoff::d2(double r) const {
    double d = distance(r);
    if (d <= 0) return 0;
    return -smooth_step_d2((d - eps) / eps) / eps;
}

Cutoff make_cutoff(double eps, const Region& sigma, const RadialGrid& grid) {
    if (!(eps > 0)) throw PreconditionError("cutoff: eps must be positive");
    bool lo_ok = sigma.a - 2 * eps >= grid.r_min() || tip_sigma(sigma, grid);
    if (!lo_ok || sigma.b + 2 * eps > grid.r_max())
        throw DomainError("cutoff: Sigma(2 eps) = [" + std::to_string(sigma.a - 2 * eps) + ", " +
                          std::to_string(sigma.b + 2 * eps) + "] does not fit in the grid");
    Cutoff c{RadialProfile(grid, std::vector<double>(grid.size(), 0.0)), eps, sigma};
    for (int i = 0; i < grid.size(); ++i) c.profile.values[i] = c.value(grid[i]);
    c.profile.parity = tip_sigma(sigma, grid) ? Parity::even : Parity::none;
    c.C1 = step_bounds().d1;
    c.C2 = step_bounds().d2;
    return c;
}

// ---------------------------------------------------------------------------
// Variable-radius mollification

namespace {

double lambda_for(const MollifierSpec& spec, const Cutoff& cut) {
    double lam = spec.lambda > 0 ? spec.lambda : 0.25 / cut.C1;
    if (!(lam * cut.C1 < 0.5))
        throw PreconditionError("mollifier: lambda sup|rho'| = " + std::to_string(lam * cut.C1) +
                                " >= 1/2, the inner map is not a diffeomorphism");
    return lam;
}

std::vector<double> kinks(const Region& sigma, const RadialGrid& g) {
    std::vector<double> k;
    if (sigma.a > g.r_min()) k.push_back(sigma.a);
    if (sigma.b > sigma.a && sigma.b > g.r_min()) k.push_back(sigma.b);
    return k;
}

// int f(r - w y) phi(y) dy with the kernel split where r - w y crosses a kink
double convolve(const RadialProfile& f, double r, double w, const std::vector<double>& ks) {
    const Kernel& K = Kernel::instance();
    std::vector<double> cuts{-1.0, 1.0};
    for (double b : ks) {
        double y = (r - b) / w;
        if (y > -1 && y < 1) cuts.push_back(y);
    }
    std::sort(cuts.begin(), cuts.end());
    auto sample = [&](double x) {
        if (ks.empty()) return interpolate(f.grid, f.values, x, f.parity);
        double bp = ks[0];
        for (double b : ks)
            if (std::abs(b - x) < std::abs(bp - x)) bp = b;
        return interpolate(f.grid, f.values, x, f.parity, bp);
    };
    double total = 0;
    for (size_t p = 0; p + 1 < cuts.size(); ++p) {
        double y0 = cuts[p], y1 = cuts[p + 1];
        if (y1 <= y0) continue;
        if (y0 == -1 && y1 == 1) {
            for (int k = 0; k < Kernel::kPoints; ++k) total += K.kernel_weights()[k] * sample(r - w * K.nodes()[k]);
            continue;
        }
        double c = 0.5 * (y0 + y1), h = 0.5 * (y1 - y0);
        for (int k = 0; k < Kernel::kPoints; ++k) {
            double y = c + h * K.nodes()[k];
            total += h * K.weights()[k] * K(y) * sample(r - w * y);
        }
    }
    return total;
}

}  // namespace

RadialProfile mollify_variable(const RadialProfile& f, const MollifierSpec& spec) {
    if (!spec.sigma) return f;
    Cutoff cut = make_cutoff(spec.eps, *spec.sigma, f.grid);
    double lam = lambda_for(spec, cut);
    auto ks = kinks(*spec.sigma, f.grid);
    RadialProfile out = f;
    for (int i = 0; i < f.size(); ++i) {
        double rho = cut.profile[i];
        if (rho == 0) continue;
        out.values[i] = convolve(f, f.grid[i], lam * rho, ks);
    }
    return out;
}

SymTensor2Radial mollify_variable(const SymTensor2Radial& T, const MollifierSpec& spec) {
    return SymTensor2Radial(T.dim, mollify_variable(T.T_rr, spec), mollify_variable(T.T_s, spec));
}

// ---------------------------------------------------------------------------
// Metrics

namespace {

void ratio_range(MollifyReport* rep, const std::vector<double>& out, const std::vector<double>& in) {
    if (!rep) return;
    for (size_t i = 0; i < out.size(); ++i) {
        double q = out[i] / in[i];
        rep->eig_ratio_min = std::min(rep->eig_ratio_min, q);
        rep->eig_ratio_max = std::max(rep->eig_ratio_max, q);
    }
}

void require_monotone(const RadialGrid& g, const std::vector<double>& w, double r2, const char* what) {
    int sign = 0;
    for (int i = 0; i + 1 < g.size() && g[i + 1] <= r2; ++i) {
        double d = w[i + 1] - w[i];
        int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
        if (s == 0) continue;
        if (sign != 0 && s != sign)
            throw ConstructionError(std::string(what) + " is not monotone inside Sigma(2 eps)");
        sign = s;
    }
}

}  // namespace

WarpedMetric mollify_metric(const WarpedMetric& g, const MollifierSpec& spec, MollifyReport* report) {
    const RadialGrid& grid = g.grid();
    if (!spec.sigma) {
        if (report) report->input_radius = grid.nodes();
        return g;
    }
    const Region sigma = *spec.sigma;
    Cutoff cut = make_cutoff(spec.eps, sigma, grid);
    double lam = lambda_for(spec, cut);
    if (report) report->lambda = lam;

    if (!tip_sigma(sigma, grid)) {
        auto A = mollify_variable(g.A, spec);
        auto B = mollify_variable(g.B, spec);
        for (int i = 0; i < grid.size(); ++i)
            if (!(A[i] > 0 && B[i] > 0)) throw ConstructionError("mollified metric lost positivity");
        ratio_range(report, A.values, g.A.values);
        ratio_range(report, B.values, g.B.values);
        if (report) report->input_radius = grid.nodes();
        return WarpedMetric(g.dim, std::move(A), std::move(B), g.tip_regular, g.fiber_k);
    }

    // Cone point: pass to the conformal radius, where g = w (drho^2 + rho^2 h0)
    // and ln rho = ln r_max - int_r^{r_max} sqrt(A/B).
    const int N = grid.size();
    const double rmax = grid.r_max();
    std::vector<double> q(N), lnrho(N), w(N);
    for (int i = 0; i < N; ++i) q[i] = std::sqrt(g.A[i] / g.B[i]);
    for (int i = 0; i < N; ++i) {
        lnrho[i] = std::log(rmax) - integrate(grid, q, Region(grid[i], rmax));
        w[i] = g.B[i] * std::exp(-2 * lnrho[i]);
    }
    const double r1 = sigma.b + spec.eps, r2 = sigma.b + 2 * spec.eps;
    require_monotone(grid, w, r2, "conformal factor");
    auto lnrho_at = [&](double r) { return interpolate(grid, lnrho, r, Parity::none); };
    const double rho1 = std::exp(lnrho_at(r1)), rho2 = std::exp(lnrho_at(r2));
    const double w1 = interpolate(grid, w, r1, Parity::none), w2 = interpolate(grid, w, r2, Parity::none);

    // output grid in rho with at least 12 nodes across the clamp window
    RadialGrid out = RadialGrid::geometric(0.0, rmax, N, 2.0);
    for (double kap = 2.0; kap <= 30.0; kap += 0.5) {
        out = RadialGrid::geometric(0.0, rmax, N, kap);
        if (out.lower_index(rho2) - out.lower_index(rho1) >= 12) break;
    }
    out = out.with_end_order(grid.end_order());

    // invert ln rho(r) by interpolating r against ln rho
    const double lr0 = lnrho[0];
    std::vector<double> A(N), B(N), rin(N);
    for (int j = 0; j < N; ++j) {
        double rho = out[j];
        double r;
        if (rho <= rho1) {
            r = 0;  // inside the constant region; only w2 and w1 matter
        } else {
            double L = std::log(rho);
            auto it = std::lower_bound(lnrho.begin(), lnrho.end(), L);
            int k = std::clamp(static_cast<int>(it - lnrho.begin()), 1, N - 1);
            // refine with a few secant/bisection steps on the interpolant
            double lo = grid[k - 1], hi = grid[k];
            if (L < lr0) lo = 0, hi = grid[0];
            for (int it2 = 0; it2 < 60; ++it2) {
                double mid = 0.5 * (lo + hi);
                (lnrho_at(mid) < L ? lo : hi) = mid;
            }
            r = 0.5 * (lo + hi);
        }
        rin[j] = r;
        double wj;
        if (rho <= rho1) {
            wj = clamp_value(w1, w1, w2);
        } else {
            double wr = interpolate(grid, w, r, Parity::none);
            wj = r < r2 ? clamp_value(wr, w1, w2) : wr;
        }
        if (!(wj > 0)) throw ConstructionError("mollified metric lost positivity");
        A[j] = wj;
        B[j] = wj * rho * rho;
        if (report) {
            double wr = r > 0 ? interpolate(grid, w, r, Parity::none) : wj;
            double ratio = wj / wr;
            report->eig_ratio_min = std::min(report->eig_ratio_min, ratio);
            report->eig_ratio_max = std::max(report->eig_ratio_max, ratio);
        }
    }
    if (report) report->input_radius = rin;
    return WarpedMetric(g.dim, RadialProfile(out, A, Parity::even), RadialProfile(out, B, Parity::even), true,
                        g.fiber_k);
}

WarpedMetric mollify_metric(const ConformalMetric& g, const MollifierSpec& spec, MollifyReport* report) {
    const RadialGrid& grid = g.grid();
    RadialProfile u = g.u;
    if (!spec.sigma) {
        if (report) report->input_radius = grid.nodes();
        return g.to_warped();
    }
    Cutoff cut = make_cutoff(spec.eps, *spec.sigma, grid);
    double lam = lambda_for(spec, cut);
    if (report) report->lambda = lam;
    if (!tip_sigma(*spec.sigma, grid)) {
        u = mollify_variable(g.u, spec);
    } else {
        const double r1 = spec.sigma->b + spec.eps, r2 = spec.sigma->b + 2 * spec.eps;
        require_monotone(grid, g.u.values, r2, "conformal factor");
        double u1 = interpolate(grid, g.u.values, r1, Parity::none);
        double u2 = interpolate(grid, g.u.values, r2, Parity::none);
        for (int i = 0; i < grid.size() && grid[i] < r2; ++i) u.values[i] = clamp_value(g.u[i], u1, u2);
        u.parity = Parity::even;
    }
    for (double v : u.values)
        if (!(v > 0)) throw ConstructionError("mollified conformal factor lost positivity");
    if (report) {
        report->input_radius = grid.nodes();
        std::vector<double> a(grid.size()), b(grid.size());
        double e = 4.0 / (g.dim - 2);
        for (int i = 0; i < grid.size(); ++i) a[i] = std::pow(u[i], e), b[i] = std::pow(g.u[i], e);
        ratio_range(report, a, b);
    }
    return ConformalMetric(g.dim, std::move(u)).to_warped();
}

// ---------------------------------------------------------------------------
// Corner smoothing

SmoothedCorner::SmoothedCorner(const CornerMetric& cm, double eps)
    : in_(cm.in), out_(cm.out), n_(cm.dim), eps_(eps), delta_(eps * eps / 100), s0_(cm.r0),
      s_end_(cm.outer.grid().r_max()), H_minus_(cm.H_minus), H_plus_(cm.H_plus) {
    if (!(eps > 0)) throw PreconditionError("smooth_corner: eps must be positive");
    if (!(eps < s0_) || !(s0_ + eps < s_end_))
        throw DomainError("smooth_corner: eps exceeds the distance from the corner to a boundary");
    window_excess_ = gl_cells([this](double s) { return blend(s) * (out_.dphi(s) - in_.dphi(s)); }, s0_ - delta_,
                              s0_ + delta_, 8);
}

double SmoothedCorner::blend(double s) const { return Kernel::instance().cdf((s - s0_) / delta_); }

double SmoothedCorner::phi(double s) const {
    if (s <= s0_ - delta_) return in_.phi(s);
    if (s >= s0_ + delta_)
        return out_.phi(s) + window_excess_ - out_.phi(s0_ + delta_) + in_.phi(s0_ + delta_);
    return in_.phi(s) + gl_cells([this](double t) { return blend(t) * (out_.dphi(t) - in_.dphi(t)); },
                                 s0_ - delta_, s, 4);
}

double SmoothedCorner::dphi(double s) const {
    double H = blend(s);
    return (1 - H) * in_.dphi(s) + H * out_.dphi(s);
}

double SmoothedCorner::ddphi(double s) const {
    double H = blend(s);
    double k = Kernel::instance()((s - s0_) / delta_) / delta_;
    return (1 - H) * in_.ddphi(s) + H * out_.ddphi(s) + k * (out_.dphi(s) - in_.dphi(s));
}

double SmoothedCorner::scalar(double s) const {
    double f = phi(s), f1 = dphi(s), f2 = ddphi(s);
    return (n_ - 1) * (-2 * f2 / f + (n_ - 2) * (1 - f1 * f1) / (f * f));
}

double SmoothedCorner::integrate_S(double a, double b, const std::function<double(double)>& fn) const {
    auto dens = [&](double s) { return fn(scalar(s)) * std::pow(phi(s), n_ - 1); };
    double lo = std::max(a, s0_ - delta_), hi = std::min(b, s0_ + delta_);
    double total = 0;
    if (a < lo) total += gl_cells(dens, a, std::min(b, lo), 16);
    if (lo < hi) total += gl_cells(dens, lo, hi, 32);
    if (hi < b) total += gl_cells(dens, std::max(a, hi), b, 16);
    return sphere_area(n_) * total;
}

double SmoothedCorner::positive_part_integral() const {
    return integrate_S(s0_ - eps_, s0_ + eps_, [](double S) { return std::max(S, 0.0); });
}

double SmoothedCorner::negative_part_integral(double sigma) const {
    return integrate_S(s0_ - eps_, s0_ + eps_, [sigma](double S) { return std::max(sigma - S, 0.0); });
}

double SmoothedCorner::clause_constant() const {
    const Kernel& K = Kernel::instance();
    double jump = H_minus_ - H_plus_, c = 0;
    auto check = [&](double s) {
        double bump = jump / (eps_ * eps_) * K(100 * (s - s0_) / (eps_ * eps_));
        c = std::max(c, bump - scalar(s));
    };
    const int M = 2000;
    for (int i = 0; i <= M; ++i) check(s0_ - delta_ + 2 * delta_ * i / M);
    for (int i = 0; i <= M; ++i) check(s0_ - eps_ + 2 * eps_ * i / M);
    return c;
}

WarpedMetric SmoothedCorner::metric(const RadialGrid& grid) const {
    if (grid.r_max() > s_end_ + 1e-12 || grid.r_min() < 0)
        throw DomainError("smooth_corner: grid outside the corner metric's range");
    return WarpedMetric::warped(n_, grid, [this](double s) { return phi(s); }, grid.tip());
}

WarpedMetric smooth_corner(const CornerMetric& cm, double eps, const RadialGrid& grid) {
    return SmoothedCorner(cm, eps).metric(grid);
}

}  // namespace radial
