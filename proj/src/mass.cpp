#include "radial/mass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "radial/curvature.hpp"
#include "radial/errors.hpp"

namespace radial {

namespace {

constexpr int kRadii = 13;

// nodes used for decay fits: [r_max/10, the node three from the end] unless
// a window is given
std::vector<int> window(const RadialGrid& g, const std::optional<Region>& w = std::nullopt) {
    std::vector<int> idx;
    const double lo = w ? w->a : g.r_max() / 10;
    const double hi = w ? w->b : g.r_max();
    for (int i = 0; i + 3 < g.size(); ++i)
        if (g[i] >= lo && g[i] <= hi) idx.push_back(i);
    if (idx.size() < 8) throw ResolutionError("decay fit window holds fewer than 8 nodes");
    return idx;
}

std::vector<double> radii_for(const RadialGrid& g, const std::optional<Region>& w) {
    auto idx = window(g, w);
    double lo = g[idx.front()], hi = g[idx.back()];
    std::vector<double> r(kRadii);
    for (int k = 0; k < kRadii; ++k) r[k] = lo * std::pow(hi / lo, double(k) / (kRadii - 1));
    return r;
}

// least-squares slope of log y against log x over the points with y > floor
double log_slope(const std::vector<double>& x, const std::vector<double>& y, double floor, int* used = nullptr) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > floor)) continue;
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
        ++m;
    }
    if (used) *used = m;
    if (m < 3) return -std::numeric_limits<double>::infinity();
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double sigma_tau(const WarpedMetric& g, const std::optional<Region>& w) {
    auto idx = window(g.grid(), w);
    std::vector<double> r, s;
    for (int i : idx) {
        double x = g.grid()[i];
        r.push_back(x);
        s.push_back(std::max(std::abs(g.A[i] - 1), std::abs(g.B[i] / (x * x) - 1)));
    }
    return -log_slope(r, s, 1e-14);
}

MassReport finish(int n, const RadialGrid& grid, const std::vector<double>& nodal, double tau,
                  const std::optional<Region>& w) {
    if (!(tau > (n - 2) / 2.0))
        throw DomainError("not asymptotically flat: fitted decay exponent " + std::to_string(tau) + " <= (n-2)/2");
    MassReport rep;
    rep.tau_fit = tau;
    rep.radii = radii_for(grid, w);
    for (double r : rep.radii) rep.integrand.push_back(interpolate(grid, nodal, r, Parity::none));
    // fitted order from three geometric radii (diagnostic)
    const double m1 = rep.integrand[0], m2 = rep.integrand[kRadii / 2], m3 = rep.integrand.back();
    const double q = rep.radii[kRadii / 2] / rep.radii[0];
    const double d12 = m1 - m2, d23 = m2 - m3;
    const double scale = std::max({std::abs(m1), std::abs(m3), 1e-300});
    if (std::abs(d23) <= 1e-13 * scale || d12 / d23 <= 1)
        rep.convergence_order = std::numeric_limits<double>::quiet_NaN();
    else
        rep.convergence_order = std::log(d12 / d23) / std::log(q);

    // Richardson to all orders in 1/r through four radii: Neville at x = 0
    const int pick[4] = {0, 4, 8, 12};
    double x[4], P[4];
    for (int k = 0; k < 4; ++k) x[k] = 1 / rep.radii[pick[k]], P[k] = rep.integrand[pick[k]];
    for (int lev = 1; lev < 4; ++lev)
        for (int k = 0; k + lev < 4; ++k) P[k] = (x[k + lev] * P[k] - x[k] * P[k + 1]) / (x[k + lev] - x[k]);
    rep.extrapolated_mass = P[0];
    return rep;
}

}  // namespace

Region flow_mass_window(const RadialGrid& g) { return Region(g.r_max() / 10, g.r_max() / 2); }

MassReport adm_mass(const WarpedMetric& g, const std::optional<Region>& w) {
    const RadialGrid& grid = g.grid();
    // with F = B/r^2: A + B/r^2 - B'/r = A - F - r F', free of the O(1)
    // cancellation that r^{n-2} would amplify
    std::vector<double> F(grid.size());
    for (int i = 0; i < grid.size(); ++i) F[i] = g.B[i] / (grid[i] * grid[i]);
    auto F1 = d_dr(grid, F, g.B.parity);
    std::vector<double> m(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        double r = grid[i];
        m[i] = std::pow(r, g.dim - 2) / 4 * (g.A[i] - F[i] - r * F1[i]);
    }
    return finish(g.dim, grid, m, sigma_tau(g, w), w);
}

MassReport adm_mass(const ConformalMetric& g, const std::optional<Region>& w) {
    const RadialGrid& grid = g.grid();
    const int n = g.dim;
    auto u1 = d_dr(grid, g.u.values, g.u.parity);
    std::vector<double> m(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        double r = grid[i];
        // A + B/r^2 - B'/r = -r w' with w = u^{4/(n-2)}
        double w1 = 4.0 / (n - 2) * std::pow(g.u[i], (6.0 - n) / (n - 2)) * u1[i];
        m[i] = -std::pow(r, n - 1) * w1 / 4;
    }
    return finish(n, grid, m, sigma_tau(g.to_warped(), w), w);
}

AfReport verify_af_decay(const WarpedMetric& g, double tau_expected, double q_expected) {
    const RadialGrid& grid = g.grid();
    const int n = g.dim;
    auto idx = window(grid);
    std::vector<double> F(grid.size());
    for (int i = 0; i < grid.size(); ++i) F[i] = g.B[i] / (grid[i] * grid[i]);
    Jets JA = jets(g.A), JF = jets(grid, F, Parity::none);
    auto S = scalar_curvature_warped(g);
    std::vector<double> r, s0, s1, s2, sS;
    double smax = 0;
    for (int i : idx) {
        r.push_back(grid[i]);
        s0.push_back(std::max(std::abs(g.A[i] - 1), std::abs(F[i] - 1)));
        s1.push_back(std::max(std::abs(JA.d1[i]), std::abs(JF.d1[i])));
        s2.push_back(std::max(std::abs(JA.d2[i]), std::abs(JF.d2[i])));
        sS.push_back(std::abs(S[i]));
        smax = std::max(smax, std::abs(S[i]));
    }
    AfReport rep;
    rep.tau_expected = tau_expected;
    rep.q_expected = q_expected;
    rep.tau_fit = -log_slope(r, s0, 1e-14);
    rep.tau1_fit = -log_slope(r, s1, 1e-12) - 1;
    rep.tau2_fit = -log_slope(r, s2, 1e-10) - 2;
    rep.tau_ok = rep.tau_fit > (n - 2) / 2.0;
    rep.derivatives_ok = rep.tau1_fit >= rep.tau_fit - 0.25 && rep.tau2_fit >= rep.tau_fit - 0.25;
    // S is a difference of second derivatives; treat it as zero below FD noise
    double noise = 1e-8;
    rep.q_vacuous = smax <= noise;
    rep.q_fit = rep.q_vacuous ? std::numeric_limits<double>::infinity() : -log_slope(r, sS, noise);
    rep.q_ok = rep.q_vacuous || rep.q_fit > n;
    bool ok = rep.tau_ok && rep.derivatives_ok && rep.q_ok;
    rep.verdict = ok ? "asymptotically flat" : "not asymptotically flat";
    return rep;
}

DriftSeries mass_drift(const FlowTrace& trace) {
    DriftSeries d;
    for (const auto& s : trace.states) {
        d.t.push_back(s.t);
        d.mass.push_back(adm_mass(s.g, flow_mass_window(s.g.grid())).extrapolated_mass);
    }
    if (d.mass.empty()) return d;
    const double m0 = d.mass.front();
    for (double m : d.mass) {
        double drift = m0 != 0 ? std::abs(m - m0) / std::abs(m0) : std::abs(m - m0);
        d.max_relative_drift = std::max(d.max_relative_drift, drift);
    }
    return d;
}

DecaySeries monitor_scalar_decay(const FlowTrace& trace, double q) {
    DecaySeries d;
    d.q = q;
    for (const auto& s : trace.states) {
        const RadialGrid& grid = s.g.grid();
        auto S = scalar_curvature_warped(s.g);
        double v = 0;
        for (int i : window(grid, flow_mass_window(grid))) v = std::max(v, std::pow(1 + grid[i], q) * std::abs(S[i]));
        d.t.push_back(s.t);
        d.value.push_back(v);
    }
    if (d.value.empty()) return d;
    double sup = *std::max_element(d.value.begin(), d.value.end());
    double v0 = d.value.front();
    d.ratio_to_initial = v0 > 0 ? sup / v0 : (sup > 0 ? std::numeric_limits<double>::infinity() : 1.0);
    d.bounded = std::isfinite(sup) && d.ratio_to_initial <= 4;
    return d;
}

}  // namespace radial
