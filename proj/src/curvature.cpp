#include "radial/curvature.hpp"

#include <cmath>
#include <string>

#include "radial/errors.hpp"

namespace radial {

PointCurvature curvature_at(int n, double k, const MetricJet& j) {
    const double A = j.A, B = j.B;
    if (!(A > 0) || !(B > 0)) throw DomainError("curvature of a degenerate metric");
    PointCurvature c{};
    c.gamma_r_rr = j.A1 / (2 * A);
    c.gamma_r_ss = -j.B1 / (2 * A);
    c.gamma_s_rs = j.B1 / (2 * B);
    // phi = sqrt(B), s = arclength: phi_s^2 and phi * phi_ss
    const double phis2 = j.B1 * j.B1 / (4 * A * B);
    const double phiphiss = j.B2 / (2 * A) - phis2 - j.A1 * j.B1 / (4 * A * A);
    c.K_radial = -phiphiss / B;
    c.K_tangent = (k - phis2) / B;
    c.ric_rr = (n - 1) * A * c.K_radial;
    c.ric_s = B * (c.K_radial + (n - 2) * c.K_tangent);
    c.scalar = 2.0 * (n - 1) * c.K_radial + double(n - 1) * (n - 2) * c.K_tangent;
    c.rm_norm2 = 4.0 * (n - 1) * c.K_radial * c.K_radial + 2.0 * (n - 1) * (n - 2) * c.K_tangent * c.K_tangent;
    const double rr = c.ric_rr / A, ss = c.ric_s / B;
    c.ric_norm2 = rr * rr + (n - 1) * ss * ss;
    return c;
}

std::vector<MetricJet> metric_jets(const RadialGrid& grid, const std::vector<double>& A, const std::vector<double>& B,
                                  Parity p) {
    const int N = grid.size();
    Jets a = jets(grid, A, p);
    std::vector<MetricJet> out(N);
    if (grid.tip() && p == Parity::even) {
        // B = r^2 q with q even and regular; the chain rule keeps the
        // cancellations in B'' - B'^2/(2B) exact instead of leaving FD noise
        // divided by r^2
        std::vector<double> q(N);
        for (int i = 0; i < N; ++i) q[i] = B[i] / (grid[i] * grid[i]);
        Jets qj = jets(grid, q, Parity::even);
        for (int i = 0; i < N; ++i) {
            const double r = grid[i];
            out[i] = {a.v[i], a.d1[i], a.d2[i], B[i], 2 * r * q[i] + r * r * qj.d1[i],
                      2 * q[i] + 4 * r * qj.d1[i] + r * r * qj.d2[i]};
        }
        return out;
    }
    Jets b = jets(grid, B, p);
    for (int i = 0; i < N; ++i) out[i] = {a.v[i], a.d1[i], a.d2[i], b.v[i], b.d1[i], b.d2[i]};
    return out;
}

std::vector<MetricJet> metric_jets(const WarpedMetric& g) {
    if (g.A.parity == g.B.parity) return metric_jets(g.grid(), g.A.values, g.B.values, g.A.parity);
    Jets a = jets(g.A), b = jets(g.B);
    std::vector<MetricJet> out(g.size());
    for (int i = 0; i < g.size(); ++i) out[i] = {a.v[i], a.d1[i], a.d2[i], b.v[i], b.d1[i], b.d2[i]};
    return out;
}

CurvatureAssembly curvature_assembly(const WarpedMetric& g) {
    const RadialGrid& G = g.grid();
    const int N = g.size();
    auto js = metric_jets(g);
    std::vector<double> grr(N), grs(N), gsr(N), kr(N), kt(N), rrr(N), rs(N), s(N), rm(N), rc(N);
    for (int i = 0; i < N; ++i) {
        PointCurvature c = curvature_at(g.dim, g.fiber_k, js[i]);
        grr[i] = c.gamma_r_rr;
        grs[i] = c.gamma_r_ss;
        gsr[i] = c.gamma_s_rs;
        kr[i] = c.K_radial;
        kt[i] = c.K_tangent;
        rrr[i] = c.ric_rr;
        rs[i] = c.ric_s;
        s[i] = c.scalar;
        rm[i] = c.rm_norm2;
        rc[i] = c.ric_norm2;
    }
    auto prof = [&](std::vector<double>& v, Parity p) { return RadialProfile(G, std::move(v), p); };
    return CurvatureAssembly{prof(grr, Parity::odd),
                             prof(grs, Parity::odd),
                             prof(gsr, Parity::odd),
                             prof(kr, Parity::even),
                             prof(kt, Parity::even),
                             SymTensor2Radial(g.dim, prof(rrr, Parity::even), prof(rs, Parity::even)),
                             prof(s, Parity::even),
                             prof(rm, Parity::even),
                             prof(rc, Parity::even)};
}

RadialProfile scalar_curvature_warped(const WarpedMetric& g) {
    auto js = metric_jets(g);
    std::vector<double> s(g.size());
    for (int i = 0; i < g.size(); ++i) s[i] = curvature_at(g.dim, g.fiber_k, js[i]).scalar;
    return RadialProfile(g.grid(), std::move(s), Parity::even);
}

RadialProfile laplacian(const WarpedMetric& g, const RadialProfile& f) {
    require_same_grid(g.grid(), f.grid, "laplacian");
    auto js = metric_jets(g);
    Jets fj = jets(f);
    const double m = g.dim - 1;
    std::vector<double> out(g.size());
    for (int i = 0; i < g.size(); ++i) {
        const auto& j = js[i];
        out[i] = fj.d2[i] / j.A + fj.d1[i] * (-j.A1 / (2 * j.A * j.A) + m * j.B1 / (2 * j.A * j.B));
    }
    return RadialProfile(g.grid(), std::move(out), f.parity);
}

RadialProfile scalar_curvature_conformal(const ConformalMetric& g) {
    const int n = g.dim;
    Jets u = jets(g.u);
    const RadialGrid& G = g.grid();
    const double e = double(n + 2) / (n - 2);
    std::vector<double> s(G.size());
    for (int i = 0; i < G.size(); ++i) {
        double lap = u.d2[i] + (n - 1) * u.d1[i] / G[i];
        s[i] = -g.a() * std::pow(u.v[i], -e) * lap;
    }
    return RadialProfile(G, std::move(s), Parity::even);
}

double mean_curvature_sphere(const WarpedMetric& g, double r) {
    const RadialGrid& G = g.grid();
    if (!(r > G.r_min()) || !(r < G.r_max()))
        throw DomainError("mean curvature requested at r = " + std::to_string(r) + " outside the grid");
    std::vector<double> b1 = d_dr(G, g.B.values, g.B.parity);
    double B = interpolate(G, g.B.values, r, Parity::even);
    double B1 = interpolate(G, b1, r, Parity::odd);
    double A = interpolate(G, g.A.values, r, Parity::even);
    return (g.dim - 1) * B1 / (2 * B * std::sqrt(A));
}

RadialProfile linearized_scalar(const WarpedMetric& g, const SymTensor2Radial& h) {
    require_same_grid(g.grid(), h.T_rr.grid, "linearized scalar");
    const int n = g.dim, N = g.size();
    const double m = 0.5 * (n - 1);
    const RadialGrid& G = g.grid();
    auto gj = metric_jets(g);
    Jets H = jets(h.T_rr), Hs = jets(h.T_s);
    std::vector<double> q(N), t(N);
    for (int i = 0; i < N; ++i) {
        const MetricJet& j = gj[i];
        // radial component of div h
        double V = H.d1[i] / j.A - j.A1 * H.v[i] / (j.A * j.A) + (n - 1) * j.B1 * H.v[i] / (2 * j.A * j.B) -
                   (n - 1) * j.B1 * Hs.v[i] / (2 * j.B * j.B);
        q[i] = V / j.A;
        t[i] = H.v[i] / j.A + (n - 1) * Hs.v[i] / j.B;
    }
    Jets Q = jets(G, q, Parity::odd), Tr = jets(G, t, Parity::even);
    std::vector<double> out(N);
    for (int i = 0; i < N; ++i) {
        const MetricJet& j = gj[i];
        double logvol = j.A1 / (2 * j.A) + m * j.B1 / j.B;
        double divdiv = Q.d1[i] + Q.v[i] * logvol;
        double lap = (Tr.d2[i] + Tr.d1[i] * (m * j.B1 / j.B - j.A1 / (2 * j.A))) / j.A;
        PointCurvature c = curvature_at(n, g.fiber_k, j);
        double inner = H.v[i] * c.ric_rr / (j.A * j.A) + (n - 1) * Hs.v[i] * c.ric_s / (j.B * j.B);
        out[i] = divdiv - lap - inner;
    }
    return RadialProfile(G, std::move(out), Parity::even);
}

SymTensor2Radial traceless_ricci(const WarpedMetric& g) {
    const int N = g.size();
    auto js = metric_jets(g);
    std::vector<double> rr(N), s(N);
    for (int i = 0; i < N; ++i) {
        PointCurvature c = curvature_at(g.dim, g.fiber_k, js[i]);
        rr[i] = c.ric_rr - c.scalar / g.dim * js[i].A;
        s[i] = c.ric_s - c.scalar / g.dim * js[i].B;
    }
    return SymTensor2Radial(g.dim, RadialProfile(g.grid(), std::move(rr), Parity::even),
                            RadialProfile(g.grid(), std::move(s), Parity::even));
}

double integrate_dv(const WarpedMetric& g, const std::vector<double>& f, const Region& reg) {
    const int N = g.size();
    const double m = 0.5 * (g.dim - 1);
    std::vector<double> w(N);
    for (int i = 0; i < N; ++i) w[i] = f[i] * std::sqrt(g.A[i]) * std::pow(g.B[i], m);
    return sphere_area(g.dim) * integrate(g.grid(), w, reg);
}

double volume(const WarpedMetric& g, const Region& reg) {
    return integrate_dv(g, std::vector<double>(g.size(), 1.0), reg);
}

double volume(const ConformalMetric& g, const Region& reg) { return volume(g.to_warped(), reg); }

namespace {

SobolevNorms norms_from(const WarpedMetric& g, const std::vector<double>& mag, const std::vector<double>& grad,
                        double p, const Region& reg) {
    const int N = g.size();
    std::vector<double> a(N), b(N);
    for (int i = 0; i < N; ++i) {
        a[i] = std::pow(std::abs(mag[i]), p);
        b[i] = std::pow(std::abs(grad[i]), p);
    }
    return {std::pow(integrate_dv(g, a, reg), 1 / p), std::pow(integrate_dv(g, b, reg), 1 / p)};
}

}  // namespace

SobolevNorms sobolev_norms(const RadialProfile& f, const WarpedMetric& g, double p, const Region& reg) {
    if (!(p >= 1)) throw PreconditionError("Sobolev exponent must be >= 1");
    require_same_grid(f.grid, g.grid(), "sobolev norms");
    std::vector<double> df = d_dr(f.grid, f.values, f.parity), grad(g.size());
    for (int i = 0; i < g.size(); ++i) grad[i] = df[i] / std::sqrt(g.A[i]);
    return norms_from(g, f.values, grad, p, reg);
}

SobolevNorms sobolev_norms(const SymTensor2Radial& f, const WarpedMetric& g, double p, const Region& reg) {
    if (!(p >= 1)) throw PreconditionError("Sobolev exponent must be >= 1");
    require_same_grid(f.T_rr.grid, g.grid(), "sobolev norms");
    auto gj = metric_jets(g);
    Jets P = jets(f.T_rr), Q = jets(f.T_s);
    std::vector<double> mag(g.size()), grad(g.size());
    for (int i = 0; i < g.size(); ++i) {
        double rr = P.v[i] / gj[i].A, ss = Q.v[i] / gj[i].B;
        mag[i] = std::sqrt(rr * rr + (g.dim - 1) * ss * ss);
        grad[i] = std::sqrt(tensor_grad_norm2(g.dim, gj[i], {P.v[i], P.d1[i], P.d2[i], Q.v[i], Q.d1[i], Q.d2[i]}));
    }
    return norms_from(g, mag, grad, p, reg);
}

double tensor_grad_norm2(int n, const MetricJet& h, const TensorJet& T) {
    const double a = h.A, b = h.B, m = n - 1;
    const double al = h.A1 / (2 * a), ga = h.B1 / (2 * a), mu = h.B1 / (2 * b);
    const double d1 = T.P1 - 2 * al * T.P, d2 = T.Q1 - 2 * mu * T.Q, d3 = ga * T.P - mu * T.Q;
    return d1 * d1 / (a * a * a) + m / (a * b * b) * (d2 * d2 + 2 * d3 * d3);
}

double tensor_hess_norm2(int n, const MetricJet& h, const TensorJet& T) {
    const double a = h.A, b = h.B, m = n - 1;
    const double al = h.A1 / (2 * a), ga = h.B1 / (2 * a), mu = h.B1 / (2 * b);
    const double al1 = h.A2 / (2 * a) - h.A1 * h.A1 / (2 * a * a);
    const double ga1 = h.B2 / (2 * a) - h.B1 * h.A1 / (2 * a * a);
    const double mu1 = h.B2 / (2 * b) - h.B1 * h.B1 / (2 * b * b);
    const double d1 = T.P1 - 2 * al * T.P, d2 = T.Q1 - 2 * mu * T.Q, d3 = ga * T.P - mu * T.Q;
    const double d1r = T.P2 - 2 * al1 * T.P - 2 * al * T.P1;
    const double d2r = T.Q2 - 2 * mu1 * T.Q - 2 * mu * T.Q1;
    const double d3r = ga1 * T.P + ga * T.P1 - mu1 * T.Q - mu * T.Q1;
    // components of nabla nabla T by index pattern (r r r r), (r r a b),
    // (r a r b), (a r r b), (a b r r); the all-tangential block is built
    // from gamma, d2 and d3 alone.
    const double e1 = d1r - 3 * al * d1;
    const double e2 = d2r - al * d2 - 2 * mu * d2;
    const double e3 = d3r - al * d3 - 2 * mu * d3;
    const double e4 = ga * d1 - mu * d3 - mu * d2;
    const double e5 = ga * d1 - 2 * mu * d3;
    return e1 * e1 / (a * a * a * a) + m / (a * a * b * b) * (e2 * e2 + 2 * e3 * e3 + 2 * e4 * e4 + e5 * e5) +
           ga * ga / (b * b * b * b) * (m * m * d2 * d2 + 4 * m * d2 * d3 + 2 * m * (m + 1) * d3 * d3);
}

}  // namespace radial
