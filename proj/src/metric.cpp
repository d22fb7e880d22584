#include "radial/metric.hpp"

#include <cmath>
#include <string>

#include "radial/errors.hpp"

namespace radial {

double sphere_area(int n) {
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

void require_same_grid(const RadialGrid& a, const RadialGrid& b, const char* what) {
    if (!a.same_as(b)) throw ContractError(std::string(what) + ": profiles live on different grids");
}

WarpedMetric::WarpedMetric(int n, RadialProfile A_, RadialProfile B_, bool tip_regular_, double k)
    : dim(n), A(std::move(A_)), B(std::move(B_)), tip_regular(tip_regular_), fiber_k(k) {
    if (n < 3) throw DomainError("warped metric needs dimension n >= 3");
    require_same_grid(A.grid, B.grid, "warped metric");
    for (int i = 0; i < A.size(); ++i) {
        if (!(A[i] > 0) || !(B[i] > 0))
            throw DomainError("warped metric not positive at node " + std::to_string(i) +
                              " (r = " + std::to_string(A.grid[i]) + ")");
    }
    if (tip_regular) {
        const RadialGrid& g = A.grid;
        if (!g.tip()) throw DomainError("tip_regular metric needs a grid starting at r = 0");
        double r0 = g[0];
        double ratio = B[0] / (A[0] * r0 * r0);
        if (std::abs(ratio - 1) > 0.05)
            throw DomainError("tip_regular metric has cone angle defect: B/(A r^2) = " + std::to_string(ratio));
        A.parity = Parity::even;
        B.parity = Parity::even;
    }
}

WarpedMetric WarpedMetric::euclidean(int n, const RadialGrid& g) {
    return warped(n, g, [](double r) { return r; }, g.tip());
}

ConformalMetric::ConformalMetric(int n, RadialProfile u_) : dim(n), u(std::move(u_)) {
    if (n < 3) throw DomainError("conformal metric needs dimension n >= 3");
    for (int i = 0; i < u.size(); ++i)
        if (!(u[i] > 0)) throw DomainError("conformal factor not positive at node " + std::to_string(i));
}

WarpedMetric ConformalMetric::to_warped() const {
    const RadialGrid& g = u.grid;
    const double w = 4.0 / (dim - 2);
    std::vector<double> A(g.size()), B(g.size());
    for (int i = 0; i < g.size(); ++i) {
        A[i] = std::pow(u[i], w);
        B[i] = A[i] * g[i] * g[i];
    }
    bool tip = g.tip() && u.parity == Parity::even;
    return WarpedMetric(dim, RadialProfile(g, std::move(A), Parity::even),
                        RadialProfile(g, std::move(B), Parity::even), tip);
}

SymTensor2Radial::SymTensor2Radial(int n, RadialProfile rr, RadialProfile s)
    : dim(n), T_rr(std::move(rr)), T_s(std::move(s)) {
    require_same_grid(T_rr.grid, T_s.grid, "tensor");
}

RadialProfile SymTensor2Radial::trace(const WarpedMetric& g) const {
    require_same_grid(T_rr.grid, g.grid(), "trace");
    std::vector<double> t(g.size());
    for (int i = 0; i < g.size(); ++i) t[i] = T_rr[i] / g.A[i] + (dim - 1) * T_s[i] / g.B[i];
    return RadialProfile(g.grid(), std::move(t), Parity::even);
}

}  // namespace radial

namespace radial {

WarpedMetric resample(const WarpedMetric& g, const RadialGrid& grid) {
    const RadialGrid& src = g.grid();
    const double slack = 1e-12 * std::max(1.0, src.r_max());
    if (grid.r_min() < src.r_min() - slack || grid.r_max() > src.r_max() + slack)
        throw DomainError("resample: target grid leaves the source range");
    if (grid.tip() != src.tip()) throw DomainError("resample: tip and non-tip grids do not mix");
    auto A = RadialProfile::from(grid, [&](double r) { return interpolate(src, g.A.values, r, g.A.parity); },
                                 g.A.parity);
    auto B = RadialProfile::from(grid, [&](double r) { return interpolate(src, g.B.values, r, g.B.parity); },
                                 g.B.parity);
    return WarpedMetric(g.dim, std::move(A), std::move(B), g.tip_regular, g.fiber_k);
}

}  // namespace radial
