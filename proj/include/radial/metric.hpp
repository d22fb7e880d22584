#pragma once

#include "radial/grid.hpp"

namespace radial {

// Area of the unit sphere S^{n-1} in R^n.
double sphere_area(int n);

// A(r) dr^2 + B(r) h0 with h0 the unit round metric (fiber_k = 1) or a flat
// metric on the fiber (fiber_k = 0, used for the torus reductions).
struct WarpedMetric {
    int dim;
    RadialProfile A;
    RadialProfile B;
    bool tip_regular = false;
    double fiber_k = 1.0;

    WarpedMetric(int n, RadialProfile A_, RadialProfile B_, bool tip_regular_ = false, double k = 1.0);

    const RadialGrid& grid() const { return A.grid; }
    int size() const { return A.size(); }

    // dr^2 + phi(r)^2 h0; the profile phi is sampled at the nodes.
    template <class F>
    static WarpedMetric warped(int n, const RadialGrid& g, F&& phi, bool tip_regular = false) {
        auto A = RadialProfile::from(g, [](double) { return 1.0; }, Parity::even);
        auto B = RadialProfile::from(g, [&](double r) { double f = phi(r); return f * f; }, Parity::even);
        return WarpedMetric(n, std::move(A), std::move(B), tip_regular);
    }
    static WarpedMetric euclidean(int n, const RadialGrid& g);
};

// u^{4/(n-2)} g_e with u radial.
struct ConformalMetric {
    int dim;
    RadialProfile u;

    ConformalMetric(int n, RadialProfile u_);

    const RadialGrid& grid() const { return u.grid; }
    double a() const { return 4.0 * (dim - 1) / (dim - 2); }
    double p() const { return 2.0 * dim / (dim - 2); }
    WarpedMetric to_warped() const;
};

// Symmetric 2-tensor T_rr dr^2 + T_s h0 invariant under SO(n).
struct SymTensor2Radial {
    int dim;
    RadialProfile T_rr;
    RadialProfile T_s;

    SymTensor2Radial(int n, RadialProfile rr, RadialProfile s);
    RadialProfile trace(const WarpedMetric& g) const;
    static SymTensor2Radial of_metric(const WarpedMetric& g) { return {g.dim, g.A, g.B}; }
};

void require_same_grid(const RadialGrid& a, const RadialGrid& b, const char* what);

// A and B interpolated onto another grid inside the same range.
WarpedMetric resample(const WarpedMetric& g, const RadialGrid& grid);

}  // namespace radial
