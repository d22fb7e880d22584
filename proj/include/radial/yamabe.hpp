#pragma once

#include <string>
#include <vector>

#include "radial/errors.hpp"

namespace radial {

// Samples at x_i = i L / N on a circle of length L; N odd, so the
// trigonometric interpolant has no Nyquist mode.
struct PeriodicProfile {
    double L;
    std::vector<double> values;

    PeriodicProfile(double L_, std::vector<double> v);
    template <class F>
    static PeriodicProfile from(double L, int N, F&& f) {
        std::vector<double> v(N);
        for (int i = 0; i < N; ++i) v[i] = f(i * L / N);
        return PeriodicProfile(L, std::move(v));
    }

    int size() const { return static_cast<int>(values.size()); }
    double h() const { return L / size(); }
    double x(int i) const { return i * h(); }
    double operator[](int i) const { return values[i]; }
    bool same_grid(const PeriodicProfile& o) const { return L == o.L && size() == o.size(); }
};

struct PeriodicJets {
    std::vector<double> v, d1, d2;
};

// Trigonometric-interpolant derivatives.
PeriodicJets spectral_jets(const PeriodicProfile& f);

// A(x) dx^2 + sum_k B_k(x) dy_k^2 on T^n = S^1_L x (S^1_l)^{n-1}, l the
// fiber length.  With every B_k equal this is the warped form, which is
// conformal to a flat torus (X = int sqrt(A/B) dx); distinct B_k give
// classes with negative Yamabe constant.
struct TorusMetric {
    int dim;
    PeriodicProfile A;
    std::vector<PeriodicProfile> B;
    double fiber_length = 1;

    TorusMetric(int n, PeriodicProfile A_, const PeriodicProfile& B_, double fiber = 1);
    TorusMetric(int n, PeriodicProfile A_, std::vector<PeriodicProfile> B_, double fiber = 1);
    static TorusMetric flat(int n, double L, int N, double fiber = 1);

    int size() const { return A.size(); }
    double L() const { return A.L; }
    double a() const { return 4.0 * (dim - 1) / (dim - 2); }
    double p() const { return 2.0 * dim / (dim - 2); }
    // c^2 g
    TorusMetric scaled(double c) const;
};

// Diagonal tensor T_xx dx^2 + sum_k T_k dy_k^2
struct TorusTensor {
    PeriodicProfile T_xx;
    std::vector<PeriodicProfile> T_fiber;
};

struct TorusCurvature {
    TorusTensor ricci;
    std::vector<double> scalar;
};

double integrate_dv(const TorusMetric& g, const std::vector<double>& f);
double volume(const TorusMetric& g);
TorusCurvature curvature(const TorusMetric& g);
std::vector<double> scalar_curvature(const TorusMetric& g);
std::vector<double> laplacian(const TorusMetric& g, const std::vector<double>& u);
TorusTensor traceless_ricci(const TorusMetric& g);
// div div h - Laplacian tr h - <h, Ric>
std::vector<double> linearized_scalar(const TorusMetric& g, const TorusTensor& h);

struct YamabeOptions {
    double tol = 1e-8;  // sup of the Euler-Lagrange residual
    int max_iter = 5000;
};

struct YamabeSolution {
    PeriodicProfile u;
    double lambda;           // the constant in -a Lap u + S u = lambda V^{-2/n} u^{p-1}
    double yamabe_constant;  // E(u) = lambda V^{-2/n}; invariant under g -> c^2 g
    std::vector<double> functional_history;  // E(u_k) with int u_k^p dv = 1
    double normalization_residual;
    double el_residual;  // sup |-a Lap u + S u - lambda V^{-2/n} u^{p-1}|
    int iterations;
};

struct NonConvergence : std::runtime_error {
    NonConvergence(const std::string& what, double residual_) : std::runtime_error(what), residual(residual_) {}
    double residual;
};

// Minimizes E(u) = int (a |grad u|^2 + S u^2) dv over int u^p dv = 1 by
// gradient descent on the scale-invariant quotient E(u) / (int u^p)^{2/p},
// renormalizing after each Armijo step.  The gradient is taken in a shifted
// H^1 product (a Fourier multiplier), which keeps the iteration count
// independent of N.  Starts from u = V^{-1/p}.
YamabeSolution solve_yamabe(const TorusMetric& g, const YamabeOptions& opt = {});

// (int u^q dv)^{1/q}, q > p
double lq_bound_check(const YamabeSolution& sol, const TorusMetric& g, double q);

// g + tau * bump * traceless_ricci(g)
TorusMetric perturb_traceless(const TorusMetric& g, double tau, const PeriodicProfile& bump);

struct PerturbationExpansion {
    double tau;
    double volume_change;     // |V(G_tau) - V(g)|, O(tau^2) since tr h = 0
    double scalar_remainder;  // sup |S(G_tau) - S(g) - tau DS_g(h)|
};

PerturbationExpansion perturbation_expansion(const TorusMetric& g, double tau, const PeriodicProfile& bump);

}  // namespace radial
