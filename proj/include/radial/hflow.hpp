#pragma once

#include <string>
#include <vector>

#include "radial/metric.hpp"

namespace radial {

struct FlowConfig {
    double T = 0.1;
    double cfl = 0.2;  // dt <= cfl * dr_min^2 * min A
    double p = 0;      // Sobolev exponent; 0 selects 2n
    double sigma = 0;  // scalar lower bound in J = int (S - sigma)_- dv
    double closeness_eps = 0.5;
    double tol = 1e-7;  // local error tolerance of the embedded RK pair
    // output schedule t_k = T * first^{1 - k/(outputs-1)}, k = 0..outputs-1,
    // plus t = 0; replaced by output_times when that is not empty
    int outputs = 16;
    double first_output = 1e-3;
    std::vector<double> output_times;
    int collar = 3;  // frozen nodes at each end without parity ghosts
    bool asymptotically_flat = false;
    double q = 0;  // weight of sup (1 + r)^q |S|; 0 selects n + 1
    int max_steps = 200000;

    double p_eff(int n) const { return p > 0 ? p : 2.0 * n; }
    double delta(int n) const { return n / p_eff(n); }
    void validate(int n) const;
};

struct FlowState {
    double t;
    WarpedMetric g;
    WarpedMetric h;
    RadialProfile W;    // radial DeTurck component
    RadialProfile Phi;  // Phi_t(r); identity until integrate_diffeo fills it
};

struct MonitorSample {
    double t;
    double J;           // int (S - sigma)_- dv
    double min_S;
    double grad2;       // sup |h-grad g|_h^2 off the collar
    double hess2;       // sup |h-hess g|_h^2 off the collar
    double W_h;         // sup |W|_h
    double closeness;   // max over nodes and eigenvalues of max(g/h, h/g)
    double mass;        // NaN unless asymptotically flat
    double sup_dq_S;    // sup (1 + r)^q |S|
};

struct FlowTrace {
    FlowConfig cfg;
    std::vector<FlowState> states;  // at output times, t = 0 first
    std::vector<MonitorSample> monitors;
    // W at the start of every accepted step and at T, for the diffeomorphism ODE
    std::vector<double> w_times;
    std::vector<std::vector<double>> w_values;
    int steps = 0, rejected = 0;
    double min_eig_ratio = 1;  // min over the run of g/h eigenvalue ratios
    bool truncated = false;
    std::string diagnostic;
};

// Right side of the h-flow, dg/dt, in (rr, sphere) components.
SymTensor2Radial hflow_rhs(const WarpedMetric& g, const WarpedMetric& h);

// The three groups separately (background Laplacian, curvature
// contractions, first-derivative quadratic terms).
struct HFlowTerms {
    SymTensor2Radial lap, curv, quad;
};
HFlowTerms hflow_terms(const WarpedMetric& g, const WarpedMetric& h);

// W^r = g^{pq} (Gamma(g) - Gamma(h))^r_{pq}
RadialProfile deturck_field(const WarpedMetric& g, const WarpedMetric& h);

double max_stable_dt(const WarpedMetric& g, double cfl);

// One Dormand-Prince step of size dt (no adaptivity).  Refuses dt above the
// CFL cap; FlowBreakdown names the node where A or B stopped being positive.
FlowState step_flow(const FlowState& s, double dt, const FlowConfig& cfg);

FlowTrace run_hflow(const WarpedMetric& g0, const WarpedMetric& h, const FlowConfig& cfg);

// dPhi/dt = -W(Phi, t), Phi_0 = id, by RK4 with `substeps` steps per
// recorded interval; W is interpolated in time by cubics through the record.
// Returns Phi at every output state.
std::vector<RadialProfile> integrate_diffeo(const FlowTrace& trace, int substeps = 4);
// The same flow carried as the displacement D = Phi - r, which keeps full
// relative precision when Phi is close to the identity.
std::vector<RadialProfile> integrate_displacement(const FlowTrace& trace, int substeps = 4);

// Phi^* g = A(Phi) Phi'^2 dr^2 + B(Phi) h0
WarpedMetric pullback_metric(const WarpedMetric& g, const RadialProfile& Phi);
WarpedMetric pullback_displacement(const WarpedMetric& g, const RadialProfile& D);

struct EstimateReport {
    double delta;
    std::vector<double> t, grad_scaled, hess_scaled, W_scaled, J;
    double sup_grad_scaled = 0, sup_hess_scaled = 0, sup_W_scaled = 0;
    // minimal C >= 0 making exp(-C t^{(1-delta)/2}) J(t) nonincreasing
    double C_hat = 0;
    bool J_monotone = true;
    std::string verdict;
};

EstimateReport monitor_estimates(const FlowTrace& trace, const FlowConfig& cfg);

}  // namespace radial
