#pragma once

#include "radial/metric.hpp"

namespace radial {

// Values and first two r-derivatives of the two metric coefficients at a
// point.  All closed-form reductions below act on these.
struct MetricJet {
    double A, A1, A2, B, B1, B2;
};

struct PointCurvature {
    double gamma_r_rr;  // Gamma^r_rr
    double gamma_r_ss;  // Gamma^r_ab = gamma_r_ss * h0_ab
    double gamma_s_rs;  // Gamma^a_rb = gamma_s_rs * delta^a_b
    double K_radial;    // sectional curvature of planes containing d_r
    double K_tangent;   // sectional curvature of planes tangent to the spheres
    double ric_rr, ric_s, scalar;
    double rm_norm2;    // |Rm|^2
    double ric_norm2;   // |Ric|^2
};

PointCurvature curvature_at(int n, double fiber_k, const MetricJet& j);

std::vector<MetricJet> metric_jets(const WarpedMetric& g);
// Jets of raw coefficient arrays; on a tip grid with even parity B is
// differentiated through B / r^2.
std::vector<MetricJet> metric_jets(const RadialGrid& grid, const std::vector<double>& A, const std::vector<double>& B,
                                  Parity p);

struct CurvatureAssembly {
    RadialProfile gamma_r_rr, gamma_r_ss, gamma_s_rs;
    // The curvature operator is diagonal in the radial/tangential split, so
    // these two sectional curvatures fix every Riemann component:
    // R_rarb = K_radial A B h0_ab, R_abcd = K_tangent B^2 (h0_ac h0_bd - h0_ad h0_bc).
    RadialProfile K_radial, K_tangent;
    SymTensor2Radial ricci;
    RadialProfile scalar;
    RadialProfile rm_norm2, ric_norm2;
};

CurvatureAssembly curvature_assembly(const WarpedMetric& g);
RadialProfile scalar_curvature_warped(const WarpedMetric& g);
RadialProfile scalar_curvature_conformal(const ConformalMetric& g);

// Mean curvature of {r} x S^{n-1} for the unit normal along +d_r.
double mean_curvature_sphere(const WarpedMetric& g, double r);

// div div h - Laplacian tr h - <h, Ric>.
RadialProfile linearized_scalar(const WarpedMetric& g, const SymTensor2Radial& h);
SymTensor2Radial traceless_ricci(const WarpedMetric& g);

// Laplace-Beltrami of a radial function.
RadialProfile laplacian(const WarpedMetric& g, const RadialProfile& f);

double volume(const WarpedMetric& g, const Region& reg);
double volume(const ConformalMetric& g, const Region& reg);

// Integral of f dv_g over a region.
double integrate_dv(const WarpedMetric& g, const std::vector<double>& f, const Region& reg);

struct SobolevNorms {
    double lp;
    double w1p;  // seminorm: L^p norm of |nabla f|_g
};

SobolevNorms sobolev_norms(const RadialProfile& f, const WarpedMetric& g, double p, const Region& reg);
SobolevNorms sobolev_norms(const SymTensor2Radial& f, const WarpedMetric& g, double p, const Region& reg);

// |nabla T|^2_h and |nabla nabla T|^2_h for T = P dr^2 + Q h0, derivatives
// taken with the Levi-Civita connection of h = a dr^2 + b h0.
struct TensorJet {
    double P, P1, P2, Q, Q1, Q2;
};
double tensor_grad_norm2(int n, const MetricJet& h, const TensorJet& T);
double tensor_hess_norm2(int n, const MetricJet& h, const TensorJet& T);

}  // namespace radial
