#pragma once

#include <optional>
#include <string>
#include <vector>

#include "radial/hflow.hpp"
#include "radial/metric.hpp"

namespace radial {

struct MassReport {
    std::vector<double> radii;      // geometric, over the outermost decade
    std::vector<double> integrand;  // flux integral at each radius, normalized
    double extrapolated_mass = 0;
    double convergence_order = 0;  // fitted exponent k of m(r) - m ~ r^-k (NaN when m(r) is constant)
    double tau_fit = 0;            // decay exponent of g - delta over the same radii
};

// The flux integral over a coordinate sphere reduces, for A dr^2 + B h0 in a
// radius where g -> delta, to
//   m(r) = r^{n-2}/4 * (A + B/r^2 - B'/r).
// Polynomial extrapolation to 1/r = 0 through four radii of the outer decade
// gives the limit (exact when m(r) is a cubic in 1/r, as for u = 1 + A/r in
// three dimensions).  Throws
// DomainError when the fitted decay exponent is <= (n-2)/2.
// window: radii used for the fit, by default [r_max/10, r_max].
MassReport adm_mass(const WarpedMetric& g, const std::optional<Region>& window = std::nullopt);
MassReport adm_mass(const ConformalMetric& g, const std::optional<Region>& window = std::nullopt);

// Window for traces: [r_max/10, r_max/2] keeps the fit away from the
// boundary layer of the frozen outer collar.
Region flow_mass_window(const RadialGrid& g);

struct AfReport {
    double tau_fit = 0, tau1_fit = 0, tau2_fit = 0;  // sigma, d sigma, d^2 sigma (shifted by 1, 2)
    double q_fit = 0;
    bool tau_ok = false;          // tau > (n-2)/2
    bool derivatives_ok = false;  // derivative exponents keep up with tau
    bool q_vacuous = false;       // S vanishes on the window
    bool q_ok = false;            // q > n (or vacuous)
    double tau_expected = 0, q_expected = 0;
    std::string verdict;
};

AfReport verify_af_decay(const WarpedMetric& g, double tau_expected, double q_expected);

struct DriftSeries {
    std::vector<double> t, mass;
    double max_relative_drift = 0;
};
DriftSeries mass_drift(const FlowTrace& trace);

struct DecaySeries {
    double q;
    std::vector<double> t, value;  // sup over the outer region of (1 + r)^q |S|
    double ratio_to_initial = 0;   // sup_t value / value(0)
    bool bounded = true;
};
DecaySeries monitor_scalar_decay(const FlowTrace& trace, double q);

}  // namespace radial
