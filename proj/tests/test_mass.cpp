#include <cmath>

#include "doctest.h"
#include "radial/curvature.hpp"
#include "radial/errors.hpp"
#include "radial/examples.hpp"
#include "radial/hflow.hpp"
#include "radial/mass.hpp"

using namespace radial;

namespace {

// c_n from tests/oracles/adm_constant.py: mass(u = 1 + A r^{2-n}) = c_n A
constexpr double kAdmConstant = 1.0;

ConformalMetric harmonic(int n, double A, const RadialGrid& grid) {
    return ConformalMetric(n, RadialProfile::from(grid, [&](double r) { return 1 + A * std::pow(r, 2.0 - n); }));
}

}  // namespace

TEST_CASE("ADM mass of flat space and harmonic factors") {
    auto tip = RadialGrid::geometric(0.0, 200.0, 800, 4.0);
    CHECK(std::abs(adm_mass(WarpedMetric::euclidean(3, tip)).extrapolated_mass) < 1e-8);
    CHECK(std::abs(adm_mass(WarpedMetric::euclidean(4, tip)).extrapolated_mass) < 1e-8);

    auto outer = RadialGrid::geometric(1.0, 400.0, 800);
    for (int n : {3, 4, 5}) {
        for (double A : {0.5, 1.0, 2.0}) {
            auto g = harmonic(n, A, outer);
            double m = adm_mass(g).extrapolated_mass;
            CHECK(m == doctest::Approx(kAdmConstant * A).epsilon(1e-2));
            // the warped route agrees with the conformal one
            CHECK(adm_mass(g.to_warped()).extrapolated_mass == doctest::Approx(m).epsilon(1e-4));
        }
    }
    // additivity in the 1/r coefficient
    const double A1 = 0.3, A2 = 0.9;
    double m1 = adm_mass(harmonic(3, A1, outer)).extrapolated_mass;
    double m2 = adm_mass(harmonic(3, A2, outer)).extrapolated_mass;
    double m12 = adm_mass(harmonic(3, A1 + A2, outer)).extrapolated_mass;
    CHECK(std::abs(m12 - (m1 + m2)) < 1e-6);
}

TEST_CASE("ADM mass reports") {
    auto outer = RadialGrid::geometric(1.0, 400.0, 800);
    auto rep = adm_mass(harmonic(3, 1.0, outer));
    CHECK(rep.radii.size() == rep.integrand.size());
    for (size_t k = 1; k < rep.radii.size(); ++k) CHECK(rep.radii[k] > rep.radii[k - 1]);
    CHECK(rep.radii.front() >= outer.r_max() / 10);
    CHECK(rep.tau_fit == doctest::Approx(1.0).epsilon(0.05));
    // m(r) - m ~ 1/r for u = 1 + A/r
    CHECK(rep.convergence_order == doctest::Approx(1.0).epsilon(0.1));

    // cone alpha = 0.5 extended to infinity: sigma does not decay
    auto cone = make_cone({3, 0.5, 1.0}, RadialGrid::geometric(0.0, 200.0, 400));
    CHECK_THROWS_AS(adm_mass(cone), DomainError);
    auto af = verify_af_decay(cone, 1.0, 4.0);
    CHECK(!af.tau_ok);
    CHECK(af.verdict == "not asymptotically flat");

    CHECK_THROWS_AS(adm_mass(WarpedMetric::euclidean(3, RadialGrid::uniform(0.0, 1.0, 12))), ResolutionError);
}

TEST_CASE("ADM mass of the positive mass cone is linear in a") {
    auto grid = RadialGrid::geometric(0.0, 300.0, 1200, 4.0);
    double sxy = 0, sxx = 0, syy = 0;
    std::vector<double> as, ms;
    for (double eps : {0.1, 0.2, 0.3}) {
        PositiveMassCone pm(eps);
        double m = adm_mass(pm.metric(grid)).extrapolated_mass;
        CHECK(m > 0);
        CHECK(m == doctest::Approx(kAdmConstant * pm.a()).epsilon(1e-2));
        sxy += pm.a() * m, sxx += pm.a() * pm.a(), syy += m * m;
        as.push_back(pm.a()), ms.push_back(m);
    }
    // fit through the origin
    double k = sxy / sxx, res = 0;
    for (size_t i = 0; i < as.size(); ++i) res += (ms[i] - k * as[i]) * (ms[i] - k * as[i]);
    CHECK(1 - res / syy > 0.999);
}

TEST_CASE("ADM mass of the zero area singularity") {
    for (double m : {0.5, 1.0}) {
        auto grid = RadialGrid::geometric(2.5 * m, 400.0 * m, 800);
        double mass = adm_mass(make_zero_area_singularity(m, grid)).extrapolated_mass;
        CHECK(mass < 0);
        CHECK(mass == doctest::Approx(-2 * kAdmConstant * m).epsilon(1e-2));
    }
}

TEST_CASE("asymptotic flatness reports") {
    auto outer = RadialGrid::geometric(1.0, 400.0, 800);
    auto af = verify_af_decay(harmonic(3, 1.0, outer).to_warped(), 1.0, 4.0);
    CHECK(af.tau_fit == doctest::Approx(1.0).epsilon(0.05));
    CHECK(af.tau_ok);
    CHECK(af.derivatives_ok);
    CHECK(af.q_vacuous);
    CHECK(af.verdict == "asymptotically flat");

    // glued Schwarzschild is Euclidean beyond r1
    auto grid = RadialGrid::geometric(2.2, 200.0, 1200);
    auto gs = make_glued_schwarzschild(1.0, 3.0, 6.0, grid, GluedSchwarzschild::Normalization::amplitude).to_warped();
    auto S = scalar_curvature_warped(gs);
    for (int i = 0; i < grid.size(); ++i)
        if (grid[i] > 6.0) CHECK(std::abs(S[i]) < 1e-8);
    auto afs = verify_af_decay(gs, 1.0, 4.0);
    CHECK(afs.tau_ok);
    CHECK(afs.q_vacuous);

    // S ~ r^-4 from a non-harmonic term; q is fitted from the data
    auto u = RadialProfile::from(outer, [](double r) { return 1 + 1 / r + 1 / (1 + r * r); });
    auto afq = verify_af_decay(ConformalMetric(3, u).to_warped(), 1.0, 4.0);
    CHECK(!afq.q_vacuous);
    CHECK(afq.q_fit == doctest::Approx(4.0).epsilon(0.05));
    CHECK(afq.q_ok);
}

TEST_CASE("ADM mass is stable under a compactly supported radial diffeomorphism") {
    auto grid = RadialGrid::geometric(0.0, 300.0, 1200, 4.0);
    auto g = PositiveMassCone(0.2).metric(grid).to_warped();
    double m0 = adm_mass(g).extrapolated_mass;
    auto phi = RadialProfile::from(
        grid, [](double r) { return r + 0.2 * r * r * r * std::exp(-r * r); }, Parity::odd);
    double m1 = adm_mass(pullback_metric(g, phi)).extrapolated_mass;
    CHECK(std::abs(m1 - m0) < 1e-3 * std::abs(m0));
}

TEST_CASE("mass and scalar decay monitors on a stationary trace") {
    auto g = WarpedMetric::euclidean(3, RadialGrid::geometric(0.0, 100.0, 300));
    FlowConfig cfg;
    cfg.T = 0.01;
    cfg.outputs = 3;
    cfg.asymptotically_flat = true;
    auto tr = run_hflow(g, g, cfg);
    auto d = mass_drift(tr);
    CHECK(d.t.size() == tr.states.size());
    for (double m : d.mass) CHECK(std::abs(m) < 1e-8);
    auto s = monitor_scalar_decay(tr, 4.0);
    for (double v : s.value) CHECK(v < 1e-8);
    CHECK(s.bounded);
}
