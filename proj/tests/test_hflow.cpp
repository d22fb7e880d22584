#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle/fd_tensor.hpp"
#include "radial/curvature.hpp"
#include "radial/errors.hpp"
#include "radial/examples.hpp"
#include "radial/hflow.hpp"
#include "radial/mollify.hpp"

using namespace radial;

namespace {

struct Bumpy {
    double c1, k1, p1, c2, k2, p2;
    double A(double r) const { return std::exp(c1 * std::sin(k1 * r + p1)); }
    double B(double r) const { return (r + 0.5) * (r + 0.5) * std::exp(c2 * std::cos(k2 * r + p2)); }
    static Bumpy draw(std::mt19937_64& rng) {
        std::uniform_real_distribution<double> amp(-0.3, 0.3), freq(0.5, 2.5), ph(0, 6.283);
        return {amp(rng), freq(rng), ph(rng), amp(rng), freq(rng), ph(rng)};
    }
    WarpedMetric on(int n, const RadialGrid& g) const {
        return WarpedMetric(n, RadialProfile::from(g, [&](double r) { return A(r); }),
                            RadialProfile::from(g, [&](double r) { return B(r); }));
    }
    oracle::Geometry geometry(int n) const {
        Bumpy m = *this;
        return {oracle::warped_in_coordinates(n, [m](double r) { return m.A(r); }, [m](double r) { return m.B(r); }),
                n};
    }
};

double sup_abs(const std::vector<double>& v, int lo, int hi) {
    double s = 0;
    for (int i = lo; i < hi; ++i) s = std::max(s, std::abs(v[i]));
    return s;
}

// round cap of the unit sphere, B = sin^2 r
WarpedMetric sphere_cap(int n, int N, double R) {
    auto grid = RadialGrid::uniform(0.0, R, N);
    return WarpedMetric::warped(n, grid, [](double r) { return std::sin(r); }, true);
}

}  // namespace

TEST_CASE("h-flow right side agrees with the coordinate oracle term by term") {
    std::mt19937_64 rng(7031);
    auto grid = RadialGrid::uniform(0.5, 2.5, 2001);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 3 + trial % 2;
        Bumpy mg = Bumpy::draw(rng), mh = Bumpy::draw(rng);
        auto g = mg.on(n, grid), h = mh.on(n, grid);
        HFlowTerms t = hflow_terms(g, h);
        auto G = mg.geometry(n), H = mh.geometry(n);
        for (int i : {300, 1000, 1700}) {
            oracle::Point x(n, 1.1);
            x[0] = grid[i];
            auto o = oracle::hflow_terms(G, H, x);
            const SymTensor2Radial* ours[3] = {&t.lap, &t.curv, &t.quad};
            const oracle::Mat* theirs[3] = {&o.lap, &o.curv, &o.quad};
            for (int k = 0; k < 3; ++k) {
                double scale = std::max({1.0, std::abs((*theirs[k])(0, 0)), std::abs((*theirs[k])(1, 1))});
                CHECK(std::abs(ours[k]->T_rr[i] - (*theirs[k])(0, 0)) / scale < 1e-4);
                CHECK(std::abs(ours[k]->T_s[i] - (*theirs[k])(1, 1)) / scale < 1e-4);
            }
        }
    }
}

TEST_CASE("h-flow right side at g = h is -2 Ric") {
    SUBCASE("cylinder") {
        auto grid = RadialGrid::uniform(0.0 + 1.0, 3.0, 101);
        auto g = WarpedMetric::warped(4, grid, [](double) { return 1.0; });
        auto rhs = hflow_rhs(g, g);
        for (int i = 0; i < grid.size(); ++i) {
            CHECK(rhs.T_rr[i] == doctest::Approx(0.0).scale(1.0));
            CHECK(rhs.T_s[i] == doctest::Approx(-2.0 * 2).epsilon(1e-12));
        }
    }
    SUBCASE("sphere cap and random metrics") {
        auto g = sphere_cap(3, 400, 1.2);
        std::mt19937_64 rng(99);
        std::vector<WarpedMetric> cases{g, Bumpy::draw(rng).on(3, RadialGrid::uniform(0.5, 2.5, 801)),
                                        Bumpy::draw(rng).on(5, RadialGrid::uniform(0.5, 2.5, 801))};
        for (const auto& m : cases) {
            HFlowTerms t = hflow_terms(m, m);
            auto ca = curvature_assembly(m);
            for (int i = 0; i < m.size(); ++i) {
                CHECK(t.lap.T_rr[i] == doctest::Approx(0.0).scale(1.0));
                CHECK(t.quad.T_s[i] == doctest::Approx(0.0).scale(1.0));
                CHECK(t.curv.T_rr[i] == doctest::Approx(-2 * ca.ricci.T_rr[i]).epsilon(1e-8).scale(1.0));
                CHECK(t.curv.T_s[i] == doctest::Approx(-2 * ca.ricci.T_s[i]).epsilon(1e-8).scale(1.0));
            }
        }
    }
    SUBCASE("flat") {
        auto g = WarpedMetric::euclidean(3, RadialGrid::geometric(0.0, 4.0, 200));
        auto rhs = hflow_rhs(g, g);
        CHECK(sup_abs(rhs.T_rr.values, 0, g.size()) < 1e-8);
        CHECK(sup_abs(rhs.T_s.values, 0, g.size()) < 1e-8);
    }
}

TEST_CASE("h-flow right side equals -2 Ric(g) + Lie derivative along W") {
    std::mt19937_64 rng(4242);
    auto grid = RadialGrid::uniform(0.5, 2.5, 2001);
    for (int trial = 0; trial < 4; ++trial) {
        const int n = 3 + trial % 2;
        auto g = Bumpy::draw(rng).on(n, grid), h = Bumpy::draw(rng).on(n, grid);
        auto rhs = hflow_rhs(g, h);
        auto ric = curvature_assembly(g).ricci;
        auto W = deturck_field(g, h);
        auto dW = d_dr(grid, W.values, W.parity);
        auto dA = d_dr(grid, g.A.values, g.A.parity), dB = d_dr(grid, g.B.values, g.B.parity);
        for (int i = 10; i < grid.size() - 10; i += 37) {
            double rr = -2 * ric.T_rr[i] + W[i] * dA[i] + 2 * g.A[i] * dW[i];
            double s = -2 * ric.T_s[i] + W[i] * dB[i];
            CHECK(rhs.T_rr[i] == doctest::Approx(rr).epsilon(1e-7).scale(1.0));
            CHECK(rhs.T_s[i] == doctest::Approx(s).epsilon(1e-7).scale(1.0));
        }
    }
}

TEST_CASE("DeTurck field") {
    std::mt19937_64 rng(515);
    auto grid = RadialGrid::uniform(0.5, 2.5, 2001);
    for (int trial = 0; trial < 4; ++trial) {
        const int n = 3 + trial % 2;
        Bumpy mg = Bumpy::draw(rng), mh = Bumpy::draw(rng);
        auto g = mg.on(n, grid), h = mh.on(n, grid);
        auto W = deturck_field(g, h);
        auto G = mg.geometry(n), H = mh.geometry(n);
        for (int i : {250, 900, 1600}) {
            oracle::Point x(n, 1.1);
            x[0] = grid[i];
            auto Gg = G.christoffel(x), Gh = H.christoffel(x);
            oracle::Mat gi = oracle::inverse(G.g(x));
            double w = 0;
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) w += gi(p, q) * (Gg[(0 * n + p) * n + q] - Gh[(0 * n + p) * n + q]);
            CHECK(W[i] == doctest::Approx(w).epsilon(1e-8).scale(1.0));
        }
        CHECK(sup_abs(deturck_field(h, h).values, 0, grid.size()) == 0.0);
        WarpedMetric ch(n, RadialProfile(grid, h.A.values), RadialProfile(grid, h.B.values));
        for (auto* v : {&ch.A.values, &ch.B.values})
            for (double& x : *v) x *= 2.7;
        CHECK(sup_abs(deturck_field(ch, h).values, 0, grid.size()) < 1e-12);
    }
}

TEST_CASE("step_flow") {
    FlowConfig cfg;
    SUBCASE("flat metric is stationary") {
        auto g = WarpedMetric::euclidean(3, RadialGrid::geometric(0.0, 4.0, 160));
        FlowState s{0, g, g, deturck_field(g, g), RadialProfile(g.grid(), g.grid().nodes(), Parity::odd)};
        double dt = max_stable_dt(g, cfg.cfl);
        auto s1 = step_flow(s, dt, cfg);
        for (int i = 0; i < g.size(); ++i) {
            CHECK(s1.g.A[i] == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(s1.g.B[i] == doctest::Approx(g.B[i]).epsilon(1e-13));
        }
        CHECK_THROWS_AS(step_flow(s, 2 * max_stable_dt(g, cfg.cfl), cfg), PreconditionError);
    }
    SUBCASE("one step from g = h is g - 2 dt Ric + O(dt^2)") {
        auto g = sphere_cap(3, 200, 1.2);
        auto ric = curvature_assembly(g).ricci;
        FlowState s{0, g, g, deturck_field(g, g), RadialProfile(g.grid(), g.grid().nodes(), Parity::odd)};
        const double dt0 = max_stable_dt(g, cfg.cfl);
        double prev = 0;
        for (double dt : {dt0, dt0 / 2, dt0 / 4}) {
            auto s1 = step_flow(s, dt, cfg);
            double err = 0;
            for (int i = 0; i < g.size() - cfg.collar; ++i) {
                err = std::max(err, std::abs(s1.g.A[i] - (g.A[i] - 2 * dt * ric.T_rr[i])));
                err = std::max(err, std::abs(s1.g.B[i] - (g.B[i] - 2 * dt * ric.T_s[i])));
            }
            if (prev > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.15));
            prev = err;
        }
    }
    SUBCASE("mollified cone, 100 steps") {
        auto cone = make_cone({3, 0.5, 1.0}, RadialGrid::geometric(0.0, 2.0, 400, 3.0));
        auto g = mollify_metric(cone, {0.05, Region(0.0, 0.0)});
        FlowState s{0, g, g, deturck_field(g, g), RadialProfile(g.grid(), g.grid().nodes(), Parity::odd)};
        double min_ratio = 1;
        for (int k = 0; k < 100; ++k) {
            s = step_flow(s, max_stable_dt(s.g, cfg.cfl), cfg);
            for (int i = 0; i < g.size(); ++i)
                min_ratio = std::min({min_ratio, s.g.A[i] / g.A[i], s.g.B[i] / g.B[i]});
        }
        MESSAGE("min eigenvalue ratio after 100 steps: " << min_ratio << ", t = " << s.t);
        CHECK(min_ratio > 0.5);
    }
}

TEST_CASE("run_hflow on trivial data") {
    SUBCASE("flat trace is stationary") {
        auto g = WarpedMetric::euclidean(3, RadialGrid::geometric(0.0, 4.0, 120));
        FlowConfig cfg;
        cfg.T = 0.05;
        cfg.outputs = 6;
        auto tr = run_hflow(g, g, cfg);
        CHECK(tr.states.size() == 7);
        CHECK(tr.states.front().t == 0.0);
        for (size_t k = 1; k < tr.states.size(); ++k) CHECK(tr.states[k].t > tr.states[k - 1].t);
        CHECK(tr.states.back().t == doctest::Approx(cfg.T));
        for (const auto& s : tr.states)
            for (int i = 0; i < g.size(); ++i) CHECK(s.g.A[i] == doctest::Approx(1.0).epsilon(1e-12));
        auto rep = monitor_estimates(tr, cfg);
        CHECK(rep.sup_grad_scaled < 1e-18);
        CHECK(rep.sup_hess_scaled < 1e-18);
        CHECK(rep.C_hat == 0.0);
        CHECK(rep.J_monotone);
        auto phis = integrate_diffeo(tr);
        REQUIRE(phis.size() == tr.states.size());
        for (const auto& p : phis)
            for (int i = 0; i < g.size(); ++i) CHECK(p[i] == g.grid()[i]);
    }
    SUBCASE("cylinder follows the Ricci flow ODE away from the collar") {
        const int n = 4;
        auto grid = RadialGrid::uniform(0.0 + 5.0, 15.0, 201);
        auto g = WarpedMetric::warped(n, grid, [](double) { return 1.0; });
        FlowConfig cfg;
        cfg.T = 0.01;
        cfg.outputs = 4;
        auto tr = run_hflow(g, g, cfg);
        for (const auto& s : tr.states)
            for (int i = 60; i < 140; ++i) {
                CHECK(s.g.B[i] == doctest::Approx(1 - 2.0 * (n - 2) * s.t).epsilon(1e-9));
                CHECK(s.g.A[i] == doctest::Approx(1.0).epsilon(1e-9));
            }
    }
    SUBCASE("closeness hypothesis") {
        auto grid = RadialGrid::uniform(1.0, 3.0, 50);
        auto h = WarpedMetric::warped(3, grid, [](double r) { return r; });
        WarpedMetric g(3, RadialProfile(grid, std::vector<double>(50, 2.0)), h.B);
        FlowConfig cfg;
        CHECK_THROWS_AS(run_hflow(g, h, cfg), PreconditionError);
        cfg.p = 2.5;
        CHECK_THROWS_AS(cfg.validate(3), PreconditionError);
    }
}

TEST_CASE("diffeomorphism ODE and pullback") {
    const int n = 3;
    auto grid = RadialGrid::geometric(0.0, 8.0, 160, 3.0);
    auto h = WarpedMetric::euclidean(n, grid);
    // a compact bump on the radial coefficient
    auto bump = [](double r) { return 0.3 * std::exp(-(r - 2) * (r - 2) * 2); };
    WarpedMetric g0(n, RadialProfile::from(grid, [&](double r) { return 1 + bump(r); }, Parity::even), h.B, true);
    FlowConfig cfg;
    cfg.T = 0.02;
    cfg.outputs = 3;
    auto tr = run_hflow(g0, h, cfg);
    REQUIRE(!tr.truncated);
    // thin the W record so the RK4 error sits well above rounding
    FlowTrace thin = tr;
    thin.w_times.clear();
    thin.w_values.clear();
    for (size_t k = 0; k < tr.w_times.size(); ++k) {
        bool keep = k % 160 == 0 || k + 1 == tr.w_times.size();
        for (const auto& s : tr.states) keep = keep || s.t == tr.w_times[k];
        if (keep) {
            thin.w_times.push_back(tr.w_times[k]);
            thin.w_values.push_back(tr.w_values[k]);
        }
    }
    std::vector<std::vector<RadialProfile>> runs;
    for (int sub : {2, 4, 8}) runs.push_back(integrate_diffeo(thin, sub));
    for (const auto& r : runs) {
        for (int i = 0; i < grid.size(); ++i) CHECK(r.front()[i] == grid[i]);
    }
    double d1 = 0, d2 = 0;
    for (int i = 0; i < grid.size(); ++i) {
        d1 = std::max(d1, std::abs(runs[0].back()[i] - runs[1].back()[i]));
        d2 = std::max(d2, std::abs(runs[1].back()[i] - runs[2].back()[i]));
    }
    MESSAGE("Phi self-convergence ratio " << d1 / d2 << " d1 " << d1 << " steps " << tr.steps);
    CHECK(d1 > 0);
    // at least fourth order; within one record interval W is cubic in t,
    // which RK4 integrates exactly, so the observed order is often higher
    CHECK(std::log2(d1 / d2) > 3.6);

    const auto& phi = runs[2].back();
    auto pulled = pullback_metric(tr.states.back().g, phi);
    // change of variables: vol_{Phi*g}([0, R]) = vol_g([0, Phi(R)])
    double R = 5.0;
    double phiR = interpolate(grid, phi.values, R, Parity::odd);
    CHECK(volume(pulled, Region(0.0, R)) == doctest::Approx(volume(tr.states.back().g, Region(0.0, phiR))).epsilon(1e-6));
    auto same = pullback_metric(g0, RadialProfile(grid, grid.nodes(), Parity::odd));
    for (int i = 0; i < grid.size(); ++i) CHECK(same.A[i] == doctest::Approx(g0.A[i]).epsilon(1e-10));
    std::vector<double> wild = grid.nodes();
    wild.back() *= 1.5;
    CHECK_THROWS_AS(pullback_metric(g0, RadialProfile(grid, wild, Parity::odd)), DomainError);
}
