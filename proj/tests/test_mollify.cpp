#include <cmath>

#include "doctest.h"
#include "radial/curvature.hpp"
#include "radial/errors.hpp"
#include "radial/examples.hpp"
#include "radial/mollify.hpp"

using namespace radial;

TEST_CASE("cutoff clauses") {
    auto grid = RadialGrid::uniform(0.0, 2.0, 2048);
    double prev = -1;
    for (double eps : {0.1, 0.05, 0.025}) {
        Region sig(0.8, 1.0);
        Cutoff c = make_cutoff(eps, sig, grid);
        double d2max = 0;
        auto J = jets(c.profile);
        for (int i = 0; i < grid.size(); ++i) {
            double r = grid[i], d = c.distance(r);
            if (d <= eps) CHECK(c.profile[i] == eps);
            if (d >= 2 * eps) CHECK(c.profile[i] == 0);
            CHECK(c.profile[i] >= 0);
            CHECK(c.profile[i] <= eps);
            CHECK(std::abs(J.d1[i]) <= c.C1 * 1.01 + 1e-9);
            d2max = std::max(d2max, std::abs(J.d2[i]));
        }
        CHECK(d2max * eps <= c.C2 * 1.05);
        if (prev > 0) CHECK(d2max * eps / prev == doctest::Approx(1.0).epsilon(1.0));
        prev = d2max * eps;
        CHECK(c.d1(1.0 + 1.5 * eps) == doctest::Approx((c.value(1.0 + 1.5 * eps + 1e-6) - c.value(1.0 + 1.5 * eps - 1e-6)) / 2e-6).epsilon(1e-5));
    }
    CHECK_THROWS_AS(make_cutoff(0.6, Region(1.0, 1.0), grid), DomainError);
    CHECK_NOTHROW(make_cutoff(0.1, Region(0.0, 0.0), grid));
    CHECK_THROWS_AS(make_cutoff(0.1, Region(0.1, 0.1), RadialGrid::uniform(0.05, 2, 64)), DomainError);
}

TEST_CASE("mollify_variable") {
    auto grid = RadialGrid::uniform(0.0, 2.0, 1024);
    // linear profiles are reproduced by the symmetric kernel
    auto lin = RadialProfile::from(grid, [](double r) { return 1 + 0.3 * r; });
    auto vl = mollify_variable(lin, {0.1, Region(1.0, 1.0)});
    // the kernel is split at the kink, so the moments hold to quadrature accuracy
    for (int i = 0; i < grid.size(); ++i) CHECK(std::abs(vl[i] - lin[i]) < 1e-7);

    // empty singular set: identity
    auto same = mollify_variable(lin, {0.1, std::nullopt});
    CHECK(same.values == lin.values);

    // Lipschitz kink at 1
    auto kink = RadialProfile::from(grid, [](double r) { return 1 + 0.5 / std::max(r, 1.0); });
    auto flat = WarpedMetric::euclidean(3, grid);
    double prev_err = 1e300, ratio_min = 1e300, ratio_max = 0;
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
        MollifierSpec spec{eps, Region(1.0, 1.0)};
        auto v = mollify_variable(kink, spec);
        double err = 0;
        for (int i = 0; i < grid.size(); ++i) {
            if (std::abs(grid[i] - 1) >= 2 * eps) CHECK(v[i] == kink[i]);  // bit-exact
            err = std::max(err, std::abs(v[i] - kink[i]));
        }
        CHECK(err < prev_err);
        prev_err = err;
        double inner = sobolev_norms(v, flat, 6, Region(0.5, 1.5)).w1p;
        double outer = sobolev_norms(kink, flat, 6, Region(0.2, 1.8)).w1p;
        ratio_min = std::min(ratio_min, inner / outer);
        ratio_max = std::max(ratio_max, inner / outer);
    }
    CHECK(ratio_max / ratio_min < 2);

    // the diffeomorphism condition
    CHECK_THROWS_AS(mollify_variable(kink, {0.1, Region(1.0, 1.0), 1.0}), PreconditionError);
}

TEST_CASE("mollify_metric on a cone tip") {
    auto grid = RadialGrid::geometric(0.0, 2.0, 1024, 3.0).with_end_order(4);
    const double alpha = 0.5, eps = 0.05;
    auto cone = make_cone({3, alpha, 1.0}, grid);
    MollifyReport rep;
    auto g = mollify_metric(cone, {eps, Region(0.0, 0.0)}, &rep);
    CHECK(g.tip_regular);
    auto S = scalar_curvature_warped(g);
    int compared = 0;
    for (int j = 0; j < g.size(); ++j) {
        double r = rep.input_radius[j];
        if (r >= 2.2 * eps && r < 1.8) {
            double exact = 2 * (1 - alpha * alpha) / (alpha * alpha * r * r);
            CHECK(S[j] == doctest::Approx(exact).epsilon(2e-3));
            CHECK(g.B[j] == doctest::Approx(alpha * alpha * r * r).epsilon(1e-6));
            ++compared;
        }
    }
    CHECK(compared > 100);
    // flat near the tip
    const double S_window = 2 * (1 - alpha * alpha) / (alpha * alpha * 4 * eps * eps);
    CHECK(std::abs(S[0]) < 1e-6 * S_window);
    CHECK(rep.eig_ratio_min > 0);

    // smooth metric, no singular set
    auto e = WarpedMetric::euclidean(3, grid);
    auto ge = mollify_metric(e, {eps, std::nullopt});
    CHECK(ge.B.values == e.B.values);
}

TEST_CASE("mollify_metric on the positive mass cone") {
    PositiveMassCone pm(0.2);
    const double eps = 0.05;
    double prev = 1e300;
    for (int N : {512, 1024, 2048}) {
        auto grid = RadialGrid::geometric(0.0, 6.0, N, 4.0).with_end_order(4);
        auto g0 = pm.metric(grid);
        auto g = mollify_metric(g0, {eps, Region(0.0, 0.0)});
        CHECK(g.tip_regular);
        auto S = scalar_curvature_warped(g);
        auto S0 = scalar_curvature_conformal(g0);
        double neg = 0;
        for (int i = 0; i < grid.size() - 1; ++i) {
            neg = std::max(neg, -S[i]);
            if (grid[i] >= 2 * eps) CHECK(S[i] == doctest::Approx(S0[i]).epsilon(1e-3).scale(1e-3));
        }
        // S >= 0 exactly before discretization; the FD defect shrinks
        CHECK(neg < prev);
        prev = neg;
    }
    CHECK(prev < 2e-3);
}

TEST_CASE("corner smoothing") {
    const int n = 3;
    auto flat = make_cone_ball_gluing(n, 1.0, 1.0);
    SmoothedCorner f(flat, 0.1);
    for (double s : {0.3, 0.999, 1.0, 1.0001, 1.5}) CHECK(std::abs(f.scalar(s)) < 1e-10);

    auto cm = make_cone_ball_gluing(n, 0.5, 1.0);
    const double area = sphere_area(n) * std::pow(cm.r0, n - 1);
    const double target = (cm.H_minus - cm.H_plus) * area;
    double ratios[3];
    int k = 0;
    for (double eps : {0.2, 0.1, 0.05}) {
        SmoothedCorner sc(cm, eps);
        // dphi blends from 1 to alpha; phi agrees with the sides off the window
        CHECK(sc.dphi(cm.r0 - 2 * sc.delta()) == doctest::Approx(1.0));
        CHECK(sc.dphi(cm.r0 + 2 * sc.delta()) == doctest::Approx(0.5));
        CHECK(sc.phi(cm.r0 + 0.3) == doctest::Approx(cm.out.phi(cm.r0 + 0.3)).epsilon(1e-12));
        CHECK(sc.phi(cm.r0 - 0.3) == doctest::Approx(cm.in.phi(cm.r0 - 0.3)).epsilon(1e-12));
        ratios[k++] = sc.positive_part_integral() / target;
        CHECK(sc.negative_part_integral() == 0);
        CHECK(std::isfinite(sc.clause_constant()));
        CHECK(sc.clause_constant() < 10);
    }
    // the window part is exact; the smooth cone side adds O(eps)
    CHECK((ratios[0] - ratios[1]) / (ratios[1] - ratios[2]) == doctest::Approx(2.0).epsilon(0.02));
    // the mean-curvature jump enters the scalar curvature twice
    CHECK(2 * ratios[2] - ratios[1] == doctest::Approx(2.0).epsilon(1e-3));
    // sampled metric equals the corner metric away from the window
    SmoothedCorner sc(cm, 0.1);
    auto grid = RadialGrid::uniform(0, 2.0, 400);
    auto g = sc.metric(grid);
    for (int i = 0; i < grid.size(); ++i) {
        double s = grid[i];
        double exact = s <= cm.r0 ? s : cm.out.phi(s);
        if (std::abs(s - cm.r0) > 0.1) CHECK(std::sqrt(g.B[i]) == doctest::Approx(exact).epsilon(1e-12));
    }
    CHECK_THROWS_AS(SmoothedCorner(cm, 0.6), DomainError);

    // H- < H+: the negative part does not vanish
    auto bad = make_cone_ball_gluing(n, 1.25, 1.0, 2.0, 256, true);
    const double area_b = sphere_area(n) * std::pow(bad.r0, n - 1);
    for (double eps : {0.2, 0.1, 0.05}) {
        SmoothedCorner sb(bad, eps);
        CHECK(sb.negative_part_integral() > 0.9 * 2 * (bad.H_plus - bad.H_minus) * area_b);
    }
}
