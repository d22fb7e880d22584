#include <cmath>

#include "doctest.h"
#include "radial/errors.hpp"
#include "radial/grid.hpp"

using namespace radial;

TEST_CASE("grids reject too few nodes and inverted bounds") {
    CHECK_THROWS_AS(RadialGrid::uniform(0, 1, 8), ResolutionError);
    CHECK_THROWS_AS(RadialGrid::uniform(2, 1, 64), DomainError);
}

TEST_CASE("tip grids are cell centred and mirror under r -> -r") {
    for (auto g : {RadialGrid::uniform(0, 3, 64), RadialGrid::geometric(0, 30, 64, 5)}) {
        CHECK(g.tip());
        CHECK(g[0] > 0);
        CHECK(g.r_of(-g.x(0)) == doctest::Approx(-g[0]));
        for (int i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
        CHECK(g.x_of(g[17]) == doctest::Approx(g.x(17)));
    }
}

TEST_CASE("derivatives are exact on low polynomials and 4th order in the interior") {
    auto g = RadialGrid::uniform(0, 2, 64);
    auto f = RadialProfile::from(g, [](double r) { return r * r; }, Parity::even);
    Jets j = jets(f);
    for (int i = 0; i < g.size() - 2; ++i) {
        CHECK(j.d1[i] == doctest::Approx(2 * g[i]).epsilon(1e-9));
        CHECK(j.d2[i] == doctest::Approx(2).epsilon(1e-7));
    }
    double err[2];
    for (int k = 0; k < 2; ++k) {
        auto h = RadialGrid::uniform(0, 1, 64 << k);
        auto s = RadialProfile::from(h, [](double r) { return std::sin(3 * r); }, Parity::odd);
        Jets js = jets(s);
        err[k] = 0;
        for (int i = 0; i < h.size() - 2; ++i)
            err[k] = std::max(err[k], std::abs(js.d2[i] + 9 * std::sin(3 * h[i])));
    }
    CHECK(std::log2(err[0] / err[1]) > 3.7);
}

TEST_CASE("Simpson integration over partial regions") {
    for (auto g : {RadialGrid::uniform(0, 2, 101), RadialGrid::geometric(0.01, 5, 200),
                   RadialGrid::geometric(0, 4, 128, 3)}) {
        std::vector<double> f(g.size());
        for (int i = 0; i < g.size(); ++i) f[i] = std::exp(-g[i]) * g[i] * g[i];
        auto F = [](double r) { return -std::exp(-r) * (r * r + 2 * r + 2); };
        double a = std::max(g.r_min(), 0.137), b = 1.71;
        CHECK(integrate(g, f, Region(a, b)) == doctest::Approx(F(b) - F(a)).epsilon(1e-7));
        CHECK(integrate(g, f, Region(g.r_min(), g.r_max())) ==
              doctest::Approx(F(g.r_max()) - F(g.r_min())).epsilon(1e-6));
    }
}

TEST_CASE("interpolation respects a breakpoint") {
    auto g = RadialGrid::uniform(0.5, 1.5, 101);
    auto kink = [](double r) { return std::abs(r - 1.0037); };
    std::vector<double> f(g.size());
    for (int i = 0; i < g.size(); ++i) f[i] = kink(g[i]);
    for (double r : {1.0, 1.002, 1.005, 1.0099})
        CHECK(interpolate(g, f, r, Parity::none, 1.0037) == doctest::Approx(kink(r)).epsilon(1e-12));
}
