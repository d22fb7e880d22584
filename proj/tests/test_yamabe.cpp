#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracle/fd_tensor.hpp"
#include "radial/curvature.hpp"
#include "radial/yamabe.hpp"

using namespace radial;

namespace {

constexpr double kPi = std::numbers::pi;
using Fn = std::function<double(double)>;

oracle::MetricFn diagonal_in_coordinates(Fn A, std::vector<Fn> B) {
    const int n = static_cast<int>(B.size()) + 1;
    return [=](const oracle::Point& x) {
        oracle::Mat m(n);
        m(0, 0) = A(x[0]);
        for (int k = 1; k < n; ++k) m(k, k) = B[k - 1](x[0]);
        return m;
    };
}

// smooth 2pi-periodic coefficients with a few random modes; fiber k gets
// its own phase, so the metric is anisotropic unless aniso = false
struct RandomTorus {
    int n;
    double a1, a2, b1, b2, ph;
    bool aniso = true;
    static RandomTorus draw(std::mt19937_64& rng, int n, bool aniso = true) {
        std::uniform_real_distribution<double> amp(-0.15, 0.15), phase(0, 2 * kPi);
        return {n, amp(rng), amp(rng), amp(rng), amp(rng), phase(rng), aniso};
    }
    Fn A() const {
        auto s = *this;
        return [s](double x) { return 1 + s.a1 * std::cos(x) + s.a2 * std::sin(2 * x + s.ph); };
    }
    Fn B(int k) const {
        auto s = *this;
        const double shift = aniso ? 2.1 * k : 0.0;
        return [s, shift](double x) { return std::exp(s.b1 * std::sin(x + s.ph + shift) + s.b2 * std::cos(2 * x)); };
    }
    std::vector<Fn> fibers() const {
        std::vector<Fn> out;
        for (int k = 0; k < n - 1; ++k) out.push_back(B(k));
        return out;
    }
    TorusMetric metric(int N) const {
        std::vector<PeriodicProfile> Bs;
        for (auto& f : fibers()) Bs.push_back(PeriodicProfile::from(2 * kPi, N, f));
        return TorusMetric(n, PeriodicProfile::from(2 * kPi, N, A()), Bs);
    }
};

// dx^2 + e^{2c sin x} dy^2 + e^{-2c sin x} dz^2: not conformally flat
TorusMetric kasner(double c, int N = 31) {
    auto one = PeriodicProfile::from(2 * kPi, N, [](double) { return 1.0; });
    return TorusMetric(3, one,
                       std::vector<PeriodicProfile>{
                           PeriodicProfile::from(2 * kPi, N, [=](double x) { return std::exp(2 * c * std::sin(x)); }),
                           PeriodicProfile::from(2 * kPi, N, [=](double x) { return std::exp(-2 * c * std::sin(x)); })});
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = static_cast<int>(x.size());
    for (int i = 0; i < m; ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// Laplacian rebuilt in non-divergence form from the jets
std::vector<double> laplacian_nd(const TorusMetric& g, const PeriodicProfile& u) {
    auto J = spectral_jets(u), a = spectral_jets(g.A);
    std::vector<PeriodicJets> b;
    for (const auto& B : g.B) b.push_back(spectral_jets(B));
    std::vector<double> out(g.size());
    for (int i = 0; i < g.size(); ++i) {
        double c = -a.d1[i] / (2 * g.A[i]);
        for (size_t k = 0; k < b.size(); ++k) c += b[k].d1[i] / (2 * g.B[k][i]);
        out[i] = (J.d2[i] + J.d1[i] * c) / g.A[i];
    }
    return out;
}

}  // namespace

TEST_CASE("spectral derivatives of trigonometric polynomials") {
    for (double L : {2 * kPi, 3.0}) {
        const double k = 2 * kPi / L;
        auto f = PeriodicProfile::from(L, 31, [&](double x) { return std::sin(3 * k * x) + 0.5 * std::cos(k * x); });
        auto J = spectral_jets(f);
        for (int i = 0; i < f.size(); ++i) {
            double x = f.x(i);
            CHECK(J.d1[i] == doctest::Approx(3 * k * std::cos(3 * k * x) - 0.5 * k * std::sin(k * x)).epsilon(1e-10));
            CHECK(J.d2[i] ==
                  doctest::Approx(-9 * k * k * std::sin(3 * k * x) - 0.5 * k * k * std::cos(k * x)).epsilon(1e-10));
        }
    }
    auto c = spectral_jets(PeriodicProfile::from(1.0, 15, [](double) { return 2.5; }));
    for (int i = 0; i < 15; ++i) CHECK((c.d1[i] == 0.0 && c.d2[i] == 0.0));
    CHECK_THROWS_AS(PeriodicProfile(1.0, std::vector<double>(10, 1.0)), PreconditionError);
    CHECK_THROWS_AS(PeriodicProfile(1.0, std::vector<double>(7, 1.0)), PreconditionError);
}

TEST_CASE("torus curvature against the coordinate oracle") {
    std::mt19937_64 rng(1357);
    for (int trial = 0; trial < 6; ++trial) {
        auto rt = RandomTorus::draw(rng, 3 + trial % 2, trial % 3 != 0);
        auto g = rt.metric(63);
        auto c = curvature(g);
        auto T = traceless_ricci(g);
        oracle::Geometry G{diagonal_in_coordinates(rt.A(), rt.fibers()), rt.n};
        for (int i = 0; i < g.size(); i += 9) {
            oracle::Point p(rt.n, 0.3);
            p[0] = g.A.x(i);
            double s = G.scalar(p);
            auto ric = G.ricci(p);
            CHECK(c.scalar[i] == doctest::Approx(s).epsilon(1e-6).scale(1));
            CHECK(c.ricci.T_xx[i] == doctest::Approx(ric(0, 0)).epsilon(1e-6).scale(1));
            CHECK(T.T_xx[i] == doctest::Approx(ric(0, 0) - s / rt.n * g.A[i]).epsilon(1e-6).scale(1));
            for (int k = 0; k < rt.n - 1; ++k) {
                CHECK(c.ricci.T_fiber[k][i] == doctest::Approx(ric(k + 1, k + 1)).epsilon(1e-6).scale(1));
                CHECK(T.T_fiber[k][i] ==
                      doctest::Approx(ric(k + 1, k + 1) - s / rt.n * g.B[k][i]).epsilon(1e-6).scale(1));
            }
        }
    }
}

TEST_CASE("warped tori agree with the radial curvature reduction") {
    std::mt19937_64 rng(24680);
    auto rt = RandomTorus::draw(rng, 4, false);
    auto g = rt.metric(31);
    auto S = scalar_curvature(g);
    auto a = spectral_jets(g.A), b = spectral_jets(g.B[0]);
    for (int i = 0; i < g.size(); ++i) {
        MetricJet j{g.A[i], a.d1[i], a.d2[i], g.B[0][i], b.d1[i], b.d2[i]};
        CHECK(S[i] == doctest::Approx(curvature_at(4, 0.0, j).scalar).epsilon(1e-12).scale(1));
    }
}

TEST_CASE("torus Laplacian and linearized scalar curvature") {
    std::mt19937_64 rng(777);
    auto rt = RandomTorus::draw(rng, 3);
    auto g = rt.metric(63);
    const int N = g.size();
    auto u = PeriodicProfile::from(g.L(), N, [](double x) { return std::cos(x) + 0.2 * std::sin(3 * x); });
    auto lap = laplacian(g, u.values);
    auto ref = laplacian_nd(g, u);
    for (int i = 0; i < N; ++i) CHECK(lap[i] == doctest::Approx(ref[i]).epsilon(1e-9).scale(1));

    // DS(h) against a central difference of the oracle scalar curvature
    Fn hxx = [](double x) { return 0.3 * std::sin(x); };
    std::vector<Fn> hk = {[](double x) { return 0.2 * std::cos(2 * x); }, [](double x) { return -0.1 * std::sin(x); }};
    TorusTensor h{PeriodicProfile::from(g.L(), N, hxx),
                  {PeriodicProfile::from(g.L(), N, hk[0]), PeriodicProfile::from(g.L(), N, hk[1])}};
    auto DS = linearized_scalar(g, h);
    const double t = 1e-3;
    auto shifted = [&](double s) {
        auto A = rt.A();
        auto Bs = rt.fibers();
        std::vector<Fn> B;
        for (int k = 0; k < 2; ++k) B.push_back([=](double x) { return Bs[k](x) + s * hk[k](x); });
        return oracle::Geometry{diagonal_in_coordinates([=](double x) { return A(x) + s * hxx(x); }, B), 3};
    };
    auto Gp = shifted(t), Gm = shifted(-t);
    for (int i = 0; i < N; i += 7) {
        oracle::Point p{g.A.x(i), 0.1, 0.2};
        double fd = (Gp.scalar(p) - Gm.scalar(p)) / (2 * t);
        CHECK(DS[i] == doctest::Approx(fd).epsilon(1e-4).scale(1));
    }
}

TEST_CASE("flat tori: constant minimizer and closed-form norms") {
    for (int n : {3, 4}) {
        for (double fiber : {1.0, 2.0}) {
            auto g = TorusMetric::flat(n, 3.0, 15, fiber);
            auto sol = solve_yamabe(g);
            const double V = volume(g);
            CHECK(V == doctest::Approx(3.0 * std::pow(fiber, n - 1)));
            CHECK(std::abs(sol.lambda) < 1e-8);
            CHECK(sol.iterations == 0);
            for (double x : sol.u.values) CHECK(x == doctest::Approx(std::pow(V, -1 / g.p())).epsilon(1e-12));
            CHECK(sol.normalization_residual < 1e-8);
            const double q = g.p() + 2;
            CHECK(lq_bound_check(sol, g, q) == doctest::Approx(std::pow(V, 1 / q - 1 / g.p())).epsilon(1e-12));
            // q -> p+ continuity: the norm tends to (int u^p)^{1/p} = 1
            CHECK(lq_bound_check(sol, g, g.p() + 1e-9) == doctest::Approx(1.0).epsilon(1e-8));
            CHECK_THROWS_AS(lq_bound_check(sol, g, g.p()), PreconditionError);
        }
    }
}

TEST_CASE("warped tori sit in the flat conformal class") {
    // A dx^2 + B dy^2 = B (dX^2 + dy^2), so lambda = 0 and u B^{(n-2)/4} is constant
    std::mt19937_64 rng(3141);
    for (int trial = 0; trial < 4; ++trial) {
        auto rt = RandomTorus::draw(rng, 3 + trial % 2, false);
        auto g = rt.metric(31);
        auto sol = solve_yamabe(g, {1e-9});
        CHECK(sol.lambda <= 1e-8);
        CHECK(std::abs(sol.lambda) < 1e-8);
        const double e = (g.dim - 2) / 4.0;
        const double c0 = sol.u[0] * std::pow(g.B[0][0], e);
        for (int i = 0; i < sol.u.size(); ++i)
            CHECK(sol.u[i] * std::pow(g.B[0][i], e) == doctest::Approx(c0).epsilon(1e-7));
    }
}

TEST_CASE("solver self-consistency on anisotropic tori") {
    std::mt19937_64 rng(86421);
    for (int trial = 0; trial < 5; ++trial) {
        auto g = RandomTorus::draw(rng, 3 + trial % 2).metric(31);
        const double tol = 1e-8;
        auto sol = solve_yamabe(g, {tol});
        CHECK(sol.el_residual < tol);
        CHECK(sol.normalization_residual < 1e-8);
        for (size_t k = 1; k < sol.functional_history.size(); ++k)
            CHECK(sol.functional_history[k] <= sol.functional_history[k - 1] + 1e-13);
        // tori carry no metric with positive Yamabe constant
        CHECK(sol.lambda <= tol);
        for (double x : sol.u.values) CHECK(x > 0);

        // -a Lap u + S u = lambda V^{-2/n} u^{p-1} with the non-divergence Laplacian
        auto lap = laplacian_nd(g, sol.u);
        auto S = scalar_curvature(g);
        const double mu = sol.lambda * std::pow(volume(g), -2.0 / g.dim);
        for (int i = 0; i < g.size(); ++i)
            CHECK(std::abs(-g.a() * lap[i] + S[i] * sol.u[i] - mu * std::pow(sol.u[i], g.p() - 1)) < 1e-6);
    }
}

TEST_CASE("anisotropy lowers the Yamabe constant below the flat value") {
    auto sol = solve_yamabe(kasner(0.2));
    CHECK(sol.lambda < -1e-3);
    // resolution independence of the spectral discretization
    auto fine = solve_yamabe(kasner(0.2, 63));
    CHECK(fine.lambda == doctest::Approx(sol.lambda).epsilon(1e-8));
}

TEST_CASE("scaling: Yamabe constant invariant, lambda weighted by V^{2/n}") {
    auto g = kasner(0.15);
    auto s1 = solve_yamabe(g);
    const double c = 1.7;
    auto s2 = solve_yamabe(g.scaled(c));
    CHECK(s2.yamabe_constant == doctest::Approx(s1.yamabe_constant).epsilon(1e-6));
    // lambda carries the V^{2/n} weight of the Euler-Lagrange equation under int u^p dv = 1
    CHECK(s2.lambda == doctest::Approx(c * c * s1.lambda).epsilon(1e-6));
    const double k = std::pow(c, -(g.dim - 2) / 2.0);
    for (int i = 0; i < g.size(); ++i) CHECK(s2.u[i] == doctest::Approx(k * s1.u[i]).epsilon(1e-6));
}

TEST_CASE("traceless perturbation expansions") {
    auto flat = TorusMetric::flat(3, 2 * kPi, 31);
    auto bump = PeriodicProfile::from(2 * kPi, 31, [](double x) { return 1 + 0.5 * std::cos(x); });
    auto G = perturb_traceless(flat, 0.3, bump);
    for (int i = 0; i < G.size(); ++i) {
        CHECK(G.A[i] == flat.A[i]);
        for (int k = 0; k < 2; ++k) CHECK(G.B[k][i] == flat.B[k][i]);
    }

    std::mt19937_64 rng(99);
    auto g = RandomTorus::draw(rng, 3).metric(63);
    auto bump63 = PeriodicProfile::from(2 * kPi, 63, [](double x) { return 1 + 0.5 * std::cos(x); });
    CHECK_THROWS_AS(perturb_traceless(g, 1e3, bump63), PreconditionError);
    std::vector<double> taus, dv, ds;
    for (int k = 0; k < 5; ++k) {
        auto e = perturbation_expansion(g, 0.1 / std::pow(2, k), bump63);
        taus.push_back(e.tau);
        dv.push_back(e.volume_change);
        ds.push_back(e.scalar_remainder);
    }
    CHECK(slope(taus, dv) == doctest::Approx(2).epsilon(0.05));
    CHECK(slope(taus, ds) == doctest::Approx(2).epsilon(0.05));
}

TEST_CASE("L^q norms stay capped across a perturbation family") {
    std::vector<double> norms;
    for (int k = 1; k <= 5; ++k) {
        auto g0 = kasner(0.05 * k);
        // common volume 1
        auto g = g0.scaled(std::pow(volume(g0), -1.0 / 3));
        auto S = scalar_curvature(g);
        CHECK(*std::min_element(S.begin(), S.end()) >= -1);
        auto sol = solve_yamabe(g);
        norms.push_back(lq_bound_check(sol, g, g.p() + 2));
    }
    double lo = *std::min_element(norms.begin(), norms.end()), hi = *std::max_element(norms.begin(), norms.end());
    CHECK(hi <= 4 * lo);
}
