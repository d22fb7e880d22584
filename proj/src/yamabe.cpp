#include "radial/yamabe.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>


namespace radial {

PeriodicProfile::PeriodicProfile(double L_, std::vector<double> v) : L(L_), values(std::move(v)) {
    if (!(L > 0)) throw PreconditionError("period must be positive");
    if (values.size() < 9 || values.size() % 2 == 0) throw PreconditionError("periodic grid needs an odd count >= 9");
    for (double x : values)
        if (!std::isfinite(x)) throw DomainError("non-finite periodic sample");
}

namespace {

// derivative of the trigonometric interpolant on an odd grid; differencing
// against the centre node makes constants exact zeros
std::vector<double> dft_derivative(double L, const std::vector<double>& f) {
    const int N = static_cast<int>(f.size());
    const double h = 2 * std::numbers::pi / N, s = 2 * std::numbers::pi / L;
    // the weight (-1)^k / (2 sin(k h / 2)) is N-periodic in k for odd N
    std::vector<double> c(N, 0.0), out(N);
    for (int k = 1; k < N; ++k) c[k] = 0.5 * ((k % 2) ? -1.0 : 1.0) / std::sin(k * h / 2);
    for (int i = 0; i < N; ++i) {
        double d = 0;
        for (int j = 0; j < N; ++j) d += c[(i - j + N) % N] * (f[j] - f[i]);
        out[i] = s * d;
    }
    return out;
}

}  // namespace

PeriodicJets spectral_jets(const PeriodicProfile& f) {
    // with N odd there is no Nyquist mode, so D^2 is the exact second
    // derivative of the interpolant
    auto d1 = dft_derivative(f.L, f.values);
    auto d2 = dft_derivative(f.L, d1);
    return {f.values, std::move(d1), std::move(d2)};
}

TorusMetric::TorusMetric(int n, PeriodicProfile A_, const PeriodicProfile& B_, double fiber)
    : TorusMetric(n, std::move(A_), std::vector<PeriodicProfile>(n >= 3 ? n - 1 : 1, B_), fiber) {}

TorusMetric::TorusMetric(int n, PeriodicProfile A_, std::vector<PeriodicProfile> B_, double fiber)
    : dim(n), A(std::move(A_)), B(std::move(B_)), fiber_length(fiber) {
    if (n < 3) throw PreconditionError("torus dimension must be at least 3");
    if (static_cast<int>(B.size()) != n - 1) throw PreconditionError("torus metric needs n - 1 fiber coefficients");
    if (!(fiber > 0)) throw PreconditionError("fiber length must be positive");
    for (const auto& b : B)
        if (!A.same_grid(b)) throw PreconditionError("metric coefficients on different periodic grids");
    for (int i = 0; i < A.size(); ++i) {
        bool ok = A[i] > 0;
        for (const auto& b : B) ok = ok && b[i] > 0;
        if (!ok) throw DomainError("torus metric coefficient not positive at node " + std::to_string(i));
    }
}

TorusMetric TorusMetric::flat(int n, double L, int N, double fiber) {
    auto one = PeriodicProfile::from(L, N, [](double) { return 1.0; });
    return TorusMetric(n, one, one, fiber);
}

TorusMetric TorusMetric::scaled(double c) const {
    auto A2 = A;
    auto B2 = B;
    for (auto& v : A2.values) v *= c * c;
    // the coordinate fiber keeps its side; the factor sits in B
    for (auto& b : B2)
        for (auto& v : b.values) v *= c * c;
    return TorusMetric(dim, A2, B2, fiber_length);
}

namespace {

std::vector<double> weight(const TorusMetric& g) {
    std::vector<double> w(g.size());
    for (int i = 0; i < g.size(); ++i) {
        double det = g.A[i];
        for (const auto& b : g.B) det *= b[i];
        w[i] = std::sqrt(det);
    }
    return w;
}

std::vector<double> d1(double L, const std::vector<double>& v) { return dft_derivative(L, v); }

double fiber_area(const TorusMetric& g) { return std::pow(g.fiber_length, g.dim - 1); }

struct Jets {
    PeriodicJets A;
    std::vector<PeriodicJets> B;
};

Jets jets_of(const TorusMetric& g) {
    Jets J{spectral_jets(g.A), {}};
    for (const auto& b : g.B) J.B.push_back(spectral_jets(b));
    return J;
}

// With l_k = B_k'/(2 B_k) and arclength s: phi_k,s / phi_k = l_k / sqrt(A)
// and phi_k,ss / phi_k = (B_k''/(2 B_k) - l_k^2 - l_k l_0) / A, l_0 = A'/(2A).
// Then Ric_ss = -sum phi_k,ss/phi_k and
// Ric(e_k, e_k) = -phi_k,ss/phi_k - (phi_k,s/phi_k) sum_{j != k} phi_j,s/phi_j.
struct PointRicci {
    double xx;
    std::vector<double> fiber;  // coordinate components Ric(dy_k, dy_k)
    double scalar;
};

PointRicci ricci_at(const Jets& J, int i) {
    const int m = static_cast<int>(J.B.size());
    const double A = J.A.v[i], l0 = J.A.d1[i] / (2 * A);
    std::vector<double> kap(m), sig(m);
    double ksum = 0, ssum = 0, ssq = 0;
    for (int k = 0; k < m; ++k) {
        const double b = J.B[k].v[i], l = J.B[k].d1[i] / (2 * b);
        kap[k] = (J.B[k].d2[i] / (2 * b) - l * l - l * l0) / A;
        sig[k] = l / std::sqrt(A);
        ksum += kap[k], ssum += sig[k], ssq += sig[k] * sig[k];
    }
    PointRicci r{-A * ksum, std::vector<double>(m), -2 * ksum - (ssum * ssum - ssq)};
    for (int k = 0; k < m; ++k) r.fiber[k] = J.B[k].v[i] * (-kap[k] - sig[k] * (ssum - sig[k]));
    return r;
}

// E(u) = int (a |grad u|^2 + S u^2) dv and the magnitude of its two parts
struct Energy {
    double E, scale;
};

Energy energy(const TorusMetric& g, const std::vector<double>& w, const std::vector<double>& S,
              const std::vector<double>& u) {
    auto du = d1(g.L(), u);
    double grad = 0, pot = 0, absp = 0;
    for (int i = 0; i < g.size(); ++i) {
        grad += du[i] * du[i] / g.A[i] * w[i];
        pot += S[i] * u[i] * u[i] * w[i];
        absp += std::abs(S[i]) * u[i] * u[i] * w[i];
    }
    const double c = g.A.h() * fiber_area(g);
    return {c * (g.a() * grad + pot), c * (g.a() * grad + absp)};
}

double lp_integral(const TorusMetric& g, const std::vector<double>& w, const std::vector<double>& u, double p) {
    double s = 0;
    for (int i = 0; i < g.size(); ++i) s += std::pow(u[i], p) * w[i];
    return s * g.A.h() * fiber_area(g);
}

// Inverse of w_bar (a k^2 / A_bar + mu) as a Fourier multiplier: the
// descent direction is then the gradient for a shifted H^1 product, which
// leaves unit steps stable at every resolution.
class Preconditioner {
public:
    Preconditioner(const TorusMetric& g, const std::vector<double>& w) : N_(g.size()), buf_(N_), spec_(N_ / 2 + 1) {
        double Abar = 0, wbar = 0;
        for (int i = 0; i < N_; ++i) Abar += g.A[i] / N_, wbar += w[i] / N_;
        const double k0 = 2 * std::numbers::pi / g.L(), mu = g.a() * k0 * k0 / Abar;
        inv_.resize(N_ / 2 + 1);
        for (int k = 0; k <= N_ / 2; ++k) inv_[k] = 1 / (wbar * (g.a() * k * k * k0 * k0 / Abar + mu)) / N_;
        auto* c = reinterpret_cast<fftw_complex*>(spec_.data());
        // UNALIGNED: the codelets must not depend on where the vectors
        // happen to land, or results could differ bitwise between runs
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd_ = fftw_plan_dft_r2c_1d(N_, buf_.data(), c, FFTW_ESTIMATE | FFTW_UNALIGNED);
        bwd_ = fftw_plan_dft_c2r_1d(N_, c, buf_.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    ~Preconditioner() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    Preconditioner(const Preconditioner&) = delete;
    Preconditioner& operator=(const Preconditioner&) = delete;

    std::vector<double> apply(const std::vector<double>& f) {
        std::copy(f.begin(), f.end(), buf_.begin());
        fftw_execute(fwd_);
        for (int k = 0; k <= N_ / 2; ++k) spec_[k] *= inv_[k];
        fftw_execute(bwd_);
        return buf_;
    }

private:
    // the planner is the one part of FFTW that is not reentrant
    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }
    int N_;
    std::vector<double> buf_, inv_;
    std::vector<std::complex<double>> spec_;
    fftw_plan fwd_, bwd_;
};

}  // namespace

double integrate_dv(const TorusMetric& g, const std::vector<double>& f) {
    auto w = weight(g);
    double s = 0;
    for (int i = 0; i < g.size(); ++i) s += f.at(i) * w[i];
    return s * g.A.h() * fiber_area(g);
}

double volume(const TorusMetric& g) { return integrate_dv(g, std::vector<double>(g.size(), 1.0)); }

TorusCurvature curvature(const TorusMetric& g) {
    const int N = g.size(), m = g.dim - 1;
    auto J = jets_of(g);
    std::vector<double> xx(N), S(N);
    std::vector<std::vector<double>> fib(m, std::vector<double>(N));
    for (int i = 0; i < N; ++i) {
        auto r = ricci_at(J, i);
        xx[i] = r.xx;
        S[i] = r.scalar;
        for (int k = 0; k < m; ++k) fib[k][i] = r.fiber[k];
    }
    TorusCurvature c{{PeriodicProfile(g.L(), xx), {}}, S};
    for (auto& f : fib) c.ricci.T_fiber.emplace_back(g.L(), std::move(f));
    return c;
}

std::vector<double> scalar_curvature(const TorusMetric& g) { return curvature(g).scalar; }

// divergence form (1/w) d(w/A du), which keeps the discrete operator
// symmetric in the dv inner product
std::vector<double> laplacian(const TorusMetric& g, const std::vector<double>& u) {
    auto w = weight(g);
    auto du = d1(g.L(), u);
    std::vector<double> f(g.size());
    for (int i = 0; i < g.size(); ++i) f[i] = w[i] / g.A[i] * du[i];
    auto df = d1(g.L(), f);
    for (int i = 0; i < g.size(); ++i) df[i] /= w[i];
    return df;
}

TorusTensor traceless_ricci(const TorusMetric& g) {
    auto c = curvature(g);
    auto T = c.ricci;
    for (int i = 0; i < g.size(); ++i) {
        const double s = c.scalar[i] / g.dim;
        T.T_xx.values[i] -= s * g.A[i];
        for (size_t k = 0; k < T.T_fiber.size(); ++k) T.T_fiber[k].values[i] -= s * g.B[k][i];
    }
    return T;
}

std::vector<double> linearized_scalar(const TorusMetric& g, const TorusTensor& h) {
    const int N = g.size(), m = g.dim - 1;
    if (!h.T_xx.same_grid(g.A) || static_cast<int>(h.T_fiber.size()) != m)
        throw PreconditionError("tensor does not match the metric");
    for (const auto& t : h.T_fiber)
        if (!t.same_grid(g.A)) throw PreconditionError("tensor on a different grid");
    auto J = jets_of(g);
    auto H = spectral_jets(h.T_xx);
    std::vector<double> q(N), t(N);
    for (int i = 0; i < N; ++i) {
        const double A = g.A[i], A1 = J.A.d1[i];
        // x component of div h
        double V = H.d1[i] / A - A1 * H.v[i] / (A * A);
        double tr = H.v[i] / A;
        for (int k = 0; k < m; ++k) {
            const double b = g.B[k][i], b1 = J.B[k].d1[i], hk = h.T_fiber[k][i];
            V += b1 * H.v[i] / (2 * A * b) - b1 * hk / (2 * b * b);
            tr += hk / b;
        }
        q[i] = V / A;
        t[i] = tr;
    }
    auto Q = spectral_jets(PeriodicProfile(g.L(), q)), T = spectral_jets(PeriodicProfile(g.L(), t));
    std::vector<double> out(N);
    for (int i = 0; i < N; ++i) {
        const double A = g.A[i], l0 = J.A.d1[i] / (2 * A);
        double lsum = 0;
        for (int k = 0; k < m; ++k) lsum += J.B[k].d1[i] / (2 * g.B[k][i]);
        const double divdiv = Q.d1[i] + Q.v[i] * (l0 + lsum);
        const double lap = (T.d2[i] + T.d1[i] * (lsum - l0)) / A;
        auto r = ricci_at(J, i);
        double inner = H.v[i] * r.xx / (A * A);
        for (int k = 0; k < m; ++k) inner += h.T_fiber[k][i] * r.fiber[k] / (g.B[k][i] * g.B[k][i]);
        out[i] = divdiv - lap - inner;
    }
    return out;
}

YamabeSolution solve_yamabe(const TorusMetric& g, const YamabeOptions& opt) {
    if (!(opt.tol > 0) || opt.max_iter < 1) throw PreconditionError("yamabe options out of range");
    const int N = g.size();
    const double a = g.a(), p = g.p(), V = volume(g);
    const auto w = weight(g);
    const auto S = scalar_curvature(g);

    std::vector<double> u(N, std::pow(V, -1 / p)), R(N), v(N);
    Energy E = energy(g, w, S, u);
    YamabeSolution sol{PeriodicProfile(g.L(), u), 0, 0, {E.E}, 0, 0, 0};

    auto residual = [&](const std::vector<double>& x, double e) {
        auto lap = laplacian(g, x);
        double sup = 0;
        for (int i = 0; i < N; ++i) {
            R[i] = -a * lap[i] + S[i] * x[i] - e * std::pow(x[i], p - 1);
            sup = std::max(sup, std::abs(R[i]));
        }
        return sup;
    };

    Preconditioner P(g, w);
    const double dvx = g.A.h() * fiber_area(g);
    double res = residual(u, E.E);
    int it = 0;
    for (; it < opt.max_iter && res >= opt.tol; ++it) {
        std::vector<double> wR(N);
        for (int i = 0; i < N; ++i) wR[i] = w[i] * R[i];
        auto d = P.apply(wR);
        // slope of the quotient along -d
        double G = 0;
        for (int i = 0; i < N; ++i) G += 2 * wR[i] * d[i];
        G *= dvx;
        // quotient differences below this are rounding, not descent
        const double slack = 1e-15 * E.scale;
        double s = 1;
        for (;;) {
            bool positive = true;
            for (int i = 0; i < N; ++i) {
                v[i] = u[i] - s * d[i];
                positive = positive && v[i] > 0;
            }
            if (positive) {
                Energy Ev = energy(g, w, S, v);
                double Qv = Ev.E / std::pow(lp_integral(g, w, v, p), 2 / p);
                if (Qv <= E.E - 1e-4 * s * G + slack) break;
            }
            s /= 2;
            if (s < 1e-20)
                throw NonConvergence("yamabe line search stalled with residual " + std::to_string(res), res);
        }
        const double c = std::pow(lp_integral(g, w, v, p), -1 / p);
        for (int i = 0; i < N; ++i) u[i] = c * v[i];
        E = energy(g, w, S, u);
        sol.functional_history.push_back(E.E);
        res = residual(u, E.E);
    }
    if (res >= opt.tol)
        throw NonConvergence("yamabe descent hit the iteration budget with residual " + std::to_string(res), res);

    sol.u = PeriodicProfile(g.L(), u);
    sol.yamabe_constant = E.E;
    sol.lambda = E.E * std::pow(V, 2.0 / g.dim);
    sol.normalization_residual = std::abs(lp_integral(g, w, u, p) - 1);
    sol.el_residual = res;
    sol.iterations = it;
    return sol;
}

double lq_bound_check(const YamabeSolution& sol, const TorusMetric& g, double q) {
    if (!(q > g.p())) throw PreconditionError("L^q bound needs q > p = " + std::to_string(g.p()));
    if (!sol.u.same_grid(g.A)) throw PreconditionError("solution and metric on different grids");
    return std::pow(lp_integral(g, weight(g), sol.u.values, q), 1 / q);
}

TorusMetric perturb_traceless(const TorusMetric& g, double tau, const PeriodicProfile& bump) {
    if (!bump.same_grid(g.A)) throw PreconditionError("bump on a different grid");
    auto T = traceless_ricci(g);
    auto A = g.A;
    auto B = g.B;
    for (int i = 0; i < g.size(); ++i) {
        A.values[i] += tau * bump[i] * T.T_xx[i];
        bool ok = A[i] > 0;
        for (size_t k = 0; k < B.size(); ++k) {
            B[k].values[i] += tau * bump[i] * T.T_fiber[k][i];
            ok = ok && B[k][i] > 0;
        }
        if (!ok)
            throw PreconditionError("perturbation with tau = " + std::to_string(tau) + " loses positivity at node " +
                                    std::to_string(i));
    }
    return TorusMetric(g.dim, A, B, g.fiber_length);
}

PerturbationExpansion perturbation_expansion(const TorusMetric& g, double tau, const PeriodicProfile& bump) {
    auto G = perturb_traceless(g, tau, bump);
    auto T = traceless_ricci(g);
    for (int i = 0; i < g.size(); ++i) {
        T.T_xx.values[i] *= bump[i];
        for (auto& t : T.T_fiber) t.values[i] *= bump[i];
    }
    auto DS = linearized_scalar(g, T);
    auto S0 = scalar_curvature(g), S1 = scalar_curvature(G);
    double rem = 0;
    for (int i = 0; i < g.size(); ++i) rem = std::max(rem, std::abs(S1[i] - S0[i] - tau * DS[i]));
    return {tau, std::abs(volume(G) - volume(g)), rem};
}

}  // namespace radial
