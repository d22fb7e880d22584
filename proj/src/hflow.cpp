#include "radial/hflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "radial/curvature.hpp"
#include "radial/errors.hpp"
#include "radial/mass.hpp"

namespace radial {

void FlowConfig::validate(int n) const {
    if (!(T > 0)) throw PreconditionError("flow: T must be positive");
    if (!(cfl > 0 && cfl <= 0.5)) throw PreconditionError("flow: cfl must lie in (0, 0.5]");
    if (!(p_eff(n) > n)) throw PreconditionError("flow: p must exceed n");
    if (!(closeness_eps > 0)) throw PreconditionError("flow: closeness_eps must be positive");
    if (!(tol > 0)) throw PreconditionError("flow: tol must be positive");
    if (collar < 0) throw PreconditionError("flow: collar must be >= 0");
}

namespace {

struct Pair {
    std::vector<double> rr, s;
};

void require_sphere(const WarpedMetric& g, const WarpedMetric& h) {
    require_same_grid(g.grid(), h.grid(), "h-flow");
    if (g.dim != h.dim) throw PreconditionError("h-flow: dimension mismatch");
    if (g.fiber_k != 1.0 || h.fiber_k != 1.0) throw PreconditionError("h-flow: round sphere fibers only");
}

std::vector<MetricJet> raw_jets(const RadialGrid& grid, const std::vector<double>& A, const std::vector<double>& B,
                                Parity p) {
    return metric_jets(grid, A, B, p);
}

// The three reduced groups at one node; g = (A, B), h = (a, b).
void terms_at(int n, const MetricJet& g, const MetricJet& h, double out[6]) {
    const double m = n - 1;
    const double A = g.A, A1 = g.A1, A2 = g.A2, B = g.B, B1 = g.B1, B2 = g.B2;
    const double a = h.A, a1 = h.A1, a2 = h.A2, b = h.B, b1 = h.B1, b2 = h.B2;
    const double lap_rr = A2 / A - 5 * A1 * a1 / (2 * A * a) - a2 / a + 5 * a1 * a1 / (2 * a * a) +
                          m * (b1 * b1 / (2 * b * b) + A1 * b1 / (2 * B * a) - A * b1 * b1 / (2 * B * a * b) -
                               A * a1 * b1 / (2 * B * a * a));
    const double curv_rr = m * (A * b2 / (B * a) - A * b1 * b1 / (2 * B * a * b) - A * a1 * b1 / (2 * B * a * a));
    const double quad_rr = -3 * a1 * a1 / (2 * a * a) + 3 * A1 * a1 / (A * a) - 3 * A1 * A1 / (2 * A * A) +
                           m * (A * b1 * b1 / (B * a * b) - A * B1 * b1 / (B * B * a) - b1 * b1 / (2 * b * b) +
                                B1 * B1 / (2 * B * B));
    const double lap_s = B2 / A - B * b2 / (A * b) + 2 * B * b1 * b1 / (A * b * b) + B * a1 * b1 / (2 * A * a * b) -
                         2 * B1 * b1 / (A * b) - B1 * a1 / (2 * A * a) + A * b1 * b1 / (2 * B * a * a) -
                         B1 * b1 / (2 * B * a) + n * (B1 * b1 / (2 * B * a) - b1 * b1 / (2 * a * b));
    const double curv_s = -2.0 * (n - 2) + (n - 2) * b1 * b1 / (2 * a * b) + B * b2 / (A * b) -
                          B * b1 * b1 / (2 * A * b * b) - B * a1 * b1 / (2 * A * a * b);
    const double quad_s = -A * b1 * b1 / (2 * B * a * a) + b1 * b1 / (a * b) - 3 * B * b1 * b1 / (2 * A * b * b) +
                          2 * B1 * b1 / (A * b) - B1 * B1 / (A * B);
    out[0] = lap_rr, out[1] = curv_rr, out[2] = quad_rr, out[3] = lap_s, out[4] = curv_s, out[5] = quad_s;
}

bool frozen(const RadialGrid& g, int i, int collar) {
    if (i >= g.size() - collar) return true;
    return !g.tip() && i < collar;
}

Parity flow_parity(const RadialGrid& g) { return g.tip() ? Parity::even : Parity::none; }

// dA/dt, dB/dt with the collar held fixed
Pair rhs_raw(int n, const RadialGrid& grid, const std::vector<double>& A, const std::vector<double>& B,
             const std::vector<MetricJet>& hj, int collar) {
    auto gj = raw_jets(grid, A, B, flow_parity(grid));
    Pair out{std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), 0.0)};
    double t[6];
    for (int i = 0; i < grid.size(); ++i) {
        if (frozen(grid, i, collar)) continue;
        terms_at(n, gj[i], hj[i], t);
        out.rr[i] = t[0] + t[1] + t[2];
        out.s[i] = t[3] + t[4] + t[5];
    }
    return out;
}

double W_at(int n, const MetricJet& g, const MetricJet& h) {
    const double m = n - 1;
    return g.A1 / (2 * g.A * g.A) - h.A1 / (2 * h.A * g.A) - m * g.B1 / (2 * g.A * g.B) + m * h.B1 / (2 * h.A * g.B);
}

std::vector<double> W_raw(int n, const RadialGrid& grid, const std::vector<double>& A, const std::vector<double>& B,
                          const std::vector<MetricJet>& hj) {
    auto gj = raw_jets(grid, A, B, flow_parity(grid));
    std::vector<double> W(grid.size());
    for (int i = 0; i < grid.size(); ++i) W[i] = W_at(n, gj[i], hj[i]);
    return W;
}

// Dormand-Prince 5(4)
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

struct Stepper {
    int n;
    RadialGrid grid;
    std::vector<MetricJet> hj;
    int collar;

    // y = [A; B]
    std::vector<double> f(const std::vector<double>& y) const {
        const int N = grid.size();
        std::vector<double> A(y.begin(), y.begin() + N), B(y.begin() + N, y.end());
        Pair p = rhs_raw(n, grid, A, B, hj, collar);
        std::vector<double> out(2 * N);
        std::copy(p.rr.begin(), p.rr.end(), out.begin());
        std::copy(p.s.begin(), p.s.end(), out.begin() + N);
        return out;
    }

    // returns y_new, writes the error estimate into err
    std::vector<double> step(const std::vector<double>& y, const std::vector<double>& k1, double dt,
                             std::vector<double>& err, std::vector<double>& k7) const {
        const size_t M = y.size();
        std::vector<double> tmp(M);
        auto comb = [&](std::initializer_list<std::pair<double, const std::vector<double>*>> terms) {
            for (size_t i = 0; i < M; ++i) {
                double s = y[i];
                for (auto& [c, k] : terms) s += dt * c * (*k)[i];
                tmp[i] = s;
            }
            return f(tmp);
        };
        auto k2 = comb({{a21, &k1}});
        auto k3 = comb({{a31, &k1}, {a32, &k2}});
        auto k4 = comb({{a41, &k1}, {a42, &k2}, {a43, &k3}});
        auto k5 = comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
        auto k6 = comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
        std::vector<double> yn(M);
        for (size_t i = 0; i < M; ++i)
            yn[i] = y[i] + dt * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = f(yn);
        err.resize(M);
        for (size_t i = 0; i < M; ++i)
            err[i] = dt * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        return yn;
    }
};

void check_positive(const std::vector<double>& y, int N, double t) {
    for (int i = 0; i < 2 * N; ++i)
        if (!(y[i] > 0) || !std::isfinite(y[i]))
            throw FlowBreakdown(std::string("h-flow: ") + (i < N ? "A" : "B") + " lost positivity at node " +
                                    std::to_string(i % N) + ", t = " + std::to_string(t),
                                i % N, t);
}

WarpedMetric make_metric(const WarpedMetric& like, const std::vector<double>& y) {
    const int N = like.size();
    const RadialGrid& g = like.grid();
    RadialProfile A(g, std::vector<double>(y.begin(), y.begin() + N), like.A.parity);
    RadialProfile B(g, std::vector<double>(y.begin() + N, y.end()), like.B.parity);
    return WarpedMetric(like.dim, std::move(A), std::move(B), like.tip_regular, like.fiber_k);
}

double closeness_of(const std::vector<double>& y, const WarpedMetric& h) {
    const int N = h.size();
    double c = 1;
    for (int i = 0; i < N; ++i) {
        double ra = y[i] / h.A[i], rb = y[N + i] / h.B[i];
        c = std::max({c, ra, 1 / ra, rb, 1 / rb});
    }
    return c;
}

double min_ratio(const std::vector<double>& y, const WarpedMetric& h) {
    const int N = h.size();
    double c = std::numeric_limits<double>::infinity();
    for (int i = 0; i < N; ++i) c = std::min({c, y[i] / h.A[i], y[N + i] / h.B[i]});
    return c;
}

MonitorSample monitor(double t, const WarpedMetric& g, const WarpedMetric& h, const std::vector<MetricJet>& hj,
                      const FlowConfig& cfg) {
    const RadialGrid& grid = g.grid();
    const int n = g.dim, N = grid.size();
    MonitorSample m{};
    m.t = t;
    auto S = scalar_curvature_warped(g);
    std::vector<double> neg(N);
    m.min_S = std::numeric_limits<double>::infinity();
    for (int i = 0; i < N; ++i) {
        neg[i] = std::max(cfg.sigma - S[i], 0.0);
        m.min_S = std::min(m.min_S, S[i]);
    }
    m.J = integrate_dv(g, neg, Region::whole(grid));
    auto gj = metric_jets(g);
    const double q = cfg.q > 0 ? cfg.q : n + 1.0;
    for (int i = 0; i < N; ++i) {
        if (frozen(grid, i, cfg.collar)) continue;
        TensorJet T{gj[i].A, gj[i].A1, gj[i].A2, gj[i].B, gj[i].B1, gj[i].B2};
        m.grad2 = std::max(m.grad2, tensor_grad_norm2(n, hj[i], T));
        m.hess2 = std::max(m.hess2, tensor_hess_norm2(n, hj[i], T));
        m.W_h = std::max(m.W_h, std::abs(W_at(n, gj[i], hj[i])) * std::sqrt(hj[i].A));
        m.sup_dq_S = std::max(m.sup_dq_S, std::pow(1 + grid[i], q) * std::abs(S[i]));
    }
    std::vector<double> y(g.A.values);
    y.insert(y.end(), g.B.values.begin(), g.B.values.end());
    m.closeness = closeness_of(y, h);
    m.mass = std::numeric_limits<double>::quiet_NaN();
    if (cfg.asymptotically_flat) {
        try {
            m.mass = adm_mass(g, flow_mass_window(grid)).extrapolated_mass;
        } catch (const std::exception&) {
        }
    }
    return m;
}

std::vector<double> schedule(const FlowConfig& cfg) {
    std::vector<double> ts;
    if (!cfg.output_times.empty()) {
        ts = cfg.output_times;
    } else {
        for (int k = 0; k < cfg.outputs; ++k) {
            double e = cfg.outputs > 1 ? 1.0 - double(k) / (cfg.outputs - 1) : 0.0;
            ts.push_back(cfg.T * std::pow(cfg.first_output, e));
        }
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::remove_if(ts.begin(), ts.end(), [&](double t) { return !(t > 0) || t > cfg.T; }), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    if (ts.empty() || ts.back() < cfg.T) ts.push_back(cfg.T);
    return ts;
}

// Lagrange interpolation in x through nodes s0 .. s0+m-1; negative indices
// are parity ghosts across the tip.
double lagrange_x(const RadialGrid& grid, const std::vector<double>& v, Parity par, int s0, int m, double r) {
    const double sgn = par == Parity::odd ? -1.0 : 1.0;
    auto node_x = [&](int k) { return k >= 0 ? grid.x(k) : -grid.x(-k - 1); };
    auto node_v = [&](int k) { return k >= 0 ? v[k] : sgn * v[-k - 1]; };
    const double xq = grid.x_of(std::clamp(r, grid.r_min(), grid.r_max()));
    double out = 0;
    for (int a = 0; a < m; ++a) {
        double l = 1;
        for (int b = 0; b < m; ++b)
            if (b != a) l *= (xq - node_x(s0 + b)) / (node_x(s0 + a) - node_x(s0 + b));
        out += l * node_v(s0 + a);
    }
    return out;
}

// Five-node stencil start for evaluating near node i at radius r: anchored
// at i while r stays between the neighbours of node i, so small
// displacements never switch stencils; otherwise centred on r.
int anchored_stencil(const RadialGrid& grid, int i, double r) {
    const int N = grid.size(), lo = grid.tip() ? -2 : 0;
    const double left = i > 0 ? grid[i - 1] : grid.r_min(), right = i + 1 < N ? grid[i + 1] : grid.r_max();
    int c = (r >= left && r <= right) ? i : std::min(grid.lower_index(r), N - 1);
    return std::clamp(c - 2, lo, N - 5);
}

RadialProfile identity_phi(const RadialGrid& g) {
    return RadialProfile(g, g.nodes(), g.tip() ? Parity::odd : Parity::none);
}

}  // namespace

HFlowTerms hflow_terms(const WarpedMetric& g, const WarpedMetric& h) {
    require_sphere(g, h);
    auto gj = metric_jets(g), hj = metric_jets(h);
    const RadialGrid& grid = g.grid();
    const int N = grid.size();
    std::vector<double> v[6];
    for (auto& x : v) x.resize(N);
    double t[6];
    for (int i = 0; i < N; ++i) {
        terms_at(g.dim, gj[i], hj[i], t);
        for (int k = 0; k < 6; ++k) v[k][i] = t[k];
    }
    auto P = [&](int k) { return RadialProfile(grid, v[k], g.A.parity); };
    return {SymTensor2Radial(g.dim, P(0), P(3)), SymTensor2Radial(g.dim, P(1), P(4)),
            SymTensor2Radial(g.dim, P(2), P(5))};
}

SymTensor2Radial hflow_rhs(const WarpedMetric& g, const WarpedMetric& h) {
    HFlowTerms t = hflow_terms(g, h);
    std::vector<double> rr(g.size()), s(g.size());
    for (int i = 0; i < g.size(); ++i) {
        rr[i] = t.lap.T_rr[i] + t.curv.T_rr[i] + t.quad.T_rr[i];
        s[i] = t.lap.T_s[i] + t.curv.T_s[i] + t.quad.T_s[i];
    }
    return SymTensor2Radial(g.dim, RadialProfile(g.grid(), rr, g.A.parity), RadialProfile(g.grid(), s, g.B.parity));
}

RadialProfile deturck_field(const WarpedMetric& g, const WarpedMetric& h) {
    require_sphere(g, h);
    auto hj = metric_jets(h);
    auto W = W_raw(g.dim, g.grid(), g.A.values, g.B.values, hj);
    return RadialProfile(g.grid(), W, g.grid().tip() ? Parity::odd : Parity::none);
}

double max_stable_dt(const WarpedMetric& g, double cfl) {
    double amin = *std::min_element(g.A.values.begin(), g.A.values.end());
    double h = g.grid().min_spacing();
    return cfl * h * h * amin;
}

FlowState step_flow(const FlowState& s, double dt, const FlowConfig& cfg) {
    require_sphere(s.g, s.h);
    cfg.validate(s.g.dim);
    const double cap = max_stable_dt(s.g, cfg.cfl);
    if (!(dt > 0) || dt > cap)
        throw PreconditionError("step_flow: dt = " + std::to_string(dt) + " exceeds the CFL cap " +
                                std::to_string(cap));
    Stepper st{s.g.dim, s.g.grid(), metric_jets(s.h), cfg.collar};
    const int N = s.g.size();
    std::vector<double> y(s.g.A.values);
    y.insert(y.end(), s.g.B.values.begin(), s.g.B.values.end());
    std::vector<double> err, k7;
    auto yn = st.step(y, st.f(y), dt, err, k7);
    check_positive(yn, N, s.t + dt);
    FlowState out{s.t + dt, make_metric(s.g, yn), s.h, s.W, s.Phi};
    out.W = deturck_field(out.g, out.h);
    return out;
}

FlowTrace run_hflow(const WarpedMetric& g0, const WarpedMetric& h, const FlowConfig& cfg) {
    require_sphere(g0, h);
    const int n = g0.dim, N = g0.size();
    cfg.validate(n);
    FlowTrace tr;
    tr.cfg = cfg;
    auto hj = metric_jets(h);
    Stepper st{n, g0.grid(), hj, cfg.collar};

    std::vector<double> y(g0.A.values);
    y.insert(y.end(), g0.B.values.begin(), g0.B.values.end());
    const double c0 = closeness_of(y, h);
    if (c0 > 1 + cfg.closeness_eps)
        throw PreconditionError("run_hflow: g0 is only " + std::to_string(c0) + "-close to h, need " +
                                std::to_string(1 + cfg.closeness_eps));

    auto record = [&](double t, const std::vector<double>& yy) {
        WarpedMetric g = make_metric(g0, yy);
        FlowState s{t, g, h, deturck_field(g, h), identity_phi(g0.grid())};
        tr.monitors.push_back(monitor(t, g, h, hj, cfg));
        tr.states.push_back(std::move(s));
    };
    auto record_W = [&](double t, const std::vector<double>& yy) {
        tr.w_times.push_back(t);
        tr.w_values.push_back(W_raw(n, g0.grid(), {yy.begin(), yy.begin() + N}, {yy.begin() + N, yy.end()}, hj));
    };

    record(0.0, y);
    tr.min_eig_ratio = min_ratio(y, h);
    const auto outs = schedule(cfg);
    const double limit = 1 + 2 * cfg.closeness_eps;
    double t = 0;
    double dt = std::min(max_stable_dt(g0, cfg.cfl), outs.front());
    auto k1 = st.f(y);
    std::vector<double> err, k7;
    for (double target : outs) {
        while (t < target) {
            if (tr.steps + tr.rejected >= cfg.max_steps) {
                tr.truncated = true;
                tr.diagnostic = "step budget exhausted at t = " + std::to_string(t);
                return tr;
            }
            double cap = max_stable_dt(make_metric(g0, y), cfg.cfl);
            double h_try = std::min({dt, cap, target - t});
            bool last = h_try >= target - t;
            auto yn = st.step(y, k1, h_try, err, k7);
            double e = 0;
            bool finite = true;
            for (size_t i = 0; i < y.size(); ++i) {
                if (!std::isfinite(yn[i])) finite = false;
                e = std::max(e, std::abs(err[i]) / (cfg.tol * (1 + std::abs(y[i]))));
            }
            if (!finite) e = 1e10;
            if (e > 1) {
                ++tr.rejected;
                dt = h_try * std::max(0.2, 0.9 * std::pow(e, -0.2));
                if (dt < 1e-14 * std::max(target, 1e-300)) {
                    check_positive(yn, N, t + h_try);
                    throw FlowBreakdown("h-flow: step size underflow at t = " + std::to_string(t), -1, t);
                }
                continue;
            }
            check_positive(yn, N, t + h_try);
            record_W(t, y);
            ++tr.steps;
            t = last ? target : t + h_try;
            y.swap(yn);
            k1 = k7;
            tr.min_eig_ratio = std::min(tr.min_eig_ratio, min_ratio(y, h));
            double grow = e > 0 ? std::min(5.0, 0.9 * std::pow(e, -0.2)) : 5.0;
            dt = std::max(dt, h_try) * grow;
            double c = closeness_of(y, h);
            if (c > limit) {
                record(t, y);
                record_W(t, y);
                tr.truncated = true;
                tr.diagnostic = "closeness " + std::to_string(c) + " exceeded 1 + 2 eps = " + std::to_string(limit) +
                                " at t = " + std::to_string(t);
                return tr;
            }
        }
        record(t, y);
    }
    record_W(t, y);
    return tr;
}

std::vector<RadialProfile> integrate_displacement(const FlowTrace& trace, int substeps) {
    if (trace.states.empty()) return {};
    if (substeps < 1) throw PreconditionError("integrate_diffeo: substeps must be >= 1");
    const RadialGrid& grid = trace.states.front().g.grid();
    const Parity par = grid.tip() ? Parity::odd : Parity::none;
    const auto& T = trace.w_times;
    const auto& Wv = trace.w_values;
    const int K = static_cast<int>(T.size());
    const int N = grid.size();

    // W(r, t): cubic in t through the four nearest records and quartic in x
    // on a five-node stencil anchored at each trajectory's starting node
    // (re-chosen per record interval if the trajectory has moved past a
    // neighbour).  Every trajectory then sees a field that is polynomial in
    // x, so RK4 keeps its order, and Phi stays smooth from node to node.
    auto W = [&](double r, double t, int j, int s0) {
        if (K == 1) return lagrange_x(grid, Wv[0], par, s0, 5, r);
        int s = std::clamp(j - 1, 0, std::max(0, K - 4));
        int m = std::min(4, K);
        double v = 0;
        for (int a = 0; a < m; ++a) {
            double w = 1;
            for (int b = 0; b < m; ++b)
                if (b != a) w *= (t - T[s + b]) / (T[s + a] - T[s + b]);
            v += w * lagrange_x(grid, Wv[s + a], par, s0, 5, r);
        }
        return v;
    };
    std::vector<int> sten(N);

    // the unknown is D = Phi - r, so rounding stays relative to the
    // displacement and survives the derivatives taken after pullback
    const auto& r0 = grid.nodes();
    std::vector<double> D(N, 0.0);
    std::vector<RadialProfile> out;
    size_t next = 0;
    auto snapshot = [&](double t) {
        while (next < trace.states.size() && std::abs(trace.states[next].t - t) <= 1e-12 * std::max(1.0, t)) {
            for (int i = 0; i + 1 < N; ++i)
                if (!(r0[i + 1] + D[i + 1] > r0[i] + D[i]))
                    throw ConstructionError("diffeomorphism lost monotonicity at t = " + std::to_string(t));
            out.emplace_back(grid, D, par);
            ++next;
        }
    };
    if (K == 0) {
        snapshot(0.0);
        return out;
    }
    snapshot(T[0]);
    for (int j = 0; j + 1 < K; ++j) {
        double h = (T[j + 1] - T[j]) / substeps;
        if (h <= 0) continue;
        for (int i = 0; i < N; ++i) sten[i] = anchored_stencil(grid, i, r0[i] + D[i]);
        for (int s = 0; s < substeps; ++s) {
            double t = T[j] + s * h;
            for (int i = 0; i < N; ++i) {
                double d = D[i], x = r0[i];
                int st = sten[i];
                double k1 = -W(x + d, t, j, st);
                double k2 = -W(x + (d + 0.5 * h * k1), t + 0.5 * h, j, st);
                double k3 = -W(x + (d + 0.5 * h * k2), t + 0.5 * h, j, st);
                double k4 = -W(x + (d + h * k3), t + h, j, st);
                D[i] = d + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
            }
        }
        snapshot(T[j + 1]);
    }
    return out;
}

std::vector<RadialProfile> integrate_diffeo(const FlowTrace& trace, int substeps) {
    auto D = integrate_displacement(trace, substeps);
    for (auto& d : D)
        for (int i = 0; i < d.size(); ++i) d.values[i] += d.grid[i];
    return D;
}

WarpedMetric pullback_metric(const WarpedMetric& g, const RadialProfile& Phi) {
    require_same_grid(g.grid(), Phi.grid, "pullback");
    std::vector<double> D(Phi.values);
    for (int i = 0; i < Phi.size(); ++i) D[i] -= Phi.grid[i];
    return pullback_displacement(g, RadialProfile(Phi.grid, std::move(D), Phi.parity));
}

WarpedMetric pullback_displacement(const WarpedMetric& g, const RadialProfile& D) {
    const RadialGrid& grid = g.grid();
    require_same_grid(grid, D.grid, "pullback");
    const int N = grid.size();
    const double slack = 1e-9 * (grid.r_max() - grid.r_min());
    std::vector<double> Phi(N);
    for (int i = 0; i < N; ++i) Phi[i] = grid[i] + D[i];
    for (int i = 0; i < N; ++i) {
        if (Phi[i] < grid.r_min() - slack || Phi[i] > grid.r_max() + slack)
            throw DomainError("pullback: Phi leaves the grid range at node " + std::to_string(i));
        if (i + 1 < N && !(Phi[i + 1] > Phi[i])) throw DomainError("pullback: Phi is not increasing");
    }
    auto dphi = d_dr(grid, D.values, D.parity);
    for (double& d : dphi) d += 1;
    // on a tip grid B is carried through the regular quotient B / r^2, so
    // interpolation error is not divided by r^2 in the curvature
    const bool quotient = grid.tip() && g.B.parity == Parity::even;
    std::vector<double> q(g.B.values);
    if (quotient)
        for (int i = 0; i < N; ++i) q[i] /= grid[i] * grid[i];
    // five-point stencil anchored at node i rather than at the cell holding
    // Phi(r_i): the interpolation error then varies smoothly from node to
    // node instead of jumping where Phi crosses a node, which matters once
    // curvature is differentiated again
    std::vector<double> A(N), B(N);
    for (int i = 0; i < N; ++i) {
        double x = std::clamp(Phi[i], grid.r_min(), grid.r_max());
        int s0 = anchored_stencil(grid, i, x);
        A[i] = lagrange_x(grid, g.A.values, g.A.parity, s0, 5, x) * dphi[i] * dphi[i];
        B[i] = lagrange_x(grid, q, g.B.parity, s0, 5, x);
        if (quotient) B[i] *= x * x;
    }
    return WarpedMetric(g.dim, RadialProfile(grid, A, g.A.parity), RadialProfile(grid, B, g.B.parity),
                        g.tip_regular, g.fiber_k);
}

EstimateReport monitor_estimates(const FlowTrace& trace, const FlowConfig& cfg) {
    EstimateReport rep;
    const int n = trace.states.empty() ? 3 : trace.states.front().g.dim;
    rep.delta = cfg.delta(n);
    const double d = rep.delta, gam = (1 - d) / 2;
    for (const auto& m : trace.monitors) {
        rep.t.push_back(m.t);
        rep.grad_scaled.push_back(std::pow(m.t, d) * m.grad2);
        rep.hess_scaled.push_back(std::pow(m.t, 1 + d) * m.hess2);
        rep.W_scaled.push_back(std::pow(m.t, d / 2) * m.W_h);
        rep.J.push_back(m.J);
    }
    for (size_t k = 0; k < rep.t.size(); ++k) {
        rep.sup_grad_scaled = std::max(rep.sup_grad_scaled, rep.grad_scaled[k]);
        rep.sup_hess_scaled = std::max(rep.sup_hess_scaled, rep.hess_scaled[k]);
        rep.sup_W_scaled = std::max(rep.sup_W_scaled, rep.W_scaled[k]);
    }
    // J(0+): the series starts at the first positive time
    double vol = 0;
    if (!trace.states.empty()) vol = volume(trace.states.front().g, Region::whole(trace.states.front().g.grid()));
    const double floor = 1e-14 * std::max(vol, 1.0);
    for (size_t k = 0; k + 1 < rep.t.size(); ++k) {
        if (!(rep.t[k] > 0)) continue;
        double J0 = rep.J[k] <= floor ? 0 : rep.J[k], J1 = rep.J[k + 1] <= floor ? 0 : rep.J[k + 1];
        if (J1 <= J0) continue;
        if (J0 == 0) {
            rep.J_monotone = false;
            continue;
        }
        double dtg = std::pow(rep.t[k + 1], gam) - std::pow(rep.t[k], gam);
        rep.C_hat = std::max(rep.C_hat, std::log(J1 / J0) / dtg);
    }
    rep.verdict = rep.J_monotone ? "measured" : "fail";
    return rep;
}

}  // namespace radial
