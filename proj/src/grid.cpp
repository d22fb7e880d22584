#include "radial/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "radial/errors.hpp"

namespace radial {

namespace {

constexpr int kMinNodes = 16;

double ghost(const std::vector<double>& f, int k, Parity p) {
    if (k >= 0) return f[k];
    double v = f[-1 - k];
    return p == Parity::odd ? -v : v;
}

// Fornberg's finite-difference weights at z for nodes x[0..m-1], derivative
// orders 0..2.  c[d][j] multiplies f(x[j]).
void fd_weights(double z, const double* x, int m, double c[3][8]) {
    for (int d = 0; d < 3; ++d)
        for (int j = 0; j < m; ++j) c[d][j] = 0;
    double c1 = 1, c4 = x[0] - z;
    c[0][0] = 1;
    for (int i = 1; i < m; ++i) {
        int mn = std::min(i, 2);
        double c2 = 1, c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
}

// Value of a cubic through nodes s..s+3 at computational coordinate xs.
double lagrange4(const RadialGrid& g, const std::vector<double>& f, int s, double xs, Parity p) {
    double out = 0;
    for (int a = 0; a < 4; ++a) {
        double xa = g.x(0) + (s + a) * g.dx();
        double w = 1;
        for (int b = 0; b < 4; ++b) {
            if (b == a) continue;
            double xb = g.x(0) + (s + b) * g.dx();
            w *= (xs - xb) / (xa - xb);
        }
        out += w * ghost(f, s + a, p);
    }
    return out;
}

int stencil_start(const RadialGrid& g, double xs, Parity p, std::optional<double> bp) {
    const int n = g.size();
    int j = static_cast<int>(std::floor((xs - g.x(0)) / g.dx()));
    int s = j - 1;
    if (bp) {
        double xb = g.x_of(*bp);
        double kb = (xb - g.x(0)) / g.dx();
        if (xs < xb) {
            int last = static_cast<int>(std::floor(kb + 1e-9));
            s = std::min(s, last - 3);
        } else {
            int first = static_cast<int>(std::ceil(kb - 1e-9));
            s = std::max(s, first);
        }
    }
    int lo = (g.tip() && p != Parity::none) ? -3 : 0;
    return std::clamp(s, lo, n - 4);
}

double interp_x(const RadialGrid& g, const std::vector<double>& f, double xs, Parity p,
                std::optional<double> bp = std::nullopt) {
    return lagrange4(g, f, stencil_start(g, xs, p, bp), xs, p);
}

const std::array<double, 3> kGaussX = {-0.7745966692414834, 0.0, 0.7745966692414834};
const std::array<double, 3> kGaussW = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

double gauss_piece(const RadialGrid& g, const std::vector<double>& G, double x0, double x1) {
    if (x1 <= x0) return 0;
    double mid = 0.5 * (x0 + x1), half = 0.5 * (x1 - x0), acc = 0;
    for (int k = 0; k < 3; ++k) acc += kGaussW[k] * interp_x(g, G, mid + half * kGaussX[k], Parity::none);
    return acc * half;
}

}  // namespace

void RadialGrid::map(const Data& d, double x, double& r, double& rx, double& rxx) {
    if (d.mode == Spacing::uniform) {
        double L = d.r_max - d.r_min;
        r = d.r_min + L * x;
        rx = L;
        rxx = 0;
    } else if (d.r_min == 0.0) {
        r = d.c * std::sinh(d.kappa * x);
        rx = d.c * d.kappa * std::cosh(d.kappa * x);
        rxx = d.c * d.kappa * d.kappa * std::sinh(d.kappa * x);
    } else {
        double lq = std::log(d.r_max / d.r_min);
        r = d.r_min * std::exp(lq * x);
        rx = lq * r;
        rxx = lq * lq * r;
    }
}

RadialGrid RadialGrid::build(double r_min, double r_max, int n, Spacing mode, double kappa) {
    if (n < kMinNodes) throw ResolutionError("radial grid needs at least 16 nodes, got " + std::to_string(n));
    if (!(r_min >= 0) || !(r_max > r_min)) throw DomainError("radial grid needs 0 <= r_min < r_max");
    auto d = std::make_shared<Data>();
    d->r_min = r_min;
    d->r_max = r_max;
    d->mode = mode;
    d->kappa = kappa;
    if (mode == Spacing::geometric && r_min == 0.0) {
        if (!(kappa > 0)) throw DomainError("geometric tip grid needs kappa > 0");
        d->c = r_max / std::sinh(kappa);
    }
    const bool cell = r_min == 0.0;
    d->dx = cell ? 1.0 / n : 1.0 / (n - 1);
    d->x.resize(n);
    d->r.resize(n);
    d->rx.resize(n);
    d->rxx.resize(n);
    for (int i = 0; i < n; ++i) {
        d->x[i] = cell ? (i + 0.5) * d->dx : i * d->dx;
        map(*d, d->x[i], d->r[i], d->rx[i], d->rxx[i]);
    }
    if (!cell) d->r.back() = r_max;
    return RadialGrid(std::move(d));
}

RadialGrid RadialGrid::uniform(double r_min, double r_max, int n) {
    return build(r_min, r_max, n, Spacing::uniform, 0.0);
}

RadialGrid RadialGrid::geometric(double r_min, double r_max, int n, double kappa) {
    return build(r_min, r_max, n, Spacing::geometric, kappa);
}

double RadialGrid::r_of(double x) const {
    double r, rx, rxx;
    map(*d_, x, r, rx, rxx);
    return r;
}

double RadialGrid::x_of(double r) const {
    const Data& d = *d_;
    if (d.mode == Spacing::uniform) return (r - d.r_min) / (d.r_max - d.r_min);
    if (d.r_min == 0.0) return std::asinh(r / d.c) / d.kappa;
    return std::log(r / d.r_min) / std::log(d.r_max / d.r_min);
}

double RadialGrid::min_spacing() const {
    double m = d_->r[1] - d_->r[0];
    for (size_t i = 1; i + 1 < d_->r.size(); ++i) m = std::min(m, d_->r[i + 1] - d_->r[i]);
    return m;
}

int RadialGrid::lower_index(double r) const {
    return static_cast<int>(std::lower_bound(d_->r.begin(), d_->r.end(), r) - d_->r.begin());
}

RadialGrid RadialGrid::with_end_order(int order) const {
    if (order != 2 && order != 4) throw PreconditionError("end stencil order must be 2 or 4");
    auto d = std::make_shared<Data>(*d_);
    d->end_order = order;
    return RadialGrid(d);
}

bool RadialGrid::same_as(const RadialGrid& o) const {
    if (d_ == o.d_) return true;
    return d_->mode == o.d_->mode && d_->r_min == o.d_->r_min && d_->r_max == o.d_->r_max &&
           d_->kappa == o.d_->kappa && d_->r.size() == o.d_->r.size();
}

RadialProfile::RadialProfile(RadialGrid g, std::vector<double> v, Parity p)
    : grid(std::move(g)), values(std::move(v)), parity(p) {
    if (static_cast<int>(values.size()) != grid.size())
        throw ContractError("profile length does not match its grid");
    for (size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i]))
            throw DomainError("profile value not finite at node " + std::to_string(i));
}

RadialProfile RadialProfile::sample(const RadialGrid& g, double (*f)(double), Parity p) {
    return from(g, f, p);
}

Region::Region(double a_, double b_) : a(a_), b(b_) {
    if (!(a_ <= b_)) throw DomainError("region needs r_a <= r_b");
}

Jets jets(const RadialGrid& g, const std::vector<double>& f, Parity p) {
    const int n = g.size();
    if (static_cast<int>(f.size()) != n) throw ContractError("profile length does not match grid");
    const double h = g.dx();
    const bool ghosts = g.tip() && p != Parity::none;
    auto at = [&](int k) { return ghost(f, k, p); };
    Jets out{f, std::vector<double>(n), std::vector<double>(n)};
    for (int i = 0; i < n; ++i) {
        double fx, fxx;
        bool lo4 = ghosts || i >= 2, hi4 = i + 2 <= n - 1;
        if (lo4 && hi4) {
            fx = (at(i - 2) - 8 * at(i - 1) + 8 * at(i + 1) - at(i + 2)) / (12 * h);
            fxx = (-at(i - 2) + 16 * at(i - 1) - 30 * at(i) + 16 * at(i + 1) - at(i + 2)) / (12 * h * h);
        } else if (g.end_order() == 2 && (ghosts || i >= 1) && i + 1 <= n - 1) {
            fx = (at(i + 1) - at(i - 1)) / (2 * h);
            fxx = (at(i + 1) - 2 * at(i) + at(i - 1)) / (h * h);
        } else if (g.end_order() == 2 && i == 0) {
            fx = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
            fxx = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / (h * h);
        } else if (g.end_order() == 2) {
            fx = (3 * f[i] - 4 * f[i - 1] + f[i - 2]) / (2 * h);
            fxx = (2 * f[i] - 5 * f[i - 1] + 4 * f[i - 2] - f[i - 3]) / (h * h);
        } else {
            // six-node off-centre stencil near an end without ghosts
            constexpr int m = 6;
            int lo = ghosts ? i - 2 : 0;
            int s0 = std::clamp(i - 2, lo, n - m);
            if (i + 2 > n - 1) s0 = n - m;
            double xs[m], c[3][8];
            for (int k = 0; k < m; ++k) xs[k] = s0 + k;
            fd_weights(i, xs, m, c);
            fx = fxx = 0;
            for (int k = 0; k < m; ++k) {
                fx += c[1][k] * at(s0 + k);
                fxx += c[2][k] * at(s0 + k);
            }
            fx /= h;
            fxx /= h * h;
        }
        double rx = g.r_x(i), rxx = g.r_xx(i);
        out.d1[i] = fx / rx;
        out.d2[i] = (fxx - out.d1[i] * rxx) / (rx * rx);
    }
    return out;
}

std::vector<double> d_dr(const RadialGrid& g, const std::vector<double>& f, Parity p) {
    return jets(g, f, p).d1;
}

std::vector<double> d2_dr2(const RadialGrid& g, const std::vector<double>& f, Parity p) {
    return jets(g, f, p).d2;
}

double interpolate(const RadialGrid& g, const std::vector<double>& f, double r, Parity p,
                   std::optional<double> breakpoint) {
    if (g.tip() && r < 0) {
        double v = interpolate(g, f, -r, p, breakpoint);
        return p == Parity::odd ? -v : v;
    }
    return interp_x(g, f, g.x_of(r), p, breakpoint);
}

double integrate(const RadialGrid& g, const std::vector<double>& f, const Region& reg) {
    if (reg.a < g.r_min() - 1e-12 || reg.b > g.r_max() + 1e-12)
        throw DomainError("integration region outside grid");
    if (reg.b <= reg.a) return 0;
    const int n = g.size();
    std::vector<double> G(n);
    for (int i = 0; i < n; ++i) G[i] = f[i] * g.r_x(i);
    const double xa = g.x_of(reg.a), xb = g.x_of(reg.b), h = g.dx();
    int i0 = n, i1 = -1;
    for (int i = 0; i < n; ++i) {
        if (g.x(i) >= xa - 1e-14 && i0 == n) i0 = i;
        if (g.x(i) <= xb + 1e-14) i1 = i;
    }
    if (i0 > i1) return gauss_piece(g, G, xa, xb);
    double acc = gauss_piece(g, G, xa, g.x(i0)) + gauss_piece(g, G, g.x(i1), xb);
    int m = i1 - i0;
    if (m == 1) return acc + gauss_piece(g, G, g.x(i0), g.x(i1));
    int simpson_end = (m % 2 == 0) ? i1 : i1 - 3;
    for (int i = i0; i + 2 <= simpson_end; i += 2) acc += h / 3 * (G[i] + 4 * G[i + 1] + G[i + 2]);
    if (m % 2 == 1) {
        int i = i1 - 3;
        acc += 3 * h / 8 * (G[i] + 3 * G[i + 1] + 3 * G[i + 2] + G[i + 3]);
    }
    return acc;
}

}  // namespace radial
