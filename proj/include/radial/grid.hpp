#pragma once

#include <memory>
#include <optional>
#include <vector>

namespace radial {

enum class Spacing { uniform, geometric };

// Symmetry of a profile under r -> -r.  Used to fill ghost nodes when the
// grid reaches the origin of a smooth SO(n)-invariant metric.
enum class Parity { none, even, odd };

// Sample points r_i = R(x_i) for a uniform computational coordinate x in
// [0, 1].  When r_min == 0 the grid is cell-centred (x_i = (i + 1/2)/N) so
// no node sits on the origin and the map R is odd; parity ghosts then land
// exactly on mirrored nodes.  Otherwise the end points are nodes.
//
// Geometric spacing means R(x) = c sinh(kappa x) at a tip and
// R(x) = r_min (r_max/r_min)^x away from it.
class RadialGrid {
public:
    static RadialGrid uniform(double r_min, double r_max, int n);
    static RadialGrid geometric(double r_min, double r_max, int n, double kappa = 4.0);

    int size() const { return static_cast<int>(d_->r.size()); }
    double r_min() const { return d_->r_min; }
    double r_max() const { return d_->r_max; }
    Spacing spacing() const { return d_->mode; }
    double kappa() const { return d_->kappa; }
    bool tip() const { return d_->r_min == 0.0; }
    double dx() const { return d_->dx; }

    // Accuracy of the off-centre derivative stencils at the two ends: 2
    // (three/four-node one-sided, the default) or 4 (six-node).  Interior
    // stencils are fourth order either way.
    int end_order() const { return d_->end_order; }
    RadialGrid with_end_order(int order) const;

    const std::vector<double>& nodes() const { return d_->r; }
    double operator[](int i) const { return d_->r[i]; }
    double x(int i) const { return d_->x[i]; }
    double r_x(int i) const { return d_->rx[i]; }
    double r_xx(int i) const { return d_->rxx[i]; }

    double r_of(double x) const;
    double x_of(double r) const;
    double min_spacing() const;

    // Index of the first node with r_i >= r (size() if none).
    int lower_index(double r) const;

    bool same_as(const RadialGrid& o) const;

private:
    struct Data {
        double r_min = 0, r_max = 1, kappa = 0, dx = 0, c = 0;
        int end_order = 2;
        Spacing mode = Spacing::uniform;
        std::vector<double> x, r, rx, rxx;
    };
    explicit RadialGrid(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
    static RadialGrid build(double r_min, double r_max, int n, Spacing mode, double kappa);
    static void map(const Data& d, double x, double& r, double& rx, double& rxx);

    std::shared_ptr<const Data> d_;
};

struct RadialProfile {
    RadialGrid grid;
    std::vector<double> values;
    Parity parity = Parity::none;

    RadialProfile(RadialGrid g, std::vector<double> v, Parity p = Parity::none);
    static RadialProfile sample(const RadialGrid& g, double (*f)(double), Parity p = Parity::none);
    template <class F>
    static RadialProfile from(const RadialGrid& g, F&& f, Parity p = Parity::none) {
        std::vector<double> v(g.size());
        for (int i = 0; i < g.size(); ++i) v[i] = f(g[i]);
        return RadialProfile(g, std::move(v), p);
    }

    int size() const { return static_cast<int>(values.size()); }
    double operator[](int i) const { return values[i]; }
};

struct Region {
    double a, b;
    Region(double a_, double b_);
    static Region whole(const RadialGrid& g) { return Region(g.r_min(), g.r_max()); }
    bool contains(double r) const { return r >= a && r <= b; }
};

struct Jets {
    std::vector<double> v, d1, d2;
};

// d/dr and d^2/dr^2: 4th-order central in x, 2nd-order next to a boundary
// without ghosts, mapped to r by the chain rule.
std::vector<double> d_dr(const RadialGrid& g, const std::vector<double>& f, Parity p);
std::vector<double> d2_dr2(const RadialGrid& g, const std::vector<double>& f, Parity p);
Jets jets(const RadialGrid& g, const std::vector<double>& f, Parity p);
inline Jets jets(const RadialProfile& f) { return jets(f.grid, f.values, f.parity); }

// Cubic Lagrange interpolation in x.  A breakpoint keeps the stencil on the
// same side as r, which matters for profiles with a kink.
double interpolate(const RadialGrid& g, const std::vector<double>& f, double r, Parity p,
                   std::optional<double> breakpoint = std::nullopt);

// Integral of f(r) dr over a region: composite Simpson on whole cells in x,
// Gauss on cubic interpolants for the partial cells at either end.
double integrate(const RadialGrid& g, const std::vector<double>& f, const Region& reg);

}  // namespace radial
