"""Symbolic ADM constant for u = 1 + A/r, g_ij = u^(4/(n-2)) delta_ij.

Expands (g_ij,i - g_ii,j) x^j/|x| in Cartesian coordinates, integrates over the
coordinate sphere of radius R using the rotational symmetry of the integrand,
multiplies by 1/(4(n-1)omega_{n-1}) and takes R -> oo.  Prints c_n with
mass = c_n * A.
"""
import sympy as sp

def constant(n):
    x = sp.symbols(f"x1:{n + 1}", real=True)
    A, R = sp.symbols("A R", positive=True)
    r = sp.sqrt(sum(xi**2 for xi in x))
    u = 1 + A / r**(n - 2)
    g = u**sp.Rational(4, n - 2)
    # g_ij = g delta_ij, so g_ij,i = d_j g and g_ii,j = n d_j g
    flux = sum((sp.diff(g, xj) - n * sp.diff(g, xj)) * xj / r for xj in x)
    # integrand is radial: evaluate on the axis point (R,0,...,0)
    onaxis = sp.simplify(flux.subs({x[0]: R, **{xi: 0 for xi in x[1:]}}))
    omega = 2 * sp.pi**sp.Rational(n, 2) / sp.gamma(sp.Rational(n, 2))
    surface = omega * R**(n - 1)
    m = sp.limit(onaxis * surface / (4 * (n - 1) * omega), R, sp.oo)
    return sp.simplify(m / A)

if __name__ == "__main__":
    for n in (3, 4, 5):
        print(n, constant(n))
