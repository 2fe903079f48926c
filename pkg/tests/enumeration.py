"""Exact population moments by brute-force enumeration in rational arithmetic.

These helpers re-derive every oracle from first principles: enumerate each
declared type under each instrument value, play the mechanism forward, and
average E[d | z] and E[y | z] with :class:`fractions.Fraction`. They share no
code with :mod:`persistlab.oracles`.
"""

from __future__ import annotations

from fractions import Fraction as F


def _f(x) -> F:
    return x if isinstance(x, F) else F(x).limit_denominator(10**12) if isinstance(x, float) else F(x)


def wald_from_moments(ed: dict, ey: dict, lo=0, hi=1) -> F:
    return (ey[hi] - ey[lo]) / (ed[hi] - ed[lo])


def cutoff_moments(types, c0, c1):
    """types: [(share, benefit, beta)]; treated iff benefit >= c(z)."""
    ed, ey = {}, {}
    for z, c in ((0, _f(c0)), (1, _f(c1))):
        ed[z] = sum((_f(w) for w, b, _ in types if _f(b) >= c), F(0))
        ey[z] = sum((_f(w) * _f(beta) for w, b, beta in types if _f(b) >= c), F(0))
    return ed, ey


def complier_mean(types, c0, c1) -> F:
    comp = [(w, beta) for w, b, beta in types if _f(c1) <= _f(b) < _f(c0)]
    mass = sum((_f(w) for w, _ in comp), F(0))
    return sum((_f(w) * _f(beta) for w, beta in comp), F(0)) / mass


def reversal_moments(types, c0, c1, feedback, horizon):
    """types: [(share, benefit, beta, susceptibility)]; absorbing path played period by period."""
    ed, ey = {}, {}
    for z in (0, 1):
        d_tot = y_tot = F(0)
        for w, b, beta, s in types:
            b = _f(b)
            base = _f(c1) if z == 1 else _f(c0)
            x = False
            first = None
            for tau in range(horizon):
                c = base
                if tau > 0 and z == 0 and not first:
                    c = base - _f(feedback) * _f(s)
                x = x or b >= c
                if tau == 0:
                    first = x
            if x:
                d_tot += _f(w)
                y_tot += _f(w) * _f(beta)
        ed[z], ey[z] = d_tot, y_tot
    return ed, ey


def markov_moments(pi, beta, p, q):
    """x_hist = z; Pr(x_now = 1 | x_hist = 1) = q and Pr(x_now = 1 | x_hist = 0) = 1 - p."""
    ed = {
        1: sum((_f(w) * _f(qq) for w, qq in zip(pi, q)), F(0)),
        0: sum((_f(w) * (1 - _f(pp)) for w, pp in zip(pi, p)), F(0)),
    }
    ey = {
        1: sum((_f(w) * _f(b) * _f(qq) for w, b, qq in zip(pi, beta, q)), F(0)),
        0: sum((_f(w) * _f(b) * (1 - _f(pp)) for w, b, pp in zip(pi, beta, p)), F(0)),
    }
    return ed, ey


def ternary_moments(types, c_peak):
    """types: [(share, benefit, beta)]; level is 1 if benefit >= c at z in {0, 2}, else z; at z = 1 always 1.

    The first stage is in the level itself; the outcome pays beta only at the peak level 1.
    """
    ed, ey = {}, {}
    for z in (0, 1, 2):
        d_tot = y_tot = F(0)
        for w, b, beta in types:
            level = 1 if (z == 1 or _f(b) >= _f(c_peak)) else z
            d_tot += _f(w) * level
            if level == 1:
                y_tot += _f(w) * _f(beta)
        ed[z], ey[z] = d_tot, y_tot
    return ed, ey


def uniform_as_atoms(lo, hi, breakpoints, bins_per_unit=64):
    """Replace U[lo, hi] by midpoint atoms on a grid that contains every breakpoint.

    Integrands here are linear inside each grid cell, so the midpoint rule is exact.
    """
    lo, hi = _f(lo), _f(hi)
    edges = {lo, hi} | {_f(b) for b in breakpoints if lo < _f(b) < hi}
    edges = sorted(edges)
    atoms = []
    for a, b in zip(edges, edges[1:]):
        k = max(1, int((b - a) * bins_per_unit))
        step = (b - a) / k
        for j in range(k):
            atoms.append((a + step * j + step / 2, step / (hi - lo)))
    return atoms


def rho_contrast(atoms, x_tilde, rho_of):
    """E(rho x | x > x_tilde) - E(rho x | x <= x_tilde) over weighted atoms [(value, weight)]."""
    xt = _f(x_tilde)
    up = [(_f(v), _f(w)) for v, w in atoms if _f(v) > xt]
    dn = [(_f(v), _f(w)) for v, w in atoms if _f(v) <= xt]

    def cond(cell):
        mass = sum((w for _, w in cell), F(0))
        return sum((w * _f(rho_of(v)) * v for v, w in cell), F(0)) / mass

    return cond(up) - cond(dn)


def ols_slope_binary_regressor(atoms, x_tilde, rho_of) -> F:
    """OLS slope of rho x on 1[x > x_tilde]; equals the cell contrast by construction of OLS with a binary regressor."""
    xt = _f(x_tilde)
    atoms = [(_f(v), _f(w)) for v, w in atoms]
    total = sum((w for _, w in atoms), F(0))
    ed = sum((w for v, w in atoms if v > xt), F(0)) / total
    ey = sum((w * _f(rho_of(v)) * v for v, w in atoms), F(0)) / total
    cov = sum((w * ((1 if v > xt else 0) - ed) * (_f(rho_of(v)) * v - ey) for v, w in atoms), F(0)) / total
    var = ed * (1 - ed)
    return cov / var
