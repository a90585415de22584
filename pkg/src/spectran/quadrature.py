"""Composite Gauss-Legendre quadrature for the certificate integrals.

All continuum integrals in this package go through the panel rules below.
Grid-sampled data (eigenvectors) is integrated elsewhere with Simpson's rule;
this module only handles callable integrands.
"""

from functools import lru_cache

import numpy as np

from .errors import AccuracyError


@lru_cache(maxsize=None)
def gauss_legendre_rule(npts: int):
    """Nodes and weights on [-1, 1], cached per point count."""
    nodes, weights = np.polynomial.legendre.leggauss(npts)
    return nodes, weights


def panel_points(a: float, b: float, panels: int, npts: int = 16):
    """Flattened nodes and weights for `panels` equal panels on [a, b]."""
    x, w = gauss_legendre_rule(npts)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (w[None, :] * half[:, None]).ravel()
    return nodes, weights


def integrate(f, a: float, b: float, panels: int = 8, npts: int = 16) -> float:
    """Composite fixed-panel Gauss-Legendre integral of f over [a, b]."""
    nodes, weights = panel_points(a, b, panels, npts)
    return float(np.dot(weights, f(nodes)))


def integrate_adaptive(
    f,
    a: float,
    b: float,
    rel_tol: float = 1e-12,
    abs_tol: float = 0.0,
    npts: int = 16,
    min_panels: int = 1,
    max_panels: int = 1 << 15,
    split_at=(),
) -> float:
    """Panel-doubling composite rule with a self-consistency stopping test.

    `split_at` lists interior breakpoints (integrand kinks); every piece
    converges independently and the pieces are summed.  Doubling stops when
    two successive refinements agree to `rel_tol` (relative) or `abs_tol`
    (absolute), whichever is looser for the value at hand.
    """
    if b <= a:
        return 0.0
    pieces = [a] + sorted(p for p in split_at if a < p < b) + [b]
    total = 0.0
    for lo, hi in zip(pieces[:-1], pieces[1:]):
        panels = max(1, min_panels)
        prev = integrate(f, lo, hi, panels, npts)
        while True:
            panels *= 2
            cur = integrate(f, lo, hi, panels, npts)
            if abs(cur - prev) <= max(rel_tol * abs(cur), abs_tol):
                break
            if panels > max_panels:
                raise AccuracyError(
                    "quadrature did not settle on [%g, %g] within %d panels "
                    "(last change %.3e)" % (lo, hi, max_panels, abs(cur - prev))
                )
            prev = cur
        total += cur
    return total
