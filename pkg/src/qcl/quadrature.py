"""Adaptive Gauss-Legendre quadrature with batched integrand evaluation.

The phase and dephasing functionals integrate smooth worldline kernels
whose sharp features (a Gaussian-smeared light cone of width sigma) sit
on low-dimensional ridges inside the integration domain.  Panel-based
adaptive quadrature handles that well, provided panels can be evaluated
in bulk: all pending panels are stacked into a single vectorized call of
the integrand so the numpy/scipy kernels amortize across thousands of
nodes.

Each panel carries an embedded error estimate

    err = |I_high - I_low|

from a low-order and a high-order Gauss-Legendre rule on the same panel
(orders 4/8 per axis in 2D, 8/16 in 1D; the high-order value is kept).
Panels are split while the summed error exceeds the requested tolerance,
worst panels first.  Non-convergence raises :class:`NumericFailure`
carrying the tolerance actually achieved.
"""

from __future__ import annotations

import numpy as np

__all__ = ["NumericFailure", "adaptive_1d", "adaptive_2d", "panel_gauss_nodes"]


def panel_gauss_nodes(a: float, b: float, n_panels: int, order: int):
    """Composite Gauss-Legendre nodes and weights: n_panels equal panels on [a, b].

    A fixed composite rule for integrands whose oscillation rate is known
    in advance (panel width is chosen by the caller so each panel spans
    about one wavelength); the adaptive routines below are for integrands
    with localized features instead.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


class NumericFailure(RuntimeError):
    """Quadrature failed to reach the requested tolerance.

    Attributes carry the partial result so callers can report how close
    the run came: ``value`` is the best estimate, ``achieved`` the error
    estimate at abort, ``requested`` the target.
    """

    def __init__(self, message: str, value: float, achieved: float, requested: float):
        super().__init__(
            f"{message}: achieved error {achieved:.3e}, requested {requested:.3e}"
        )
        self.value = value
        self.achieved = achieved
        self.requested = requested


def _gl_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return nodes, weights


_X8, _W8 = _gl_rule(8)
_X16, _W16 = _gl_rule(16)
_X4, _W4 = _gl_rule(4)
_XH, _WH = _gl_rule(8)

# Tensor-product nodes for 2D panels on [-1, 1]^2, flattened.
_NODES2_LO = np.stack(np.meshgrid(_X4, _X4, indexing="ij"), axis=-1).reshape(-1, 2)
_WEIGHTS2_LO = np.outer(_W4, _W4).reshape(-1)
_NODES2_HI = np.stack(np.meshgrid(_XH, _XH, indexing="ij"), axis=-1).reshape(-1, 2)
_WEIGHTS2_HI = np.outer(_WH, _WH).reshape(-1)


def _with_knots(a: float, b: float, knots) -> np.ndarray:
    """Panel edges on [a, b]: the interval split at every interior knot."""
    edges = [a, b]
    if knots is not None:
        edges.extend(k for k in knots if a < k < b)
    return np.array(sorted(set(edges)), dtype=float)


def _refine_edges(edges: np.ndarray, min_panels: int) -> np.ndarray:
    """Bisect the largest segments until there are at least min_panels."""
    edges = list(edges)
    while len(edges) - 1 < min_panels:
        widths = np.diff(edges)
        i = int(np.argmax(widths))
        edges.insert(i + 1, 0.5 * (edges[i] + edges[i + 1]))
    return np.asarray(edges)


def adaptive_1d(
    f,
    a: float,
    b: float,
    *,
    tol: float = 1e-9,
    abs_floor: float = 0.0,
    knots=None,
    min_panels: int = 4,
    max_panels: int = 8192,
    name: str = "integral",
) -> tuple[float, float]:
    """Integrate a vectorized scalar function f over [a, b].

    ``f`` receives a 1D array of points and must return the integrand at
    each.  Convergence target: summed panel error below
    max(tol * |I|, tol * 1e-3 * L1, abs_floor) where L1 is the sum of
    absolute panel contributions.  The L1 term keeps integrals that
    cancel to nearly zero from chasing an impossible relative target,
    while abs_floor lets callers set an explicit absolute scale.
    Returns (value, error_estimate).
    """
    if b <= a:
        return 0.0, 0.0
    edges = _refine_edges(_with_knots(a, b, knots), min_panels)
    lo = edges[:-1].copy()
    hi = edges[1:].copy()

    def eval_panels(plo: np.ndarray, phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        mid = 0.5 * (plo + phi)
        half = 0.5 * (phi - plo)
        pts8 = mid[:, None] + half[:, None] * _X8[None, :]
        pts16 = mid[:, None] + half[:, None] * _X16[None, :]
        all_pts = np.concatenate([pts8.ravel(), pts16.ravel()])
        vals = np.asarray(f(all_pts), dtype=float)
        n8 = pts8.size
        v8 = vals[:n8].reshape(pts8.shape)
        v16 = vals[n8:].reshape(pts16.shape)
        i8 = half * (v8 @ _W8)
        i16 = half * (v16 @ _W16)
        return i16, np.abs(i16 - i8)

    vals, errs = eval_panels(lo, hi)
    while True:
        total = float(vals.sum())
        l1 = float(np.abs(vals).sum())
        target = max(tol * abs(total), tol * 1e-3 * l1, abs_floor)
        err = float(errs.sum())
        if err <= target:
            return total, err
        if lo.size >= max_panels:
            raise NumericFailure(f"{name} did not converge", total, err, target)
        # Split the worst panels; a modest batch per round keeps the
        # refinement focused without many tiny evaluation calls.
        n_split = max(1, int(0.25 * np.count_nonzero(errs > target / max(lo.size, 1))))
        worst = np.argsort(errs)[-n_split:]
        keep = np.ones(lo.size, dtype=bool)
        keep[worst] = False
        mid = 0.5 * (lo[worst] + hi[worst])
        new_lo = np.concatenate([lo[worst], mid])
        new_hi = np.concatenate([mid, hi[worst]])
        new_vals, new_errs = eval_panels(new_lo, new_hi)
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        vals = np.concatenate([vals[keep], new_vals])
        errs = np.concatenate([errs[keep], new_errs])


def adaptive_2d(
    f,
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    *,
    tol: float = 1e-7,
    abs_floor: float = 0.0,
    knots_x=None,
    knots_y=None,
    min_panels: tuple[int, int] = (4, 4),
    max_panels: int = 60000,
    name: str = "integral",
) -> tuple[float, float]:
    """Integrate a vectorized function f(x, y) over a rectangle.

    ``f`` receives two flat arrays (same length) of x and y coordinates
    and returns the integrand at each pair.  Panels are axis-aligned
    rectangles; each is measured with 4x4 and 8x8 Gauss-Legendre tensor
    rules and split into four when its embedded error dominates.  The
    convergence target follows the same rule as :func:`adaptive_1d`.
    Returns (value, error_estimate).
    """
    (ax, bx), (ay, by) = x_range, y_range
    if bx <= ax or by <= ay:
        return 0.0, 0.0
    ex = _refine_edges(_with_knots(ax, bx, knots_x), min_panels[0])
    ey = _refine_edges(_with_knots(ay, by, knots_y), min_panels[1])
    x0, y0 = np.meshgrid(ex[:-1], ey[:-1], indexing="ij")
    x1, y1 = np.meshgrid(ex[1:], ey[1:], indexing="ij")
    px0, px1 = x0.ravel(), x1.ravel()
    py0, py1 = y0.ravel(), y1.ravel()

    def eval_panels(qx0, qx1, qy0, qy1) -> tuple[np.ndarray, np.ndarray]:
        mx = 0.5 * (qx0 + qx1)
        hx = 0.5 * (qx1 - qx0)
        my = 0.5 * (qy0 + qy1)
        hy = 0.5 * (qy1 - qy0)
        xlo = mx[:, None] + hx[:, None] * _NODES2_LO[None, :, 0]
        ylo = my[:, None] + hy[:, None] * _NODES2_LO[None, :, 1]
        xhi = mx[:, None] + hx[:, None] * _NODES2_HI[None, :, 0]
        yhi = my[:, None] + hy[:, None] * _NODES2_HI[None, :, 1]
        nlo = xlo.size
        xs = np.concatenate([xlo.ravel(), xhi.ravel()])
        ys = np.concatenate([ylo.ravel(), yhi.ravel()])
        vals = np.asarray(f(xs, ys), dtype=float)
        vlo = vals[:nlo].reshape(xlo.shape)
        vhi = vals[nlo:].reshape(xhi.shape)
        area = hx * hy
        ilo = area * (vlo @ _WEIGHTS2_LO)
        ihi = area * (vhi @ _WEIGHTS2_HI)
        return ihi, np.abs(ihi - ilo)

    vals, errs = eval_panels(px0, px1, py0, py1)
    while True:
        total = float(vals.sum())
        l1 = float(np.abs(vals).sum())
        target = max(tol * abs(total), tol * 1e-3 * l1, abs_floor)
        err = float(errs.sum())
        if err <= target:
            return total, err
        if px0.size >= max_panels:
            raise NumericFailure(f"{name} did not converge", total, err, target)
        n_split = max(1, int(0.25 * np.count_nonzero(errs > target / max(px0.size, 1))))
        worst = np.argsort(errs)[-n_split:]
        keep = np.ones(px0.size, dtype=bool)
        keep[worst] = False
        wx0, wx1 = px0[worst], px1[worst]
        wy0, wy1 = py0[worst], py1[worst]
        mx = 0.5 * (wx0 + wx1)
        my = 0.5 * (wy0 + wy1)
        qx0 = np.concatenate([wx0, mx, wx0, mx])
        qx1 = np.concatenate([mx, wx1, mx, wx1])
        qy0 = np.concatenate([wy0, wy0, my, my])
        qy1 = np.concatenate([my, my, wy1, wy1])
        new_vals, new_errs = eval_panels(qx0, qx1, qy0, qy1)
        px0 = np.concatenate([px0[keep], qx0])
        px1 = np.concatenate([px1[keep], qx1])
        py0 = np.concatenate([py0[keep], qy0])
        py1 = np.concatenate([py1[keep], qy1])
        vals = np.concatenate([vals[keep], new_vals])
        errs = np.concatenate([errs[keep], new_errs])
