"""Dephasing exponents and signalling phases of branched worldline currents.

For a particle split into right/left branches, the branch-difference
current Delta J = J_R - J_L couples to the photon field and produces

* a dephasing exponent Gamma (suppressing interference by exp(-Gamma)),
  the symmetric two-point kernel contracted twice with Delta J;
* a self phase Phi from the particle's own retarded field and any
  background field;
* pairing phases between two particles, where one particle's branch
  difference probes the retarded field sourced by the other.

All four-dimensional integrals reduce to one- or two-dimensional
lab-time integrals over the split windows, because branch differences
vanish identically outside them.

Two deliberately different regularizations appear.  Quantities quadratic
in a single particle's current (Gamma, the self phase) probe the
light-cone coincidence limit and use the sigma-smeared kernels.  Pairing
quantities between distinct particles are evaluated with the bare
(sharp-cone) Lienard-Wiechert potential: their integrands stay finite at
particle separations, and the sharp cone preserves the exact support
statement that a branch distinction outside the past light cone
contributes nothing, not merely something exponentially small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import BranchPair, Scenario, SplitPath, Worldline, causal_margin
from .kernels import KernelSpec, _lw_batch, hadamard_dt_r, retarded_kernel
from .quadrature import NumericFailure, adaptive_1d, adaptive_2d, panel_gauss_nodes

__all__ = [
    "DecoherenceReport",
    "gamma",
    "gamma_momentum",
    "phi_self",
    "phi_pairing",
    "branch_pairing",
    "commutator_functional",
    "retarded_field_difference",
    "build_report",
]


# ---------------------------------------------------------------------------
# Dephasing exponent, position-space route.


def _gamma_with_error(pair: BranchPair, spec: KernelSpec) -> tuple[float, float]:
    a, b = pair.split_window
    knots = pair.split_knots()
    branches = pair.branches()

    def integrand(ts: np.ndarray, us: np.ndarray) -> np.ndarray:
        total = np.zeros_like(ts)
        for wp, sp in branches:
            xp = wp.position(ts)
            vp = wp.velocity(ts)
            for wq, sq in branches:
                xq = wq.position(us)
                vq = wq.velocity(us)
                r = np.linalg.norm(xp - xq, axis=-1)
                vv = np.sum(vp * vq, axis=-1)
                total += sp * sq * (vv - 1.0) * hadamard_dt_r(ts - us, r, spec)
        return total

    val, err = adaptive_2d(
        integrand, (a, b), (a, b),
        tol=spec.quad_tol, knots_x=knots, knots_y=knots,
        name=f"gamma[{pair.label}]",
    )
    q = pair.charge
    val *= 0.25 * q * q
    err *= 0.25 * q * q
    if val < -(err + 1e-15):
        raise NumericFailure(
            f"gamma[{pair.label}] negative beyond tolerance", val, err, err,
        )
    return val, err


def gamma(pair: BranchPair, spec: KernelSpec) -> float:
    """Dephasing exponent of one branch pair.

    Gamma = (q^2/4) sum_{P,P'} s_P s_P' int dt dt'
            (v_P(t).v_P'(t') - 1) K(t - t', |X_P(t) - X_P'(t')|)

    with K the smeared symmetric kernel and s_R = +1, s_L = -1.  The
    result is non-negative for any conserved branch-difference current;
    a value below minus the quadrature error raises NumericFailure.
    """
    return _gamma_with_error(pair, spec)[0]


# ---------------------------------------------------------------------------
# Dephasing exponent, momentum-space route (independent cross-check).


def _split_profiles(pair: BranchPair):
    """Common base/axis and per-branch displacement profiles of a split pair.

    The momentum-space reduction assumes the two branches move along one
    fixed axis through a common rest point, which is what SplitPath
    provides.  Returns (displacement_fn, rate_fn) pairs for each branch
    with the amplitude sign folded in.
    """
    pr, pl = pair.right.path, pair.left.path
    if not (isinstance(pr, SplitPath) and isinstance(pl, SplitPath)):
        raise ValueError("momentum-space gamma needs SplitPath branches")
    if not np.allclose(pr.base, pl.base, atol=1e-14):
        raise ValueError("branches must share a rest point")
    if not np.allclose(pr.axis, pl.axis, atol=1e-14):
        raise ValueError("branches must share a displacement axis")
    return (
        (pr.displacement, pr.displacement_rate),
        (pl.displacement, pl.displacement_rate),
    )


def _gamma_momentum_pass(pair: BranchPair, spec: KernelSpec, bump: int) -> float:
    (disp_r, rate_r), (disp_l, rate_l) = _split_profiles(pair)
    a, b = pair.split_window
    sigma = spec.sigma
    k_up = min(spec.k_max, 4.5 / sigma)

    # Node counts scale with the largest phase k_up * t across the window
    # (time direction) and k_up * displacement (angle direction); ``bump``
    # raises every count so two passes give an independent error check.
    t_panels = int(k_up * (b - a) / 6.0) + 8 + bump
    tn, tw = panel_gauss_nodes(a, b, t_panels, 12)
    k_panels = int(k_up * (b - a) / 6.0) + 8 + bump
    kn, kw = panel_gauss_nodes(0.0, k_up, k_panels, 12)
    mu_n = 48 + 3 * bump
    mun, muw = np.polynomial.legendre.leggauss(mu_n)

    dr, rr = disp_r(tn), rate_r(tn)
    dl, rl = disp_l(tn), rate_l(tn)

    total = 0.0
    chunk = max(1, int(2.0e6 / (mu_n * tn.size)))
    for i0 in range(0, kn.size, chunk):
        ks = kn[i0:i0 + chunk]
        kws = kw[i0:i0 + chunk]
        # Phase arrays: (n_k, n_mu, n_t).
        phase_t = ks[:, None, None] * tn[None, None, :]
        kmu = ks[:, None] * mun[None, :]
        amp_r = rr[None, None, :] * np.exp(1j * (phase_t - kmu[:, :, None] * dr[None, None, :]))
        amp_l = rl[None, None, :] * np.exp(1j * (phase_t - kmu[:, :, None] * dl[None, None, :]))
        j_par = np.tensordot(amp_r - amp_l, tw, axes=(2, 0))
        mod2 = (j_par.real ** 2 + j_par.imag ** 2) @ (muw * (1.0 - mun ** 2))
        total += float(np.sum(kws * ks * np.exp(-(ks * sigma) ** 2) * mod2))
    q = pair.charge
    return q * q * total / (16.0 * math.pi ** 2)


def gamma_momentum(pair: BranchPair, spec: KernelSpec) -> float:
    """Dephasing exponent via the mode-space quadrature.

    Writes Gamma as (1/16 pi^2) int_0^kmax dk k e^{-k^2 sigma^2}
    int_-1^1 dmu (1 - mu^2) |J(k, mu)|^2 where J is the branch-difference
    current projected on the displacement axis; the integrand is
    manifestly non-negative, which makes this an independent positivity
    check on :func:`gamma`.  Runs a coarse and a refined pass and raises
    NumericFailure if they disagree beyond the requested tolerance.
    """
    coarse = _gamma_momentum_pass(pair, spec, bump=0)
    fine = _gamma_momentum_pass(pair, spec, bump=8)
    err = abs(fine - coarse)
    tol = max(spec.quad_tol * abs(fine), 1e-14)
    if err > 50.0 * tol:
        raise NumericFailure("mode-space gamma did not converge", fine, err, tol)
    return fine


# ---------------------------------------------------------------------------
# Self phase.


def _phi_self_with_error(
    pair: BranchPair, spec: KernelSpec, background=None
) -> tuple[float, float]:
    a, b = pair.split_window
    knots = pair.split_knots()
    branches = pair.branches()
    q = pair.charge

    # Radiated-field term: the branch difference at time t pairs with the
    # full two-branch source current at earlier times t - w.  Integrating
    # in the lag w (instead of the source time itself) makes the sharp
    # time-ordering edge the w = 0 boundary of the domain and lays the
    # light-cone ridge w ~ r out along the t axis, which the rectangular
    # panels resolve cheaply.  The kernel dies within a few sigma of the
    # cone and r never exceeds the pair diameter, so lags beyond
    # diam + 12 sigma contribute below exp(-36) of any tolerance in use.
    w_max = _pair_diameter(pair) + 12.0 * spec.sigma

    def combo(wp: Worldline, wq: Worldline, ts: np.ndarray, lags: np.ndarray) -> np.ndarray:
        us = ts - lags
        xp, vp = wp.position(ts), wp.velocity(ts)
        xq, vq = wq.position(us), wq.velocity(us)
        r = np.linalg.norm(xp - xq, axis=-1)
        vv = np.sum(vp * vq, axis=-1)
        return (1.0 - vv) * retarded_kernel(lags, r, spec)

    def radiated(ts: np.ndarray, lags: np.ndarray) -> np.ndarray:
        # Grouping the branch combinations as differences of mirror
        # partners makes the antisymmetry of a mirror-symmetric pair hold
        # bitwise (each difference is x - x = 0), instead of leaving
        # accumulation-order rounding noise for the quadrature to chase.
        rr = combo(pair.right, pair.right, ts, lags)
        ll = combo(pair.left, pair.left, ts, lags)
        rl = combo(pair.right, pair.left, ts, lags)
        lr = combo(pair.left, pair.right, ts, lags)
        return (rr - ll) + (rl - lr)

    val, err = adaptive_2d(
        radiated, (a, b), (0.0, w_max),
        tol=spec.quad_tol, knots_x=knots,
        name=f"phi_self[{pair.label}]",
    )
    phi = -0.5 * q * q * val
    err_total = 0.5 * q * q * err

    if background is not None:
        def bg_integrand(ts: np.ndarray) -> np.ndarray:
            total = np.zeros_like(ts)
            for wp, sp in branches:
                xp = wp.position(ts)
                vp = wp.velocity(ts)
                ev = np.concatenate([ts[:, None], xp], axis=1)
                A = background(ev)
                total += sp * (A[:, 0] - np.sum(vp * A[:, 1:], axis=-1))
            return total

        bg_val, bg_err = adaptive_1d(
            bg_integrand, a, b, tol=spec.quad_tol, knots=knots,
            name=f"phi_background[{pair.label}]",
        )
        phi += q * bg_val
        err_total += q * bg_err
    return phi, err_total


def _pair_diameter(pair: BranchPair) -> float:
    """Upper bound on the distance between any two branch positions."""
    t0, t1 = pair.window
    ts = np.linspace(t0, t1, 256)
    pts = np.concatenate([pair.right.position(ts), pair.left.position(ts)])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    pad = (t1 - t0) / 255.0  # Lipschitz slack, speeds < 1
    return float(np.linalg.norm(hi - lo)) + pad


def phi_self(pair: BranchPair, spec: KernelSpec, background=None) -> float:
    """Relative phase a branch pair acquires from its own field and a background.

    The own-field part contracts the branch difference with the smeared
    retarded potential of the particle's full two-branch current,

        -(q^2/2) sum_P s_P sum_P' int dt dt'
            (1 - v_P(t).v_P'(t')) G_ret(t - t', |X_P(t) - X_P'(t')|),

    and vanishes by antisymmetry for mirror-symmetric pairs.  The
    background part is q int dt of the branch difference of
    A^0 - v . A_vec along the two paths; for a pure-gauge background that
    integrand is a total time derivative and the phase is zero up to
    quadrature tolerance.
    """
    return _phi_self_with_error(pair, spec, background)[0]


# ---------------------------------------------------------------------------
# Pairing phases between two particles (bare retarded potentials).


def _branch_pairing_with_error(
    probe: BranchPair, source: Worldline, spec: KernelSpec
) -> tuple[float, float]:
    a, b = probe.split_window
    q = probe.charge

    def integrand(ts: np.ndarray) -> np.ndarray:
        total = np.zeros_like(ts)
        for wp, sp in probe.branches():
            xp = wp.position(ts)
            vp = wp.velocity(ts)
            ev = np.concatenate([ts[:, None], xp], axis=1)
            A = _lw_batch(ev, source)
            total += sp * (A[:, 0] - np.sum(vp * A[:, 1:], axis=-1))
        return total

    val, err = adaptive_1d(
        integrand, a, b, tol=spec.quad_tol, knots=probe.split_knots(),
        name=f"pairing[{probe.label}]",
    )
    return q * val, abs(q) * err


def branch_pairing(probe: BranchPair, source: Worldline, spec: KernelSpec) -> float:
    """Phase of the probe's branch difference in one source branch's field.

    q_probe int dt sum_P s_P [A^0(t, X_P(t)) - v_P(t) . A_vec(t, X_P(t))]
    with A the bare retarded potential of the source worldline.
    """
    return _branch_pairing_with_error(probe, source, spec)[0]


def phi_pairing(probe: BranchPair, source: BranchPair, spec: KernelSpec) -> float:
    """Pairing phase: probe branch difference against source branch difference.

    Equal to branch_pairing(probe, source.right) minus the same with
    source.left, evaluated as a single integral of the retarded-field
    difference.  When every source split-window event is outside the past
    light cone of every probe split-window event (positive causal
    margin), returns exactly 0.0 without quadrature: the bare cone gives
    the difference field no support there.
    """
    if causal_margin(probe, source) > 0.0:
        return 0.0
    a, b = probe.split_window
    q = probe.charge

    def integrand(ts: np.ndarray) -> np.ndarray:
        total = np.zeros_like(ts)
        for wp, sp in probe.branches():
            xp = wp.position(ts)
            vp = wp.velocity(ts)
            ev = np.concatenate([ts[:, None], xp], axis=1)
            dA = _lw_batch(ev, source.right) - _lw_batch(ev, source.left)
            total += sp * (dA[:, 0] - np.sum(vp * dA[:, 1:], axis=-1))
        return total

    val, err = adaptive_1d(
        integrand, a, b, tol=spec.quad_tol, knots=probe.split_knots(),
        name=f"phi_pairing[{probe.label},{source.label}]",
    )
    return q * val


def _one_sided_commutator(probe: BranchPair, source: BranchPair, spec: KernelSpec) -> float:
    """Integral over the probe window of the source's advanced-minus-retarded field."""
    a, b = probe.split_window
    q = probe.charge

    def integrand(ts: np.ndarray) -> np.ndarray:
        total = np.zeros_like(ts)
        for wp, sp in probe.branches():
            xp = wp.position(ts)
            vp = wp.velocity(ts)
            ev = np.concatenate([ts[:, None], xp], axis=1)
            dA = (
                _lw_batch(ev, source.right, advanced=True)
                - _lw_batch(ev, source.left, advanced=True)
                - _lw_batch(ev, source.right)
                + _lw_batch(ev, source.left)
            )
            total += sp * (dA[:, 0] - np.sum(vp * dA[:, 1:], axis=-1))
        return total

    val, _ = adaptive_1d(
        integrand, a, b, tol=spec.quad_tol, knots=probe.split_knots(),
        name="commutator",
    )
    return q * val


def commutator_functional(pair_A: BranchPair, pair_B: BranchPair, spec: KernelSpec) -> float:
    """Antisymmetric part of the two-particle pairing: phi_BA - phi_AB.

    Each side is a single integral over one pair's split window against
    the advanced-minus-retarded field difference of the other pair;
    reciprocity of the sharp-cone Green function makes the advanced term
    equal the reverse pairing without ever integrating a double window.
    The two one-sided routes are mathematically opposite, so their
    half-difference keeps the value while making swap antisymmetry
    commutator(B, A) = -commutator(A, B) hold bit for bit.  Returns
    exactly 0.0 when the split windows are mutually spacelike (both
    causal margins positive).
    """
    if causal_margin(pair_A, pair_B) > 0.0 and causal_margin(pair_B, pair_A) > 0.0:
        return 0.0
    forward = _one_sided_commutator(pair_A, pair_B, spec)
    reverse = _one_sided_commutator(pair_B, pair_A, spec)
    return 0.5 * (forward - reverse)


def retarded_field_difference(pair: BranchPair, x) -> np.ndarray:
    """Bare retarded four-potential difference of a pair's branches at event x."""
    from .kernels import lienard_wiechert

    return lienard_wiechert(x, pair.right) - lienard_wiechert(x, pair.left)


# ---------------------------------------------------------------------------
# Full report.


@dataclass(frozen=True)
class DecoherenceReport:
    """Every functional of one two-particle scenario, with error accounting.

    phi_AB is the phase A's branch difference picks up from B's branch
    distinction (and vice versa for phi_BA); the per-branch pairings it
    is built from are kept because the reduced states need them
    individually.  quad_error is the summed error estimate of every
    quadrature that contributed.
    """

    gamma_A: float
    gamma_B: float
    phi_A: float
    phi_B: float
    phi_A_BR: float
    phi_A_BL: float
    phi_B_AR: float
    phi_B_AL: float
    phi_AB: float
    phi_BA: float
    sigma: float
    quad_error: float
    spacelike: bool

    def to_dict(self) -> dict:
        return {
            "gamma_A": self.gamma_A,
            "gamma_B": self.gamma_B,
            "phi_A": self.phi_A,
            "phi_B": self.phi_B,
            "phi_A_BR": self.phi_A_BR,
            "phi_A_BL": self.phi_A_BL,
            "phi_B_AR": self.phi_B_AR,
            "phi_B_AL": self.phi_B_AL,
            "phi_AB": self.phi_AB,
            "phi_BA": self.phi_BA,
            "sigma": self.sigma,
            "quad_error": self.quad_error,
            "spacelike": self.spacelike,
        }


def build_report(scenario: Scenario) -> DecoherenceReport:
    """Evaluate all functionals of a scenario.

    The directional phases are assembled from the per-branch pairings,
    phi_AB = phi_A_BR - phi_A_BL, so the report is internally consistent
    by construction.  In configurations where the source pair's split
    window cannot reach the probe's split window causally, both
    per-branch integrands agree bitwise (the probed field only ever sees
    branch-coincident source points) and the difference is exactly zero.
    """
    spec: KernelSpec = scenario.kernel
    ga, ega = _gamma_with_error(scenario.pair_A, spec)
    gb, egb = _gamma_with_error(scenario.pair_B, spec)
    pa, epa = _phi_self_with_error(scenario.pair_A, spec, scenario.background)
    pb, epb = _phi_self_with_error(scenario.pair_B, spec, scenario.background)
    p_abr, e1 = _branch_pairing_with_error(scenario.pair_A, scenario.pair_B.right, spec)
    p_abl, e2 = _branch_pairing_with_error(scenario.pair_A, scenario.pair_B.left, spec)
    p_bar, e3 = _branch_pairing_with_error(scenario.pair_B, scenario.pair_A.right, spec)
    p_bal, e4 = _branch_pairing_with_error(scenario.pair_B, scenario.pair_A.left, spec)
    return DecoherenceReport(
        gamma_A=ga,
        gamma_B=gb,
        phi_A=pa,
        phi_B=pb,
        phi_A_BR=p_abr,
        phi_A_BL=p_abl,
        phi_B_AR=p_bar,
        phi_B_AL=p_bal,
        phi_AB=p_abr - p_abl,
        phi_BA=p_bar - p_bal,
        sigma=spec.sigma,
        quad_error=ega + egb + epa + epb + e1 + e2 + e3 + e4,
        spacelike=scenario.spacelike,
    )
