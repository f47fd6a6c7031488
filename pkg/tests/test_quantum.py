"""Reduced states, visibility, distinguishability."""

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from qcl.functionals import DecoherenceReport, build_report
from qcl.kernels import coulomb_background
from qcl.quantum import (
    DensityMatrix2,
    distinguishability,
    rho_A,
    rho_B_conditional,
    trace_distance,
    visibility,
)

from conftest import mutual_scenario, spacelike_scenario


def fake_report(**overrides) -> DecoherenceReport:
    base = dict(
        gamma_A=0.0, gamma_B=0.0, phi_A=0.0, phi_B=0.0,
        phi_A_BR=0.0, phi_A_BL=0.0, phi_B_AR=0.0, phi_B_AL=0.0,
        sigma=0.07, quad_error=0.0, spacelike=False,
    )
    base.update(overrides)
    base.setdefault("phi_AB", base["phi_A_BR"] - base["phi_A_BL"])
    base.setdefault("phi_BA", base["phi_B_AR"] - base["phi_B_AL"])
    return DecoherenceReport(**base)


def bloch(x: float, y: float, z: float) -> DensityMatrix2:
    return DensityMatrix2([
        [0.5 * (1.0 + z), 0.5 * (x - 1j * y)],
        [0.5 * (x + 1j * y), 0.5 * (1.0 - z)],
    ])


class TestDensityMatrix2:
    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError, match="2x2"):
            DensityMatrix2(np.eye(3))

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="hermitian"):
            DensityMatrix2([[0.5, 0.3], [0.2, 0.5]])

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix2([[0.6, 0.0], [0.0, 0.6]])

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValueError, match="positive"):
            DensityMatrix2([[1.2, 0.0], [0.0, -0.2]])

    def test_valid_matrix_round_trips(self):
        m = bloch(0.3, -0.2, 0.5)
        assert m[0, 0] == pytest.approx(0.75)
        assert m.matrix[1, 0] == pytest.approx(0.15 - 0.1j)


class TestRhoA:
    def test_no_dephasing_is_pure(self):
        m = rho_A(fake_report())
        assert m[0, 1] == 0.5
        assert visibility(m) == 1.0

    def test_ln2_dephasing_halves_visibility(self):
        m = rho_A(fake_report(gamma_A=math.log(2.0)))
        assert m[0, 1] == pytest.approx(0.25, rel=1e-15)
        assert visibility(m) == pytest.approx(0.5, rel=1e-15)

    def test_spacelike_form_carries_own_phase(self):
        rep = fake_report(gamma_A=0.3, phi_A=0.7)
        want = 0.5 * math.exp(-0.3) * np.exp(0.7j)
        assert rho_A(rep)[0, 1] == pytest.approx(want, rel=1e-15)

    def test_visibility_closed_form(self, rng):
        # 2 |rho_RL| must equal e^-Gamma |cos(Phi_AB / 2)| regardless of
        # the common phase and of how the pairing splits between branches.
        for _ in range(25):
            rep = fake_report(
                gamma_A=rng.uniform(0.0, 2.0),
                phi_A=rng.uniform(-3.0, 3.0),
                phi_A_BR=rng.uniform(-3.0, 3.0),
                phi_A_BL=rng.uniform(-3.0, 3.0),
            )
            want = math.exp(-rep.gamma_A) * abs(math.cos(0.5 * rep.phi_AB))
            assert abs(visibility(rho_A(rep)) - want) < 1e-13


class TestRhoBConditional:
    def test_branch_label_is_validated(self):
        with pytest.raises(ValueError, match="branch_of_A"):
            rho_B_conditional(fake_report(), "X")

    def test_opposite_pairing_phases(self):
        rep = fake_report(phi_B_AR=math.pi, phi_B_AL=0.0)
        mr = rho_B_conditional(rep, "R")
        ml = rho_B_conditional(rep, "L")
        assert mr[0, 1] == pytest.approx(-0.5, abs=1e-15)
        assert ml[0, 1] == pytest.approx(0.5, abs=1e-15)
        assert trace_distance(mr, ml) == pytest.approx(1.0, rel=1e-14)

    def test_identical_pairings_are_indistinguishable(self):
        rep = fake_report(gamma_B=0.4, phi_B_AR=0.4, phi_B_AL=0.4)
        assert distinguishability(rep) == 0.0

    def test_eigenvalue_pair(self, rng):
        for _ in range(10):
            g = rng.uniform(0.0, 3.0)
            rep = fake_report(gamma_B=g, phi_B=rng.uniform(-2.0, 2.0),
                              phi_B_AR=rng.uniform(-2.0, 2.0))
            eigs = np.sort(np.linalg.eigvalsh(rho_B_conditional(rep, "R").matrix))
            want = np.array([(1.0 - math.exp(-g)) / 2.0, (1.0 + math.exp(-g)) / 2.0])
            assert np.allclose(eigs, want, rtol=1e-12, atol=1e-14)


class TestVisibilityAndTraceDistance:
    def test_visibility_edges(self):
        assert visibility(bloch(0.0, 0.0, 0.0)) == 0.0
        assert visibility(bloch(1.0, 0.0, 0.0)) == 1.0

    def test_trace_distance_edges(self):
        assert trace_distance(bloch(0.2, 0.1, -0.3), bloch(0.2, 0.1, -0.3)) == 0.0
        up = DensityMatrix2([[1.0, 0.0], [0.0, 0.0]])
        down = DensityMatrix2([[0.0, 0.0], [0.0, 1.0]])
        assert trace_distance(up, down) == pytest.approx(1.0, rel=1e-15)

    coord = st.floats(-1.0, 1.0)

    @given(a=st.tuples(coord, coord, coord), b=st.tuples(coord, coord, coord),
           c=st.tuples(coord, coord, coord))
    @settings(max_examples=150, deadline=None)
    def test_metric_properties(self, a, b, c):
        assume(all(math.hypot(*v) <= 1.0 for v in (a, b, c)))
        ra, rb, rc = bloch(*a), bloch(*b), bloch(*c)
        dab = trace_distance(ra, rb)
        assert dab == pytest.approx(trace_distance(rb, ra), abs=1e-14)
        # Qubit trace distance is half the Bloch-vector distance.
        want = 0.5 * math.dist(a, b)
        assert dab == pytest.approx(want, abs=1e-12)
        assert trace_distance(ra, rc) <= dab + trace_distance(rb, rc) + 1e-12


class TestDistinguishability:
    def test_closed_form(self, rng):
        for _ in range(25):
            rep = fake_report(
                gamma_B=rng.uniform(0.0, 2.0),
                phi_B=rng.uniform(-3.0, 3.0),
                phi_B_AR=rng.uniform(-3.0, 3.0),
                phi_B_AL=rng.uniform(-3.0, 3.0),
            )
            want = math.exp(-rep.gamma_B) * abs(math.sin(0.5 * rep.phi_BA))
            assert abs(distinguishability(rep) - want) <= 1e-12

    def test_perfect_record(self):
        rep = fake_report(phi_B_AR=math.pi)
        assert distinguishability(rep) == pytest.approx(1.0, rel=1e-14)


class TestBackgroundIndependence:
    def test_visibility_and_distinguishability_unaffected(self, rng):
        # A background field shifts the own phases, which enter the
        # reduced states only as overall phases of the off-diagonal
        # element; the moduli that V and D are built from never see it.
        s = mutual_scenario(rng)
        field = coulomb_background(0.9, (0.3, 0.5, 0.0), s.kernel)
        plain = build_report(s)
        shifted = build_report(dataclasses.replace(s, background=field))
        assert shifted.phi_A != plain.phi_A  # the test is not vacuous
        assert shifted.gamma_A == plain.gamma_A
        assert shifted.phi_AB == plain.phi_AB
        assert shifted.phi_BA == plain.phi_BA
        assert visibility(rho_A(shifted)) == visibility(rho_A(plain))
        assert distinguishability(shifted) == distinguishability(plain)


class TestOnScenarios:
    def test_spacelike_reduced_state(self, rng):
        s = spacelike_scenario(rng)
        rep = build_report(s)
        m = rho_A(rep)
        want = 0.5 * math.exp(-rep.gamma_A) * np.exp(1j * rep.phi_A)
        assert m[0, 1] == pytest.approx(want, rel=1e-14)
        assert rho_B_conditional(rep, "R").matrix == pytest.approx(
            rho_B_conditional(rep, "L").matrix, abs=1e-15
        )
