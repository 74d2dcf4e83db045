"""Moment-map flow, polystability probe, eigenvalue-scaling retraction."""

import numpy as np
import pytest

from charvar.errors import BadInput, InvalidParams, NotNormal
from charvar.kempfness import (
    FlowOptions,
    FlowStatus,
    PolystabilityVerdict,
    kn_flow,
    normal_retract,
    polystable_probe,
)
from charvar.matgroup import frobenius, is_unitary, sample_su
from charvar.presentation import abelian_group, free_group, star_raag
from charvar.repvar import (
    Rep,
    conjugate,
    kn_residual,
    norm_sq,
    relation_residual,
    sample_hom,
)


def _unipotent_rep():
    j = np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex)
    return Rep(free_group(1), (j,))


class TestFlowOptions:
    def test_validation(self):
        with pytest.raises(InvalidParams):
            FlowOptions(max_iters=0)
        with pytest.raises(InvalidParams):
            FlowOptions(step_init=-1.0)
        with pytest.raises(InvalidParams):
            FlowOptions(residual_tol=0.0)

    def test_defaults_are_finite(self):
        opts = FlowOptions()
        assert opts.max_iters >= 1000
        assert 0 < opts.step_init <= 1
        assert 0 < opts.residual_tol < 1e-6


class TestFlow:
    def test_unitary_tuple_converges_immediately(self, rng):
        rep = Rep(free_group(2), tuple(sample_su(3, rng) for _ in range(2)))
        _, trace = kn_flow(rep)
        assert trace.status is FlowStatus.CONVERGED
        assert trace.final.iteration == 0
        assert trace.final.kn_residual < 1e-12

    def test_unipotent_detected_as_non_closed(self):
        _, trace = kn_flow(_unipotent_rep())
        assert trace.status is FlowStatus.NON_CLOSED_ORBIT_SUSPECTED
        # the infimum of the norm over the orbit closure is the norm of
        # the diagonal limit, here the identity with norm 2
        assert abs(trace.final.norm_sq - 2.0) < 1e-3

    def test_norm_monotone_nonincreasing(self, rng):
        for _ in range(5):
            rep = sample_hom(free_group(2), "free", 2, rng)
            _, trace = kn_flow(rep)
            norms = np.array([s.norm_sq for s in trace.steps])
            assert np.all(np.diff(norms) <= 0)

    def test_generic_free_pair_converges(self, rng):
        converged = 0
        for _ in range(20):
            rep = sample_hom(free_group(2), "free", 2, rng)
            _, trace = kn_flow(rep)
            if trace.status is FlowStatus.CONVERGED:
                converged += 1
                assert trace.final.kn_residual < FlowOptions().residual_tol
        assert converged >= 18

    def test_final_rep_matches_trace(self, rng):
        rep = sample_hom(free_group(2), "free", 3, rng)
        flowed, trace = kn_flow(rep)
        assert abs(norm_sq(flowed) - trace.final.norm_sq) < 1e-9 * max(
            1.0, trace.final.norm_sq
        )
        assert abs(kn_residual(flowed) - trace.final.kn_residual) < 1e-9

    def test_conjugator_reproduces_endpoint(self, rng):
        rep = sample_hom(free_group(2), "free", 2, rng)
        _, trace = kn_flow(rep)
        moved = conjugate(rep, trace.conjugator)
        assert abs(norm_sq(moved) - trace.final.norm_sq) < 1e-6 * max(
            1.0, trace.conjugator_cond
        )

    def test_k_stationarity_of_limit(self, rng):
        # the limiting norm is a conjugation-orbit invariant of the
        # unitary part: flowing from a unitarily rotated start must land
        # at the same infimum
        rep = sample_hom(free_group(2), "free", 2, rng)
        u = sample_su(2, rng)
        _, ta = kn_flow(rep)
        _, tb = kn_flow(conjugate(rep, u))
        a, b = ta.final.norm_sq, tb.final.norm_sq
        assert abs(a - b) < 1e-6 * max(1.0, a)

    def test_relation_residual_compatible_with_flow(self, rng):
        for _ in range(5):
            rep = sample_hom(star_raag(2), "angle_fiber", 2, rng, case="regular")
            flowed, trace = kn_flow(rep)
            assert relation_residual(flowed) < 1e-6 * trace.conjugator_cond

    def test_trace_is_serializable_shape(self, rng):
        rep = sample_hom(free_group(1), "free", 2, rng)
        _, trace = kn_flow(rep)
        for step in trace.steps:
            assert step.iteration >= 0
            assert step.norm_sq > 0
            assert step.kn_residual >= 0
            assert step.step_size >= 0

    def test_options_type_gate(self, rng):
        rep = sample_hom(free_group(1), "free", 2, rng)
        with pytest.raises(BadInput):
            kn_flow(rep, {"max_iters": 5})  # type: ignore[arg-type]

    def test_relation_gate(self):
        # images that badly violate the relators are rejected up front
        bad = Rep(
            abelian_group(2),
            (np.diag([2.0, 0.5]).astype(complex),
             np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)),
        )
        with pytest.raises(BadInput):
            kn_flow(bad)


class TestPolystableProbe:
    def test_unitary_is_likely_polystable(self, rng):
        rep = Rep(free_group(2), tuple(sample_su(2, rng) for _ in range(2)))
        verdict, trace = polystable_probe(rep)
        assert verdict is PolystabilityVerdict.LIKELY_POLYSTABLE
        assert trace.status is FlowStatus.CONVERGED

    def test_unipotent_is_likely_not(self):
        verdict, trace = polystable_probe(_unipotent_rep())
        assert verdict is PolystabilityVerdict.LIKELY_NOT_POLYSTABLE
        assert trace.status is FlowStatus.NON_CLOSED_ORBIT_SUSPECTED

    def test_diagonalizable_torus_rep(self, rng):
        g = np.diag([2.0, 0.5]).astype(complex)
        rep = Rep(free_group(1), (g,))
        verdict, _ = polystable_probe(rep)
        assert verdict is PolystabilityVerdict.LIKELY_POLYSTABLE

    def test_budget_exhaustion_is_inconclusive(self, rng):
        rep = sample_hom(free_group(2), "free", 3, rng)
        verdict, trace = polystable_probe(rep, FlowOptions(max_iters=1))
        if trace.status is FlowStatus.MAX_ITERS:
            assert verdict is PolystabilityVerdict.INCONCLUSIVE


class TestNormalRetract:
    def test_fixes_unitary_tuples(self, rng):
        rep = Rep(abelian_group(2), _commuting_unitaries(2, rng))
        out = normal_retract(rep, 0.7)
        for a, b in zip(out.images, rep.images):
            assert frobenius(a - b) < 1e-10

    def test_endpoint_is_unitary(self):
        rep = Rep(
            abelian_group(2),
            (
                np.diag([2.0, 0.5]).astype(complex),
                np.diag([3.0, 1 / 3.0]).astype(complex),
            ),
        )
        out = normal_retract(rep, 1.0)
        for a in out.images:
            assert frobenius(a - np.eye(2)) < 1e-12

    def test_t_zero_is_input(self, rng):
        rep = sample_hom(abelian_group(2), "abelian_diagonal", 2, rng, normal=True)
        assert normal_retract(rep, 0.0) is rep

    def test_path_stays_in_variety(self, rng):
        rep = sample_hom(abelian_group(3), "abelian_diagonal", 3, rng, normal=True)
        for t in np.linspace(0.0, 1.0, 11):
            out = normal_retract(rep, float(t))
            assert relation_residual(out) < 1e-10
            for a in out.images:
                assert abs(np.linalg.det(a) - 1.0) < 1e-10
        end = normal_retract(rep, 1.0)
        for a in end.images:
            assert is_unitary(a, 1e-10)

    def test_requires_normal_images(self, rng):
        rep = sample_hom(abelian_group(2), "abelian_diagonal", 2, rng)
        if any(
            frobenius(a @ a.conj().T - a.conj().T @ a) > 1e-8 for a in rep.images
        ):
            with pytest.raises(NotNormal):
                normal_retract(rep, 0.5)

    def test_parameter_gate(self, rng):
        rep = sample_hom(abelian_group(2), "abelian_diagonal", 2, rng, normal=True)
        with pytest.raises(InvalidParams):
            normal_retract(rep, -0.1)
        with pytest.raises(InvalidParams):
            normal_retract(rep, 1.5)


def _commuting_unitaries(n, rng):
    basis = sample_su(n, rng)
    out = []
    for _ in range(2):
        phases = rng.uniform(0, 2 * np.pi, size=n)
        phases -= phases.mean()
        out.append((basis * np.exp(1j * phases)) @ basis.conj().T)
    return tuple(out)
