"""Deformation retractions of representation spaces onto their compact
cores, as executable homotopies, plus a verifier for the contract.

Parameter convention throughout: t = 1 is the identity map and t = 0
lands in Hom(Gamma, K).  Much of the homotopy literature runs t the
other way; every report here uses this orientation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidParams,
    NoConvergence,
    NotElliptic,
    NotInHom0,
    UnsupportedFamily,
)
from .kempfness import FlowOptions, FlowStatus, kn_flow
from .matgroup import frobenius, kak_interpolate
from .presentation import Family, free_group
from .repvar import Rep, conjugate, relation_residual

_HOM0_UNITARITY_TOL = 1e-8
_HOM0_RELATION_TOL = 1e-6
_ELLIPTIC_TOL = 1e-6
_DIAGONALIZER_DET_FLOOR = 1e-6

_HOMOTOPY_FAMILIES = (Family.STAR_RAAG, Family.DIRECT_WITH_FINITE)


@dataclass(frozen=True)
class SdrThresholds:
    """PASS thresholds for the homotopy verifier, 10-100x the kernel
    reconstruction tolerance."""

    max_relation_residual: float = 1e-6
    endpoint_unitarity: float = 1e-7
    k_fixedness: float = 1e-9
    det_drift: float = 1e-9

    def accepts(self, report: "HomotopyReport") -> bool:
        return (
            report.max_relation_residual < self.max_relation_residual
            and report.endpoint_unitarity < self.endpoint_unitarity
            and report.k_fixedness < self.k_fixedness
            and report.det_drift < self.det_drift
        )


@dataclass
class HomotopyReport:
    """Grid metrics for one homotopy run.

    ``max_relation_residual`` is the worst relator defect over the grid,
    ``endpoint_unitarity`` the worst image distance from U(n) at t = 0,
    ``k_fixedness`` the worst displacement when the t = 0 endpoint (an
    all-unitary point) is itself pushed through the homotopy, and
    ``det_drift`` the worst determinant defect over grid and images.
    """

    t_grid: list[float] = field(default_factory=list)
    max_relation_residual: float = 0.0
    endpoint_unitarity: float = 0.0
    k_fixedness: float = 0.0
    det_drift: float = 0.0

    def __post_init__(self):
        metrics = (
            self.max_relation_residual,
            self.endpoint_unitarity,
            self.k_fixedness,
            self.det_drift,
        )
        if any(m < 0 for m in metrics):
            raise InvalidParams("homotopy metrics must be nonnegative")


def _distinguished(rep: Rep) -> tuple[int, ...]:
    fam = rep.presentation.family
    if fam not in _HOMOTOPY_FAMILIES:
        raise UnsupportedFamily(
            f"homotopy needs a star-shaped or finite-by-free group, got {fam.value}"
        )
    return rep.presentation.fixed


def _unitarity_defect(a: np.ndarray) -> float:
    return frobenius(a.conj().T @ a - np.eye(a.shape[0]))


def star_homotopy(rep: Rep, t: float) -> Rep:
    """Interpolate every non-distinguished image along its polar geodesic
    while the distinguished images stay untouched.

    At t = 1 this is the identity; at t = 0 every image is unitary, so
    the result is a point of Hom(Gamma, K).  Requires the input to lie
    in Hom0: distinguished images unitary within 1e-8 and relation
    residual below 1e-6.

    Parameters
    ----------
    rep : Rep
        Point of the representation space, star-shaped or
        finite-by-free presentation.
    t : float
        Homotopy time in [0, 1].

    Returns
    -------
    Rep
        The deformed representation at time t.
    """
    if not 0.0 <= t <= 1.0:
        raise InvalidParams(f"homotopy time {t} outside [0, 1]")
    fixed = _distinguished(rep)
    for j in fixed:
        defect = _unitarity_defect(rep.images[j])
        if defect > _HOM0_UNITARITY_TOL:
            raise NotInHom0(
                f"distinguished image {j} is {defect:.2e} from unitary"
            )
    residual = relation_residual(rep)
    if residual > _HOM0_RELATION_TOL:
        raise NotInHom0(f"relation residual {residual:.2e} too large")
    images = [
        a if j in fixed else kak_interpolate(a, t)
        for j, a in enumerate(rep.images)
    ]
    return rep.replace_images(images)


def _star_diagonalizer(b: np.ndarray) -> np.ndarray:
    """Conjugator sending an elliptic matrix to its unitary diagonal form."""
    w, v = np.linalg.eig(b)
    if np.max(np.abs(np.abs(w) - 1.0)) > _ELLIPTIC_TOL:
        raise NotElliptic("distinguished eigenvalues leave the unit circle")
    v = v / np.linalg.norm(v, axis=0, keepdims=True)
    det = np.linalg.det(v)
    if abs(det) < _DIAGONALIZER_DET_FLOOR:
        raise NotElliptic("distinguished image is not diagonalizable")
    v = v / det ** (1.0 / b.shape[0])
    return np.linalg.inv(v)


def move_to_hom0(
    rep: Rep, options: FlowOptions | None = None
) -> tuple[Rep, np.ndarray]:
    """Conjugate a representation into Hom0, where the distinguished
    images are unitary.

    For a star-shaped group the distinguished image is unitarily
    diagonalized through its eigenvector matrix.  For a finite-by-free
    group the whole distinguished subtuple is pulled to its minimal
    vector by the moment-map flow and then snapped to the unitary polar
    factors.

    Returns
    -------
    (Rep, ndarray)
        The conjugated representation and the conjugator g, acting as
        A -> g A g^-1.
    """
    fixed = _distinguished(rep)
    n = rep.dim
    if all(_unitarity_defect(rep.images[j]) <= _HOM0_UNITARITY_TOL for j in fixed):
        return rep, np.eye(n, dtype=complex)

    if rep.presentation.family == Family.STAR_RAAG:
        g = _star_diagonalizer(rep.images[fixed[0]])
        return conjugate(rep, g), g

    sub = Rep(free_group(len(fixed)), tuple(rep.images[j] for j in fixed))
    flowed, trace = kn_flow(sub, options)
    if trace.status != FlowStatus.CONVERGED:
        raise NoConvergence(
            f"distinguished subtuple flow ended with {trace.status.value}"
        )
    g = trace.conjugator
    moved = conjugate(rep, g)
    images = list(moved.images)
    for j, b in zip(fixed, flowed.images):
        u, _, vh = np.linalg.svd(b)
        images[j] = u @ vh  # unitary polar factor of the flowed image
    return moved.replace_images(images), g


def verify_sdr(
    rep: Rep,
    grid_size: int = 21,
    options: FlowOptions | None = None,
) -> HomotopyReport:
    """Push a representation through the full retraction pipeline and
    measure the homotopy contract on a uniform grid.

    The input is first moved into Hom0, then deformed over
    ``grid_size`` times in [0, 1].  The fixedness metric re-runs the
    homotopy on the t = 0 endpoint, which must stay put.

    Returns
    -------
    HomotopyReport
        Grid metrics; combine with ``SdrThresholds.accepts`` for a
        PASS/FAIL call.
    """
    if grid_size < 2:
        raise InvalidParams("grid needs at least the two endpoints")
    base, _ = move_to_hom0(rep, options)
    grid = np.linspace(0.0, 1.0, grid_size)
    eye = np.eye(rep.dim)

    worst_rel = 0.0
    worst_det = 0.0
    endpoint = None
    for t in grid:
        rt = star_homotopy(base, float(t))
        worst_rel = max(worst_rel, relation_residual(rt))
        worst_det = max(
            worst_det,
            max(abs(np.linalg.det(a) - 1.0) for a in rt.images),
        )
        if t == 0.0:
            endpoint = rt
    endpoint_unitarity = max(_unitarity_defect(a) for a in endpoint.images)

    fixedness = 0.0
    for t in grid:
        moved = star_homotopy(endpoint, float(t))
        fixedness = max(
            fixedness,
            max(
                frobenius(a - b)
                for a, b in zip(moved.images, endpoint.images)
            ),
        )

    return HomotopyReport(
        t_grid=[float(t) for t in grid],
        max_relation_residual=worst_rel,
        endpoint_unitarity=endpoint_unitarity,
        k_fixedness=fixedness,
        det_drift=worst_det,
    )
