"""Component census of the angle-group character variety over SL(2,C)
and SL(3,C): classify sampled fibers by their central image, probe
orbit closure with the moment-map flow, and reduce to a component
count, plus the per-case compact-core retraction check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import BadInput, InvalidParams
from .kempfness import (
    FlowOptions,
    PolystabilityVerdict,
    normal_retract,
    polystable_probe,
)
from .matgroup import frobenius, kak_interpolate, spectral_scale
from .presentation import star_raag
from .repvar import Rep, conjugate, relation_residual, sample_hom
from .retract import star_homotopy

_CLASSIFY_TOL = 1e-8
_AMBIGUOUS_BAND = 10.0  # band [tol, 10 tol] counts as boundary evidence
_EIG_GAP_TOL = 1e-6  # computed eigenvalues of a defective matrix split ~1e-8
_NULLITY_TOL = 1e-6
_RELATION_GATE = 1e-6
_RETRACT_GRID = 11
_ENDPOINT_UNITARITY = 1e-8
_ENDPOINT_DET = 1e-9
_TRACE_REALITY = 1e-8
_BALL_SLACK = 1e-6

# the probe budget for census runs: a shorter leash than the library
# default, tuned so escaping orbits still fire well before the cap
CENSUS_FLOW_OPTIONS = FlowOptions(max_iters=3000, stall_decrease_tol=1e-4)


class Group(str, Enum):
    SL2 = "sl2"
    SL3 = "sl3"

    @property
    def dim(self) -> int:
        return 2 if self is Group.SL2 else 3


class CaseLabel(str, Enum):
    CENTRAL = "central"
    NON_DIAGONALIZABLE = "non_diagonalizable"
    REGULAR = "regular"
    REPEATED_SEMISIMPLE = "repeated_semisimple_noncentral"
    AMBIGUOUS = "ambiguous"


# sampler case key -> expected classification, in report order
_CASE_PLAN = {
    Group.SL2: (
        ("central", CaseLabel.CENTRAL),
        ("jordan", CaseLabel.NON_DIAGONALIZABLE),
        ("regular", CaseLabel.REGULAR),
    ),
    Group.SL3: (
        ("central", CaseLabel.CENTRAL),
        ("jordan", CaseLabel.NON_DIAGONALIZABLE),
        ("regular", CaseLabel.REGULAR),
        ("repeated_diag", CaseLabel.REPEATED_SEMISIMPLE),
    ),
}


@dataclass
class CaseRow:
    case: CaseLabel
    sample_count: int
    ambiguous_count: int
    polystable_fraction: float
    verdict_counts: dict[str, int]
    invariant_signature: dict

    def __post_init__(self):
        if not 0.0 <= self.polystable_fraction <= 1.0:
            raise InvalidParams("polystable fraction must lie in [0, 1]")


@dataclass
class ComponentReport:
    group: Group
    samples_per_case: int
    seed: int
    case_rows: list[CaseRow]
    component_estimate: int
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.component_estimate < 1:
            raise InvalidParams("component estimate must be at least 1")


def classify_fiber(rep: Rep) -> CaseLabel:
    """Case of the distinguished image B = rep.images[0].

    Central means B is scalar; a sample within [tol, 10 tol] of a case
    boundary is reported Ambiguous rather than guessed.  Repeated
    eigenvalues are split into semisimple (two-dimensional eigenspace)
    versus non-diagonalizable through the singular values of B - lambda,
    which stays reliable where computed eigenvalue gaps do not.
    """
    if relation_residual(rep) > _RELATION_GATE:
        raise BadInput("fiber classification needs a valid homomorphism")
    b = rep.images[0]
    n = rep.dim
    scale = max(1.0, frobenius(b))
    scalar_defect = frobenius(b - (np.trace(b) / n) * np.eye(n))
    if scalar_defect < _CLASSIFY_TOL * scale:
        return CaseLabel.CENTRAL
    if scalar_defect < _AMBIGUOUS_BAND * _CLASSIFY_TOL * scale:
        return CaseLabel.AMBIGUOUS

    vals = np.linalg.eigvals(b)
    gaps = [
        (abs(vals[i] - vals[j]), i, j)
        for i in range(n)
        for j in range(i + 1, n)
    ]
    gap_min, i, j = min(gaps)
    if gap_min > _AMBIGUOUS_BAND * _EIG_GAP_TOL * scale:
        return CaseLabel.REGULAR
    if gap_min > _EIG_GAP_TOL * scale:
        return CaseLabel.AMBIGUOUS
    cluster = (vals[i] + vals[j]) / 2.0
    sing = np.linalg.svd(b - cluster * np.eye(n), compute_uv=False)
    if sing[-2] < _NULLITY_TOL * scale:
        # two independent eigenvectors for the repeated eigenvalue
        if n == 2:
            return CaseLabel.AMBIGUOUS  # scalar 2x2 already classified central
        return CaseLabel.REPEATED_SEMISIMPLE
    return CaseLabel.NON_DIAGONALIZABLE


def _round_complex(z: complex, digits: int = 6) -> tuple[float, float]:
    out = (round(z.real, digits), round(z.imag, digits))
    return (out[0] + 0.0, out[1] + 0.0)  # normalize -0.0


def _range(values) -> list[float]:
    arr = np.asarray(list(values), dtype=float)
    return [float(arr.min()), float(arr.max())]


def _repeated_block_invariants(rep: Rep) -> tuple[list[float], list[float]]:
    """GL(2)-block characters of the leaves on the repeated eigenspace."""
    b = rep.images[0]
    vals, vecs = np.linalg.eig(b)
    order = np.argsort(
        [min(abs(v - w) for k, w in enumerate(vals) if k != m)
         for m, v in enumerate(vals)]
    )
    span = vecs[:, order[:2]]
    q, _ = np.linalg.qr(span)
    traces, dets = [], []
    for a in rep.images[1:]:
        x = q.conj().T @ a @ q
        traces.append(abs(np.trace(x)))
        dets.append(abs(np.linalg.det(x)))
    return _range(traces), _range(dets)


def _signature(case: CaseLabel, reps: list[Rep]) -> dict:
    """Deterministic numeric summary of the case's separating invariants."""
    if not reps:
        return {}
    tr_b = [complex(np.trace(r.images[0])) for r in reps]
    n = reps[0].dim
    eye = np.eye(n)
    comm_dev = []
    for r in reps:
        a, c = r.images[1], r.images[2]
        word = a @ c @ np.linalg.inv(a) @ np.linalg.inv(c)
        comm_dev.append(frobenius(word - eye))
    sig: dict = {
        "tr_b_real_range": _range(z.real for z in tr_b),
        "tr_b_imag_range": _range(z.imag for z in tr_b),
        "leaf_commutator_defect_max": float(max(comm_dev)),
    }
    if case is CaseLabel.CENTRAL:
        sig["central_characters"] = sorted({_round_complex(z) for z in tr_b})
    if case is CaseLabel.REGULAR:
        sig["eig_gap_min"] = float(
            min(
                min(
                    abs(v[i] - v[j])
                    for i in range(n)
                    for j in range(i + 1, n)
                )
                for v in (np.linalg.eigvals(r.images[0]) for r in reps)
            )
        )
    if case is CaseLabel.REPEATED_SEMISIMPLE:
        tr_all, det_all = [], []
        for r in reps:
            t, d = _repeated_block_invariants(r)
            tr_all.extend(t)
            det_all.extend(d)
        sig["block_trace_abs_range"] = _range(tr_all)
        sig["block_det_abs_range"] = _range(det_all)
    return sig


def run_census(
    group: Group | str,
    samples_per_case: int,
    seed: int,
    options: FlowOptions | None = None,
) -> ComponentReport:
    """Sample every case fiber, probe polystability, and count components.

    The component estimate is assembled from exact discrete invariants:
    each distinct central character with a polystable sample is its own
    component, the regular locus closure contributes one, and in
    dimension 3 the repeated-semisimple family contributes one more.
    Non-diagonalizable samples are expected to be uniformly
    non-polystable and contribute none; the notes record it.

    Parameters
    ----------
    group : Group or str
        "sl2" or "sl3".
    samples_per_case : int
        At least 100 draws per case fiber.
    seed : int
        Master seed; every random draw descends from it.
    options : FlowOptions, optional
        Probe profile, defaulting to the census budget.

    Returns
    -------
    ComponentReport
    """
    group = Group(group)
    if samples_per_case < 100:
        raise InvalidParams("census needs at least 100 samples per case")
    opts = options or CENSUS_FLOW_OPTIONS
    n = group.dim
    pres = star_raag(2)
    rows: list[CaseRow] = []
    notes: list[str] = []
    estimate = 0
    boundary_total = 0

    for case_idx, (sampler_case, expected) in enumerate(_CASE_PLAN[group]):
        rng = np.random.default_rng([seed, n, case_idx])
        kept: list[Rep] = []
        verdicts: dict[str, int] = {}
        poly_chars: set[tuple[float, float]] = set()
        ambiguous = 0
        mismatched = 0
        for _ in range(samples_per_case):
            rep = sample_hom(pres, "angle_fiber", n, rng, case=sampler_case)
            label = classify_fiber(rep)
            if label is CaseLabel.AMBIGUOUS:
                ambiguous += 1
                continue
            if label is not expected:
                mismatched += 1
                continue
            kept.append(rep)
            verdict, _ = polystable_probe(rep, opts)
            verdicts[verdict.value] = verdicts.get(verdict.value, 0) + 1
            if verdict is PolystabilityVerdict.LIKELY_POLYSTABLE:
                if expected is CaseLabel.CENTRAL:
                    poly_chars.add(_round_complex(complex(np.trace(rep.images[0]))))
        likely = verdicts.get(PolystabilityVerdict.LIKELY_POLYSTABLE.value, 0)
        fraction = likely / len(kept) if kept else 0.0
        rows.append(
            CaseRow(
                case=expected,
                sample_count=len(kept),
                ambiguous_count=ambiguous,
                polystable_fraction=fraction,
                verdict_counts=dict(sorted(verdicts.items())),
                invariant_signature=_signature(expected, kept),
            )
        )
        boundary_total += ambiguous
        if mismatched:
            notes.append(
                f"{expected.value}: {mismatched} draws classified off-case and dropped"
            )
        if expected is CaseLabel.CENTRAL:
            estimate += len(poly_chars)
            notes.append(
                f"central: {len(poly_chars)} distinct central characters with "
                "polystable samples, one component each"
            )
        elif expected is CaseLabel.NON_DIAGONALIZABLE:
            if fraction > 0.5:
                estimate += 1
                notes.append(
                    "non-diagonalizable: unexpectedly polystable, counted as a component"
                )
            else:
                notes.append(
                    f"non-diagonalizable: {likely}/{len(kept)} polystable; "
                    "orbits are non-closed and contribute no component"
                )
        elif fraction >= 0.5:
            estimate += 1
            notes.append(f"{expected.value}: one component (closure of the locus)")
        else:
            notes.append(
                f"{expected.value}: polystable fraction {fraction:.3f} below 0.5, "
                "no component counted"
            )
    if boundary_total:
        notes.append(
            f"boundary evidence: {boundary_total} ambiguous samples sit within "
            "10x tolerance of two cases; recorded without conclusion"
        )
    return ComponentReport(
        group=group,
        samples_per_case=samples_per_case,
        seed=seed,
        case_rows=rows,
        component_estimate=estimate,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# Compact-core retraction per case


@dataclass
class RetractRow:
    case: CaseLabel
    attempted: int
    passed: int
    worst_relation_residual: float
    worst_endpoint_unitarity: float
    worst_det_drift: float
    endpoint_invariant: str

    @property
    def pass_fraction(self) -> float:
        return self.passed / self.attempted if self.attempted else 0.0


@dataclass
class RetractReport:
    group: Group
    samples_per_case: int
    seed: int
    rows: list[RetractRow]
    notes: list[str] = field(default_factory=list)


def _fiber_diagonalizer(b: np.ndarray, cluster_pair: bool = False) -> np.ndarray:
    """Basis change sending a diagonalizable B to diagonal form, with the
    repeated eigenvalue pair listed first when requested."""
    vals, vecs = np.linalg.eig(b)
    if cluster_pair:
        isolation = [
            min(abs(v - w) for k, w in enumerate(vals) if k != m)
            for m, v in enumerate(vals)
        ]
        order = np.argsort(isolation)
        vecs = vecs[:, order]
    vecs = vecs / np.linalg.norm(vecs, axis=0, keepdims=True)
    det = np.linalg.det(vecs)
    if abs(det) < 1e-6:
        raise BadInput("distinguished image is not safely diagonalizable")
    vecs = vecs / det ** (1.0 / b.shape[0])
    return np.linalg.inv(vecs)


def _grid_metrics(path: list[Rep]) -> tuple[float, float, float]:
    worst_rel = max(relation_residual(r) for r in path)
    endpoint = path[0]  # t = 0 entry is the compact endpoint
    eye = np.eye(endpoint.dim)
    worst_uni = max(
        frobenius(a.conj().T @ a - eye) for a in endpoint.images
    )
    worst_det = max(
        abs(np.linalg.det(a) - 1.0) for r in path for a in r.images
    )
    return worst_rel, worst_uni, worst_det


def _central_path(rep: Rep, grid: np.ndarray) -> list[Rep]:
    return [star_homotopy(rep, float(t)) for t in grid]


def _diagonal_path(rep: Rep, grid: np.ndarray) -> list[Rep]:
    # all images normal after the basis change: scale eigenvalue moduli
    # (grid t runs in the identity-at-1 convention, the scaler's reverse)
    return [normal_retract(rep, float(1.0 - t)) for t in grid]


def _block_path(rep: Rep, grid: np.ndarray) -> list[Rep]:
    # leaves are GL(2)-block images, not normal: interpolate each along
    # its polar geodesic while the diagonal centre scales spectrally
    out = []
    for t in grid:
        images = [spectral_scale(rep.images[0], float(1.0 - t))]
        images += [kak_interpolate(a, float(t)) for a in rep.images[1:]]
        out.append(rep.replace_images(images))
    return out


def _ball_coordinate_check(endpoint: Rep) -> bool:
    a, c = endpoint.images[1], endpoint.images[2]
    x = complex(np.trace(a))
    y = complex(np.trace(c))
    z = complex(np.trace(a @ c))
    if max(abs(x.imag), abs(y.imag), abs(z.imag)) > _TRACE_REALITY:
        return False
    xr, yr, zr = x.real, y.real, z.real
    return xr * xr + yr * yr + zr * zr - xr * yr * zr <= 4.0 + _BALL_SLACK


def _common_diagonal_check(endpoint: Rep) -> bool:
    off = 0.0
    for a in endpoint.images:
        off = max(off, frobenius(a - np.diag(np.diag(a))))
    return off < 1e-8


def retract_census(
    group: Group | str, samples_per_case: int, seed: int
) -> RetractReport:
    """Retract each polystable case onto its compact core and verify the
    endpoints.

    Central fibers ride the polar-geodesic homotopy with the central
    image fixed; regular fibers diagonalize and scale eigenvalue moduli;
    the dimension-3 repeated-semisimple fibers scale the centre
    spectrally while each GL(2)-block leaf follows its polar geodesic
    (the blocks are not normal, so modulus scaling alone does not
    apply).  Non-diagonalizable fibers carry no compact core and are
    skipped with a note.
    """
    group = Group(group)
    if samples_per_case < 100:
        raise InvalidParams("census needs at least 100 samples per case")
    n = group.dim
    pres = star_raag(2)
    grid = np.linspace(0.0, 1.0, _RETRACT_GRID)
    rows: list[RetractRow] = []
    notes: list[str] = [
        "homotopy time runs t = 1 (identity) to t = 0 (compact endpoint)",
        "non-diagonalizable case skipped: no compact core to retract onto",
    ]

    plans = [
        ("central", CaseLabel.CENTRAL),
        ("regular", CaseLabel.REGULAR),
    ]
    if group is Group.SL3:
        plans.append(("repeated_diag", CaseLabel.REPEATED_SEMISIMPLE))

    for case_idx, (sampler_case, label) in enumerate(plans):
        rng = np.random.default_rng([seed, n, case_idx, 1])
        attempted = 0
        passed = 0
        worst = [0.0, 0.0, 0.0]
        invariant_ok = 0
        for _ in range(samples_per_case):
            rep = sample_hom(pres, "angle_fiber", n, rng, case=sampler_case)
            attempted += 1
            if label is CaseLabel.CENTRAL:
                path = _central_path(rep, grid)
                inv_ok = (
                    _ball_coordinate_check(path[0]) if group is Group.SL2 else True
                )
            elif label is CaseLabel.REGULAR:
                g = _fiber_diagonalizer(rep.images[0])
                path = _diagonal_path(conjugate(rep, g), grid)
                inv_ok = _common_diagonal_check(path[0])
            else:
                g = _fiber_diagonalizer(rep.images[0], cluster_pair=True)
                path = _block_path(conjugate(rep, g), grid)
                inv_ok = True
            rel, uni, det = _grid_metrics(path)
            worst = [max(worst[0], rel), max(worst[1], uni), max(worst[2], det)]
            ok = (
                rel < _RELATION_GATE
                and uni < _ENDPOINT_UNITARITY
                and det < _ENDPOINT_DET
                and inv_ok
            )
            passed += ok
            invariant_ok += inv_ok
        if label is CaseLabel.CENTRAL and group is Group.SL2:
            inv_desc = (
                f"real trace coordinates in the closed ball: {invariant_ok}/{attempted}"
            )
        elif label is CaseLabel.REGULAR:
            inv_desc = (
                f"endpoint unitary diagonal in a common basis: {invariant_ok}/{attempted}"
            )
        else:
            inv_desc = "endpoint unitary with relations preserved"
        rows.append(
            RetractRow(
                case=label,
                attempted=attempted,
                passed=passed,
                worst_relation_residual=worst[0],
                worst_endpoint_unitarity=worst[1],
                worst_det_drift=worst[2],
                endpoint_invariant=inv_desc,
            )
        )
    return RetractReport(
        group=group,
        samples_per_case=samples_per_case,
        seed=seed,
        rows=rows,
        notes=notes,
    )
