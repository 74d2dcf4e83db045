"""Points of Hom(Gamma, SL(n,C)) as generator-image tuples, their
residuals, and structured random samplers.

The moment-map residual || sum_i [A_i*, A_i] ||_F vanishes exactly on
the minimal tuples of the norm functional sum_i tr(A_i* A_i); every
all-normal tuple sits in that zero set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import presentation as pres_mod
from .errors import (
    BadInput,
    CentralizerConstructionFailure,
    DimensionMismatch,
    InvalidParams,
    SingularMatrix,
    UnsupportedFamily,
    WrongShape,
)
from .matgroup import SUPPORTED_DIMS, frobenius, sample_sl, sample_su
from .presentation import Family, GroupPresentation, evaluate_word

_REP_DET_TOL = 1e-9
_RESAMPLE_LIMIT = 64


@dataclass(frozen=True)
class Rep:
    """Group presentation together with one matrix per generator.

    Images are complex128 arrays, one per generator, all the same
    dimension and special-linear within 1e-9.  Treat them as read-only.
    """

    presentation: GroupPresentation
    images: tuple[np.ndarray, ...]

    def __post_init__(self):
        imgs = tuple(np.asarray(m, dtype=complex) for m in self.images)
        if len(imgs) != self.presentation.rank:
            raise WrongShape(
                f"{self.presentation.rank} generators but {len(imgs)} images"
            )
        n = imgs[0].shape[0]
        if n not in SUPPORTED_DIMS:
            raise DimensionMismatch(f"dimension {n} unsupported")
        for m in imgs:
            if m.shape != (n, n):
                raise DimensionMismatch("images must share one square shape")
            det = np.linalg.det(m)
            if abs(det - 1.0) > _REP_DET_TOL:
                raise BadInput(f"image determinant {det} is not 1 within 1e-9")
        object.__setattr__(self, "images", imgs)

    @property
    def dim(self) -> int:
        return self.images[0].shape[0]

    def replace_images(self, images: Sequence[np.ndarray]) -> "Rep":
        return Rep(self.presentation, tuple(images))


@dataclass(frozen=True)
class ResidualReport:
    relation_residual: float
    kn_residual: float
    norm_sq: float


def relation_residual(rep: Rep) -> float:
    """Max Frobenius distance of a relator image from the identity;
    0.0 when the presentation has no relators."""
    if not rep.presentation.relators:
        return 0.0
    eye = np.eye(rep.dim)
    return max(
        frobenius(evaluate_word(rel, rep.images) - eye)
        for rel in rep.presentation.relators
    )


def moment_map(images: Sequence[np.ndarray]) -> np.ndarray:
    """sum_i (A_i* A_i - A_i A_i*): Hermitian, traceless, and zero exactly
    at the minimal tuples of the norm functional."""
    total = np.zeros_like(np.asarray(images[0], dtype=complex))
    for a in images:
        total += a.conj().T @ a - a @ a.conj().T
    return total


def kn_residual(rep: Rep) -> float:
    return frobenius(moment_map(rep.images))


def norm_sq(rep: Rep) -> float:
    return float(sum(np.trace(a.conj().T @ a).real for a in rep.images))


def residual_report(rep: Rep) -> ResidualReport:
    return ResidualReport(relation_residual(rep), kn_residual(rep), norm_sq(rep))


def conjugate(rep: Rep, g: np.ndarray) -> Rep:
    """Simultaneous conjugation A_i -> g A_i g^-1."""
    g = np.asarray(g, dtype=complex)
    if g.shape != (rep.dim, rep.dim):
        raise DimensionMismatch(f"conjugator shape {g.shape} vs dim {rep.dim}")
    if abs(np.linalg.det(g)) < 1e-12:
        raise SingularMatrix("conjugator is numerically singular")
    g_inv = np.linalg.inv(g)
    return rep.replace_images(tuple(g @ a @ g_inv for a in rep.images))


def trace_coordinates(rep: Rep) -> tuple[complex, complex, complex]:
    """(tr A, tr B, tr AB) for a two-generator rep in dimension 2: a
    complete conjugation invariant there."""
    if len(rep.images) != 2 or rep.dim != 2:
        raise WrongShape("trace coordinates need exactly 2 generators in dim 2")
    a, b = rep.images
    return (
        complex(np.trace(a)),
        complex(np.trace(b)),
        complex(np.trace(a @ b)),
    )


# ---------------------------------------------------------------------------
# Built-in finite subgroups of SU(2)


def _su2_pools() -> dict[str, list[np.ndarray]]:
    i2 = np.eye(2, dtype=complex)
    d = np.diag([1j, -1j])
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    quat = []
    for m in (i2, 1j * sx, 1j * sy, 1j * sz):
        quat.extend([m, -m])
    zeta = np.exp(1j * np.pi / 3)
    x6 = np.diag([zeta, np.conj(zeta)])
    y = np.array([[0, 1], [-1, 0]], dtype=complex)
    dic3 = []
    for k in range(6):
        xk = np.linalg.matrix_power(x6, k)
        dic3.extend([xk, xk @ y])
    return {
        "cyclic4": [np.linalg.matrix_power(d, k) for k in range(4)],
        "quaternion8": quat,
        "binary_dihedral12": dic3,
    }


FINITE_SUBGROUPS = _su2_pools()


def finite_subgroup(name: str) -> list[np.ndarray]:
    """Element list of a built-in finite subgroup of SU(2)."""
    try:
        return [m.copy() for m in FINITE_SUBGROUPS[name]]
    except KeyError:
        raise InvalidParams(
            f"unknown subgroup {name!r}, choose from {sorted(FINITE_SUBGROUPS)}"
        ) from None


def commutant_basis(mats: Sequence[np.ndarray], tol: float = 1e-10) -> list[np.ndarray]:
    """Orthonormal basis (as matrices) of {X : [X, M] = 0 for all M}.

    Null space of the stacked Sylvester operators, read off the SVD.
    """
    mats = [np.asarray(m, dtype=complex) for m in mats]
    n = mats[0].shape[0]
    eye = np.eye(n)
    blocks = [np.kron(m.T, eye) - np.kron(eye, m) for m in mats]
    stack = np.vstack(blocks) if blocks else np.zeros((1, n * n))
    _, sing, vh = np.linalg.svd(stack)
    cutoff = tol * max(1.0, sing[0] if sing.size else 1.0)
    null_mask = np.concatenate([sing <= cutoff, np.ones(n * n - sing.size, bool)])
    basis = [vh[j].reshape(n, n) for j in range(n * n) if null_mask[j]]
    if not basis:
        raise CentralizerConstructionFailure("commutant is numerically empty")
    return basis


# ---------------------------------------------------------------------------
# Samplers

_MIN_EIG_GAP = 0.05  # rejection margin keeping samples away from case boundaries
_MIN_CUBE_MARGIN = 0.1


_LOG_EIG_CAP = 1.6  # truncation (in units of spread) on log-eigenvalue draws
_COND_CAP = 25.0  # conjugators and blocks are rejected above this condition


def _diag_sl(n: int, rng: np.random.Generator, spread: float) -> np.ndarray:
    # truncated draw: extreme log-moduli produce tuples whose flow budget
    # scales with the tuple norm, so the tail is cut rather than clipped
    while True:
        z = spread * (rng.normal(size=n) + 1j * rng.normal(size=n))
        z -= z.mean()
        if np.abs(z.real).max() <= _LOG_EIG_CAP * spread:
            return np.exp(z)


def _bounded_sl(n: int, rng: np.random.Generator, spread: float,
                max_cond: float = _COND_CAP) -> np.ndarray:
    for _ in range(_RESAMPLE_LIMIT):
        g = sample_sl(n, rng, spread)
        if np.linalg.cond(g) <= max_cond:
            return g
    raise NumericalFailure("condition-bounded sampling kept rejecting draws")


def _unit_diag_sl(n: int, rng: np.random.Generator) -> np.ndarray:
    theta = rng.uniform(-np.pi, np.pi, size=n)
    theta -= theta.mean()
    return np.exp(1j * theta)


def _distinct(vals: np.ndarray, gap: float = _MIN_EIG_GAP) -> bool:
    n = len(vals)
    return all(
        abs(vals[i] - vals[j]) > gap for i in range(n) for j in range(i + 1, n)
    )


def _det_normalized(a: np.ndarray, n: int) -> np.ndarray:
    det = np.linalg.det(a)
    if abs(det) < 1e-6:
        raise SingularMatrix("candidate matrix is numerically singular")
    return a / det ** (1.0 / n)


def _sample_free(pres, n, rng, spread=1.0, **_):
    if pres.relators:
        raise UnsupportedFamily("free-style sampling needs a relator-free group")
    return Rep(pres, tuple(sample_sl(n, rng, spread) for _ in range(pres.rank)))


def _sample_abelian_diagonal(pres, n, rng, spread=1.0, conj_spread=0.5,
                             normal=False, **_):
    if pres.family not in (Family.ABELIAN, Family.RAAG):
        raise UnsupportedFamily("abelian_diagonal needs an abelian presentation")
    if pres.family == Family.RAAG:
        r = pres.rank
        if len(pres.graph.edges) != r * (r - 1) // 2:
            raise UnsupportedFamily("abelian_diagonal needs a complete graph")
    basis = sample_su(n, rng) if normal else _bounded_sl(n, rng, conj_spread)
    basis_inv = basis.conj().T if normal else np.linalg.inv(basis)
    images = tuple(
        basis @ np.diag(_diag_sl(n, rng, spread)) @ basis_inv
        for _ in range(pres.rank)
    )
    return Rep(pres, images)


def _jordan_seed(n: int, rng: np.random.Generator) -> np.ndarray:
    """Non-diagonalizable, non-derogatory special-linear matrix."""
    if n == 2:
        sign = 1.0 if rng.uniform() < 0.5 else -1.0
        return np.array([[sign, 1.0], [0.0, sign]], dtype=complex)
    lam = _regular_eig_3(rng)
    b = np.zeros((3, 3), dtype=complex)
    b[0, 0] = b[1, 1] = lam
    b[0, 1] = 1.0
    b[2, 2] = lam**-2
    return b


def _regular_eig_3(rng: np.random.Generator) -> complex:
    while True:
        z = 0.4 * (rng.normal() + 1j * rng.normal())
        lam = np.exp(z)
        if abs(lam**3 - 1.0) > _MIN_CUBE_MARGIN and abs(lam - lam**-2) > _MIN_EIG_GAP:
            return lam


def _poly_in(b: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """Random det-1 polynomial in b of degree < n (spans the centralizer
    of a non-derogatory matrix)."""
    for _ in range(_RESAMPLE_LIMIT):
        coeffs = rng.normal(size=n) + 1j * rng.normal(size=n)
        a = np.zeros_like(b)
        power = np.eye(n, dtype=complex)
        for c in coeffs:
            a += c * power
            power = power @ b
        if abs(np.linalg.det(a)) > 1e-2:
            return _det_normalized(a, n)
    raise CentralizerConstructionFailure("no invertible polynomial in B found")


def _sample_angle_fiber(pres, n, rng, case="regular", hom0=False,
                        spread=1.0, conj_spread=0.5, **_):
    if pres.family != Family.STAR_RAAG:
        raise UnsupportedFamily("angle_fiber needs a star-shaped presentation")
    leaves = pres.rank - 1
    case = str(case)
    if case == "central":
        k = int(rng.integers(n))
        center = np.exp(2j * np.pi * k / n) * np.eye(n, dtype=complex)
        leaf_images = [_bounded_sl(n, rng, spread) for _ in range(leaves)]
    elif case == "jordan":
        if hom0:
            raise InvalidParams("a non-diagonalizable centre cannot be unitary")
        center = _jordan_seed(n, rng)
        leaf_images = [_poly_in(center, n, rng) for _ in range(leaves)]
    elif case == "regular":
        while True:
            diag = _unit_diag_sl(n, rng) if hom0 else _diag_sl(n, rng, spread)
            if _distinct(diag):
                break
        center = np.diag(diag)
        leaf_images = [np.diag(_diag_sl(n, rng, spread)) for _ in range(leaves)]
    elif case == "repeated_diag":
        if n != 3:
            raise InvalidParams("repeated_diag is a 3-dimensional case")
        if hom0:
            while True:
                lam = np.exp(1j * rng.uniform(-np.pi, np.pi))
                if (abs(lam**3 - 1.0) > _MIN_CUBE_MARGIN
                        and abs(lam - lam**-2) > _MIN_EIG_GAP):
                    break
        else:
            lam = _regular_eig_3(rng)
        center = np.diag([lam, lam, lam**-2])
        leaf_images = []
        for _ in range(leaves):
            for _ in range(_RESAMPLE_LIMIT):
                x = spread * (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
                det_x = np.linalg.det(x)
                if abs(det_x) > 1e-2:
                    a = np.zeros((3, 3), dtype=complex)
                    a[:2, :2] = x
                    a[2, 2] = 1.0 / det_x
                    if np.linalg.cond(a) <= _COND_CAP:
                        break
            else:
                raise CentralizerConstructionFailure("GL(2) block stayed singular")
            leaf_images.append(a)
    else:
        raise InvalidParams(f"unknown angle-fiber case {case!r}")

    rep = Rep(pres, (center, *leaf_images))
    if hom0:
        return conjugate(rep, sample_su(n, rng))
    return conjugate(rep, _bounded_sl(n, rng, conj_spread))


def _sample_finite_by_free(pres, n, rng, subgroup="cyclic4", hom0=True,
                           conj_spread=0.5, **_):
    if pres.family != Family.DIRECT_WITH_FINITE:
        raise UnsupportedFamily("finite_by_free needs a direct-with-finite group")
    pool = finite_subgroup(subgroup)
    if pool[0].shape[0] != n:
        raise InvalidParams(
            f"subgroup {subgroup!r} lives in dimension {pool[0].shape[0]}, not {n}"
        )
    b_indices = pres.fixed
    free_rank = pres.rank - len(b_indices)
    finite_rels = [
        rel for rel in pres.relators
        if all(g in b_indices for g, _ in rel.letters)
    ]
    for _ in range(_RESAMPLE_LIMIT):
        b_images = {
            j: pool[int(rng.integers(len(pool)))] for j in b_indices
        }
        placeholder = [np.eye(n, dtype=complex)] * pres.rank
        for j, m in b_images.items():
            placeholder[j] = m
        ok = all(
            frobenius(evaluate_word(rel, placeholder) - np.eye(n)) < 1e-10
            for rel in finite_rels
        )
        if ok:
            break
    else:
        raise CentralizerConstructionFailure(
            "no assignment of subgroup elements satisfied the finite relators"
        )
    basis = commutant_basis(list(b_images.values()))
    a_images = []
    for _ in range(free_rank):
        for _ in range(_RESAMPLE_LIMIT):
            coeffs = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
            cand = sum(c * e for c, e in zip(coeffs, basis))
            if abs(np.linalg.det(cand)) > 1e-2:
                a_images.append(_det_normalized(cand, n))
                break
        else:
            raise CentralizerConstructionFailure(
                "centralizer sampling kept hitting singular matrices"
            )
    # a-block first, then the finite block, matching the presentation order
    images = a_images + [b_images[j] for j in sorted(b_indices)]
    rep = Rep(pres, tuple(images))
    if hom0:
        return conjugate(rep, sample_su(n, rng))
    return conjugate(rep, _bounded_sl(n, rng, conj_spread))


_SAMPLERS: dict[str, Callable[..., Rep]] = {
    "free": _sample_free,
    "abelian_diagonal": _sample_abelian_diagonal,
    "angle_fiber": _sample_angle_fiber,
    "finite_by_free": _sample_finite_by_free,
}


def sample_hom(
    pres: GroupPresentation,
    style: str,
    n: int,
    rng: np.random.Generator,
    **params,
) -> Rep:
    """Draw a random point of Hom(Gamma, SL(n,C)) with relation residual
    below 1e-8 by construction.

    Styles: ``free`` (independent images), ``abelian_diagonal`` (shared
    eigenbasis), ``angle_fiber`` (star-shaped groups; ``case`` one of
    central / jordan / regular / repeated_diag), ``finite_by_free``
    (finite block from a built-in SU(2) subgroup, free block from its
    commutant).  ``hom0=True`` keeps distinguished images unitary and
    conjugates by a unitary only.
    """
    if n not in SUPPORTED_DIMS:
        raise InvalidParams(f"n must be one of {SUPPORTED_DIMS}")
    try:
        sampler = _SAMPLERS[style]
    except KeyError:
        raise InvalidParams(
            f"unknown style {style!r}, choose from {sorted(_SAMPLERS)}"
        ) from None
    return sampler(pres, n, rng, **params)
