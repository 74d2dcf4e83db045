"""Dense kernel for SL(n,C) and SU(n) with 2 <= n <= 4.

Everything operates on complex128 square arrays.  The two deformation
primitives live here: singular-value interpolation (KAK) for arbitrary
special-linear matrices and eigenvalue-modulus scaling for normal ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    InvalidParams,
    NoConvergence,
    NotNormal,
    NumericalFailure,
    ZeroEigenvalue,
)

SUPPORTED_DIMS = (2, 3, 4)
SL_DET_TOL = 1e-10


def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, "fro"))


def _as_square(g: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=complex)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {g.shape}")
    if g.shape[0] not in SUPPORTED_DIMS:
        raise DimensionMismatch(
            f"dimension {g.shape[0]} unsupported, use one of {SUPPORTED_DIMS}"
        )
    return g


def _require_sl(g: np.ndarray, tol: float = SL_DET_TOL) -> np.ndarray:
    g = _as_square(g)
    det = np.linalg.det(g)
    if abs(det - 1.0) > tol:
        raise InvalidParams(f"determinant {det} is not 1 within {tol}")
    return g


def is_unitary(g: np.ndarray, tol: float = 1e-8) -> bool:
    g = np.asarray(g, dtype=complex)
    return frobenius(g.conj().T @ g - np.eye(g.shape[0])) < tol


# ---------------------------------------------------------------------------
# Sampling


def sample_su(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed element of SU(n).

    QR of a complex Ginibre matrix with the R-diagonal phases folded into
    Q gives Haar measure on U(n); dividing by an n-th root of the
    determinant lands in SU(n).
    """
    if n not in SUPPORTED_DIMS:
        raise InvalidParams(f"n must be one of {SUPPORTED_DIMS}")
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    det = np.linalg.det(q)
    return q / det ** (1.0 / n)


def sample_sl(n: int, rng: np.random.Generator, spread: float = 1.0) -> np.ndarray:
    """Random element of SL(n,C): Haar unitary times exp of a random
    traceless Hermitian with entry scale ``spread``.

    Draws whose determinant drifts beyond 1e-10 are redrawn: for large
    spreads the determinant of an extreme-condition sample cannot even
    be evaluated to that accuracy in double precision, so membership
    would be unverifiable.
    """
    if spread < 0:
        raise InvalidParams("spread must be nonnegative")
    for _ in range(64):
        u = sample_su(n, rng)
        z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h = spread * (z + z.conj().T) / 2.0
        h -= (np.trace(h) / n) * np.eye(n)
        g = u @ _expm_hermitian(h)
        g = g / np.linalg.det(g) ** (1.0 / n)
        if abs(np.linalg.det(g) - 1.0) < 1e-10:
            return g
    raise NumericalFailure("determinant polish kept failing; spread too large")


def _expm_hermitian(h: np.ndarray, scale: float = 1.0) -> np.ndarray:
    w, q = np.linalg.eigh(h)
    return (q * np.exp(scale * w)) @ q.conj().T


# ---------------------------------------------------------------------------
# KAK interpolation


@dataclass(frozen=True)
class KakFactors:
    """Factorization g = k diag(e^x) h* with k, h in SU(n) and sum(x) = 0.

    x is sorted descending; the factors are unique only up to the usual
    unitary gauge on coinciding singular values.
    """

    k: np.ndarray
    x: np.ndarray
    h: np.ndarray

    def interpolate(self, t: float) -> np.ndarray:
        return (self.k * np.exp(t * self.x)) @ self.h.conj().T

    def reconstruct(self) -> np.ndarray:
        return self.interpolate(1.0)


def kak_decompose(g: np.ndarray) -> KakFactors:
    """SVD with the determinant phase pushed into the last column so both
    unitary factors land in SU(n)."""
    g = _require_sl(g)
    n = g.shape[0]
    try:
        u, s, vh = np.linalg.svd(g)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalFailure(f"SVD failed: {exc}") from exc
    x = np.log(s)
    x -= x.mean()  # determinant is 1, so the log-singular values sum to 0
    det_u = np.linalg.det(u)
    u = u.copy()
    vh = vh.copy()
    u[:, -1] /= det_u
    vh[-1, :] *= det_u
    return KakFactors(k=u, x=x, h=vh.conj().T)


def kak_interpolate(g: np.ndarray, t: float) -> np.ndarray:
    """Gauge-invariant singular-value interpolation g (g*g)^((t-1)/2).

    Equals k e^{tx} h* for any factorization g = k e^x h*: at t=1 the
    input, at t=0 the unitary polar factor.  Conjugation-equivariant
    under SU(n) and multiplicative in t.
    """
    g = _require_sl(g)
    w, q = np.linalg.eigh(g.conj().T @ g)
    w = np.maximum(w, 1e-300)
    return g @ ((q * w ** ((t - 1.0) / 2.0)) @ q.conj().T)


# ---------------------------------------------------------------------------
# Spectra and the element taxonomy

_EIG_ZERO_TOL = 1e-12


def eig_decompose(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and unit-norm eigenvectors in a deterministic order:
    descending modulus, then ascending argument; each eigenvector's
    largest entry is made real positive."""
    g = _as_square(g)
    try:
        vals, vecs = np.linalg.eig(g)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"eigenvalue iteration failed: {exc}") from exc
    order = np.lexsort((np.angle(vals), -np.abs(vals)))
    vals = vals[order]
    vecs = vecs[:, order]
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    for j in range(vecs.shape[1]):
        lead = np.argmax(np.abs(vecs[:, j]))
        phase = vecs[lead, j]
        vecs[:, j] *= np.conj(phase) / abs(phase)
    return vals, vecs


@dataclass(frozen=True)
class ElementClass:
    """Membership flags for one matrix.

    normal: commutes with its adjoint.  semisimple: diagonalizable (the
    eigenvector matrix is well conditioned).  elliptic: semisimple with
    unit-modulus spectrum.  unitary: g*g = 1.  regular: distinct
    eigenvalues.  Unitary matrices are exactly the normal elliptic ones.
    """

    is_normal: bool
    is_semisimple: bool
    is_elliptic: bool
    is_unitary: bool
    is_regular: bool
    eigenvalues: tuple[complex, ...]


def classify_element(g: np.ndarray, tol: float = 1e-8) -> ElementClass:
    g = _as_square(g)
    n = g.shape[0]
    normal = frobenius(g.conj().T @ g - g @ g.conj().T) < tol
    unitary = frobenius(g.conj().T @ g - np.eye(n)) < tol
    vals, vecs = eig_decompose(g)
    cond = np.linalg.cond(vecs)
    semisimple = bool(np.isfinite(cond) and cond < 1.0 / tol)
    elliptic = semisimple and bool(np.all(np.abs(np.abs(vals) - 1.0) < tol))
    gaps = [abs(vals[i] - vals[j]) for i in range(n) for j in range(i + 1, n)]
    regular = bool(min(gaps) > tol)
    return ElementClass(
        is_normal=normal,
        is_semisimple=semisimple,
        is_elliptic=elliptic,
        is_unitary=unitary,
        is_regular=regular,
        eigenvalues=tuple(complex(v) for v in vals),
    )


def spectral_scale(g: np.ndarray, t: float, tol: float = 1e-8) -> np.ndarray:
    """Scale each eigenvalue of a normal matrix toward the unit circle:
    lambda -> lambda / |lambda|^t.  At t=1 the result is unitary; the
    determinant of a special-linear input stays 1.

    The unitary eigenbasis comes from the complex Schur form, so the
    output is an exact spectral function of g and commutes with
    everything g commutes with.
    """
    g = _as_square(g)
    residual = frobenius(g.conj().T @ g - g @ g.conj().T)
    if residual > tol:
        raise NotNormal(f"normality residual {residual:.3e} exceeds {tol:.1e}")
    try:
        tri, z = scipy.linalg.schur(g, output="complex")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NoConvergence(f"Schur reduction failed: {exc}") from exc
    lam = np.diagonal(tri).copy()
    moduli = np.abs(lam)
    if np.min(moduli) < _EIG_ZERO_TOL:
        raise ZeroEigenvalue("an eigenvalue is numerically zero")
    scaled = lam / moduli**t
    return (z * scaled) @ z.conj().T
