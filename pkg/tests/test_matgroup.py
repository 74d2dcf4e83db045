"""Matrix kernel: sampling, KAK interpolation, taxonomy, spectral scaling."""

import numpy as np
import pytest

from charvar.errors import NotNormal
from charvar.matgroup import (
    classify_element,
    eig_decompose,
    frobenius,
    is_unitary,
    kak_decompose,
    kak_interpolate,
    sample_sl,
    sample_su,
    spectral_scale,
)

GRID = np.linspace(0.0, 1.0, 21)


def _random_normal_pair(n, rng):
    # commuting normal matrices: random unit-modulus-free diagonals in a
    # shared unitary eigenbasis
    u = sample_su(n, rng)
    out = []
    for _ in range(2):
        z = rng.normal(size=n) + 1j * rng.normal(size=n)
        z -= z.mean()
        out.append((u * np.exp(z)) @ u.conj().T)
    return out


class TestSamplers:
    def test_su_is_special_unitary(self, rng):
        for n in (2, 3, 4):
            for _ in range(20):
                u = sample_su(n, rng)
                assert frobenius(u.conj().T @ u - np.eye(n)) < 1e-12
                assert abs(np.linalg.det(u) - 1.0) < 1e-12

    def test_su_deterministic(self):
        a = sample_su(2, np.random.default_rng(42))
        b = sample_su(2, np.random.default_rng(42))
        assert np.array_equal(a, b)

    def test_su_trace_mean_near_zero(self):
        rng = np.random.default_rng(7)
        total = 0.0
        count = 10_000
        for _ in range(count):
            total += np.trace(sample_su(2, rng))
        assert abs(total / count) < 0.05

    def test_sl_determinant(self, rng):
        for n in (2, 3):
            for spread in (0.1, 1.0, 3.0):
                g = sample_sl(n, rng, spread)
                assert abs(np.linalg.det(g) - 1.0) < 1e-10

    def test_sl_zero_spread_is_unitary(self, rng):
        g = sample_sl(3, rng, 0.0)
        assert is_unitary(g, 1e-12)

    def test_sl_singular_values_balance(self, rng):
        s = np.linalg.svd(sample_sl(2, rng, 1.0), compute_uv=False)
        assert abs(np.prod(s) - 1.0) < 1e-9


class TestKak:
    def test_identity(self):
        f = kak_decompose(np.eye(3, dtype=complex))
        assert np.allclose(f.x, 0.0)
        assert frobenius(f.reconstruct() - np.eye(3)) < 1e-12

    def test_positive_diagonal(self):
        f = kak_decompose(np.diag([2.0, 0.5]).astype(complex))
        assert np.allclose(f.x, [np.log(2), -np.log(2)])
        assert frobenius(f.k @ f.h.conj().T - np.eye(2)) < 1e-12

    def test_unitary_input(self, rng):
        u = sample_su(3, rng)
        f = kak_decompose(u)
        assert np.allclose(f.x, 0.0, atol=1e-12)
        assert frobenius(f.k @ f.h.conj().T - u) < 1e-10

    def test_reconstruction_and_factor_contracts(self, rng):
        # the reconstruction bound is absolute where the input norm is
        # moderate; at spread 3 the input is special-linear only to its
        # own determinant-evaluation noise, which scales with the norm,
        # so the attainable bound is norm-relative there
        for n in (2, 3, 4):
            for spread in (0.1, 1.0, 3.0):
                for _ in range(12):
                    g = sample_sl(n, rng, spread)
                    f = kak_decompose(g)
                    bound = 1e-9 * max(1.0, frobenius(g)) if spread > 1 else 1e-9
                    assert frobenius(f.reconstruct() - g) < bound
                    assert is_unitary(f.k, 1e-10) and is_unitary(f.h, 1e-10)
                    assert abs(np.linalg.det(f.k) - 1.0) < 1e-10
                    assert abs(f.x.sum()) < 1e-12
                    assert np.all(np.diff(f.x) <= 1e-15)  # sorted descending

    def test_interpolate_endpoints(self, rng):
        g = sample_sl(2, rng, 1.0)
        assert frobenius(kak_interpolate(g, 1.0) - g) < 1e-12
        assert is_unitary(kak_interpolate(g, 0.0), 1e-9)

    def test_interpolate_fixes_unitaries(self, rng):
        u = sample_su(3, rng)
        for t in GRID:
            assert frobenius(kak_interpolate(u, float(t)) - u) < 1e-12

    def test_interpolate_diagonal_oracle(self):
        g = np.diag([2.0, 0.5]).astype(complex)
        assert frobenius(kak_interpolate(g, 0.0) - np.eye(2)) < 1e-12

    def test_closed_form_matches_factored_form(self, rng):
        for n in (2, 3):
            for _ in range(25):
                g = sample_sl(n, rng, 1.0)
                f = kak_decompose(g)
                for t in GRID:
                    assert (
                        frobenius(kak_interpolate(g, float(t)) - f.interpolate(float(t)))
                        < 1e-8
                    )

    def test_stays_special_linear(self, rng):
        g = sample_sl(3, rng, 1.5)
        for t in GRID:
            assert abs(np.linalg.det(kak_interpolate(g, float(t))) - 1.0) < 1e-9

    def test_continuity_including_degenerate_spectrum(self, rng):
        # a matrix with a repeated singular value must interpolate without
        # jumps even though its factor pair is gauge-ambiguous
        k, h = sample_su(3, rng), sample_su(3, rng)
        cases = [
            sample_sl(3, rng, 1.0),
            k @ np.diag([2.0, 2.0, 0.25]).astype(complex) @ h.conj().T,
        ]
        delta = 1e-4
        for g in cases:
            scale = np.abs(np.log(np.linalg.svd(g, compute_uv=False))).max()
            bound = 10.0 * max(scale, 1.0) * frobenius(g) * delta
            for t in np.linspace(0.0, 1.0 - delta, 40):
                step = frobenius(
                    kak_interpolate(g, float(t + delta)) - kak_interpolate(g, float(t))
                )
                assert step <= bound

    def test_multiplicative_in_t(self, rng):
        g = sample_sl(2, rng, 1.0)
        for t in (0.2, 0.5, 0.9):
            for s in (0.3, 0.7):
                lhs = kak_interpolate(kak_interpolate(g, t), s)
                rhs = kak_interpolate(g, t * s)
                assert frobenius(lhs - rhs) < 1e-8


class TestEig:
    def test_diagonal_oracle(self):
        vals, vecs = eig_decompose(np.diag([3.0, 1 / 3.0]).astype(complex))
        assert np.allclose(vals, [3.0, 1 / 3.0])
        assert np.allclose(np.abs(vecs), np.eye(2))

    def test_defective_matrix(self):
        j = np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex)
        vals, vecs = eig_decompose(j)
        assert np.allclose(vals, 1.0, atol=1e-6)
        cls = classify_element(j)
        assert not cls.is_semisimple and not cls.is_elliptic

    def test_unitary_spectrum_on_circle(self, rng):
        for _ in range(20):
            vals, _ = eig_decompose(sample_su(3, rng))
            assert np.all(np.abs(np.abs(vals) - 1.0) < 1e-9)

    def test_eigenpair_residuals(self, rng):
        for n in (2, 3, 4):
            for _ in range(20):
                g = sample_sl(n, rng, 1.0)
                vals, vecs = eig_decompose(g)
                for lam, v in zip(vals, vecs.T):
                    assert np.linalg.norm(g @ v - lam * v) < 1e-8

    def test_deterministic_order(self, rng):
        g = sample_sl(3, rng, 1.0)
        vals, _ = eig_decompose(g)
        mods = np.abs(vals)
        assert np.all(np.diff(mods) <= 1e-12)
        for a, b in zip(vals, vals[1:]):
            if abs(abs(a) - abs(b)) < 1e-12:
                assert np.angle(a) <= np.angle(b) + 1e-12


class TestClassify:
    def test_unitary_flags(self, rng):
        cls = classify_element(sample_su(2, rng))
        assert cls.is_unitary and cls.is_normal
        assert cls.is_elliptic and cls.is_semisimple

    def test_jordan_flags(self):
        cls = classify_element(np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex))
        assert not cls.is_normal
        assert not cls.is_semisimple
        assert not cls.is_elliptic
        assert not cls.is_regular

    def test_real_diagonal_flags(self):
        cls = classify_element(np.diag([2.0, 0.5]).astype(complex))
        assert cls.is_normal and cls.is_regular
        assert not cls.is_elliptic and not cls.is_unitary

    def test_unitary_iff_normal_and_elliptic(self, rng):
        # both implication directions, across a mixed population
        for _ in range(2500):
            kind = rng.integers(3)
            if kind == 0:
                g = sample_su(2, rng)
            elif kind == 1:
                g = sample_sl(2, rng, 1.0)
            else:
                g = sample_sl(3, rng, 0.3)
            cls = classify_element(g, tol=1e-8)
            assert (cls.is_normal and cls.is_elliptic) == cls.is_unitary

    def test_centralizer_of_normal_is_normal(self, rng):
        # h built diagonal in the eigenbasis of a distinct-eigenvalue
        # normal matrix commutes with it and is itself normal
        for _ in range(20):
            u = sample_su(3, rng)
            z = rng.normal(size=3) + 1j * rng.normal(size=3)
            z -= z.mean()
            b = (u * np.exp(z)) @ u.conj().T
            w = rng.normal(size=3) + 1j * rng.normal(size=3)
            w -= w.mean()
            h = (u * np.exp(w)) @ u.conj().T
            assert frobenius(b @ h - h @ b) < 1e-10
            assert classify_element(h).is_normal


class TestSpectralScale:
    def test_imaginary_diagonal_oracle(self):
        g = np.diag([2j, -0.5j])
        out = spectral_scale(g, 1.0)
        assert frobenius(out - np.diag([1j, -1j])) < 1e-12

    def test_real_diagonal_oracle(self):
        out = spectral_scale(np.diag([2.0, 0.5]).astype(complex), 1.0)
        assert frobenius(out - np.eye(2)) < 1e-12

    def test_fixes_unitaries(self, rng):
        u = sample_su(2, rng)
        for t in (0.0, 0.4, 1.0):
            assert frobenius(spectral_scale(u, t) - u) < 1e-10

    def test_unitary_endpoint_and_determinant(self, rng):
        for n in (2, 3):
            for _ in range(10):
                g, _ = _random_normal_pair(n, rng)
                assert is_unitary(spectral_scale(g, 1.0), 1e-9)
                for t in GRID:
                    assert abs(np.linalg.det(spectral_scale(g, float(t))) - 1) < 1e-9

    def test_preserves_commutant(self, rng):
        for _ in range(25):
            a, b = _random_normal_pair(3, rng)
            assert frobenius(a @ b - b @ a) < 1e-10
            for t in GRID:
                s = spectral_scale(a, float(t))
                assert frobenius(s @ b - b @ s) < 1e-7

    def test_rejects_non_normal(self):
        with pytest.raises(NotNormal):
            spectral_scale(np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex), 1.0)
