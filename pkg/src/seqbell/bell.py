"""The three-setting Bell functional: value, classical bounds, SOS diagnostics, see-saw."""

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, dagger, matrix_sign, partial_trace, state_norm, tensor
from .quantum import BELL_COEFFS, ObservableTriple, QuantumState, random_dichotomic, script_a

QUANTUM_BOUND = 6.0


class SingularDecompositionError(ValueError):
    """Some omega_y vanishes, so the SOS operators L_y are undefined."""


def bell_operator(alice, bob) -> np.ndarray:
    """sum_y (sum_x c_xy A_x) (x) B_y."""
    return sum(tensor(sa, b) for sa, b in zip(script_a(alice), bob))


def bell_value(rho: QuantumState, alice, bob, eta: float = 1.0) -> float:
    """eta * Tr[I rho]; the unsharp correlators each carry a factor eta."""
    if not (0.0 < eta <= 1.0):
        raise ValueError(f"eta={eta} outside (0, 1]")
    op = bell_operator(alice, bob)
    if op.shape != rho.matrix.shape:
        raise ValueError(f"dimension mismatch: operator {op.shape} vs state {rho.matrix.shape}")
    return float(eta * np.einsum("ij,ji->", op, rho.matrix).real)


def deterministic_value(a, b) -> float:
    """Bell functional with every observable replaced by a number (±1 or an ontic expectation)."""
    return float(np.asarray(a, dtype=float) @ BELL_COEFFS @ np.asarray(b, dtype=float))


def local_bound() -> float:
    """Max over all 64 deterministic ±1 assignments."""
    signs = list(itertools.product((1, -1), repeat=3))
    return max(deterministic_value(a, b) for a in signs for b in signs)


def pnc_vertices() -> list[tuple[int, int, int]]:
    """Vertices of {e in [-1,1]^3 : e1+e2+e3 = 0}, plus the origin."""
    return sorted(set(itertools.permutations((1, -1, 0)))) + [(0, 0, 0)]


def pnc_bound() -> float:
    """Max over parity-oblivious ontic expectations for Alice and ±1 outputs for Bob.

    The objective is linear in e, so enumerating vertices is exact.
    """
    signs = list(itertools.product((1, -1), repeat=3))
    return max(deterministic_value(e, b) for e in pnc_vertices() for b in signs)


def pnc_grid_bound(step: float = 0.01) -> float:
    """Brute-force check of :func:`pnc_bound` on a regular grid over (e1, e2)."""
    n = int(round(1.0 / step))
    ks = np.arange(-n, n + 1)
    e1, e2 = np.meshgrid(ks, ks, indexing="ij")
    e3 = -(e1 + e2)
    ok = np.abs(e3) <= n
    e = np.stack([e1[ok], e2[ok], e3[ok]], axis=1) / n
    # best Bob response per y is sign of the coefficient
    coef = e @ BELL_COEFFS
    return float(np.max(np.abs(coef).sum(axis=1)))


@dataclass
class SosDecomposition:
    omega: tuple[float, float, float]
    script_a: tuple[np.ndarray, np.ndarray, np.ndarray]
    l_residuals: tuple[float, float, float]
    gamma_value: float
    bell_value: float
    tol: float = DEFAULT_TOL

    @property
    def optimal(self) -> bool:
        return self.gamma_value <= self.tol

    @property
    def gap(self) -> float:
        """sum(omega) - I; equals gamma_value up to rounding."""
        return float(sum(self.omega) - self.bell_value)


def sos_diagnose(rho: QuantumState, alice, bob, tol: float = DEFAULT_TOL) -> SosDecomposition:
    raw = script_a(alice)
    da, db = rho.dims
    eye_a, eye_b = np.eye(da), np.eye(db)
    omegas = [state_norm(tensor(r, eye_b), rho) for r in raw]
    if min(omegas) <= tol:
        raise SingularDecompositionError(f"degenerate omega values {omegas}")
    sa = [r / w for r, w in zip(raw, omegas)]
    ls = [tensor(a, eye_b) - tensor(eye_a, b) for a, b in zip(sa, bob)]
    gamma = 0.5 * sum(w * (dagger(l) @ l) for w, l in zip(omegas, ls))
    m = rho.matrix
    return SosDecomposition(
        omega=tuple(omegas),
        script_a=tuple(sa),
        l_residuals=tuple(float(np.einsum("ij,ji->", l, m).real) for l in ls),
        gamma_value=float(np.einsum("ij,ji->", gamma, m).real),
        bell_value=bell_value(rho, alice, bob),
        tol=tol,
    )


def parity_oblivious_residual(rho: QuantumState, alice) -> float:
    """Largest entry of the setting-averaged parity imbalance on Bob's side.

    (1/3) sum_x (Tr_A[rho (P+_x (x) 1)] - Tr_A[rho (P-_x (x) 1)]); zero iff the
    parity-oblivious constraint holds.
    """
    da, db = rho.dims
    eye_a, eye_b = np.eye(da), np.eye(db)
    diff = np.zeros((db, db), dtype=np.complex128)
    for a in alice:
        plus = partial_trace(rho.matrix @ tensor(0.5 * (eye_a + a), eye_b), rho.dims, keep=1)
        minus = partial_trace(rho.matrix @ tensor(0.5 * (eye_a - a), eye_b), rho.dims, keep=1)
        diff += plus - minus
    return float(np.max(np.abs(diff / 3.0)))


def _seesaw_single(d: int, rng: np.random.Generator, optimize: bool, max_iter: int, tol: float):
    a = [random_dichotomic(d, rng) for _ in range(3)]
    b = [random_dichotomic(d, rng) for _ in range(3)]
    dims = (d, d)
    eye = np.eye(d)

    def top(a, b):
        w, v = np.linalg.eigh(bell_operator(a, b))
        return w[-1], v[:, -1]

    value, psi = top(a, b)
    if not optimize:
        return float(value), True
    for _ in range(max_iter):
        rho = np.outer(psi, psi.conj())
        for x in range(3):
            k = sum(BELL_COEFFS[x, y] * b[y] for y in range(3))
            a[x] = matrix_sign(partial_trace(rho @ tensor(eye, k), dims, keep=0))
        for y in range(3):
            k = sum(BELL_COEFFS[x, y] * a[x] for x in range(3))
            b[y] = matrix_sign(partial_trace(rho @ tensor(k, eye), dims, keep=1))
        new, psi = top(a, b)
        if new - value <= tol:
            return float(max(new, value)), True
        value = new
    return float(value), False


def seesaw_max(d: int, restarts: int, seed: int, max_iter: int = 500, tol: float = 1e-13) -> float:
    """Best Bell value found by alternating state / observable optimization.

    Restart i draws from its own stream seeded by (seed, i). With restarts=0 the
    value of a single random starting point is returned.
    """
    if not (2 <= d <= 8):
        raise ValueError("d must lie in [2, 8]")
    if restarts < 0:
        raise ValueError("restarts must be non-negative")
    if restarts == 0:
        return _seesaw_single(d, np.random.default_rng([seed, 0]), False, max_iter, tol)[0]
    best = -np.inf
    stalled = 0
    for i in range(restarts):
        val, converged = _seesaw_single(d, np.random.default_rng([seed, i]), True, max_iter, tol)
        stalled += not converged
        best = max(best, val)
    if stalled:
        warnings.warn(f"{stalled}/{restarts} see-saw restarts hit the iteration cap", RuntimeWarning)
    return float(best)


def triple_from(ops) -> ObservableTriple:
    return ops if isinstance(ops, ObservableTriple) else ObservableTriple(*ops)
