"""States, dichotomic observables, unsharp POVMs and the Lüders update."""

import functools
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    I2,
    SX,
    SY,
    SZ,
    as_matrix,
    dagger,
    is_hermitian,
    partial_trace,
    state_norm,
    tensor,
)

POSITIVITY_FLOOR = 1e-10


@dataclass(frozen=True)
class QuantumState:
    """Bipartite density operator on C^dA (x) C^dB."""

    matrix: np.ndarray
    dims: tuple[int, int]
    tol: float = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        m = as_matrix(self.matrix)
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 2 or dims[0] * dims[1] != m.shape[0]:
            raise ValueError(f"dims {dims} do not match matrix of size {m.shape[0]}")
        if not is_hermitian(m, self.tol):
            raise ValueError("state is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > self.tol:
            raise ValueError(f"state trace is {tr}, expected 1")
        lo = self.min_eigenvalue_of(m)
        if lo < -max(POSITIVITY_FLOOR, self.tol):
            raise ValueError(f"state has negative eigenvalue {lo:.3e}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @staticmethod
    def min_eigenvalue_of(m: np.ndarray) -> float:
        return float(np.linalg.eigvalsh(0.5 * (m + dagger(m)))[0])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def min_eigenvalue(self) -> float:
        return self.min_eigenvalue_of(self.matrix)

    def marginal(self, side: int) -> np.ndarray:
        return partial_trace(self.matrix, self.dims, keep=side)

    def purity(self) -> float:
        return float(np.einsum("ij,ji->", self.matrix, self.matrix).real)

    @classmethod
    def repaired(cls, m, dims) -> "QuantumState":
        """Clip negative eigenvalues and renormalize. Only called on request."""
        m = as_matrix(m)
        m = 0.5 * (m + dagger(m))
        w, v = np.linalg.eigh(m)
        w = np.clip(w, 0.0, None)
        m = (v * w) @ dagger(v)
        return cls(m / np.trace(m).real, dims)

    @classmethod
    def from_vector(cls, psi, dims) -> "QuantumState":
        psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), dims)


def check_dichotomic(b, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Validate a ±1-valued Hermitian observable via ||B^2 - 1|| <= tol."""
    b = as_matrix(b)
    if not is_hermitian(b, tol):
        raise ValueError("observable is not Hermitian")
    eye = np.eye(b.shape[0])
    if np.max(np.abs(b @ b - eye)) > tol:
        raise ValueError("observable does not square to the identity")
    return b


class ObservableTriple:
    """Three dichotomic observables of one party.

    With ``trine=True`` the constructor also requires b1 + b2 + b3 = 0.
    """

    def __init__(self, b1, b2, b3, trine: bool = False, tol: float = DEFAULT_TOL):
        ops = [check_dichotomic(b, tol).copy() for b in (b1, b2, b3)]
        if len({o.shape for o in ops}) != 1:
            raise ValueError("observables in a triple must share a dimension")
        for o in ops:
            o.flags.writeable = False
        self.ops = tuple(ops)
        self.tol = tol
        if trine and not self.is_trine():
            raise ValueError("triple does not sum to zero")
        self.trine = trine

    def __iter__(self):
        return iter(self.ops)

    def __getitem__(self, i):
        return self.ops[i]

    def __len__(self):
        return 3

    def __repr__(self):
        return f"ObservableTriple(dim={self.dim}, trine={self.trine})"

    @property
    def dim(self) -> int:
        return self.ops[0].shape[0]

    def trine_residual(self) -> float:
        return float(np.linalg.norm(sum(self.ops), 2))

    def is_trine(self) -> bool:
        return self.trine_residual() <= self.tol

    def conjugated(self, u) -> "ObservableTriple":
        """U B U^dag applied to each member."""
        u = as_matrix(u)
        return ObservableTriple(*(u @ b @ dagger(u) for b in self.ops), trine=self.trine, tol=self.tol)

    def negated(self) -> "ObservableTriple":
        return ObservableTriple(*(-b for b in self.ops), trine=self.trine, tol=self.tol)


@dataclass(frozen=True)
class UnsharpSetting:
    eta: float

    def __post_init__(self):
        eta = float(self.eta)
        # eta = 0 is the no-measurement limit; allowed for instruments
        if not (0.0 <= eta <= 1.0):
            raise ValueError(f"unsharpness eta={eta} outside [0, 1]")
        object.__setattr__(self, "eta", eta)

    @property
    def xi(self) -> float:
        return float(np.sqrt(1.0 - self.eta**2))


def _setting(s) -> UnsharpSetting:
    return s if isinstance(s, UnsharpSetting) else UnsharpSetting(s)


class KrausPair(NamedTuple):
    k_plus: np.ndarray
    k_minus: np.ndarray

    def completeness_residual(self) -> float:
        s = dagger(self.k_plus) @ self.k_plus + dagger(self.k_minus) @ self.k_minus
        return float(np.max(np.abs(s - np.eye(s.shape[0]))))


def make_povm(s, b) -> tuple[np.ndarray, np.ndarray]:
    """Unbiased unsharp effects (1 ± eta B)/2."""
    s = _setting(s)
    b = check_dichotomic(b)
    eye = np.eye(b.shape[0], dtype=np.complex128)
    plus = 0.5 * (eye + s.eta * b)
    return plus, eye - plus


def kraus_pair(s, b) -> KrausPair:
    """Square-root (Lüders) Kraus operators of the unsharp effects."""
    s = _setting(s)
    b = check_dichotomic(b)
    eye = np.eye(b.shape[0], dtype=np.complex128)
    rp = np.sqrt((1.0 + s.eta) / 2.0)
    rm = np.sqrt((1.0 - s.eta) / 2.0)
    alpha = 0.5 * (rp + rm)
    beta = 0.5 * (rp - rm)
    return KrausPair(alpha * eye + beta * b, alpha * eye - beta * b)


def _weights(n: int, weights) -> np.ndarray:
    if weights is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(weights, dtype=float)
    if w.shape != (n,) or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("setting weights must be a probability vector")
    return w


def luders_update(rho: QuantumState, s, observables: Sequence, weights=None) -> QuantumState:
    """State passed on after Bob measures one of `observables` unsharply.

    Closed form (1+xi)/2 rho + (1-xi)/2 sum_y w_y (1 x B_y) rho (1 x B_y);
    settings are uniformly weighted unless `weights` is given.
    """
    s = _setting(s)
    ops = [check_dichotomic(b) for b in observables]
    da, db = rho.dims
    if any(b.shape[0] != db for b in ops):
        raise ValueError("Bob's observables do not act on the second subsystem")
    w = _weights(len(ops), weights)
    eye_a = np.eye(da)
    out = 0.5 * (1.0 + s.xi) * rho.matrix
    for wy, b in zip(w, ops):
        big = tensor(eye_a, b)
        out = out + 0.5 * (1.0 - s.xi) * wy * (big @ rho.matrix @ big)
    return QuantumState(out, rho.dims)


def luders_update_kraus(rho: QuantumState, s, observables: Sequence, weights=None) -> np.ndarray:
    """Same channel as :func:`luders_update`, summed over explicit Kraus operators."""
    s = _setting(s)
    w = _weights(len(observables), weights)
    eye_a = np.eye(rho.dims[0])
    out = np.zeros_like(rho.matrix)
    for wy, b in zip(w, observables):
        for k in kraus_pair(s, b):
            big = tensor(eye_a, k)
            out += wy * (big @ rho.matrix @ dagger(big))
    return out


def pullback(x, s, observables: Sequence, weights=None) -> np.ndarray:
    """Heisenberg-picture adjoint of the Lüders channel on Bob's side:
    (1+xi)/2 X + (1-xi)/2 sum_y w_y B_y X B_y."""
    s = _setting(s)
    x = as_matrix(x)
    w = _weights(len(observables), weights)
    out = 0.5 * (1.0 + s.xi) * x
    for wy, b in zip(w, observables):
        out = out + 0.5 * (1.0 - s.xi) * wy * (b @ x @ b)
    return out


@functools.cache
def canonical_realization() -> tuple[QuantumState, ObservableTriple, ObservableTriple]:
    """Two-qubit realization reaching the quantum optimum of the Bell functional."""
    rho = 0.25 * (tensor(I2, I2) + tensor(SX, SX) - tensor(SY, SY) + tensor(SZ, SZ))
    a1 = 0.5 * (SX + np.sqrt(3.0) * SZ)
    a2 = 0.5 * (SX - np.sqrt(3.0) * SZ)
    a3 = -SX
    alice = ObservableTriple(a1, a2, a3, trine=True)
    bob = ObservableTriple(-a3, -a2, -a1, trine=True)
    return QuantumState(rho, (2, 2)), alice, bob


# rows: Alice setting x, columns: Bob setting y
BELL_COEFFS = np.array([[1, 1, -1], [1, -1, 1], [-1, 1, 1]], dtype=float)


def script_a(alice) -> list[np.ndarray]:
    """Alice's combinations paired with B_1, B_2, B_3 in the Bell functional (unnormalized)."""
    a = list(alice)
    return [sum(BELL_COEFFS[x, y] * a[x] for x in range(3)) for y in range(3)]


def correlation_operators(alice: ObservableTriple, bob: ObservableTriple, rho: QuantumState | None = None):
    """The three commuting joint operators C_i (x) C_i built from the optimal realization.

    The normalizations omega_y default to 2, which holds as an operator identity
    for trine Alice triples; pass `rho` to take them from the state-weighted norm.
    """
    for t, who in ((alice, "alice"), (bob, "bob")):
        if not t.is_trine():
            raise ValueError(f"{who} triple is not trine")
    raw = script_a(alice)
    eye_b = np.eye(bob.dim)
    if rho is None:
        omegas = [2.0, 2.0, 2.0]
    else:
        omegas = [state_norm(tensor(r, eye_b), rho) for r in raw]
    sa = [r / w for r, w in zip(raw, omegas)]
    b = list(bob)
    c1 = tensor(sa[0], b[0])
    c2 = (tensor(sa[1], b[1]) + tensor(sa[2], b[2]) - tensor(sa[2], b[1]) - tensor(sa[1], b[2])) / 3.0
    c3 = (
        tensor(sa[1] @ sa[0], b[1] @ b[0])
        - tensor(sa[1] @ sa[0], b[2] @ b[0])
        - tensor(sa[2] @ sa[0], b[1] @ b[0])
        + tensor(sa[2] @ sa[0], b[2] @ b[0])
    ) / 3.0
    return c1, c2, c3


def random_dichotomic(d: int, rng: np.random.Generator, signs=None) -> np.ndarray:
    """Haar-random eigenbasis with random (or given) ±1 spectrum."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    if signs is None:
        signs = rng.choice([-1.0, 1.0], size=d)
    return (q * np.asarray(signs, dtype=float)) @ dagger(q)


def random_state(dims: tuple[int, int], rng: np.random.Generator, rank: int | None = None) -> QuantumState:
    n = dims[0] * dims[1]
    k = n if rank is None else rank
    g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    m = g @ dagger(g)
    return QuantumState(m / np.trace(m).real, dims)
