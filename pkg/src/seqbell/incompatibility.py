"""Norm-based degrees of incompatibility and their sequential lower bounds."""

import math
from dataclasses import dataclass

import numpy as np

from .certification import ETA3_MIN, PNC_BOUND, BellTuple
from .chain import predicted_grid
from .linalg import DEFAULT_TOL, SX, SZ, as_matrix, operator_norm
from .quantum import ObservableTriple, QuantumState, UnsharpSetting, luders_update

PAIR_MAX = 2.0 * math.sqrt(2.0) - 2.0
TRIPLE_MAX = 4.0 * (math.sqrt(3.0) - 1.0)
TRINE_MAX = 2.0
CHSH_ETA1_WINDOW = (1.0 / math.sqrt(2.0), math.sqrt(2.0 * (math.sqrt(2.0) - 1.0)))


@dataclass
class IncompatibilityReport:
    degree: float
    kind: str
    lower_bound_from_bell: float | None = None
    tol: float = DEFAULT_TOL

    @property
    def incompatible(self) -> bool:
        return self.degree > self.tol


def _ops(*bs):
    ops = [as_matrix(b) for b in bs]
    if len({o.shape for o in ops}) != 1:
        raise ValueError("dimension mismatch between observables")
    return ops


def degree_pair(b1, b2) -> IncompatibilityReport:
    """||B1 + B2|| + ||B1 - B2|| - 2."""
    b1, b2 = _ops(b1, b2)
    return IncompatibilityReport(operator_norm(b1 + b2) + operator_norm(b1 - b2) - 2.0, "pair")


def degree_triple(b1, b2, b3) -> IncompatibilityReport:
    b1, b2, b3 = _ops(b1, b2, b3)
    d = (
        operator_norm(b1 + b2 + b3)
        + operator_norm(b1 - b2 + b3)
        + operator_norm(b1 + b2 - b3)
        + operator_norm(-b1 + b2 + b3)
        - 4.0
    )
    return IncompatibilityReport(d, "triple")


def degree_trine(triple, tol: float = DEFAULT_TOL) -> IncompatibilityReport:
    """Trine degree; the triple must sum to zero.

    Accepts an ObservableTriple or any three matrices (zeros included).
    """
    b1, b2, b3 = _ops(*(list(triple)))
    if np.max(np.abs(b1 + b2 + b3)) > tol:
        raise ValueError("degree_trine needs B1 + B2 + B3 = 0")
    d = operator_norm(b1 - b2 + b3) + operator_norm(b1 + b2 - b3) + operator_norm(-b1 + b2 + b3) - 4.0
    return IncompatibilityReport(d, "trine")


@dataclass
class SequentialBound:
    k: int
    bell_value: float
    lower_bound: float
    incompatible: bool


def sequential_trine_bounds(t: BellTuple, etas) -> list[SequentialBound]:
    """Lower bounds on each Bob's trine degree implied by the observed Bell values.

    The verdict is the Bell-violation certificate I^k > 4.
    """
    e1, e2, e3 = (float(e) for e in etas)
    if any(not (0.0 < e <= 1.0) for e in (e1, e2, e3)):
        raise ValueError("unsharpness values must lie in (0, 1]")
    f1 = 1.0 + math.sqrt(1.0 - e1 * e1)
    f2 = 1.0 + math.sqrt(1.0 - e2 * e2)
    i1, i2, i3 = t.values()
    bounds = [
        i1 / e1 - 4.0,
        2.0 * i2 / (e2 * f1) - 4.0,
        4.0 * i3 / (e3 * f1 * f2) - 4.0,
    ]
    return [SequentialBound(k, v, b, bool(v > PNC_BOUND)) for k, (v, b) in enumerate(zip((i1, i2, i3), bounds), 1)]


def equal_incompatibility_point(eta3: float, tol: float = 1e-12) -> tuple[float, float, float]:
    """(eta1, eta2, common Bell value) at which all three Bobs share one degree."""
    if not (ETA3_MIN - tol <= eta3 <= 1.0 + tol):
        raise ValueError(f"eta3={eta3} outside [{ETA3_MIN:.6f}, 1]")
    q = 16.0 + 12.0 * eta3**2 + eta3**4
    eta1 = 4.0 * eta3 * (4.0 + eta3**2) / q
    eta2 = 4.0 * eta3 / (4.0 + eta3**2)
    return eta1, eta2, 24.0 * eta3 * (4.0 + eta3**2) / q


def jointly_measurable_anticommuting(eta: float) -> bool:
    """Three smeared anticommuting qubit observables are compatible iff eta <= 1/sqrt(3)."""
    return eta <= 1.0 / math.sqrt(3.0)


def jointly_measurable_trine(eta: float) -> bool:
    """Three smeared trine qubit observables are compatible iff eta <= 2/3."""
    return eta <= 2.0 / 3.0


def chsh_operator(alice, bob) -> np.ndarray:
    a1, a2 = alice
    b1, b2 = bob
    return np.kron(a1, b1 + b2) + np.kron(a2, b1 - b2)


def chsh_incompatibility_bounds(c1: float, c2: float, eta1: float) -> tuple[float, float]:
    """Lower bounds on D for Bob^1 and Bob^2 from observed CHSH values."""
    xi1 = math.sqrt(1.0 - eta1 * eta1)
    return c1 / eta1 - 2.0, 2.0 * c2 / (1.0 + xi1) - 2.0


@dataclass
class ChshReport:
    eta1: float
    eta2: float
    c1: float
    c2: float
    bound1: float
    bound2: float
    window: tuple[float, float]

    @property
    def in_window(self) -> bool:
        lo, hi = self.window
        return lo < self.eta1 < hi


def chsh_baseline(etas) -> ChshReport:
    """Simulated two-Bob CHSH chain on |Phi+> with the standard optimal observables."""
    e1, e2 = (float(e) for e in etas)
    if any(not (0.0 < e <= 1.0) for e in (e1, e2)):
        raise ValueError("unsharpness values must lie in (0, 1]")
    psi = np.array([1, 0, 0, 1], dtype=np.complex128) / math.sqrt(2.0)
    rho = QuantumState.from_vector(psi, (2, 2))
    alice = ((SZ + SX) / math.sqrt(2.0), (SZ - SX) / math.sqrt(2.0))
    bob = (SZ, SX)
    op = chsh_operator(alice, bob)
    c1 = e1 * float(np.einsum("ij,ji->", op, rho.matrix).real)
    rho2 = luders_update(rho, UnsharpSetting(e1), bob)
    c2 = e2 * float(np.einsum("ij,ji->", op, rho2.matrix).real)
    b1, b2 = chsh_incompatibility_bounds(c1, c2, e1)
    return ChshReport(e1, e2, c1, c2, b1, b2, CHSH_ETA1_WINDOW)


def equal_point_scale(eta3: float) -> float:
    """1/eta1 on the equal-incompatibility locus; 29/20 for a sharp third Bob."""
    return 1.0 / equal_incompatibility_point(eta3)[0]


SEQUENTIAL_COLUMNS = ("eta1", "eta2", "eta3", "I1", "I2", "I3", "D1", "D2", "D3")


def sequential_degree_grid(step: float, eta3: float = 1.0) -> np.ndarray:
    """Rows for the three Bobs' degree surfaces over (eta1, eta2) at fixed eta3.

    D_k = s * I^k - 4 with s the locus scale, so the surfaces meet where the
    three Bell values coincide.
    """
    if not (0.0 < step <= 0.5):
        raise ValueError("step must lie in (0, 0.5]")
    n = int(round(1.0 / step))
    grid = np.arange(1, n + 1) / n
    e1, e2 = np.meshgrid(grid, grid, indexing="ij")
    e1, e2 = e1.ravel(), e2.ravel()
    i1, i2, i3, _ = predicted_grid(e1, e2, np.full_like(e1, eta3))
    s = equal_point_scale(eta3)
    return np.column_stack([e1, e2, np.full_like(e1, eta3), i1, i2, i3, s * i1 - 4, s * i2 - 4, s * i3 - 4])


def as_triple(ops) -> ObservableTriple:
    return ops if isinstance(ops, ObservableTriple) else ObservableTriple(*ops)
