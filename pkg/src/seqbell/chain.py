"""Alice + Bob^1 ... Bob^k sequential scenario: simulation, closed forms, residual checks."""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .bell import bell_value
from .linalg import anticommutator, operator_norm, state_norm, tensor
from .quantum import ObservableTriple, QuantumState, UnsharpSetting, canonical_realization, luders_update, pullback

MAX_VIOLATING_BOBS = 3
PNC_BOUND = 4.0


def _xi(eta):
    return np.sqrt(1.0 - np.asarray(eta, dtype=float) ** 2)


@dataclass
class ChainConfig:
    initial_state: QuantumState
    alice: ObservableTriple
    bobs: list[tuple[ObservableTriple, UnsharpSetting]]
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.bobs:
            raise ValueError("a chain needs at least one Bob")
        da, db = self.initial_state.dims
        if self.alice.dim != da:
            raise ValueError("Alice's triple does not match the first subsystem")
        bobs = []
        for triple, s in self.bobs:
            if triple.dim != db:
                raise ValueError("a Bob triple does not match the second subsystem")
            bobs.append((triple, s if isinstance(s, UnsharpSetting) else UnsharpSetting(s)))
        self.bobs = bobs
        if len(bobs) > MAX_VIOLATING_BOBS + 1:
            warnings.warn(
                f"chain of {len(bobs)} Bobs exceeds the 4 needed to exhibit the violation ceiling",
                stacklevel=2,
            )

    @property
    def etas(self) -> list[float]:
        return [s.eta for _, s in self.bobs]

    @classmethod
    def canonical(cls, etas, bob_triples=None) -> "ChainConfig":
        """Canonical state and Alice; every Bob uses the canonical trine unless overridden."""
        rho, alice, bob = canonical_realization()
        triples = bob_triples or [bob] * len(etas)
        return cls(rho, alice, [(t, UnsharpSetting(e)) for t, e in zip(triples, etas)])


@dataclass
class ChainResult:
    bell_values: list[float]
    states: list[QuantumState]
    # per Bob: (B~_y, omega~_y) for y = 1..3, relative to the state Bob^(k-1) acted on
    effective_observables: list[list[tuple[np.ndarray, float]]] = field(repr=False)
    heisenberg_values: list[float] = field(default_factory=list)


def run_chain(cfg: ChainConfig) -> ChainResult:
    """Iterate the Lüders update and evaluate each Alice-Bob^k Bell value on rho_k."""
    rho = cfg.initial_state
    eye_a = np.eye(rho.dims[0])
    values, states, effective, heis = [], [], [], []
    prev = None
    for triple, s in cfg.bobs:
        if s.eta <= 0.0:
            raise ValueError("every Bob in a chain needs eta in (0, 1]")
        if prev is not None:
            prev_triple, prev_s, prev_rho = prev
            rho = luders_update(prev_rho, prev_s, list(prev_triple), cfg.weights)
            tilde = [pullback(b, prev_s, list(prev_triple), cfg.weights) for b in triple]
            base = prev_rho
        else:
            tilde = [np.array(b) for b in triple]
            base = rho
        states.append(rho)
        values.append(bell_value(rho, cfg.alice, triple, s.eta))
        effective.append([(t, state_norm(tensor(eye_a, t), base)) for t in tilde])
        heis.append(bell_value(base, cfg.alice, tilde, s.eta))
        prev = (triple, s, rho)
    return ChainResult(values, states, effective, heis)


def predicted_values(etas) -> list[float]:
    """Closed-form I^k = 6 eta_k prod_{j<k} (1 + sqrt(1 - eta_j^2)) / 2, for up to four Bobs."""
    etas = [float(e) for e in etas]
    if not (1 <= len(etas) <= 4):
        raise ValueError("between one and four unsharpness values are supported")
    if any(not (0.0 < e <= 1.0) for e in etas):
        raise ValueError("each eta must lie in (0, 1]")
    out, factor = [], 1.0
    for e in etas:
        out.append(6.0 * e * factor)
        factor *= 0.5 * (1.0 + math.sqrt(1.0 - e * e))
    return out


def predicted_grid(eta1, eta2, eta3, eta4=1.0):
    """Vectorized closed forms; returns (I1, I2, I3, I4) arrays."""
    f1 = 0.5 * (1.0 + _xi(eta1))
    f2 = 0.5 * (1.0 + _xi(eta2))
    f3 = 0.5 * (1.0 + _xi(eta3))
    i1 = 6.0 * np.asarray(eta1, dtype=float)
    return i1, 6.0 * eta2 * f1, 6.0 * eta3 * f1 * f2, 6.0 * eta4 * f1 * f2 * f3


def fourth_value_ceiling() -> float:
    """3/4 (1 + sqrt5/3)^3: every earlier eta pushed down to 2/3."""
    return 0.75 * (1.0 + math.sqrt(5.0) / 3.0) ** 3


def _min_eta2(eta1):
    return 4.0 / (3.0 * (1.0 + _xi(eta1)))


def _min_eta3(eta1, eta2):
    return 8.0 / (3.0 * (1.0 + _xi(eta1)) * (1.0 + _xi(eta2)))


def max_fourth_value(eta1: float | None = None, constrained: bool = False) -> float:
    """Largest I^4 (eta_4 = 1) compatible with I^1, I^2, I^3 > 4.

    Default: the supremum with each of eta_1..3 only required to exceed 2/3,
    i.e. 3/4 (1 + sqrt5/3)^3. ``constrained=True`` instead pins eta_2 and eta_3 to
    their violation thresholds given eta_1, and maximizes over eta_1. Passing
    `eta1` fixes Bob^1's unsharpness in either mode.
    """
    def product(e1, e2, e3):
        return 0.75 * (1 + _xi(e1)) * (1 + _xi(e2)) * (1 + _xi(e3))

    if not constrained:
        e1 = 2.0 / 3.0 if eta1 is None else eta1
        if not (2.0 / 3.0 <= e1 <= 1.0):
            raise ValueError("eta1 must exceed 2/3 for Bob^1 to violate")
        return float(product(e1, 2.0 / 3.0, 2.0 / 3.0))

    def value(e1):
        e2 = _min_eta2(e1)
        e3 = _min_eta3(e1, e2)
        if e2 > 1.0 or e3 > 1.0:
            return -np.inf
        return float(product(e1, e2, e3))

    if eta1 is not None:
        return value(eta1)
    hi = math.sqrt(5.0) / 3.0
    res = minimize_scalar(lambda e: -value(e), bounds=(2.0 / 3.0, hi), method="bounded", options={"xatol": 1e-12})
    return max(-res.fun, value(2.0 / 3.0), value(hi))


@dataclass
class BobResiduals:
    k: int
    trine_sum: float
    anticommutator: float
    conjugation_sums: dict[int, float] = field(default_factory=dict)
    conjugation_total: dict[int, float] = field(default_factory=dict)
    nested_sum: float | None = None
    nested_total: float | None = None
    proportionality: float | None = None
    proportionality_factor: float | None = None

    def max_residual(self) -> float:
        vals = [self.trine_sum, self.anticommutator, *self.conjugation_sums.values(), *self.conjugation_total.values()]
        vals += [v for v in (self.nested_sum, self.nested_total, self.proportionality) if v is not None]
        return max(vals)


def _conj_sum(outer: ObservableTriple, x: np.ndarray) -> np.ndarray:
    return sum(b @ x @ b for b in outer)


def verify_theorem_conditions(cfg: ChainConfig) -> list[BobResiduals]:
    """Operator-norm residuals for the structural conditions behind the closed forms.

    For each Bob^k: ||sum_y B_y||, max ||{B_y, B_y'} + 1||; for k >= 2 the
    conjugation sums sum_y' B^j_y' B^k_y B^j_y' against every earlier Bob j,
    and the proportionality ||B~_y - c_k B_y|| of the effective observable
    pulled back to rho_1; for k >= 3 the nested two-Bob sum.
    """
    report = []
    eye = np.eye(cfg.bobs[0][0].dim)
    for k, (triple, _) in enumerate(cfg.bobs, start=1):
        ops = list(triple)
        anti = max(operator_norm(anticommutator(ops[i], ops[j]) + eye) for i in range(3) for j in range(i + 1, 3))
        r = BobResiduals(k=k, trine_sum=operator_norm(sum(ops)), anticommutator=anti)
        if k >= 2:
            for j in range(1, k):
                outer = cfg.bobs[j - 1][0]
                sums = [_conj_sum(outer, b) for b in ops]
                r.conjugation_sums[j] = max(operator_norm(s) for s in sums)
                r.conjugation_total[j] = operator_norm(sum(sums))
            factor = 1.0
            for _, s in cfg.bobs[: k - 1]:
                factor *= 0.5 * (1.0 + s.xi)
            prop = 0.0
            for b in ops:
                t = b
                for prev_triple, prev_s in reversed(cfg.bobs[: k - 1]):
                    t = pullback(t, prev_s, list(prev_triple), cfg.weights)
                prop = max(prop, operator_norm(t - factor * b))
            r.proportionality = prop
            r.proportionality_factor = factor
        if k >= 3:
            inner = cfg.bobs[k - 2][0]
            outer = cfg.bobs[k - 3][0]
            nested = [_conj_sum(outer, _conj_sum(inner, b)) for b in ops]
            r.nested_sum = max(operator_norm(s) for s in nested)
            r.nested_total = operator_norm(sum(nested))
        report.append(r)
    return report
