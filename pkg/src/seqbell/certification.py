"""Turning observed Bell tuples into certified unsharpness parameters and ranges."""

import math
from dataclasses import dataclass, field

import numpy as np

PNC_BOUND = 4.0
QUANTUM_BOUND = 6.0
ENDPOINT_TOL = 5e-10

SQRT5 = math.sqrt(5.0)
ETA1_MIN = 2.0 / 3.0
ETA1_MAX_TWO = 2.0 * math.sqrt(2.0) / 3.0
ETA1_MAX_THREE = SQRT5 / 3.0
ETA2_MIN_THREE = 3.0 - SQRT5
ETA2_MAX_THREE = 4.0 / 5.0
ETA3_MIN = 0.5 * (3.0 + SQRT5 - math.sqrt(6.0 * SQRT5 - 2.0))


class InfeasibleTupleError(ValueError):
    """The tuple exceeds the quantum optimum and cannot come from any realization."""


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_expr: str
    hi_expr: str
    lo_open: bool = True
    hi_open: bool = True

    def contains(self, x: float, tol: float = ENDPOINT_TOL) -> bool:
        above = x > self.lo - tol if self.lo_open else x >= self.lo - tol
        below = x < self.hi + tol if self.hi_open else x <= self.hi + tol
        return above and below

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "lo_expr": self.lo_expr,
            "hi_expr": self.hi_expr,
            "lo_open": self.lo_open,
            "hi_open": self.hi_open,
        }

    def __str__(self):
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo_expr}, {self.hi_expr}{right}"


@dataclass(frozen=True)
class BellTuple:
    i1: float
    i2: float = float("nan")
    i3: float = float("nan")

    def values(self) -> tuple[float, float, float]:
        return (self.i1, self.i2, self.i3)

    def flags(self) -> tuple[bool, bool, bool]:
        return tuple(bool(v > PNC_BOUND) for v in self.values())


def eta2_lower(eta1: float) -> float:
    """Smallest eta_2 for which Bob^2 still violates, given eta_1."""
    return 4.0 / (3.0 * (1.0 + math.sqrt(1.0 - eta1 * eta1)))


def eta2_upper(eta1: float) -> float:
    """Largest eta_2 leaving Bob^3 (sharp) a violation, given eta_1."""
    xi = math.sqrt(1.0 - eta1 * eta1)
    inner = 3.0 * xi - 1.0
    if inner <= 0:
        return float("nan")
    return 4.0 * math.sqrt(inner) / (3.0 * (1.0 + xi))


def eta3_lower(eta1: float, eta2: float) -> float:
    return 8.0 / (3.0 * (1.0 + math.sqrt(1.0 - eta1 * eta1)) * (1.0 + math.sqrt(1.0 - eta2 * eta2)))


@dataclass
class RangeReport:
    flags: tuple[bool, bool, bool]
    eta1: Interval
    eta2: Interval | None = None
    # envelope of the eta_1-dependent upper bound over the certified eta_1 range
    eta2_envelope: Interval | None = None
    eta3_min: float | None = None
    eta3_min_expr: str | None = None

    def to_dict(self) -> dict:
        return {
            "flags": list(self.flags),
            "eta1": self.eta1.to_dict(),
            "eta2": None if self.eta2 is None else self.eta2.to_dict(),
            "eta2_envelope": None if self.eta2_envelope is None else self.eta2_envelope.to_dict(),
            "eta3_min": self.eta3_min,
            "eta3_min_expr": self.eta3_min_expr,
        }


def certify_ranges(flags) -> RangeReport:
    """Unsharpness ranges certified by the cumulative pattern of violations.

    `flags` is an iterable of three booleans (I^1 > 4, I^2 > 4, I^3 > 4), or a
    BellTuple. Only prefix patterns are meaningful; later flags without the
    earlier ones are ignored.
    """
    if isinstance(flags, BellTuple):
        flags = flags.flags()
    f1, f2, f3 = (bool(f) for f in flags)
    if not f1:
        raise ValueError("no certification without Bob^1's violation")
    if not f2:
        return RangeReport((True, False, False), Interval(ETA1_MIN, 1.0, "2/3", "1", hi_open=False))
    if not f3:
        return RangeReport(
            (True, True, False),
            Interval(ETA1_MIN, ETA1_MAX_TWO, "2/3", "2*sqrt(2)/3"),
            eta2=Interval(ETA2_MIN_THREE, 1.0, "3 - sqrt(5)", "1", hi_open=False),
        )
    return RangeReport(
        (True, True, True),
        Interval(ETA1_MIN, ETA1_MAX_THREE, "2/3", "sqrt(5)/3"),
        eta2=Interval(ETA2_MIN_THREE, ETA2_MAX_THREE, "3 - sqrt(5)", "4/5"),
        eta2_envelope=Interval(
            ETA2_MIN_THREE, eta2_upper(ETA1_MIN), "3 - sqrt(5)", "4*sqrt(sqrt(5) - 1)/(3 + sqrt(5))"
        ),
        eta3_min=ETA3_MIN,
        eta3_min_expr="(3 + sqrt(5) - sqrt(6*sqrt(5) - 2))/2",
    )


@dataclass
class CertificationResult:
    eta1: float
    eta2: float
    eta3_min: float
    eta1_interval: Interval | None
    eta2_interval: Interval | None
    valid: bool
    consistent: bool
    manifold_distance: float
    flags: tuple[bool, bool, bool]
    ranges: RangeReport | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "eta1": self.eta1,
            "eta2": self.eta2,
            "eta3_min": self.eta3_min,
            "eta1_interval": None if self.eta1_interval is None else self.eta1_interval.to_dict(),
            "eta2_interval": None if self.eta2_interval is None else self.eta2_interval.to_dict(),
            "valid": self.valid,
            "consistent": self.consistent,
            "manifold_distance": self.manifold_distance,
            "flags": list(self.flags),
            "ranges": None if self.ranges is None else self.ranges.to_dict(),
        }


def invert_tuple(t: BellTuple) -> CertificationResult:
    """Recover eta_1, eta_2 (and the eta_3 implied by I^3) from observed Bell values.

    Tuples off the closed-form manifold are flagged, never projected:
    ``manifold_distance`` is how far I^2 or I^3 overshoots its ceiling.
    """
    i1, i2, i3 = t.values()
    if not (0.0 < i1 <= QUANTUM_BOUND + ENDPOINT_TOL):
        raise InfeasibleTupleError(f"I^1 = {i1} outside (0, 6]")
    eta1 = min(i1 / 6.0, 1.0)
    f1 = 1.0 + math.sqrt(1.0 - eta1 * eta1)
    eta2 = i2 / (3.0 * f1)
    excess = max(0.0, i2 - 3.0 * f1)
    if eta2 <= 1.0:
        f2 = 1.0 + math.sqrt(1.0 - eta2 * eta2)
        eta3 = 2.0 * i3 / (3.0 * f1 * f2)
        excess = max(excess, i3 - 1.5 * f1 * f2)
    else:
        eta3 = float("nan")
    consistent = excess <= ENDPOINT_TOL
    flags = t.flags()
    in_range = all(0.0 < e <= 1.0 + ENDPOINT_TOL for e in (eta1, eta2, eta3))
    ranges = certify_ranges(flags) if flags[0] else None
    eta1_iv = ranges.eta1 if ranges else None
    eta2_iv = ranges.eta2 if ranges else None
    valid = all(flags) and consistent and in_range
    if valid:
        # eta_2 is checked against the eta_1-dependent window, not the quoted global one
        window = Interval(eta2_lower(eta1), eta2_upper(eta1), "", "")
        valid = eta1_iv.contains(eta1) and window.contains(eta2)
    return CertificationResult(
        eta1=eta1,
        eta2=eta2,
        eta3_min=eta3,
        eta1_interval=eta1_iv,
        eta2_interval=eta2_iv,
        valid=valid,
        consistent=consistent,
        manifold_distance=excess,
        flags=flags,
        ranges=ranges,
    )


def trade_off_surface(i1, i2):
    """I^3 as a function of (I^1, I^2) for a sharp third Bob."""
    i1 = np.asarray(i1, dtype=float)
    i2 = np.asarray(i2, dtype=float)
    f1 = 1.0 + np.sqrt(1.0 - (i1 / 6.0) ** 2)
    return 1.5 * f1 * (1.0 + np.sqrt(1.0 - i2**2 / (9.0 * f1**2)))


def paraboloid_value(i1, i2):
    """Second-order approximation 6 - (3/2)((I^1/6)^2 + (I^2/6)^2)."""
    i1 = np.asarray(i1, dtype=float)
    i2 = np.asarray(i2, dtype=float)
    return 6.0 - 1.5 * ((i1 / 6.0) ** 2 + (i2 / 6.0) ** 2)


def i2_upper_edge(i1):
    """Largest I^2 that still leaves I^3 > 4, given I^1."""
    return 4.0 * np.sqrt(0.5 * np.sqrt(36.0 - np.asarray(i1, dtype=float) ** 2) - 1.0)


SURFACE_COLUMNS = ("I1", "I2", "I3_exact", "I3_paraboloid", "abs_error")


def surface_sweep(grid_step: float) -> np.ndarray:
    """Rows (I1, I2, I3_exact, I3_paraboloid, |difference|) over the triple-violation region."""
    if not (0.0 < grid_step <= 0.5):
        raise ValueError("grid_step must lie in (0, 0.5]")
    i1_hi = 2.0 * SQRT5
    rows = []
    n1 = 1
    while True:
        i1 = PNC_BOUND + n1 * grid_step
        if i1 >= i1_hi:
            break
        edge = float(i2_upper_edge(i1))
        n2 = 1
        while True:
            i2 = PNC_BOUND + n2 * grid_step
            if i2 >= edge:
                break
            exact = float(trade_off_surface(i1, i2))
            approx = float(paraboloid_value(i1, i2))
            rows.append((i1, i2, exact, approx, abs(exact - approx)))
            n2 += 1
        n1 += 1
    if not rows:
        raise ValueError(f"grid_step={grid_step} leaves no points inside the violation region")
    return np.array(rows)
