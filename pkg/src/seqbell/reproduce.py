"""Recompute every headline number and compare against its expected value."""

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .bell import bell_value, local_bound, pnc_bound, pnc_grid_bound, seesaw_max, sos_diagnose
from .certification import BellTuple, certify_ranges, eta2_lower, eta2_upper, eta3_lower, invert_tuple
from .chain import ChainConfig, max_fourth_value, run_chain
from .incompatibility import degree_pair, degree_triple, degree_trine, equal_incompatibility_point
from .linalg import SX, SY, SZ
from .quantum import canonical_realization

BLACK = 120.0 / 29.0


@dataclass
class Check:
    name: str
    measured: float
    expected: float
    tolerance: float
    # "eq": |measured - expected| <= tol; "lt": measured < expected; "ge": measured >= expected - tol
    relation: str = "eq"

    @property
    def passed(self) -> bool:
        if self.relation == "lt":
            return self.measured < self.expected
        if self.relation == "ge":
            return self.measured >= self.expected - self.tolerance
        return abs(self.measured - self.expected) <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "measured": self.measured,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "relation": self.relation,
            "pass": self.passed,
        }


def _root(f, hi: float) -> float:
    return float(brentq(f, 0.67, hi, xtol=1e-15))


def run_checks(tolerance: float | None = None, seed: int = 0, restarts: int = 10) -> list[Check]:
    """All reproduction rows. `tolerance` overrides every per-row tolerance."""
    rho, alice, bob = canonical_realization()
    sos = sos_diagnose(rho, alice, bob)
    chain = run_chain(ChainConfig.canonical([20 / 29, 0.8, 1.0]))
    inv = invert_tuple(BellTuple(BLACK, BLACK, BLACK))
    full = certify_ranges((True, True, True))
    two = certify_ranges((True, True, False))
    eq = equal_incompatibility_point(1.0)
    ceiling = max_fourth_value()
    rows = [
        Check("quantum optimum", bell_value(rho, alice, bob), 6.0, 1e-12),
        Check("sos gamma", sos.gamma_value, 0.0, 1e-12),
        Check("local bound", local_bound(), 5.0, 0.0),
        Check("pnc bound (vertices)", pnc_bound(), 4.0, 0.0),
        Check("pnc bound (0.01 grid)", pnc_grid_bound(0.01), 4.0, 1e-9),
        *(Check(f"black point I{k}", v, BLACK, 1e-9) for k, v in enumerate(chain.bell_values, 1)),
        Check("black point eta1", inv.eta1, 20 / 29, 1e-12),
        Check("black point eta2", inv.eta2, 0.8, 1e-12),
        Check("fourth-observer ceiling", ceiling, 0.75 * (1 + math.sqrt(5) / 3) ** 3, 1e-9),
        Check("fourth-observer ceiling < 4", ceiling, 4.0, 0.0, "lt"),
        Check("eta1 lower endpoint", full.eta1.lo, 2 / 3, 1e-12),
        Check("eta1 upper (two Bobs)", two.eta1.hi, 2 * math.sqrt(2) / 3, 1e-12),
        Check("eta1 upper (three Bobs)", full.eta1.hi, math.sqrt(5) / 3, 1e-12),
        Check("eta2 lower endpoint", full.eta2.lo, 3 - math.sqrt(5), 1e-12),
        Check("eta2 upper endpoint", full.eta2.hi, 0.8, 1e-12),
        Check("eta3 minimum", full.eta3_min, 0.928625226416254, 1e-12),
        # the same endpoints re-derived from the violation thresholds
        Check("eta1 upper (two Bobs), solved", _root(lambda e: eta2_lower(e) - 1.0, 0.99), 2 * math.sqrt(2) / 3, 1e-12),
        Check(
            "eta1 upper (three Bobs), solved",
            _root(lambda e: eta2_upper(e) - eta2_lower(e), 0.9),
            math.sqrt(5) / 3,
            1e-12,
        ),
        Check("eta3 minimum, from thresholds", eta3_lower(2 / 3, eta2_lower(2 / 3)), full.eta3_min, 1e-12),
        Check("pair degree (sx, sz)", degree_pair(SX, SZ).degree, 2 * math.sqrt(2) - 2, 1e-12),
        Check("triple degree (sx, sy, sz)", degree_triple(SX, SY, SZ).degree, 4 * math.sqrt(3) - 4, 1e-12),
        Check("trine degree (canonical)", degree_trine(bob).degree, 2.0, 1e-12),
        Check("equal-incompatibility eta1", eq[0], 20 / 29, 1e-12),
        Check("equal-incompatibility eta2", eq[1], 0.8, 1e-12),
        Check("equal-incompatibility value", eq[2], BLACK, 1e-12),
        Check("see-saw d=2", seesaw_max(2, restarts, seed), 6.0, 1e-6, "ge"),
    ]
    if tolerance is not None:
        for r in rows:
            if r.relation != "lt":
                r.tolerance = tolerance
    return rows


def format_table(rows: list[Check]) -> str:
    head = f"{'check':<34} {'measured':>24} {'expected':>24} {'tol':>8}  result"
    lines = [head, "-" * len(head)]
    for r in rows:
        tol = r.relation if r.relation == "lt" else f"{r.tolerance:.0e}"
        lines.append(
            f"{r.name:<34} {r.measured:>24.17g} {r.expected:>24.17g} {tol:>8}  {'PASS' if r.passed else 'FAIL'}"
        )
    return "\n".join(lines) + "\n"
