"""Exact verifiers for the pinned-distance bounds.

Every comparison involving the rational parameter a = num/den is cross
multiplied into integers; nothing in this module touches floating point
except the bisector character-sum check, which compares against the exact
enumeration.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field as dc_field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .errors import EmptySet, HypothesisNotMet, InvalidParam
from .field import FieldSpec
from .generators import GENERATOR_ID
from .geometry import bisector_charsum_matrix, bisector_count_matrix
from .pinned import SweepResult, distance_set_mask, iter_histograms, pin_profile, sweep
from .points import PointSet, check_cap

SCHEMA = "pindist-report/1"
CHARSUM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class RationalParam:
    """The parameter a = num/den > 1, kept in lowest terms."""

    num: int
    den: int = 1

    def __post_init__(self):
        if not isinstance(self.num, int) or not isinstance(self.den, int):
            raise InvalidParam("a must have integer numerator and denominator")
        if self.den < 1 or self.num <= self.den:
            raise InvalidParam(f"a = {self.num}/{self.den} must satisfy a > 1")
        g = math.gcd(self.num, self.den)
        object.__setattr__(self, "num", self.num // g)
        object.__setattr__(self, "den", self.den // g)

    @classmethod
    def parse(cls, text: str) -> "RationalParam":
        """Parse ``num/den`` or a bare integer; decimals are rejected."""
        text = text.strip()
        num, sep, den = text.partition("/")
        if not num.isdigit() or (sep and not den.isdigit()):
            raise InvalidParam(f"a must be written as num/den with integers, got {text!r}")
        return cls(int(num), int(den) if sep else 1)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else value.numerator
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


@dataclass
class VerificationReport:
    check: str
    field: dict
    set_spec: str
    passed: bool
    witnesses: list[tuple[str, Any]] = dc_field(default_factory=list)
    a: RationalParam | None = None
    counterexample_pin: int | None = None
    warnings: list[str] = dc_field(default_factory=list)
    config: dict | None = None
    created_at: str = dc_field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def __post_init__(self):
        if not self.passed and self.counterexample_pin is None and not self.witnesses:
            raise ValueError("a failing report needs a counterexample or witnesses")

    def witness(self, name: str):
        for key, value in self.witnesses:
            if key == name:
                return value
        raise KeyError(name)

    def content(self) -> dict:
        """Everything except the timestamp; this is what gets hashed."""
        return {
            "schema": SCHEMA,
            "check": self.check,
            "field": self.field,
            "set_spec": self.set_spec,
            "a": None if self.a is None else {"num": self.a.num, "den": self.a.den},
            "passed": bool(self.passed),
            "witnesses": [{"name": k, "value": _jsonable(v)} for k, v in self.witnesses],
            "counterexample_pin": self.counterexample_pin,
            "warnings": list(self.warnings),
            "generator": GENERATOR_ID,
            "config": self.config,
        }

    def content_hash(self) -> str:
        blob = json.dumps(self.content(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_dict(self) -> dict:
        out = self.content()
        out["content_hash"] = self.content_hash()
        out["created_at"] = self.created_at
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.check} F_{self.field.get('p')}^{self.field.get('k')} d={self.field.get('d')} set={self.set_spec}"


def _field_info(F: FieldSpec, d: int | None) -> dict:
    return {"p": F.p, "k": F.k, "d": d}


def _degenerate_warnings(E: PointSet) -> list[str]:
    if E.size == 0:
        return ["vacuous: E is empty"]
    if E.size == 1:
        return ["trivial: E is a singleton"]
    return []


def _sweep_for(E: PointSet, result: SweepResult | None, cap: int | None) -> SweepResult:
    return sweep(E, "naive", cap) if result is None else result


# ---------------------------------------------------------------------------
# Cauchy-Schwarz lower bound
# ---------------------------------------------------------------------------

def cs_lower_bound(E: PointSet, y: Sequence[int]) -> Fraction:
    """|E|^2 / sum_t nu_y(t)^2, which never exceeds |Delta_y(E)|."""
    if E.size == 0:
        raise EmptySet("the Cauchy-Schwarz bound needs a nonempty set")
    prof = pin_profile(E, y)
    bound = Fraction(E.size**2, prof.second_moment)
    assert bound <= prof.support_size, (bound, prof.support_size)
    return bound


def pinform_check(E: PointSet, result: SweepResult | None = None, set_spec: str = "",
                  cap: int | None = None) -> VerificationReport:
    """second_moment(y) * |Delta_y(E)| >= |E|^2 at every pin."""
    res = _sweep_for(E, result, cap)
    n = E.size
    lhs = _widen(res.second_moments, E.q, n * n) * res.pinned_counts
    bad = np.flatnonzero(np.asarray(lhs < n * n, dtype=bool))
    tight = int(np.count_nonzero(np.asarray(lhs == n * n, dtype=bool)))
    return VerificationReport(
        "pinform", _field_info(E.field, E.d), set_spec, bad.size == 0,
        [("set_size", n), ("pins", E.space_size), ("violations", int(bad.size)),
         ("equality_pins", tight), ("min_slack", int((lhs - n * n).min()) if lhs.size else 0)],
        counterexample_pin=int(bad[0]) if bad.size else None,
        warnings=_degenerate_warnings(E),
    )


# ---------------------------------------------------------------------------
# good pins and the main bound
# ---------------------------------------------------------------------------

def _widen(values: np.ndarray, factor: int, bound: int = 0) -> np.ndarray:
    """``values`` as Python-int objects when values * factor or ``bound`` could overflow int64."""
    peak = int(values.max()) if values.size else 0
    if peak * factor >= 2**62 or bound >= 2**62:
        return values.astype(object)
    return values


def _threshold(E: PointSet) -> int:
    """q times the second-moment average, |E|^2 + (q - 1)|E|."""
    n = E.size
    return n * n + (E.q - 1) * n


def good_pin_mask(E: PointSet, a: RationalParam, result: SweepResult | None = None,
                  cap: int | None = None) -> np.ndarray:
    """Pins whose second moment is at most a times the average."""
    res = _sweep_for(E, result, cap)
    # sm <= (a/q)(|E|^2 + (q-1)|E|)  <=>  den*q*sm <= num*(|E|^2 + (q-1)|E|)
    rhs = a.num * _threshold(E)
    return np.asarray(_widen(res.second_moments, a.den * E.q, rhs) * (a.den * E.q) <= rhs, dtype=bool)


def _size_bound_holds(size: int, a: RationalParam, space: int) -> bool:
    return a.num * size >= (a.num - a.den) * space


def good_pin_set(E: PointSet, a: RationalParam, result: SweepResult | None = None,
                 cap: int | None = None) -> PointSet:
    check_cap(E.field, E.d, cap)
    mask = good_pin_mask(E, a, result, cap)
    Y = PointSet.from_indices(E.field, E.d, np.flatnonzero(mask), cap)
    assert _size_bound_holds(Y.size, a, E.space_size), "good-pin set is smaller than (a-1)/a q^d"
    return Y


def main_theorem_check(E: PointSet, a: RationalParam, result: SweepResult | None = None,
                       set_spec: str = "", cap: int | None = None) -> VerificationReport:
    """|Delta_y(E)| >= min(q, |E|) / 2a for every good pin y, and |Y| >= (a-1)/a q^d."""
    res = _sweep_for(E, result, cap)
    q, n, space = E.q, E.size, E.space_size
    mask = good_pin_mask(E, a, res)
    y_size = int(np.count_nonzero(mask))
    size_ok = _size_bound_holds(y_size, a, space)

    counts = res.pinned_counts[mask]
    moments = _widen(res.second_moments[mask], q, n * n)
    need = a.den * min(q, n)
    bound_bad = np.flatnonzero(mask)[2 * a.num * counts < need]
    # chain through the Cauchy-Schwarz step: count >= n^2 / sm on Y
    chain_bad = np.flatnonzero(mask)[np.asarray(moments * counts < n * n, dtype=bool)]

    passed = size_ok and bound_bad.size == 0 and chain_bad.size == 0
    counterexample = None
    if bound_bad.size:
        counterexample = int(bound_bad[0])
    elif chain_bad.size:
        counterexample = int(chain_bad[0])
    a_frac = a.fraction
    witnesses = [
        ("set_size", n),
        ("pins", space),
        ("good_pins", y_size),
        ("size_bound_lhs", a.num * y_size),
        ("size_bound_rhs", (a.num - a.den) * space),
        ("size_bound_ok", size_ok),
        ("required_pinned_count", Fraction(min(q, n), 1) / (2 * a_frac)),
        ("min_pinned_count_on_good_pins", int(counts.min()) if counts.size else 0),
        ("bound_violations", int(bound_bad.size)),
        ("cauchy_schwarz_violations", int(chain_bad.size)),
    ]
    if n:
        # informational: the sharper intermediate forms of the final chain
        witnesses.append(("cs_threshold_bound", Fraction(q * n, 1) / (a_frac * (n + q - 1))))
        witnesses.append(("intermediate_min_bound",
                          min(Fraction(q) / (2 * a_frac), Fraction(q * n, q - 1) / (2 * a_frac))))
    return VerificationReport("main_theorem", _field_info(E.field, E.d), set_spec, passed, witnesses,
                              a=a, counterexample_pin=counterexample, warnings=_degenerate_warnings(E))


def corollary_check(E: PointSet, a: RationalParam, result: SweepResult | None = None,
                    set_spec: str = "", cap: int | None = None, threads: int | None = None) -> VerificationReport:
    """|Delta(E u {y})| >= q / 2a on every good pin, given |E| >= q."""
    q, n = E.q, E.size
    if n < q:
        raise HypothesisNotMet(f"the corollary needs |E| >= q, got |E| = {n} < {q}")
    res = _sweep_for(E, result, cap)
    mask = good_pin_mask(E, a, res)
    pins = np.flatnonzero(mask)
    base = distance_set_mask(E, threads)
    base[0] = True  # ||y - y|| = 0
    min_full = None
    bound_bad: list[int] = []
    containment_bad: list[int] = []
    for start, hist in iter_histograms(E, pins, threads):
        pinned = hist > 0
        # Delta(E u {y}) = Delta(E) u Delta_y(E) u {0}, distances being symmetric
        full = pinned | base[None, :]
        full_size = full.sum(axis=1)
        pinned_size = pinned.sum(axis=1)
        idx = pins[start:start + hist.shape[0]]
        bound_bad.extend(idx[2 * a.num * full_size < a.den * q].tolist())
        containment_bad.extend(idx[(pinned & ~full).any(axis=1) | (full_size < pinned_size)].tolist())
        block_min = int(full_size.min())
        min_full = block_min if min_full is None else min(min_full, block_min)
    passed = not bound_bad and not containment_bad
    bad = bound_bad or containment_bad
    witnesses = [
        ("set_size", n),
        ("good_pins", int(pins.size)),
        ("distance_set_size", int(np.count_nonzero(distance_set_mask(E, threads)))),
        ("required_distance_count", Fraction(q, 1) / (2 * a.fraction)),
        ("min_distance_count_with_pin", min_full),
        ("bound_violations", len(bound_bad)),
        ("containment_violations", len(containment_bad)),
    ]
    return VerificationReport("corollary", _field_info(E.field, E.d), set_spec, passed, witnesses,
                              a=a, counterexample_pin=bad[0] if bad else None,
                              warnings=_degenerate_warnings(E))


def pigeonhole_audit(E: PointSet, a: RationalParam, result: SweepResult | None = None,
                     set_spec: str = "", cap: int | None = None) -> VerificationReport:
    """Recompute each step of the averaging argument behind the good-pin bound."""
    res = _sweep_for(E, result, cap)
    q, n, space, d = E.q, E.size, E.space_size, E.d
    total = res.total()
    S = _threshold(E)

    # the pin average, scaled by q^(d+1) on both sides
    lhs = q * total
    rhs = space * S
    average_ok = lhs == rhs

    mask = good_pin_mask(E, a, res)
    sm = res.second_moments
    exceeders = np.asarray(_widen(sm, a.den * q, a.num * S) * (a.den * q) > a.num * S, dtype=bool)
    complement_ok = bool(np.array_equal(exceeders, ~mask))
    y_size = int(np.count_nonzero(mask))
    yc_size = int(np.count_nonzero(exceeders))
    partition_ok = y_size + yc_size == space

    # sum_t nu^2 >= sum_t nu = |E| at every pin
    pige2_bad = np.flatnonzero(sm < n)

    # splitting the pin sum over Y and its complement
    split_lhs = a.den * q * total
    split_rhs = a.den * q * y_size * n + yc_size * a.num * S
    split_ok = split_lhs > split_rhs if yc_size else split_lhs >= split_rhs

    size_ok = _size_bound_holds(y_size, a, space)
    passed = average_ok and complement_ok and partition_ok and pige2_bad.size == 0 and split_ok and size_ok
    witnesses = [
        ("set_size", n),
        ("pins", space),
        ("average_lhs_scaled", lhs),
        ("average_rhs_scaled", rhs),
        ("average_ok", average_ok),
        ("good_pins", y_size),
        ("exceeding_pins", yc_size),
        ("complement_ok", complement_ok),
        ("partition_ok", partition_ok),
        ("lower_bound_violations", int(pige2_bad.size)),
        ("split_lhs", split_lhs),
        ("split_rhs", split_rhs),
        ("split_ok", split_ok),
        ("size_bound_ok", size_ok),
        ("scale_exponent", d + 1),
    ]
    return VerificationReport("pigeonhole_audit", _field_info(E.field, d), set_spec, passed, witnesses,
                              a=a, counterexample_pin=int(pige2_bad[0]) if pige2_bad.size else None,
                              warnings=_degenerate_warnings(E))


# ---------------------------------------------------------------------------
# field and bisector checks
# ---------------------------------------------------------------------------

def field_axioms_check(F: FieldSpec) -> VerificationReport:
    """Exhaustive field axioms, checked on broadcast grids of all element codes."""
    q = F.q
    e = np.arange(q, dtype=np.int64)
    a, b = e[:, None], e[None, :]
    failures = []

    def check(name, ok):
        if not bool(np.all(ok)):
            failures.append(name)

    check("add_commutative", F.add_arr(a, b) == F.add_arr(b, a))
    check("mul_commutative", F.mul_arr(a, b) == F.mul_arr(b, a))
    A, B, C = e[:, None, None], e[None, :, None], e[None, None, :]
    check("add_associative", F.add_arr(F.add_arr(A, B), C) == F.add_arr(A, F.add_arr(B, C)))
    check("mul_associative", F.mul_arr(F.mul_arr(A, B), C) == F.mul_arr(A, F.mul_arr(B, C)))
    check("distributive", F.mul_arr(A, F.add_arr(B, C)) == F.add_arr(F.mul_arr(A, B), F.mul_arr(A, C)))
    check("additive_identity", F.add_arr(e, 0) == e)
    check("multiplicative_identity", F.mul_arr(e, 1) == e)
    check("additive_inverse", F.add_arr(e, F.neg_arr(e)) == 0)
    nz = e[1:]
    check("multiplicative_inverse", F.mul_arr(nz, np.array([F.inv(int(x)) for x in nz])) == 1)
    check("group_order", np.array([F.pow(int(x), q - 1) for x in nz]) == 1)
    check("schoolbook_agrees", F.mul_arr(a, b) == np.array(
        [[F.mul_schoolbook(int(x), int(y)) for y in e] for x in e]))
    check("trace_in_prime_subfield", F.trace_table < F.p)
    return VerificationReport("field_axioms", _field_info(F, None), "", not failures,
                              [("q", q), ("modulus", list(F.modulus)), ("failed_axioms", failures)])


def bisector_check(F: FieldSpec, d: int, set_spec: str = "") -> VerificationReport:
    """All pairs x != z have q^(d-1) equidistant pins, by enumeration and by character sums."""
    counts = bisector_count_matrix(F, d)
    charsum = bisector_charsum_matrix(F, d)
    n = counts.shape[0]
    off = ~np.eye(n, dtype=bool)
    off_bad = np.argwhere(off & (counts != F.q ** (d - 1)))
    diag_ok = bool(np.all(np.diag(counts) == F.q**d))
    deviation = float(np.abs(charsum - counts).max())
    passed = off_bad.size == 0 and diag_ok and deviation <= CHARSUM_TOLERANCE
    return VerificationReport(
        "bisector", _field_info(F, d), set_spec, passed,
        [("pairs", n * (n - 1)), ("expected", F.q ** (d - 1)), ("off_diagonal_violations", int(len(off_bad))),
         ("diagonal_ok", diag_ok), ("max_charsum_deviation", deviation)],
        counterexample_pin=int(off_bad[0][0]) if len(off_bad) else None,
    )
