"""Classification of a channel realization into the four NOMA-vs-TDMA events.

With the NOMA point N and the TDMA point T fixed, the three comparison lines
(r1 = R1N, r2 = R2N, r1 + r2 = R1N + R2N) split the TDMA segment A-E into
four subsegments; the event index says which subsegment T falls on:

  E1: R1N < R1T, R2N > R2T          (NOMA wins the strong user's rate only)
  E2: R1N > R1T, R2N > R2T          (NOMA wins both individual rates)
  E3: R1N > R1T, R2N < R2T, sum won (NOMA wins the sum rate only)
  E4: sum lost                      (TDMA wins the sum rate)
"""
from __future__ import annotations

from enum import Enum
from dataclasses import dataclass

import numpy as np

from .regions import ChannelPair, PowerSplit, TimeSplit, noma_rates, tdma_rates

#: comparisons closer than this are ties, broken toward the lower event id
TIE_TOL = 1e-12


class DegenerateSplitError(ValueError):
    """a2 = 0 or b2 in {0, 1} puts T at a segment endpoint; classification
    is ill-posed there."""


class ClassificationError(RuntimeError):
    """No event condition matched; indicates a numerical tie slipped through."""


class EventId(Enum):
    E1 = 1
    E2 = 2
    E3 = 3
    E4 = 4


@dataclass(frozen=True)
class ComparisonOutcome:
    """Signs of (R1N - R1T, R2N - R2T, sumN - sumT), each in {-1, 0, +1}."""

    r1_cmp: int
    r2_cmp: int
    sum_cmp: int


# Required signs per event; None = condition not used (reduced definitions).
# Ties (sign 0) match either direction, and events are tried in id order,
# which implements the lower-id tie-break deterministically.
_FULL_CONDITIONS = [
    (EventId.E1, (-1, +1, +1)),
    (EventId.E2, (+1, +1, +1)),
    (EventId.E3, (+1, -1, +1)),
    (EventId.E4, (+1, -1, -1)),
]
_REDUCED_CONDITIONS = [
    (EventId.E1, (-1, +1, None)),
    (EventId.E2, (+1, +1, None)),
    (EventId.E3, (None, -1, +1)),
    (EventId.E4, (None, None, -1)),
]


def _check_splits(p: PowerSplit, t: TimeSplit) -> None:
    p.require_noma()
    if p.a2 == 0.0:
        raise DegenerateSplitError("a2 = 0 puts N at point A")
    if t.b2 == 0.0 or t.b2 == 1.0:
        raise DegenerateSplitError(f"b2 = {t.b2} puts T at a segment endpoint")


def _sign(delta: float, tol: float = TIE_TOL) -> int:
    if abs(delta) <= tol:
        return 0
    return 1 if delta > 0.0 else -1


def compare_rates(ch: ChannelPair, p: PowerSplit, t: TimeSplit) -> ComparisonOutcome:
    """Evaluate the three NOMA-vs-TDMA comparisons for one realization."""
    _check_splits(p, t)
    r1n, r2n = noma_rates(ch.x, ch.y, p.a2)
    r1t, r2t = tdma_rates(ch.x, ch.y, t.b2)
    return ComparisonOutcome(
        _sign(float(r1n - r1t)),
        _sign(float(r2n - r2t)),
        _sign(float((r1n + r2n) - (r1t + r2t))),
    )


def _match(outcome: ComparisonOutcome, conditions) -> EventId:
    signs = (outcome.r1_cmp, outcome.r2_cmp, outcome.sum_cmp)
    for event, required in conditions:
        if all(r is None or s == r or s == 0 for s, r in zip(signs, required)):
            return event
    raise ClassificationError(f"no event matched comparison outcome {outcome}")


def classify_full(ch: ChannelPair, p: PowerSplit, t: TimeSplit) -> EventId:
    """Classify using all three comparisons of the full event definitions."""
    return _match(compare_rates(ch, p, t), _FULL_CONDITIONS)


def classify_reduced(ch: ChannelPair, p: PowerSplit, t: TimeSplit) -> EventId:
    """Classify using only the reduced (redundancy-free) conditions.

    Implemented independently of classify_full so agreement between the two
    is a genuine check of the underlying boundary geometry.
    """
    return _match(compare_rates(ch, p, t), _REDUCED_CONDITIONS)


def epsilon2_threshold(ch: ChannelPair, p: PowerSplit) -> bool:
    """Threshold form of event E2 for the equal time split b2 = 1/2:
    E2 occurs iff x < w2 < y with w2 = (1 - 2*a2) / a2**2."""
    p.require_noma()
    if p.a2 == 0.0:
        raise DegenerateSplitError("a2 = 0 puts N at point A")
    w2 = (1.0 - 2.0 * p.a2) / p.a2**2
    return bool(ch.x < w2 < ch.y)


def classify_many(x, y, a2, b2, reduced: bool = False,
                  tol: float = TIE_TOL) -> np.ndarray:
    """Vectorized classification; returns an int8 array of event ids 1..4.

    All four arguments broadcast against each other.  Same tie-break as the
    scalar classifiers.
    """
    a2 = np.asarray(a2, dtype=np.float64)
    b2 = np.asarray(b2, dtype=np.float64)
    if np.any(a2 <= 0.0) or np.any(a2 > 0.5):
        raise DegenerateSplitError("need 0 < a2 <= 1/2 everywhere")
    if np.any(b2 <= 0.0) or np.any(b2 >= 1.0):
        raise DegenerateSplitError("need 0 < b2 < 1 everywhere")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    r1n, r2n = noma_rates(x, y, a2)
    r1t, r2t = tdma_rates(x, y, b2)
    deltas = (r1n - r1t, r2n - r2t, (r1n + r2n) - (r1t + r2t))
    signs = [np.where(np.abs(d) <= tol, 0, np.sign(d)).astype(np.int8)
             for d in deltas]

    conditions = _REDUCED_CONDITIONS if reduced else _FULL_CONDITIONS
    out = np.zeros(np.broadcast(x, y, a2, b2).shape, dtype=np.int8)
    for event, required in conditions:
        ok = out == 0
        for s, r in zip(signs, required):
            if r is not None:
                ok &= (s == r) | (s == 0)
        out[ok] = event.value
    if np.any(out == 0):
        raise ClassificationError("unclassified samples encountered")
    return out
