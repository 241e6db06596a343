"""Depletion: iterate box(i, j) &= box(i, mu) @ box(mu, j) to a fixpoint.

Every step only turns cells off, so any fair tour of the index triplets
terminates, and by chaotic-iteration confluence all fair tours reach the same
fixpoint.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from .compat import CompatMatrix


class Schema(str, enum.Enum):
    ROUNDROBIN = "roundrobin"
    REVERSED = "reversed"
    WORKLIST = "worklist"


@dataclass
class StepRecord:
    triplet: tuple[int, int, int]
    flips: int
    true_count: int

    def as_dict(self) -> dict:
        return {"triplet": list(self.triplet), "flips": self.flips, "true_count": self.true_count}


@dataclass
class DepletionOutcome:
    general_solution: CompatMatrix
    schema: Schema
    sweeps: int = 0
    flips: int = 0
    steps: int = 0
    early_stop: Optional[tuple[int, int]] = None
    stopped_early: bool = False
    sweep_true_counts: list[int] = field(default_factory=list)
    trace: Optional[list[StepRecord]] = None

    @property
    def at_fixpoint(self) -> bool:
        return not self.stopped_early


def _step(boxes, sizes, i: int, mu: int, j: int) -> int:
    """Apply one triplet to the packed boxes, mirroring writes. Returns cells flipped in box(i, j)."""
    target = boxes[i][j]
    left = boxes[i][mu]
    right = boxes[mu][j]
    flips = 0
    mirror = boxes[j][i] if i != j else None
    for a in range(sizes[i]):
        old = target[a]
        if not old:
            continue
        word = left[a]
        acc = 0
        while word:
            low = word & -word
            acc |= right[low.bit_length() - 1]
            word ^= low
        new = old & acc
        if new != old:
            target[a] = new
            gone = old ^ new
            flips += gone.bit_count()
            if mirror is not None:
                clear = ~(1 << a)
                while gone:
                    low = gone & -gone
                    mirror[low.bit_length() - 1] &= clear
                    gone ^= low
    return flips


def deplete_step(t: CompatMatrix, triplet: tuple[int, int, int]) -> int:
    """box(i, j) &= box(i, mu) @ box(mu, j), with box(j, i) kept as its transpose."""
    i, mu, j = triplet
    m = t.m
    for idx in triplet:
        if not 0 <= idx < m:
            raise IndexError(f"triplet {triplet} out of range for m={m}")
    return _step(t._boxes, t.sizes, i, mu, j)


def detect_unsat_pattern(t: CompatMatrix) -> Optional[tuple[int, int]]:
    """First (i, j) in row-major order whose box has no true cell."""
    for i in range(t.m):
        for j in range(t.m):
            if not any(t.packed(i, j)):
                return (i, j)
    return None


def is_fixpoint(t: CompatMatrix) -> bool:
    """No triplet would flip a cell. Works on a scratch copy."""
    scratch = t.copy()
    m = t.m
    return all(
        _step(scratch._boxes, scratch.sizes, i, mu, j) == 0
        for i in range(m) for mu in range(m) for j in range(m)
    )


def deplete(
    t: CompatMatrix,
    schema: Schema | str = Schema.WORKLIST,
    early_stop: bool = False,
    inplace: bool = False,
    trace: bool = False,
    on_sweep: Callable[[CompatMatrix, int], None] | None = None,
) -> DepletionOutcome:
    """Run triplet depletions until nothing changes.

    With ``early_stop`` the run returns as soon as some box is all-false,
    which already implies the system has no solution.
    ``on_sweep(matrix, sweep_index)`` is called after every completed sweep.
    """
    schema = Schema(schema)
    if not inplace:
        t = t.copy()
    out = DepletionOutcome(general_solution=t, schema=schema, trace=[] if trace else None)
    boxes, sizes, m = t._boxes, t.sizes, t.m
    current = t.true_count()
    out.sweep_true_counts.append(current)

    out.early_stop = detect_unsat_pattern(t)
    if out.early_stop is not None and early_stop:
        out.stopped_early = True
        return out

    def visit(i, mu, j):
        # returns True when the run must stop early
        nonlocal current
        flips = _step(boxes, sizes, i, mu, j)
        out.steps += 1
        if flips:
            out.flips += flips
            current -= flips if i == j else 2 * flips
            if out.early_stop is None and not any(boxes[i][j]):
                out.early_stop = (i, j) if i <= j else (j, i)
                if early_stop:
                    out.stopped_early = True
        if out.trace is not None:
            out.trace.append(StepRecord((i, mu, j), flips, current))
        return flips

    def end_sweep():
        out.sweeps += 1
        out.sweep_true_counts.append(current)
        if on_sweep is not None:
            on_sweep(t, out.sweeps)

    if schema is Schema.WORKLIST:
        # box(i, j) and box(j, i) are one unit, so triplets are kept with i <= j.
        # When box(a, b) changes, the only triplets that read it are (a, b, k) and (b, a, k).
        pending = deque((i, mu, j) for i in range(m) for j in range(i, m) for mu in range(m))
        queued = set(pending)
        while pending:
            epoch, pending = pending, deque()
            for trip in epoch:
                queued.discard(trip)
                i, mu, j = trip
                if visit(i, mu, j):
                    for a, b in ((i, j), (j, i)):
                        for k in range(m):
                            nxt = (a, b, k) if a <= k else (k, b, a)
                            if nxt not in queued:
                                queued.add(nxt)
                                pending.append(nxt)
                        if i == j:
                            break
                if out.stopped_early:
                    end_sweep()
                    return out
            end_sweep()
        return out

    order = [(i, mu, j) for i in range(m) for mu in range(m) for j in range(m)]
    if schema is Schema.REVERSED:
        order.reverse()
    while True:
        changed = 0
        for i, mu, j in order:
            changed += visit(i, mu, j)
            if out.stopped_early:
                end_sweep()
                return out
        end_sweep()
        if not changed:
            return out


def diagonal_support_holds(t: CompatMatrix) -> bool:
    """Every true cell (i, j, a, b) has box(i, i)(a, a) and box(j, j)(b, b) true.

    Holds at any fixpoint: triplets (i, i, j) and (i, j, j) would otherwise
    still flip the cell.
    """
    diags = [t.diagonal_mask(i) for i in range(t.m)]
    for i in range(t.m):
        for j in range(t.m):
            dj = diags[j]
            for a, word in enumerate(t.packed(i, j)):
                if word and (not (diags[i] >> a) & 1 or word & ~dj):
                    return False
    return True
