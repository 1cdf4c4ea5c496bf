"""Blocked clause elimination on weighted formulas, with reconstruction.

A clause C is blocked on one of its literals l when every resolvent of C
on l with a clause of the current formula is tautological; clauses with
a pure literal are blocked vacuously.  Eliminating blocked clauses is
monotone (shrinking the formula only unblocks nothing), preserves every
minimal unsatisfiable subset, and therefore preserves MaxSAT optima --
which is why it may run on the weighted formula before any translation,
on hard and soft clauses alike.

Eliminated clauses go onto a stack; a model of the reduced formula is
lifted back by walking the stack in reverse and flipping the blocking
literal of any clause the assignment falsifies.  The flip cannot break
clauses handled earlier, so the lift is linear time.

Blockedness is decided over the clause *set* (hard and soft together,
weights ignored, duplicates collapsed); removing a clause removes every
weighted occurrence at once.  Tautological clauses are swept first:
they are satisfied under every assignment, so dropping them keeps every
MUS and never triggers a reconstruction flip.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .model import Assignment, ClauseT, WCNF, clause_satisfied, is_tautology


@dataclass(frozen=True)
class BceEntry:
    clause: ClauseT
    blocking_lit: int
    kind: str  # "hard" | "soft"
    soft_index: Optional[int] = None  # 1-based index in the input WCNF
    weight: Optional[int] = None


BceRecord = List[BceEntry]


def _resolvent_tautological(c: ClauseT, l: int, other: ClauseT) -> bool:
    res: Set[int] = set()
    for q in c:
        if q != l:
            res.add(q)
    for q in other:
        if q != -l:
            res.add(q)
    return any(-q in res for q in res)


def is_blocked(f: Iterable[ClauseT], c: ClauseT, l: int) -> bool:
    """True iff every resolvent of c on l with a clause of f is a
    tautology; vacuously true when no clause of f contains -l."""
    if l not in c:
        raise ValueError(f"literal {l} not in clause {c}")
    for other in f:
        if -l in other and not _resolvent_tautological(c, l, other):
            return False
    return True


def _blocking_lit_of_tautology(c: ClauseT) -> int:
    # positive literal of the smallest complementary pair
    s = set(c)
    return min(l for l in s if l > 0 and -l in s)


def bce_fixpoint(f: WCNF, soft_only: bool = False,
                 shuffle_seed: Optional[int] = None) -> Tuple[WCNF, BceRecord]:
    """Remove tautologies, then blocked clauses to fixpoint.

    Returns the reduced formula and the elimination record.  The result
    is order-independent (confluence); ``shuffle_seed`` permutes the
    worklist to let tests exercise that.  ``soft_only`` keeps clauses
    with a hard occurrence off the removal candidates (blockedness is
    still judged against the full clause set).
    """
    # distinct clause -> weighted occurrences, preserving input order
    occurrences: Dict[ClauseT, List[Tuple[str, Optional[int], Optional[int]]]] = {}
    for c in f.hard:
        occurrences.setdefault(c, []).append(("hard", None, None))
    for i, (c, w) in enumerate(f.soft, start=1):
        occurrences.setdefault(c, []).append(("soft", i, w))

    present: Set[ClauseT] = set(occurrences)
    by_var: Dict[int, Set[ClauseT]] = {}
    by_lit: Dict[int, Set[ClauseT]] = {}
    for c in present:
        for l in c:
            by_var.setdefault(abs(l), set()).add(c)
            by_lit.setdefault(l, set()).add(c)

    record: BceRecord = []

    def removable(c: ClauseT) -> bool:
        return not (soft_only and any(k == "hard" for k, _, _ in occurrences[c]))

    def remove(c: ClauseT, lit: int) -> None:
        present.discard(c)
        for l in c:
            by_var[abs(l)].discard(c)
            by_lit[l].discard(c)
        for kind, idx, w in occurrences[c]:
            record.append(BceEntry(c, lit, kind, idx, w))

    order = sorted(present)
    if shuffle_seed is not None:
        random.Random(shuffle_seed).shuffle(order)

    for c in order:
        if is_tautology(c) and removable(c):
            remove(c, _blocking_lit_of_tautology(c))

    queue = deque(c for c in order if c in present)
    queued: Set[ClauseT] = set(queue)
    while queue:
        c = queue.popleft()
        queued.discard(c)
        if c not in present or not removable(c):
            continue
        for l in c:
            if all(_resolvent_tautological(c, l, other)
                   for other in by_lit.get(-l, ())):
                remove(c, l)
                # only clauses sharing a variable can become blocked now
                neighbours = set()
                for q in c:
                    neighbours |= by_var.get(abs(q), set())
                for n in sorted(neighbours):
                    if n not in queued and removable(n):
                        queue.append(n)
                        queued.add(n)
                break

    out = WCNF(num_vars=f.num_vars)
    out.hard = [c for c in f.hard if c in present]
    out.soft = [(c, w) for c, w in f.soft if c in present]
    out.num_vars = f.num_vars
    return out, record


def bce_reconstruct(record: BceRecord, tau: Assignment) -> Assignment:
    """Lift a model of the reduced formula over the eliminated clauses.

    Reverse stack order: for each eliminated clause, if the current
    assignment falsifies it, flip the blocking literal's variable.
    Variables absent from ``tau`` default to 0 before flipping.
    """
    out = dict(tau)
    for entry in reversed(record):
        for l in entry.clause:
            out.setdefault(abs(l), 0)
        if not clause_satisfied(entry.clause, out):
            v = abs(entry.blocking_lit)
            out[v] = 1 - out[v]
    return out


def write_record_sidecar(record: BceRecord) -> str:
    """One line per eliminated clause: '<lits> 0 | <blocking lit> <origin>'."""
    lines = []
    for e in record:
        origin = e.kind if e.kind == "hard" else f"soft {e.soft_index} {e.weight}"
        lines.append(" ".join(str(l) for l in e.clause) +
                     f" 0 | {e.blocking_lit} {origin}")
    return "\n".join(lines) + ("\n" if lines else "")
