"""Assumption-based incremental CDCL SAT solver.

Design: two-watched-literal propagation, first-UIP conflict learning,
activity-driven branching with deterministic lowest-index tie-breaking,
geometric restarts, no learned-clause deletion.  Assumptions are placed
as forced decisions on the first decision levels (one per level), and an
unsatisfiable answer under assumptions carries a failed-assumption
subset read off the final conflict analysis, so the engine can serve as
the core extractor for the MaxSAT loops.

Clauses are permanent once added; deactivation happens outside the
engine by selector literals finalized with unit clauses.  A handle stays
usable after every solve call (it backtracks to the root level before
returning).

The behaviour is fully deterministic for a fixed add/solve history.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from heapq import heappop, heappush
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .model import Assignment

UNASSIGNED, TRUE, FALSE = 0, 1, 2

_RESCALE_LIMIT = 1e100
_ACT_DECAY = 1.0 / 0.95
_RESTART_FIRST = 100
_RESTART_FACTOR = 1.5


class BudgetExceededError(RuntimeError):
    """Conflict budget exhausted before an answer was reached."""


@dataclass
class SolveOutcome:
    status: str  # "SAT" | "UNSAT"
    model: Optional[Assignment] = None
    failed_assumptions: FrozenSet[int] = frozenset()

    @property
    def sat(self) -> bool:
        return self.status == "SAT"


def _lit_idx(lit: int) -> int:
    v = lit if lit > 0 else -lit
    return (v << 1) | (lit < 0)


class CdclSolver:
    """Reference engine; see module docstring for the feature set."""

    def __init__(self) -> None:
        self.num_vars = 0
        self._val: List[int] = [UNASSIGNED, UNASSIGNED]  # per literal index
        self._level: List[int] = [0]
        self._reason: List[int] = [-1]  # clause id or -1, per variable
        self._activity: List[float] = [0.0]
        self._watches: List[List[int]] = [[], []]
        self._clauses: List[List[int]] = []
        self._trail: List[int] = []
        self._trail_lim: List[int] = []
        self._qhead = 0
        self._order: List[Tuple[float, int]] = []
        self._var_inc = 1.0
        self._unsat0 = False
        self._seen = bytearray(1)
        self.stats: Dict[str, int] = {
            "conflicts": 0, "decisions": 0, "propagations": 0,
            "clauses_added": 0, "solves": 0,
        }

    # -- variables ---------------------------------------------------------

    def new_var(self) -> int:
        self.num_vars += 1
        self._val.extend((UNASSIGNED, UNASSIGNED))
        self._level.append(0)
        self._reason.append(-1)
        self._activity.append(0.0)
        self._watches.extend(([], []))
        self._seen.append(0)
        heappush(self._order, (0.0, self.num_vars))
        return self.num_vars

    def ensure_var(self, v: int) -> None:
        while self.num_vars < v:
            self.new_var()

    def _value(self, lit: int) -> int:
        return self._val[_lit_idx(lit)]

    # -- clause database ---------------------------------------------------

    def add_clause(self, lits: Iterable[int]) -> None:
        """Root-level add; may only be called between solve calls."""
        assert not self._trail_lim, "add_clause only at the root level"
        self.stats["clauses_added"] += 1
        c = sorted(set(lits), key=lambda l: (abs(l), l))
        if any(-l in set(c) for l in c):
            return  # tautology: permanently satisfied, nothing to store
        for l in c:
            self.ensure_var(abs(l))
        # drop literals already false at the root, stop if satisfied
        out = []
        for l in c:
            v = self._value(l)
            if v == TRUE:
                return
            if v == UNASSIGNED:
                out.append(l)
        if not out:
            self._unsat0 = True
            return
        if len(out) == 1:
            if not self._enqueue(out[0], -1):
                self._unsat0 = True
            return
        cid = len(self._clauses)
        self._clauses.append(out)
        self._watches[_lit_idx(out[0])].append(cid)
        self._watches[_lit_idx(out[1])].append(cid)

    # -- trail -------------------------------------------------------------

    def _enqueue(self, lit: int, reason: int) -> bool:
        i = _lit_idx(lit)
        if self._val[i] != UNASSIGNED:
            return self._val[i] == TRUE
        self._val[i] = TRUE
        self._val[i ^ 1] = FALSE
        v = abs(lit)
        self._level[v] = len(self._trail_lim)
        self._reason[v] = reason
        self._trail.append(lit)
        return True

    def _cancel_until(self, level: int) -> None:
        if len(self._trail_lim) <= level:
            return
        bound = self._trail_lim[level]
        for k in range(len(self._trail) - 1, bound - 1, -1):
            lit = self._trail[k]
            i = _lit_idx(lit)
            self._val[i] = UNASSIGNED
            self._val[i ^ 1] = UNASSIGNED
            v = abs(lit)
            self._reason[v] = -1
            heappush(self._order, (-self._activity[v], v))
        del self._trail[bound:]
        del self._trail_lim[level:]
        self._qhead = len(self._trail)

    # -- propagation -------------------------------------------------------

    def _propagate(self) -> int:
        """Exhaust the queue; return a conflicting clause id or -1."""
        val = self._val
        clauses = self._clauses
        while self._qhead < len(self._trail):
            p = self._trail[self._qhead]
            self._qhead += 1
            self.stats["propagations"] += 1
            fi = _lit_idx(-p)  # clauses watching -p must be fixed
            ws = self._watches[fi]
            n = len(ws)
            i = j = 0
            while i < n:
                cid = ws[i]
                i += 1
                c = clauses[cid]
                if c[0] == -p:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                if val[_lit_idx(first)] == TRUE:
                    ws[j] = cid
                    j += 1
                    continue
                moved = False
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[_lit_idx(lk)] != FALSE:
                        c[1], c[k] = lk, c[1]
                        self._watches[_lit_idx(lk)].append(cid)
                        moved = True
                        break
                if moved:
                    continue
                ws[j] = cid
                j += 1
                if val[_lit_idx(first)] == FALSE:
                    while i < n:  # keep the remaining watchers
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    del ws[j:]
                    self._qhead = len(self._trail)
                    return cid
                self._enqueue(first, cid)
            del ws[j:]
        return -1

    # -- conflict analysis -------------------------------------------------

    def _bump(self, v: int) -> None:
        self._activity[v] += self._var_inc
        if self._activity[v] > _RESCALE_LIMIT:
            for u in range(1, self.num_vars + 1):
                self._activity[u] *= 1e-100
            self._var_inc *= 1e-100
            self._order = [(-self._activity[u], u)
                           for u in range(1, self.num_vars + 1)
                           if self._value(u) == UNASSIGNED]
            self._order.sort()

    def _analyze(self, confl: int) -> Tuple[List[int], int]:
        """First-UIP learned clause and its backjump level."""
        seen = self._seen
        learnt: List[int] = [0]
        path = 0
        p = 0
        idx = len(self._trail) - 1
        cur = len(self._trail_lim)
        cleanup: List[int] = []
        while True:
            c = self._clauses[confl]
            for q in (c if p == 0 else c[1:]):
                v = abs(q)
                if not seen[v] and self._level[v] > 0:
                    seen[v] = 1
                    cleanup.append(v)
                    self._bump(v)
                    if self._level[v] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self._trail[idx])]:
                idx -= 1
            p = self._trail[idx]
            idx -= 1
            seen[abs(p)] = 0
            path -= 1
            if path == 0:
                break
            confl = self._reason[abs(p)]
        learnt[0] = -p
        for v in cleanup:
            seen[v] = 0
        if len(learnt) == 1:
            return learnt, 0
        # watch the literal from the highest remaining level
        mi = max(range(1, len(learnt)), key=lambda k: self._level[abs(learnt[k])])
        learnt[1], learnt[mi] = learnt[mi], learnt[1]
        return learnt, self._level[abs(learnt[1])]

    def _analyze_final(self, a: int) -> FrozenSet[int]:
        """Assumptions responsible for the falsified assumption ``a``."""
        failed = {a}
        if not self._trail_lim:
            return frozenset(failed)
        seen = self._seen
        seen[abs(a)] = 1
        for k in range(len(self._trail) - 1, self._trail_lim[0] - 1, -1):
            lit = self._trail[k]
            v = abs(lit)
            if not seen[v]:
                continue
            if self._reason[v] == -1:
                failed.add(lit)  # an assumption decision
            else:
                for q in self._clauses[self._reason[v]][1:]:
                    if self._level[abs(q)] > 0:
                        seen[abs(q)] = 1
            seen[v] = 0
        seen[abs(a)] = 0
        return frozenset(failed)

    # -- branching ---------------------------------------------------------

    def _pick_branch_var(self) -> int:
        order = self._order
        act = self._activity
        while order:
            na, v = heappop(order)
            if self._value(v) == UNASSIGNED and -na == act[v]:
                return v
        return 0

    # -- main loop ---------------------------------------------------------

    def solve(self, assumptions: Sequence[int] = (),
              conflict_budget: Optional[int] = None) -> SolveOutcome:
        """Search; returns SAT with a total model or UNSAT with a failed
        subset of ``assumptions``.  Raises BudgetExceededError when the
        conflict budget runs out (the handle stays reusable)."""
        self.stats["solves"] += 1
        for a in assumptions:
            self.ensure_var(abs(a))
        if self._unsat0:
            return SolveOutcome("UNSAT", failed_assumptions=frozenset())
        conflicts = 0
        restart_at = _RESTART_FIRST
        while True:
            confl = self._propagate()
            if confl >= 0:
                if not self._trail_lim:
                    self._unsat0 = True
                    return SolveOutcome("UNSAT", failed_assumptions=frozenset())
                conflicts += 1
                self.stats["conflicts"] += 1
                if conflict_budget is not None and conflicts > conflict_budget:
                    self._cancel_until(0)
                    raise BudgetExceededError(
                        f"conflict budget {conflict_budget} exhausted")
                learnt, bt = self._analyze(confl)
                self._cancel_until(bt)
                if len(learnt) == 1:
                    if not self._enqueue(learnt[0], -1):
                        self._unsat0 = True
                        return SolveOutcome("UNSAT",
                                            failed_assumptions=frozenset())
                else:
                    cid = len(self._clauses)
                    self._clauses.append(learnt)
                    self._watches[_lit_idx(learnt[0])].append(cid)
                    self._watches[_lit_idx(learnt[1])].append(cid)
                    self._enqueue(learnt[0], cid)
                self._var_inc *= _ACT_DECAY
                if conflicts >= restart_at:
                    restart_at = int(restart_at * _RESTART_FACTOR)
                    self._cancel_until(0)
                continue
            dl = len(self._trail_lim)
            if dl < len(assumptions):
                a = assumptions[dl]
                v = self._value(a)
                if v == TRUE:
                    self._trail_lim.append(len(self._trail))
                elif v == FALSE:
                    failed = self._analyze_final(a)
                    self._cancel_until(0)
                    return SolveOutcome("UNSAT", failed_assumptions=failed)
                else:
                    self._trail_lim.append(len(self._trail))
                    self._enqueue(a, -1)
            else:
                v = self._pick_branch_var()
                if v == 0:
                    model = {u: 1 if self._value(u) == TRUE else 0
                             for u in range(1, self.num_vars + 1)}
                    self._cancel_until(0)
                    return SolveOutcome("SAT", model=model)
                self.stats["decisions"] += 1
                self._trail_lim.append(len(self._trail))
                self._enqueue(-v, -1)  # default polarity: false first
