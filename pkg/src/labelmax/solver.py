"""Core-guided MaxSAT over labelled formulas.

One loop serves both algorithms: solve, and while the answer is
unsatisfiable, map the failed selector assumptions to core labels, relax
those labels with fresh relaxation variables, constrain the fresh
variables to exactly one true, and raise the lower bound.  With unit
weights this is the classic unweighted procedure; general weights add
the minimum-weight split, where a label costing more than the core's
minimum keeps its original clauses and sprouts a cheaper twin label that
carries the relaxed copies.

Two SAT-driver modes:

* ``noninc`` — a fresh solver per iteration; every labelled clause is
  loaded with one negated selector per label and the selectors are
  assumed positively.
* ``inc`` — a single solver for the whole run.  Each label owns a
  growing sequence of selector versions; relaxing a label in place
  finalizes the old version with a unit clause (which deactivates every
  loaded copy carrying it) and loads fresh copies under the new version.
  Nothing is ever reloaded.

The returned cost is the accumulated lower bound; before reporting, the
final model is charged independently (cheapest label removal covering
its falsified clauses) and the two numbers must agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Set

from .cardinality import encode_equals1
from .engine import BudgetExceededError, CdclSolver, SolveOutcome
from .model import (LCNF, LabelledClause, MaxSatSolution, add_weights,
                    clause_satisfied, cost_of_labels)

__all__ = [
    "LabelState", "CoreLabels", "SolveReport", "extract_core_labels",
    "relax_label", "solve_lcnf", "solve_fu_malik_lcnf", "solve_wmsu1_lcnf",
    "BudgetExceededError",
]

MODES = ("noninc", "inc")
ALGORITHMS = ("fumalik", "wmsu1")


@dataclass
class LabelState:
    """Book-keeping for one live label."""

    label: int
    weight: int
    selector_versions: List[int] = field(default_factory=list)
    relaxation_vars: List[int] = field(default_factory=list)

    @property
    def selector(self) -> int:
        return self.selector_versions[-1]


@dataclass(frozen=True)
class CoreLabels:
    labels: FrozenSet[int]


@dataclass
class SolveReport:
    status: str  # optimum | unsat-hard | unknown
    solution: Optional[MaxSatSolution]
    stats: Dict[str, int]


class _Counter:
    def __init__(self, start: int) -> None:
        self._next = start

    def fresh(self) -> int:
        self._next += 1
        return self._next


def extract_core_labels(outcome: SolveOutcome,
                        selector_map: Dict[int, int]) -> CoreLabels:
    """Failed selector assumptions mapped to their labels.

    An empty failed set means the solver refuted the hard clauses alone;
    legal runs rule that out before the loop starts, so it is reported
    as an internal error here.
    """
    if outcome.status != "UNSAT":
        raise ValueError("core extraction requires an unsatisfiable outcome")
    labels = frozenset(selector_map[v] for v in outcome.failed_assumptions)
    if not labels:
        raise RuntimeError(
            "empty core although the hard part was satisfiable")
    return CoreLabels(labels)


def relax_label(phi: LCNF, l: int, r: int) -> LCNF:
    """Add ``r`` to every clause whose label set contains ``l``."""
    out = [LabelledClause.make((r,) + c.lits, c.labels) if l in c.labels else c
           for c in phi.clauses]
    return LCNF(frozenset(out), dict(phi.label_weights))


# ---------------------------------------------------------------------------
# SAT drivers


class _NonIncDriver:
    """Fresh solver per call; clause database reloaded every iteration."""

    def __init__(self, nv_orig: int, stats: Dict[str, int]) -> None:
        self.nv_orig = nv_orig
        self.stats = stats

    def _fresh(self) -> CdclSolver:
        eng = CdclSolver()
        eng.ensure_var(self.nv_orig)
        self.stats["load_events"] += 1
        return eng

    def _done(self, eng: CdclSolver) -> None:
        self.stats["clauses_loaded"] += eng.stats["clauses_added"]
        self.stats["conflicts"] += eng.stats["conflicts"]
        self.stats["solves"] += eng.stats["solves"]

    def check_hard(self, hard: List, budget: Optional[int]) -> bool:
        eng = self._fresh()
        for lits in hard:
            eng.add_clause(lits)
        try:
            out = eng.solve((), budget)
        finally:
            self._done(eng)
        return out.sat

    def solve_iteration(self, working: Set[LabelledClause],
                        states: Dict[int, LabelState],
                        budget: Optional[int]) -> SolveOutcome:
        eng = self._fresh()
        for c in sorted(working, key=LabelledClause.sort_key):
            if c.hard:
                eng.add_clause(c.lits)
            else:
                eng.add_clause(list(c.lits) +
                               [-states[m].selector for m in sorted(c.labels)])
        try:
            return eng.solve([states[l].selector for l in sorted(states)],
                             budget)
        finally:
            self._done(eng)

    # relaxation is reflected only in the working formula
    def on_inplace(self, state, old_selector, reloaded, states) -> None:
        pass

    def on_split(self, copies, states) -> None:
        pass

    def on_hard_added(self, clauses) -> None:
        pass


class _IncDriver:
    """One persistent solver; relaxation applied as clause additions."""

    def __init__(self, nv_orig: int, stats: Dict[str, int]) -> None:
        self.stats = stats
        self.eng = CdclSolver()
        self.eng.ensure_var(nv_orig)
        self.stats["load_events"] += 1
        self._labelled_loaded = False

    def _load(self, c: LabelledClause, states: Dict[int, LabelState]) -> None:
        self.eng.add_clause(list(c.lits) +
                            [-states[m].selector for m in sorted(c.labels)])

    def check_hard(self, hard: List, budget: Optional[int]) -> bool:
        for lits in hard:
            self.eng.add_clause(lits)
        return self.eng.solve((), budget).sat

    def solve_iteration(self, working, states, budget) -> SolveOutcome:
        if not self._labelled_loaded:
            self._labelled_loaded = True
            for c in sorted(working, key=LabelledClause.sort_key):
                if not c.hard:
                    self._load(c, states)
        return self.eng.solve([states[l].selector for l in sorted(states)],
                              budget)

    def on_inplace(self, state: LabelState, old_selector: int,
                   reloaded: Iterable[LabelledClause], states) -> None:
        # the unit clause satisfies (= retires) every copy loaded under
        # the old version; the relaxed clauses come back under the new one
        self.eng.add_clause([-old_selector])
        for c in sorted(reloaded, key=LabelledClause.sort_key):
            self._load(c, states)

    def on_split(self, copies: Iterable[LabelledClause], states) -> None:
        for c in sorted(copies, key=LabelledClause.sort_key):
            self._load(c, states)

    def on_hard_added(self, clauses) -> None:
        for lits in sorted(clauses):
            self.eng.add_clause(lits)

    def flush(self) -> None:
        self.stats["clauses_loaded"] = self.eng.stats["clauses_added"]
        self.stats["conflicts"] = self.eng.stats["conflicts"]
        self.stats["solves"] = self.eng.stats["solves"]


# ---------------------------------------------------------------------------
# main loop


def _min_cost_hitting_set(families: Iterable[FrozenSet[int]],
                          weights: Dict[int, int]) -> FrozenSet[int]:
    """Cheapest label set intersecting every family (branch and bound)."""
    fams = sorted({frozenset(f) for f in families},
                  key=lambda f: (len(f), sorted(f)))
    mins: List[FrozenSet[int]] = []
    for f in fams:
        if not any(g <= f for g in mins):
            mins.append(f)
    best: Optional[FrozenSet[int]] = None
    best_cost = 0

    def dfs(chosen: FrozenSet[int], cost: int) -> None:
        nonlocal best, best_cost
        if best is not None and cost >= best_cost:
            return
        for f in mins:
            if not f & chosen:
                break
        else:
            best, best_cost = chosen, cost
            return
        for l in sorted(f, key=lambda x: (weights[x], x)):
            dfs(chosen | {l}, cost + weights[l])

    dfs(frozenset(), 0)
    assert best is not None  # the union of all families always hits
    return best


def _restrict_model(tau: Dict[int, int], nv: int) -> Dict[int, int]:
    return {v: tau.get(v, 0) for v in range(1, nv + 1)}


def _certify(orig: LCNF, tau: Dict[int, int], lb: int) -> MaxSatSolution:
    falsified = [c for c in orig.sorted_clauses()
                 if not clause_satisfied(c.lits, tau)]
    if any(c.hard for c in falsified):
        raise RuntimeError("internal error: model falsifies a hard clause")
    removed = _min_cost_hitting_set([c.labels for c in falsified],
                                    orig.label_weights)
    charged = cost_of_labels(orig, removed)
    if charged != lb:
        raise RuntimeError(
            f"internal error: accumulated bound {lb} does not match the "
            f"cheapest removal set of the final model ({charged})")
    return MaxSatSolution(model=tau, cost=lb, falsified=removed)


def solve_lcnf(phi: LCNF, algorithm: str = "wmsu1", mode: str = "noninc",
               conflict_budget: Optional[int] = None,
               trace: Optional[Callable[[str], None]] = None) -> SolveReport:
    """Core-guided optimum of a weighted labelled formula.

    ``algorithm="fumalik"`` insists on unit weights (it is the weighted
    loop with the split degenerate).  ``conflict_budget`` bounds each
    individual SAT call; exhaustion yields status ``unknown``.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    used = phi.labels()
    if algorithm == "fumalik" and any(phi.label_weights[l] != 1 for l in used):
        raise ValueError("fumalik requires all label weights equal to 1")

    stats = {"iterations": 0, "load_events": 0, "clauses_loaded": 0,
             "solves": 0, "conflicts": 0}
    nv_orig = phi.max_var()
    variables = _Counter(nv_orig)
    label_ids = _Counter(max(phi.label_weights, default=0))
    driver = (_IncDriver if mode == "inc" else _NonIncDriver)(nv_orig, stats)

    def finish(status: str, solution=None) -> SolveReport:
        if isinstance(driver, _IncDriver):
            driver.flush()
        return SolveReport(status, solution, stats)

    try:
        if not driver.check_hard([c.lits for c in phi.sorted_clauses()
                                  if c.hard], conflict_budget):
            return finish("unsat-hard")
    except BudgetExceededError:
        return finish("unknown")

    working: Set[LabelledClause] = set(phi.clauses)
    states = {l: LabelState(l, phi.label_weights[l], [variables.fresh()])
              for l in sorted(used)}
    lb = 0
    total = add_weights(*(phi.label_weights[l] for l in used))

    while True:
        try:
            outcome = driver.solve_iteration(working, states, conflict_budget)
        except BudgetExceededError:
            return finish("unknown")
        if outcome.sat:
            tau = _restrict_model(outcome.model, nv_orig)
            return finish("optimum", _certify(phi, tau, lb))

        stats["iterations"] += 1
        selector_map = {states[l].selector: l for l in states}
        core = extract_core_labels(outcome, selector_map)
        w_min = min(states[l].weight for l in core.labels)
        lb = add_weights(lb, w_min)
        if lb > total:
            raise RuntimeError("internal error: bound exceeded total weight")
        if trace is not None:
            trace(f"iteration {stats['iterations']}: core {len(core.labels)}, "
                  f"min weight {w_min}, lower bound {lb}")

        relaxed_this_iteration: List[int] = []
        for l in sorted(core.labels):
            st = states[l]
            r = variables.fresh()
            relaxed_this_iteration.append(r)
            st.relaxation_vars.append(r)
            carrying = [c for c in working if l in c.labels]
            if st.weight > w_min:
                # split: the label keeps its clauses at reduced weight; a
                # twin label worth w_min owns the relaxed copies
                nl = label_ids.fresh()
                st.weight -= w_min
                states[nl] = LabelState(nl, w_min, [variables.fresh()],
                                        [r])
                copies = [LabelledClause.make((r,) + c.lits,
                                              (c.labels - {l}) | {nl})
                          for c in carrying]
                working.update(copies)
                driver.on_split(copies, states)
            else:
                relaxed = [LabelledClause.make((r,) + c.lits, c.labels)
                           for c in carrying]
                working.difference_update(carrying)
                working.update(relaxed)
                old = st.selector
                st.selector_versions.append(variables.fresh())
                driver.on_inplace(st, old, relaxed, states)

        enc = encode_equals1(relaxed_this_iteration)
        working.update(LabelledClause(c, frozenset()) for c in enc.clauses)
        driver.on_hard_added(enc.clauses)


def solve_fu_malik_lcnf(phi: LCNF, mode: str = "noninc",
                        conflict_budget: Optional[int] = None,
                        trace=None) -> Optional[MaxSatSolution]:
    """Unweighted loop (unit weights required).  None means the hard
    part is unsatisfiable; a budget overrun raises."""
    report = solve_lcnf(phi, "fumalik", mode, conflict_budget, trace)
    if report.status == "unknown":
        raise BudgetExceededError("conflict budget exhausted")
    return report.solution


def solve_wmsu1_lcnf(phi: LCNF, mode: str = "noninc",
                     conflict_budget: Optional[int] = None,
                     trace=None) -> Optional[MaxSatSolution]:
    """Weighted loop; same return convention as the unweighted one."""
    report = solve_lcnf(phi, "wmsu1", mode, conflict_budget, trace)
    if report.status == "unknown":
        raise BudgetExceededError("conflict budget exhausted")
    return report.solution
