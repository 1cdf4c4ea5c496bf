"""Resolution-based preprocessing on labelled formulas.

Labelled variable elimination, subsumption and self-subsuming resolution,
all of which preserve the label-level MCSes of the input — and therefore
the optimum of the weighted problem.  Variable elimination is undone per
solution by `bve_reconstruct`.

Weight entries of labels whose clauses disappear are deliberately kept in
the weight map: downstream cost accounting may still mention them, and a
label without clauses can never be charged.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

from .model import (Assignment, LCNF, LabelledClause, clause_satisfied,
                    clause_vars, is_tautology)

__all__ = [
    "BveEntry", "BveRecord", "PrepConfig", "l_resolve", "l_ve", "l_bve",
    "l_sub", "l_ssr", "preprocess_lcnf", "bve_reconstruct", "dump_lcnf",
]


@dataclass(frozen=True)
class BveEntry:
    """One eliminated variable with every clause that mentioned it."""

    var: int
    group: FrozenSet[LabelledClause]


BveRecord = List[BveEntry]


@dataclass(frozen=True)
class PrepConfig:
    sub: bool = True
    ssr: bool = True
    bve: bool = True
    max_rounds: int = 10
    # skip a variable whose elimination would create a clause tagged with
    # more labels than this; label sets become solver assumptions later
    max_labelset: int = 32

    @staticmethod
    def none() -> "PrepConfig":
        return PrepConfig(sub=False, ssr=False, bve=False)


# ---------------------------------------------------------------------------
# atomic rules


def l_resolve(c1: LabelledClause, c2: LabelledClause, x: int) -> LabelledClause:
    """Resolvent on ``x``: clause parts merged minus x/-x, label sets united.

    The result may be tautological; callers filter.
    """
    if x not in c1.lits:
        raise ValueError(f"variable {x} does not occur positively in {c1!r}")
    if -x not in c2.lits:
        raise ValueError(f"variable {x} does not occur negatively in {c2!r}")
    lits = [l for l in c1.lits if l != x] + [l for l in c2.lits if l != -x]
    return LabelledClause.make(lits, c1.labels | c2.labels)


def l_ve(phi: LCNF, x: int) -> LCNF:
    """Eliminate ``x``: drop every clause mentioning it, add all
    non-tautological resolvents of its positive/negative occurrences.

    Clauses that are themselves tautological contribute no resolvents
    (they are vacuous, and resolving through them would re-introduce x).
    """
    pos: List[LabelledClause] = []
    neg: List[LabelledClause] = []
    rest: List[LabelledClause] = []
    for c in phi.clauses:
        mentions = x in c.lits or -x in c.lits
        if is_tautology(c.lits):
            if not mentions:
                rest.append(c)
            continue
        if x in c.lits:
            pos.append(c)
        elif -x in c.lits:
            neg.append(c)
        else:
            rest.append(c)
    out = set(rest)
    for a in pos:
        for b in neg:
            r = l_resolve(a, b, x)
            if not is_tautology(r.lits):
                out.add(r)
    return LCNF(frozenset(out), dict(phi.label_weights))


def l_bve(phi: LCNF, x: int) -> LCNF:
    """l_ve guarded by clause count: apply only if the formula shrinks."""
    out = l_ve(phi, x)
    return out if out.size() < phi.size() else phi


def l_sub(phi: LCNF, c1: LabelledClause, c2: LabelledClause) -> LCNF:
    """Remove c2 if c1 strictly clause-subsumes it and its labels allow.

    Condition: lits(c1) a *strict* subset of lits(c2) and labels(c1) a
    subset of labels(c2).  Equal clause parts are never touched here (set
    semantics already collapsed identical pairs).  No-op unless both
    clauses are present and distinct.
    """
    if c1 == c2 or c1 not in phi.clauses or c2 not in phi.clauses:
        return phi
    if set(c1.lits) < set(c2.lits) and c1.labels <= c2.labels:
        return LCNF(phi.clauses - {c2}, dict(phi.label_weights))
    return phi


def l_ssr(phi: LCNF, c1: LabelledClause, c2: LabelledClause) -> LCNF:
    """Self-subsuming resolution: strengthen c2 by one literal.

    If c1 = (l | A), c2 = (-l | B) with A a strict subset of B and
    labels(c1) a subset of labels(c2), replace c2 by B keeping c2's
    labels.  First matching literal of c1 (canonical order) applies.
    """
    if c1 == c2 or c1 not in phi.clauses or c2 not in phi.clauses:
        return phi
    if not c1.labels <= c2.labels:
        return phi
    s2 = set(c2.lits)
    for l in c1.lits:
        if -l not in s2:
            continue
        a = set(c1.lits) - {l}
        b = s2 - {-l}
        if a < b:
            repl = LabelledClause.make(b, c2.labels)
            return LCNF((phi.clauses - {c2}) | {repl}, dict(phi.label_weights))
    return phi


# ---------------------------------------------------------------------------
# pass schedule


def _sub_fixpoint(phi: LCNF) -> LCNF:
    while True:
        cs = phi.sorted_clauses()
        removed = set()
        for c1 in cs:
            if c1 in removed:
                continue
            l1 = set(c1.lits)
            for c2 in cs:
                if c2 == c1 or c2 in removed:
                    continue
                if l1 < set(c2.lits) and c1.labels <= c2.labels:
                    removed.add(c2)
        if not removed:
            return phi
        phi = LCNF(phi.clauses - removed, dict(phi.label_weights))


def _ssr_fixpoint(phi: LCNF) -> LCNF:
    # restart the pair scan after each strengthening; each application
    # removes one literal from the formula, so this terminates
    changed = True
    while changed:
        changed = False
        cs = phi.sorted_clauses()
        for c1 in cs:
            for c2 in cs:
                out = l_ssr(phi, c1, c2)
                if out.clauses != phi.clauses:
                    phi = out
                    changed = True
                    break
            if changed:
                break
    return phi


def _bve_sweep(phi: LCNF, record: BveRecord, max_labelset: int) -> LCNF:
    occ: Counter = Counter()
    for c in phi.clauses:
        for v in clause_vars(c.lits):
            occ[v] += 1
    for x in sorted(phi.vars(), key=lambda v: (occ[v], v)):
        group = frozenset(c for c in phi.clauses if x in c.lits or -x in c.lits)
        if not group:
            continue
        cand = l_ve(phi, x)
        if cand.size() >= phi.size():
            continue
        if any(len(c.labels) > max_labelset for c in cand.clauses - phi.clauses):
            continue
        record.append(BveEntry(x, group))
        phi = cand
    return phi


def preprocess_lcnf(phi: LCNF,
                    config: Optional[PrepConfig] = None) -> Tuple[LCNF, BveRecord]:
    """Rounds of (subsumption fixpoint, SSR fixpoint, one BVE sweep).

    Stops when a full round leaves the clause set unchanged or after
    ``max_rounds``.  Returns the reduced formula and the elimination
    record needed to rebuild assignments over the original variables.
    """
    cfg = config if config is not None else PrepConfig()
    record: BveRecord = []
    for _ in range(cfg.max_rounds):
        before = phi.clauses
        if cfg.sub:
            phi = _sub_fixpoint(phi)
        if cfg.ssr:
            phi = _ssr_fixpoint(phi)
        if cfg.bve:
            phi = _bve_sweep(phi, record, cfg.max_labelset)
        if phi.clauses == before:
            break
    return phi, record


# ---------------------------------------------------------------------------
# reconstruction


def bve_reconstruct(rec: BveRecord, tau: Assignment,
                    retained: Optional[FrozenSet[int]] = None) -> Assignment:
    """Extend a model of the reduced formula over eliminated variables.

    Works backwards through the record, picking for each variable a value
    (0 preferred) satisfying every recorded clause whose label set lies
    inside ``retained`` — clauses outside the retained context impose no
    constraint.  ``retained=None`` keeps every clause constraining.
    """
    out = dict(tau)
    for entry in reversed(rec):
        group = [c for c in entry.group
                 if retained is None or c.labels <= retained]
        for v in (0, 1):
            out[entry.var] = v
            if all(clause_satisfied(c.lits, out) for c in group):
                break
        else:
            raise RuntimeError(
                f"no value of variable {entry.var} satisfies its "
                f"recorded clause group; model does not fit the record")
    return out


def dump_lcnf(phi: LCNF) -> str:
    """One line per clause: literals, a '|' separator, then labels."""
    lines = []
    for c in phi.sorted_clauses():
        lits = " ".join(str(l) for l in c.lits)
        tags = " ".join(str(l) for l in sorted(c.labels))
        lines.append(f"{lits} | {tags}".strip())
    return "\n".join(lines)
