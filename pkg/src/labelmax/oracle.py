"""Brute-force reference implementations and random instance generators.

Everything here is deliberately independent of the CDCL engine and the
core-guided solvers: satisfiability is decided by truth tables only, so
these functions can act as ground truth in tests.  All entry points are
capped to desk-scale inputs and raise when the cap is exceeded.

Subset enumeration convention: a family of minimal sets is returned as a
``set`` of ``frozenset``s.  Clause-level functions index clauses 1-based
by position in the given list; label-level functions work on label ids.
"""

from __future__ import annotations

import random
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .model import (
    LCNF,
    Assignment,
    ClauseT,
    LabelledClause,
    MaxSatSolution,
    WCNF,
    add_weights,
    clause,
    induced_subformula,
)

MAX_ORACLE_VARS = 20
MAX_ENUM_SETS = 16

# Assignment index convention: index a in [0, 2^n) encodes the assignment
# with variable v = (a >> (n - v)) & 1, i.e. variable 1 is the most
# significant bit.  Scanning a upwards is lexicographic order over
# (tau(1), ..., tau(n)), so the first hit is the lexicographically least.


def _index_assignment(a: int, num_vars: int) -> Assignment:
    return {v: (a >> (num_vars - v)) & 1 for v in range(1, num_vars + 1)}


# ---------------------------------------------------------------------------
# bit-mask truth tables (python ints, one bit per assignment)


def _var_mask(num_vars: int, v: int) -> int:
    # bits a with (a >> (num_vars - v)) & 1 == 1, built from the classic
    # alternating block pattern
    s = num_vars - v
    block = (1 << (1 << s)) - 1
    period = 1 << (s + 1)
    reps = ((1 << (1 << num_vars)) - 1) // ((1 << period) - 1)
    return (block << (1 << s)) * reps


class _TruthTables:
    """Per-formula cache of clause satisfaction masks."""

    def __init__(self, num_vars: int):
        if num_vars > MAX_ORACLE_VARS:
            raise ValueError(f"truth tables capped at {MAX_ORACLE_VARS} variables")
        self.n = num_vars
        self.full = (1 << (1 << num_vars)) - 1
        self._vars: Dict[int, int] = {}
        self._clauses: Dict[ClauseT, int] = {}

    def var(self, v: int) -> int:
        if v not in self._vars:
            self._vars[v] = _var_mask(self.n, v)
        return self._vars[v]

    def clause(self, c: ClauseT) -> int:
        if c not in self._clauses:
            m = 0
            for lit in c:
                p = self.var(abs(lit))
                m |= p if lit > 0 else self.full & ~p
            self._clauses[c] = m
        return self._clauses[c]

    def sat_mask(self, clauses: Iterable[ClauseT]) -> int:
        m = self.full
        for c in clauses:
            m &= self.clause(c)
            if not m:
                return 0
        return m


def truth_table_sat(clauses: Sequence[ClauseT], num_vars: int) -> Optional[Assignment]:
    """Lexicographically least model, or None if unsatisfiable."""
    tt = _TruthTables(num_vars)
    m = tt.sat_mask(clauses)
    if not m:
        return None
    # lowest set bit = least assignment index
    a = (m & -m).bit_length() - 1
    return _index_assignment(a, num_vars)


def _clause_sat_array(c: ClauseT, num_vars: int, idx: np.ndarray) -> np.ndarray:
    sat = np.zeros(idx.shape, dtype=bool)
    for lit in c:
        bit = ((idx >> (num_vars - abs(lit))) & 1).astype(bool)
        sat |= bit if lit > 0 else ~bit
    return sat


# ---------------------------------------------------------------------------
# brute-force MaxSAT


def brute_force_maxsat(f: WCNF, max_vars: int = MAX_ORACLE_VARS) -> Optional[MaxSatSolution]:
    """Scan all assignments; None when the hard part is unsatisfiable.

    Ties on cost go to the lexicographically least assignment over
    (tau(1), ..., tau(num_vars)).
    """
    n = f.num_vars
    if n > max_vars:
        raise ValueError(f"instance has {n} variables, oracle cap is {max_vars}")
    idx = np.arange(1 << n, dtype=np.uint32)
    hard_ok = np.ones(idx.shape, dtype=bool)
    for c in f.hard:
        hard_ok &= _clause_sat_array(c, n, idx)
    if not hard_ok.any():
        return None
    cost = np.zeros(idx.shape, dtype=np.int64)
    for c, w in f.soft:
        cost += w * (~_clause_sat_array(c, n, idx))
    big = int(cost.max()) + 1 if len(f.soft) else 1
    cost = np.where(hard_ok, cost, big)
    a = int(np.argmin(cost))  # first minimum = lex-least
    tau = _index_assignment(a, n)
    falsified = frozenset(
        i for i, (c, _) in enumerate(f.soft, start=1)
        if not _clause_sat_array(c, n, np.array([a], dtype=np.uint32))[0]
    )
    return MaxSatSolution(model=tau, cost=int(cost[a]), falsified=falsified)


def brute_force_lcnf_maxsat(phi: LCNF, max_vars: int = MAX_ORACLE_VARS,
                            max_labels: int = MAX_ENUM_SETS) -> Optional[MaxSatSolution]:
    """Cheapest label removal whose induced subformula is satisfiable.

    Removal sets are scanned in (cost, sorted labels) order, so the
    reported removed set is deterministic.  None when even removing all
    labels leaves the empty-labelled part unsatisfiable.
    """
    labels = sorted(phi.labels())
    if len(labels) > max_labels:
        raise ValueError(f"oracle capped at {max_labels} labels")
    nv = max(phi.max_var(), 1)
    if nv > max_vars:
        raise ValueError(f"oracle capped at {max_vars} variables")
    tt = _TruthTables(nv)
    if not tt.sat_mask([c.lits for c in phi.clauses if c.hard]):
        return None
    candidates = []
    for size in range(len(labels) + 1):
        for rem in combinations(labels, size):
            candidates.append((sum(phi.label_weights[l] for l in rem), rem))
    candidates.sort()
    for cost, rem in candidates:
        keep = set(labels) - set(rem)
        sub = induced_subformula(phi, keep)
        m = tt.sat_mask([c.lits for c in sub.clauses])
        if m:
            a = (m & -m).bit_length() - 1
            return MaxSatSolution(model=_index_assignment(a, nv), cost=cost,
                                  falsified=frozenset(rem))
    return None


# ---------------------------------------------------------------------------
# MUS / MCS enumeration (clause level, 1-based indices)


def _check_enum_cap(n: int) -> None:
    if n > MAX_ENUM_SETS:
        raise ValueError(f"subset enumeration capped at {MAX_ENUM_SETS} elements")


def enumerate_mus(clauses: Sequence[ClauseT], num_vars: int) -> Set[FrozenSet[int]]:
    """All minimal unsatisfiable subsets, as sets of 1-based clause indices.

    Size-ascending scan with superset pruning: an unsatisfiable subset
    containing no smaller-or-equal found MUS is itself minimal, because
    every unsatisfiable set contains some MUS.
    """
    _check_enum_cap(len(clauses))
    tt = _TruthTables(num_vars)
    found: List[FrozenSet[int]] = []
    idxs = range(len(clauses))
    for size in range(len(clauses) + 1):
        for combo in combinations(idxs, size):
            s = frozenset(combo)
            if any(m <= s for m in found):
                continue
            if not tt.sat_mask([clauses[i] for i in combo]):
                found.append(s)
    return {frozenset(i + 1 for i in m) for m in found}


def enumerate_mcs(clauses: Sequence[ClauseT], num_vars: int) -> Set[FrozenSet[int]]:
    """All minimal correction subsets (1-based indices).

    Satisfiable input yields {frozenset()}: nothing needs removing.
    """
    _check_enum_cap(len(clauses))
    tt = _TruthTables(num_vars)
    found: List[FrozenSet[int]] = []
    idxs = range(len(clauses))
    for size in range(len(clauses) + 1):
        for combo in combinations(idxs, size):
            r = frozenset(combo)
            if any(m <= r for m in found):
                continue
            if tt.sat_mask([clauses[i] for i in idxs if i not in r]):
                found.append(r)
    return {frozenset(i + 1 for i in m) for m in found}


# ---------------------------------------------------------------------------
# MUS / MCS enumeration (label level)


def enumerate_mus_labels(phi: LCNF) -> Set[FrozenSet[int]]:
    """Minimal label sets M with the induced subformula unsatisfiable."""
    labels = sorted(phi.labels())
    _check_enum_cap(len(labels))
    nv = max(phi.max_var(), 1)
    tt = _TruthTables(nv)
    found: List[FrozenSet[int]] = []
    for size in range(len(labels) + 1):
        for combo in combinations(labels, size):
            m = frozenset(combo)
            if any(f <= m for f in found):
                continue
            sub = induced_subformula(phi, m)
            if not tt.sat_mask([c.lits for c in sub.clauses]):
                found.append(m)
    return set(found)


def enumerate_mcs_labels(phi: LCNF) -> Set[FrozenSet[int]]:
    """Minimal label removals making the induced subformula satisfiable.

    Hard-unsatisfiable input (empty-labelled part has no model) yields
    the empty family; satisfiable input yields {frozenset()}.
    """
    labels = sorted(phi.labels())
    _check_enum_cap(len(labels))
    nv = max(phi.max_var(), 1)
    tt = _TruthTables(nv)
    found: List[FrozenSet[int]] = []
    for size in range(len(labels) + 1):
        for combo in combinations(labels, size):
            r = frozenset(combo)
            if any(f <= r for f in found):
                continue
            sub = induced_subformula(phi, set(labels) - r)
            if tt.sat_mask([c.lits for c in sub.clauses]):
                found.append(r)
    return set(found)


# ---------------------------------------------------------------------------
# hitting-set duality


def minimal_hitting_sets(family: Iterable[FrozenSet[int]]) -> Set[FrozenSet[int]]:
    """All irreducible hitting sets of a set family.

    The empty family is hit by the empty set; a family containing the
    empty set has no hitting set at all.
    """
    fam = [frozenset(s) for s in family]
    if any(len(s) == 0 for s in fam):
        return set()
    universe = sorted(set().union(*fam)) if fam else []
    _check_enum_cap(len(universe))
    found: List[FrozenSet[int]] = []
    for size in range(len(universe) + 1):
        for combo in combinations(universe, size):
            h = frozenset(combo)
            if any(f <= h for f in found):
                continue
            if all(h & s for s in fam):
                found.append(h)
    return set(found)


def check_hitting_duality(muses: Set[FrozenSet[int]], mcses: Set[FrozenSet[int]]) -> bool:
    """Each family must equal the irreducible hitting sets of the other."""
    return minimal_hitting_sets(mcses) == set(muses) and \
        minimal_hitting_sets(muses) == set(mcses)


# ---------------------------------------------------------------------------
# random instance generators (reproducible: same seed, same instance)


def _random_clause(rng: random.Random, nvars: int, max_len: int = 4) -> ClauseT:
    k = rng.randint(1, min(max_len, nvars))
    vs = rng.sample(range(1, nvars + 1), k)
    return clause(v if rng.random() < 0.5 else -v for v in vs)


def _force_satisfied(c: ClauseT, planted: Assignment, rng: random.Random) -> ClauseT:
    if any((l > 0) == bool(planted[abs(l)]) for l in c):
        return c
    lits = list(c)
    j = rng.randrange(len(lits))
    v = abs(lits[j])
    lits[j] = v if planted[v] else -v
    return clause(lits)


def random_cnf(seed: int, nvars: int = 8, nclauses: int = 12) -> Tuple[List[ClauseT], int]:
    """Plain clause list plus its declared variable count."""
    rng = random.Random(seed)
    return [_random_clause(rng, nvars) for _ in range(nclauses)], nvars


def random_wcnf(seed: int, nvars: int = 10, nclauses: int = 18, max_weight: int = 5,
                hard_fraction: float = 0.3) -> WCNF:
    """Random weighted partial instance with a satisfiable hard part.

    A hidden planted assignment is drawn first and every hard clause is
    patched to satisfy it, so the hard part always has a model.  Clause
    lengths are 1..4 over distinct variables.
    """
    rng = random.Random(seed)
    planted = {v: rng.randint(0, 1) for v in range(1, nvars + 1)}
    f = WCNF(num_vars=nvars)
    for _ in range(nclauses):
        c = _random_clause(rng, nvars)
        if rng.random() < hard_fraction:
            f.add_hard(_force_satisfied(c, planted, rng))
        else:
            f.add_soft(c, rng.randint(1, max_weight))
    f.num_vars = max(f.num_vars, nvars)
    return f


def random_lcnf(seed: int, nvars: int = 8, nclauses: int = 12, nlabels: int = 6,
                max_weight: int = 4, max_labelset: int = 3,
                hard_fraction: float = 0.3) -> LCNF:
    """Random labelled formula with a satisfiable empty-labelled part.

    Label sets have 1..max_labelset labels; a hard_fraction of clauses
    get the empty label set and are patched to satisfy a hidden planted
    assignment.
    """
    rng = random.Random(seed)
    planted = {v: rng.randint(0, 1) for v in range(1, nvars + 1)}
    weights = {l: rng.randint(1, max_weight) for l in range(1, nlabels + 1)}
    out = []
    for _ in range(nclauses):
        c = _random_clause(rng, nvars)
        if rng.random() < hard_fraction:
            out.append(LabelledClause(_force_satisfied(c, planted, rng), frozenset()))
        else:
            k = rng.randint(1, max_labelset)
            ls = frozenset(rng.sample(range(1, nlabels + 1), min(k, nlabels)))
            out.append(LabelledClause(c, ls))
    used = set().union(*(c.labels for c in out)) if out else set()
    return LCNF(frozenset(out), {l: w for l, w in weights.items() if l in used})
