"""Core value types for weighted partial MaxSAT and labelled CNF formulas.

Literals are non-zero ints in the usual DIMACS convention: ``v`` for the
positive literal of variable ``v >= 1`` and ``-v`` for its negation.
Clauses are stored canonically as sorted, duplicate-free tuples so that
clause identity is plain tuple equality.

Two formula representations live here:

* ``WCNF`` -- hard clauses plus an ordered list of (clause, weight) soft
  entries.  Soft entries form a multiset: the same clause may occur
  several times and each occurrence is charged separately.  Soft indices
  are 1-based throughout.

* ``LCNF`` -- a set of clauses tagged with finite label sets.  Clauses
  tagged with the empty label set are irremovable (hard); every other
  clause can be dropped by removing any one of its labels.  Labels carry
  the weights.  Clause identity includes the label set, so the same
  literal tuple may appear under different label sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

Lit = int
ClauseT = Tuple[int, ...]
Assignment = Dict[int, int]

#: Weights are kept inside unsigned 64-bit range; sums are checked.
MAX_WEIGHT_SUM = 2**64 - 1


class WeightOverflowError(ArithmeticError):
    """A weight sum left the unsigned 64-bit range."""


class _Top:
    """Marker for the hard-clause weight in WCNF files.  Compares above
    every finite weight and refuses arithmetic."""

    _instance: Optional["_Top"] = None

    def __new__(cls) -> "_Top":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "TOP"

    def __gt__(self, other: object) -> bool:
        return not isinstance(other, _Top)

    def __lt__(self, other: object) -> bool:
        return False

    def __ge__(self, other: object) -> bool:
        return True

    def __le__(self, other: object) -> bool:
        return isinstance(other, _Top)


TOP = _Top()


def add_weights(*weights: int) -> int:
    """Sum finite weights with an explicit overflow check."""
    total = 0
    for w in weights:
        total += w
        if total > MAX_WEIGHT_SUM:
            raise WeightOverflowError("weight sum exceeds 2^64-1")
    return total


def check_weight(w: int) -> int:
    if not isinstance(w, int) or isinstance(w, bool) or w < 1:
        raise ValueError(f"soft weight must be a positive integer, got {w!r}")
    if w > MAX_WEIGHT_SUM:
        raise WeightOverflowError("weight exceeds 2^64-1")
    return w


# ---------------------------------------------------------------------------
# clauses


def clause(lits: Iterable[int]) -> ClauseT:
    """Canonicalize literals: dedup, sort by variable then sign.

    Complementary literals are both kept; tautologies stay representable
    and are detected by :func:`is_tautology`.
    """
    seen = set(lits)
    if 0 in seen:
        raise ValueError("0 is not a literal")
    return tuple(sorted(seen, key=lambda l: (abs(l), l)))


def is_tautology(c: Sequence[int]) -> bool:
    s = set(c)
    return any(-l in s for l in s)


def clause_vars(c: Sequence[int]) -> FrozenSet[int]:
    return frozenset(abs(l) for l in c)


def lit_value(lit: int, tau: Assignment) -> int:
    """0/1 value of a literal under a total assignment (vars default to 0)."""
    v = tau.get(abs(lit), 0)
    return v if lit > 0 else 1 - v


def clause_satisfied(c: Sequence[int], tau: Assignment) -> bool:
    return any(lit_value(l, tau) == 1 for l in c)


# ---------------------------------------------------------------------------
# WCNF


@dataclass
class WCNF:
    """Weighted partial CNF.  ``soft[i-1]`` is soft clause *i* (1-based)."""

    hard: List[ClauseT] = field(default_factory=list)
    soft: List[Tuple[ClauseT, int]] = field(default_factory=list)
    num_vars: int = 0

    def add_hard(self, lits: Iterable[int]) -> None:
        c = clause(lits)
        if c not in self.hard:  # hard clauses form a set
            self.hard.append(c)
        self._grow(c)

    def add_soft(self, lits: Iterable[int], weight: int) -> None:
        c = clause(lits)
        self.soft.append((c, check_weight(weight)))
        self._grow(c)

    def _grow(self, c: ClauseT) -> None:
        for l in c:
            if abs(l) > self.num_vars:
                self.num_vars = abs(l)

    def soft_clauses(self) -> List[ClauseT]:
        return [c for c, _ in self.soft]

    def all_clauses(self) -> List[ClauseT]:
        """Hard and soft clauses as one list (weights disregarded)."""
        return list(self.hard) + [c for c, _ in self.soft]

    def soft_weight_sum(self) -> int:
        return add_weights(*(w for _, w in self.soft))

    def top(self) -> int:
        """Conventional hard weight for file emission: 1 + sum of soft."""
        return add_weights(self.soft_weight_sum(), 1)

    def cost_of(self, tau: Assignment) -> int:
        """Total weight of soft clauses falsified by ``tau``."""
        return add_weights(
            *(w for c, w in self.soft if not clause_satisfied(c, tau))
        )

    def copy(self) -> "WCNF":
        return WCNF(list(self.hard), list(self.soft), self.num_vars)


# ---------------------------------------------------------------------------
# LCNF


@dataclass(frozen=True)
class LabelledClause:
    lits: ClauseT
    labels: FrozenSet[int]

    @staticmethod
    def make(lits: Iterable[int], labels: Iterable[int] = ()) -> "LabelledClause":
        return LabelledClause(clause(lits), frozenset(labels))

    @property
    def hard(self) -> bool:
        return not self.labels

    def sort_key(self) -> Tuple:
        return (tuple(sorted(self.labels)), self.lits)

    def __repr__(self) -> str:
        body = " ".join(str(l) for l in self.lits) if self.lits else "[]"
        tags = ",".join(str(l) for l in sorted(self.labels))
        return f"<{body}>^{{{tags}}}"


def lclause(lits: Iterable[int], labels: Iterable[int] = ()) -> LabelledClause:
    return LabelledClause.make(lits, labels)


@dataclass
class LCNF:
    """Set of labelled clauses plus a weight for every label in use.

    Treated as immutable: transformation functions return new instances.
    """

    clauses: FrozenSet[LabelledClause] = frozenset()
    label_weights: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "clauses", frozenset(self.clauses))
        missing = self.labels() - set(self.label_weights)
        if missing:
            raise ValueError(f"labels without a weight entry: {sorted(missing)}")
        for l, w in self.label_weights.items():
            check_weight(w)

    def labels(self) -> FrozenSet[int]:
        """Union of all label sets (labels actually constraining clauses)."""
        out: set = set()
        for c in self.clauses:
            out |= c.labels
        return frozenset(out)

    def vars(self) -> FrozenSet[int]:
        out: set = set()
        for c in self.clauses:
            out |= clause_vars(c.lits)
        return frozenset(out)

    def max_var(self) -> int:
        return max((max((abs(l) for l in c.lits), default=0) for c in self.clauses), default=0)

    def sorted_clauses(self) -> List[LabelledClause]:
        return sorted(self.clauses, key=LabelledClause.sort_key)

    def hard_clauses(self) -> List[ClauseT]:
        return [c.lits for c in self.sorted_clauses() if c.hard]

    def size(self) -> int:
        return len(self.clauses)

    def replace(self, clauses: Iterable[LabelledClause],
                label_weights: Optional[Dict[int, int]] = None) -> "LCNF":
        lw = dict(self.label_weights if label_weights is None else label_weights)
        cs = frozenset(clauses)
        used = set()
        for c in cs:
            used |= c.labels
        return LCNF(cs, {l: w for l, w in lw.items() if l in used})

    def __iter__(self) -> Iterator[LabelledClause]:
        return iter(self.sorted_clauses())


def induced_subformula(phi: LCNF, m: Iterable[int]) -> LCNF:
    """Clauses of ``phi`` whose label set is contained in ``m``.

    Empty-labelled clauses are always retained.  Weight entries are
    restricted to the labels still in use.
    """
    ms = frozenset(m)
    kept = [c for c in phi.clauses if c.labels <= ms]
    return phi.replace(kept)


def lcnf_from_wcnf(f: WCNF) -> LCNF:
    """Label soft clause *i* with the singleton {i}; hard clauses get {}.

    Duplicate soft clauses stay distinct because their labels differ.
    """
    out = [LabelledClause(c, frozenset()) for c in f.hard]
    weights = {}
    for i, (c, w) in enumerate(f.soft, start=1):
        out.append(LabelledClause(c, frozenset([i])))
        weights[i] = w
    return LCNF(frozenset(out), weights)


def cost_of_labels(phi: LCNF, labels: Iterable[int]) -> int:
    """Checked weight sum of a label set; unknown labels are an error."""
    total = []
    for l in set(labels):
        if l not in phi.label_weights:
            raise KeyError(f"label {l} has no weight entry")
        total.append(phi.label_weights[l])
    return add_weights(*total)


def lcnf_satisfied(phi: LCNF, tau: Assignment) -> bool:
    return all(clause_satisfied(c.lits, tau) for c in phi.clauses)


# ---------------------------------------------------------------------------
# solutions


@dataclass
class MaxSatSolution:
    """Optimum report: a model, its cost, and what was given up.

    ``falsified`` holds 1-based soft indices when solving a WCNF and
    removed labels when solving an LCNF.  The model is total over the
    variable universe of the formula it answers for.
    """

    model: Assignment
    cost: int
    falsified: FrozenSet[int] = frozenset()

    def model_tuple(self, num_vars: int) -> Tuple[int, ...]:
        """Model as signed literals 1..num_vars (missing vars read as 0)."""
        return tuple(
            v if self.model.get(v, 0) else -v for v in range(1, num_vars + 1)
        )
