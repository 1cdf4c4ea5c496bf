"""Encoding labelled formulas as plain weighted MaxSAT.

Each label gets one fresh selector variable; a labelled clause turns
into a hard clause that a falsified selector satisfies vacuously, and
each selector becomes a unit soft clause carrying the label's weight.
Falsifying the soft unit is then exactly the removal of the label, so
optima transfer in both directions.
"""

from __future__ import annotations

from typing import Dict, Tuple

from .model import LCNF, MaxSatSolution, WCNF

__all__ = ["lcnf_to_wcnf", "lift_reduction_solution"]


def lcnf_to_wcnf(phi: LCNF) -> Tuple[WCNF, Dict[int, int]]:
    """Selector-based encoding; returns the WCNF and label → selector map.

    Selectors are allocated contiguously above the highest original
    variable, in ascending label order.
    """
    out = WCNF()
    next_var = phi.max_var()
    selector: Dict[int, int] = {}
    for l in sorted(phi.labels()):
        next_var += 1
        selector[l] = next_var
    for c in phi.sorted_clauses():
        out.add_hard(list(c.lits) + [-selector[l] for l in sorted(c.labels)])
    for l in sorted(selector):
        out.add_soft([selector[l]], phi.label_weights[l])
    out.num_vars = max(out.num_vars, next_var)
    return out, selector


def lift_reduction_solution(sol: MaxSatSolution,
                            selector_map: Dict[int, int]) -> MaxSatSolution:
    """Read a WCNF solution back as an LCNF solution.

    Removed labels are those whose selector is false in the model; the
    cost carries over unchanged (the soft clauses are exactly the
    selector units).  The model is cut below the selector block.
    """
    removed = frozenset(l for l, v in selector_map.items()
                        if sol.model.get(v, 0) == 0)
    if selector_map:
        boundary = min(selector_map.values())
        model = {v: val for v, val in sol.model.items() if v < boundary}
    else:
        model = dict(sol.model)
    return MaxSatSolution(model=model, cost=sol.cost, falsified=removed)
