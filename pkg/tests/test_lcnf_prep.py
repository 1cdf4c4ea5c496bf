import random

import pytest
from hypothesis import given, strategies as st

from labelmax.lcnf_prep import (BveEntry, PrepConfig, bve_reconstruct, dump_lcnf,
                                l_bve, l_resolve, l_ssr, l_sub, l_ve,
                                preprocess_lcnf)
from labelmax.model import (LCNF, induced_subformula, is_tautology, lclause,
                            lcnf_from_wcnf, lcnf_satisfied)
from labelmax.oracle import (brute_force_lcnf_maxsat, enumerate_mcs_labels,
                             random_lcnf, random_wcnf)


def example_two():
    return LCNF(frozenset([
        lclause([-1]), lclause([3]),
        lclause([1, 2], [1]), lclause([1, -2], [1, 2]),
        lclause([1], [2]), lclause([-3], [3]),
    ]), {1: 1, 2: 1, 3: 1})


# ---------------------------------------------------------------------------
# resolution


def test_resolve_merges_lits_and_unions_labels():
    r = l_resolve(lclause([1, 2], [1]), lclause([-1, 3], [2]), 1)
    assert r == lclause([2, 3], [1, 2])


def test_resolve_hard_parents_stay_hard():
    r = l_resolve(lclause([1, 2]), lclause([-1, 2]), 1)
    assert r == lclause([2])
    assert r.hard


def test_resolve_can_return_tautology():
    r = l_resolve(lclause([1, 2], [1]), lclause([-1, -2], [2]), 1)
    assert is_tautology(r.lits)
    assert r.labels == frozenset([1, 2])


def test_resolve_rejects_wrong_polarity():
    with pytest.raises(ValueError):
        l_resolve(lclause([2]), lclause([-1]), 1)
    with pytest.raises(ValueError):
        l_resolve(lclause([1]), lclause([1]), 1)


@given(st.sets(st.integers(1, 4), min_size=0, max_size=3),
       st.sets(st.integers(1, 4), min_size=0, max_size=3),
       st.sets(st.integers(1, 3), max_size=2),
       st.sets(st.integers(1, 3), max_size=2))
def test_resolve_algebra(a_vars, b_vars, la, lb):
    c1 = lclause(sorted(a_vars) + [5], la)
    c2 = lclause([-v for v in sorted(b_vars)] + [-5], lb)
    r = l_resolve(c1, c2, 5)
    assert set(r.lits) == (set(c1.lits) - {5}) | (set(c2.lits) - {-5})
    assert r.labels == la | lb


# ---------------------------------------------------------------------------
# variable elimination


def test_ve_single_resolvent():
    phi = LCNF([lclause([1, 2], [1]), lclause([-1, 3], [2])], {1: 1, 2: 1})
    out = l_ve(phi, 1)
    assert out.clauses == frozenset([lclause([2, 3], [1, 2])])


def test_ve_produces_empty_labelled_clause():
    phi = LCNF([lclause([1]), lclause([-1], [1]), lclause([4], [2])],
               {1: 1, 2: 1})
    out = l_ve(phi, 1)
    assert out.clauses == frozenset([lclause([], [1]), lclause([4], [2])])


def test_ve_drops_tautological_resolvents():
    phi = LCNF([lclause([1, 2], [1]), lclause([-1, -2], [2])], {1: 1, 2: 1})
    out = l_ve(phi, 1)
    assert out.clauses == frozenset()
    # weight entries survive even though both labels lost their clauses
    assert out.label_weights == {1: 1, 2: 1}


def test_ve_commutes_with_induced_subformula_pinned():
    phi = example_two()
    lhs = l_ve(induced_subformula(phi, {1}), 1)
    rhs = induced_subformula(l_ve(phi, 1), {1})
    expected = frozenset([lclause([3]), lclause([2], [1])])
    assert lhs.clauses == expected
    assert rhs.clauses == expected


def test_ve_commutes_with_induced_subformula_random():
    for seed in range(25):
        phi = random_lcnf(seed)
        rng = random.Random(seed)
        labels = sorted(phi.labels())
        m = frozenset(l for l in labels if rng.random() < 0.5)
        for x in sorted(phi.vars()):
            assert l_ve(induced_subformula(phi, m), x).clauses == \
                induced_subformula(l_ve(phi, x), m).clauses


def test_bve_applies_only_when_formula_shrinks():
    small = LCNF([lclause([1, 2], [1]), lclause([-1, 3], [2])], {1: 1, 2: 1})
    assert l_bve(small, 1).clauses == frozenset([lclause([2, 3], [1, 2])])

    dense = LCNF([lclause([1, 2], [1]), lclause([1, 3], [2]),
                  lclause([-1, 4], [3]), lclause([-1, 5], [4])],
                 {1: 1, 2: 1, 3: 1, 4: 1})
    assert l_bve(dense, 1) is dense  # 4 resolvents, no gain

    assert l_bve(small, 9) is small  # variable absent


# ---------------------------------------------------------------------------
# subsumption and self-subsumption


def test_sub_removes_weaker_clause():
    phi = example_two()
    out = l_sub(phi, lclause([1], [2]), lclause([1, -2], [1, 2]))
    assert out.clauses == phi.clauses - {lclause([1, -2], [1, 2])}
    assert out.label_weights == phi.label_weights


def test_sub_requires_clause_inclusion():
    phi = example_two()
    out = l_sub(phi, lclause([1, 2], [1]), lclause([1, -2], [1, 2]))
    assert out.clauses == phi.clauses


def test_sub_requires_label_inclusion():
    phi = example_two()
    out = l_sub(phi, lclause([1], [2]), lclause([1, 2], [1]))
    assert out.clauses == phi.clauses


def test_ssr_strengthens_matching_clause():
    phi = LCNF([lclause([1, 2], [1]), lclause([-1, 2, 3], [1, 2])],
               {1: 1, 2: 1})
    out = l_ssr(phi, lclause([1, 2], [1]), lclause([-1, 2, 3], [1, 2]))
    assert out.clauses == frozenset([lclause([1, 2], [1]),
                                     lclause([2, 3], [1, 2])])


def test_ssr_label_guard():
    phi = LCNF([lclause([1, 2], [2]), lclause([-1, 2, 3], [1])],
               {1: 1, 2: 1})
    out = l_ssr(phi, lclause([1, 2], [2]), lclause([-1, 2, 3], [1]))
    assert out.clauses == phi.clauses


def test_ssr_requires_strict_rest_inclusion():
    phi = LCNF([lclause([1, 2, 4], [1]), lclause([-1, 2, 3], [1])],
               {1: 1})
    out = l_ssr(phi, lclause([1, 2, 4], [1]), lclause([-1, 2, 3], [1]))
    assert out.clauses == phi.clauses


# ---------------------------------------------------------------------------
# MCS preservation — the contract all three rules must honor


def test_rules_preserve_label_mcses_on_random_instances():
    fired = {"bve": 0, "sub": 0, "ssr": 0}
    for seed in range(40):
        phi = random_lcnf(seed, nvars=8, nclauses=12, nlabels=6)
        before = enumerate_mcs_labels(phi)
        for x in sorted(phi.vars()):
            out = l_bve(phi, x)
            if out.clauses != phi.clauses:
                fired["bve"] += 1
                assert enumerate_mcs_labels(out) == before, (seed, x)
        cs = phi.sorted_clauses()
        for c1 in cs:
            for c2 in cs:
                out = l_sub(phi, c1, c2)
                if out.clauses != phi.clauses:
                    fired["sub"] += 1
                    assert enumerate_mcs_labels(out) == before, (seed, c1, c2)
                out = l_ssr(phi, c1, c2)
                if out.clauses != phi.clauses:
                    fired["ssr"] += 1
                    assert enumerate_mcs_labels(out) == before, (seed, c1, c2)
    assert all(n >= 3 for n in fired.values()), fired


def test_rules_never_mint_labels_and_keep_weight_entries():
    for seed in range(25):
        phi = random_lcnf(seed)
        for x in sorted(phi.vars()):
            out = l_bve(phi, x)
            assert out.labels() <= phi.labels()
            assert out.label_weights == phi.label_weights
        cs = phi.sorted_clauses()
        for c1 in cs:
            for c2 in cs:
                out = l_ssr(phi, c1, c2)
                assert out.labels() == phi.labels()  # only a literal is dropped
                out = l_sub(phi, c1, c2)
                assert out.labels() <= phi.labels()
                assert out.label_weights == phi.label_weights


def test_sub_is_inert_on_plain_maxsat_encodings():
    # distinct singleton labels block the label-inclusion guard everywhere
    for seed in range(20):
        phi = lcnf_from_wcnf(random_wcnf(seed, hard_fraction=0.0))
        out, rec = preprocess_lcnf(phi, PrepConfig(ssr=False, bve=False))
        assert out.clauses == phi.clauses
        assert rec == []


# ---------------------------------------------------------------------------
# full pass schedule


def test_preprocess_example_subsumption_pass():
    phi = example_two()
    out, rec = preprocess_lcnf(phi, PrepConfig(ssr=False, bve=False))
    assert out.clauses == phi.clauses - {lclause([1, -2], [1, 2])}
    assert rec == []
    assert brute_force_lcnf_maxsat(phi).cost == 2
    assert brute_force_lcnf_maxsat(out).cost == 2
    assert brute_force_lcnf_maxsat(out).falsified == frozenset([2, 3])


def test_preprocess_empty_schedule_is_identity():
    phi = example_two()
    out, rec = preprocess_lcnf(phi, PrepConfig.none())
    assert out.clauses == phi.clauses
    assert rec == []


def test_preprocess_can_dissolve_satisfiable_hard_formula():
    phi = LCNF([lclause([1, 2]), lclause([3])], {})
    out, rec = preprocess_lcnf(phi)
    assert out.clauses == frozenset()
    tau = bve_reconstruct(rec, {})
    assert lcnf_satisfied(phi, tau)


def test_preprocess_preserves_optimum_and_reconstructs():
    solved = 0
    for seed in range(60):
        phi = random_lcnf(seed, nvars=8, nclauses=12, nlabels=6)
        out, rec = preprocess_lcnf(phi)
        sol_before = brute_force_lcnf_maxsat(phi)
        sol_after = brute_force_lcnf_maxsat(out)
        assert sol_before is not None and sol_after is not None  # planted hard part
        assert sol_after.cost == sol_before.cost, seed
        retained = phi.labels() - sol_after.falsified
        tau = bve_reconstruct(rec, sol_after.model, retained=retained)
        assert lcnf_satisfied(induced_subformula(phi, retained), tau), seed
        solved += 1
    assert solved == 60


# ---------------------------------------------------------------------------
# reconstruction details


def test_reconstruct_forced_value():
    rec = [BveEntry(1, frozenset([lclause([1, 2]), lclause([-1, 3])]))]
    assert bve_reconstruct(rec, {2: 1, 3: 0}) == {2: 1, 3: 0, 1: 0}


def test_reconstruct_tie_breaks_to_false():
    rec = [BveEntry(1, frozenset([lclause([1, 2]), lclause([-1, 3])]))]
    assert bve_reconstruct(rec, {2: 1, 3: 1})[1] == 0


def test_reconstruct_ignores_clauses_outside_retained_context():
    rec = [BveEntry(1, frozenset([lclause([1], [1]), lclause([-1, 4])]))]
    out = bve_reconstruct(rec, {4: 0}, retained=frozenset())
    assert out[1] == 0
    with pytest.raises(RuntimeError):
        bve_reconstruct(rec, {4: 0})  # both clauses constrain; x has no value


def test_dump_format():
    phi = LCNF([lclause([1, -2]), lclause([2], [1, 3])], {1: 1, 3: 2})
    assert dump_lcnf(phi) == "1 -2 |\n2 | 1 3"
