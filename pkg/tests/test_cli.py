import json

import pytest

from labelmax.cli import PREPS, PipelineError, main, run_pipeline
from labelmax.dimacs import parse_wcnf
from labelmax.model import WCNF, clause_satisfied
from labelmax.oracle import brute_force_maxsat, random_wcnf

EXAMPLE1 = """\
p wcnf 3 6 7
1 1 0
1 -1 0
1 1 2 0
1 1 -2 0
1 3 0
1 -3 0
"""

HARD_UNSAT = """\
p wcnf 1 3 4
4 1 0
4 -1 0
1 1 0
"""

# soft pigeonhole: refuting it needs real search conflicts, so a zero
# conflict budget is guaranteed to trip
PIGEON = """\
p wcnf 6 9 10
1 1 2 0
1 3 4 0
1 5 6 0
1 -1 -3 0
1 -1 -5 0
1 -3 -5 0
1 -2 -4 0
1 -2 -6 0
1 -4 -6 0
"""


def example1_wcnf():
    return parse_wcnf(EXAMPLE1).wcnf


# ---------------------------------------------------------------------------
# run_pipeline


@pytest.mark.parametrize("prep", PREPS)
@pytest.mark.parametrize("mode", ["noninc", "inc"])
def test_pipeline_example1_all_flag_combinations(prep, mode):
    f = example1_wcnf()
    res = run_pipeline(f, prep=prep, mode=mode, algorithm="fumalik")
    assert res.status == "optimum"
    assert res.solution.cost == 2
    assert set(res.solution.model) == {1, 2, 3}
    assert f.cost_of(res.solution.model) == 2


def test_pipeline_model_answers_for_the_original_formula():
    f = WCNF()
    f.add_hard((1, 2))
    f.add_soft((-1,), 3)
    f.add_soft((-2,), 2)
    f.add_soft((1, -3), 1)
    res = run_pipeline(f)
    assert res.status == "optimum"
    assert all(clause_satisfied(c, res.solution.model) for c in f.hard)
    assert f.cost_of(res.solution.model) == res.solution.cost == 2
    assert res.solution.falsified == {2}


def test_pipeline_unsat_hard():
    res = run_pipeline(parse_wcnf(HARD_UNSAT).wcnf)
    assert res.status == "unsat-hard"
    assert res.solution is None


def test_pipeline_budget_exhaustion_is_unknown():
    res = run_pipeline(parse_wcnf(PIGEON).wcnf, prep="none",
                       conflict_budget=0)
    assert res.status == "unknown"


def test_pipeline_rejects_unknown_prep():
    with pytest.raises(ValueError):
        run_pipeline(example1_wcnf(), prep="rs,bce")


def test_pipeline_stats_carry_prep_counts():
    res = run_pipeline(example1_wcnf(), prep="bce,rs")
    assert {"iterations", "load_events", "bce_removed",
            "bve_eliminated"} <= set(res.stats)


def test_pipeline_cost_independent_of_flags_on_random_instances():
    # the headline invariant: answers never depend on prep/mode/alg
    for seed in range(40):
        f = random_wcnf(seed)
        expect = brute_force_maxsat(f)
        for prep in PREPS:
            for mode in ("noninc", "inc"):
                res = run_pipeline(f, prep=prep, mode=mode)
                if expect is None:
                    assert res.status == "unsat-hard"
                    continue
                assert res.status == "optimum"
                assert res.solution.cost == expect.cost, (seed, prep, mode)
                # verify=True already re-checked the model; check again here
                assert f.cost_of(res.solution.model) == expect.cost


def test_pipeline_verification_catches_a_lying_cost(monkeypatch):
    import labelmax.cli as cli_mod
    from labelmax.solver import SolveReport, solve_lcnf as real_solve

    def lying(phi, **kw):
        rep = real_solve(phi, **kw)
        if rep.status != "optimum":
            return rep
        sol = rep.solution
        bad = type(sol)(sol.model, sol.cost + 1, sol.falsified)
        return SolveReport(rep.status, bad, rep.stats)

    monkeypatch.setattr(cli_mod, "solve_lcnf", lying)
    with pytest.raises(PipelineError):
        run_pipeline(example1_wcnf(), prep="none")


# ---------------------------------------------------------------------------
# solve subcommand


def test_solve_example1_output(tmp_path, capsys):
    path = tmp_path / "ex1.wcnf"
    path.write_text(EXAMPLE1)
    code = main(["solve", "--prep=bce,rs", "--mode=inc", str(path)])
    out = capsys.readouterr().out
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "o 2"
    assert lines[1] == "s OPTIMUM FOUND"
    assert lines[2].startswith("v ") and lines[2].endswith(" 0")
    assert len(lines[2].split()) == 5  # v, three literals, terminating 0


def test_solve_cost_identical_across_preps(tmp_path, capsys):
    path = tmp_path / "ex1.wcnf"
    path.write_text(EXAMPLE1)
    o_lines = set()
    for prep in PREPS:
        assert main(["solve", f"--prep={prep}", str(path)]) == 0
        o_lines.add(capsys.readouterr().out.splitlines()[0])
    assert o_lines == {"o 2"}


def test_solve_reads_stdin(tmp_path, capsys, monkeypatch):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO(EXAMPLE1))
    assert main(["solve", "-"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "o 2"


def test_solve_unsat_hard_exit_20(tmp_path, capsys):
    path = tmp_path / "bad.wcnf"
    path.write_text(HARD_UNSAT)
    assert main(["solve", str(path)]) == 20
    assert capsys.readouterr().out == "s UNSATISFIABLE\n"


def test_solve_budget_unknown_exit_1(tmp_path, capsys):
    path = tmp_path / "pigeon.wcnf"
    path.write_text(PIGEON)
    code = main(["solve", "--prep=none", "--budget=0", str(path)])
    assert code == 1
    assert capsys.readouterr().out == "s UNKNOWN\n"


def test_solve_parse_error_exit_1(tmp_path, capsys):
    path = tmp_path / "garbage.wcnf"
    path.write_text("p wcnf 2 1 5\n5 1 junk 0\n")
    assert main(["solve", str(path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_solve_missing_file_exit_1(capsys):
    assert main(["solve", "/nonexistent/x.wcnf"]) == 1
    assert "error:" in capsys.readouterr().err


def test_solve_fumalik_on_weighted_input_is_an_error(tmp_path, capsys):
    path = tmp_path / "w.wcnf"
    path.write_text("p wcnf 1 2 9\n4 1 0\n2 -1 0\n")
    assert main(["solve", "--alg=fumalik", str(path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_solve_trace_lines_precede_solution(tmp_path, capsys):
    path = tmp_path / "ex1.wcnf"
    path.write_text(EXAMPLE1)
    assert main(["solve", "--trace", "--prep=none", str(path)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert any(l.startswith("c iteration 1:") for l in lines)
    assert any(l.startswith("c stat load_events ") for l in lines)
    assert lines[-3] == "o 2"


def test_solve_vline_spans_declared_variables(tmp_path, capsys):
    # declared universe is wider than the clauses mention
    path = tmp_path / "wide.wcnf"
    path.write_text("p wcnf 4 2 5\n4 1 0\n1 2 0\n")
    assert main(["solve", str(path)]) == 0
    vline = capsys.readouterr().out.splitlines()[-1]
    assert len(vline.split()) == 6


# ---------------------------------------------------------------------------
# preprocess subcommand


def test_preprocess_debug_view(tmp_path, capsys):
    path = tmp_path / "ex1.wcnf"
    path.write_text(EXAMPLE1)
    assert main(["preprocess", "--prep=bce,rs", str(path)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("c bce removed ")
    assert "c bve eliminated " in out


def test_preprocess_emit_wcnf_roundtrips_cost(tmp_path, capsys):
    path = tmp_path / "ex1.wcnf"
    path.write_text(EXAMPLE1)
    out_path = tmp_path / "enc.wcnf"
    code = main(["preprocess", "--emit-wcnf", "--out", str(out_path),
                 str(path)])
    assert code == 0
    enc = parse_wcnf(out_path.read_text()).wcnf
    # selector encoding preserves the optimum of the original formula
    res = run_pipeline(enc, prep="none")
    assert res.status == "optimum" and res.solution.cost == 2

    sidecar = json.loads((tmp_path / "enc.wcnf.sidecar.json").read_text())
    assert set(sidecar) == {"num_vars", "bce", "bve", "selectors"}
    assert all(int(l) > 0 for l in sidecar["selectors"])


def test_preprocess_emit_wcnf_stdout(tmp_path, capsys):
    path = tmp_path / "ex1.wcnf"
    path.write_text(EXAMPLE1)
    assert main(["preprocess", "--emit-wcnf", str(path)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("p wcnf ")


# ---------------------------------------------------------------------------
# oracle and fuzz subcommands


def test_oracle_matches_solve(tmp_path, capsys):
    path = tmp_path / "ex1.wcnf"
    path.write_text(EXAMPLE1)
    assert main(["oracle", str(path)]) == 0
    oracle_out = capsys.readouterr().out
    assert main(["solve", str(path)]) == 0
    solve_out = capsys.readouterr().out
    assert oracle_out.splitlines()[0] == solve_out.splitlines()[0] == "o 2"


def test_oracle_rejects_oversized_instance(tmp_path, capsys):
    path = tmp_path / "big.wcnf"
    path.write_text("p wcnf 30 1 2\n1 30 0\n")
    assert main(["oracle", str(path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_fuzz_smoke(capsys):
    assert main(["fuzz", "--n", "3", "--seed", "7"]) == 0
    assert "0 mismatches" in capsys.readouterr().out
