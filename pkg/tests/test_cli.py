"""Exit codes, output shapes, and file handling of the command line.

main() is called in-process; files go through tmp_path.  Exit codes follow
the documented map: 0 SAT/EQUAL, 1 UNSAT_WITHIN_BOUND/DIFFER, 2 UNKNOWN,
64 usage, 65 bad data."""

import json

import pytest

from fimeq.cli import RunConfig, UsageError, main, parse_input
from fimeq.equations import TypedSystem
from fimeq.langeq import LangSystem, system_size
from fimeq.serialize import load_system
from fimeq.solver import SolverBudget

GGS1 = "letters: a b\ninterp: group\n{a~a} + a~a.X + b~b.Y = {b~b} + a~a.Y + b~b.X\n"
MONO = "letters: a b\ninterp: monoid\n{eps} + a.X = {a} + b.Y\n"
IDEM = "letters: a\nvars: E1:idem E2:idem\nE1a = aE2\n"
ONEVAR = "letters: a\nvars: Z:idem x:red\nxZ = a\n"
UNTYPED = "letters: a\nvars: X:gen\nX = a~a\n"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def path_for(tmp_path, name, content):
    target = tmp_path / name
    target.write_text(content)
    return str(target)


class TestWords:
    def test_eval_prints_the_pair(self, capsys):
        code, out, _ = run(capsys, "fim", "eval", "a~ab")
        assert code == 0
        assert out.strip() == "(P={eps,a,b}; g=b)"

    def test_eval_json(self, capsys):
        code, out, _ = run(capsys, "--format", "json", "fim", "eval", "a~a")
        assert code == 0
        assert json.loads(out) == {"value": {"tree": ["eps", "a"], "group": "eps"}}

    def test_eq_equal(self, capsys):
        code, out, _ = run(capsys, "fim", "eq", "a~aa", "a")
        assert (code, out.strip()) == (0, "EQUAL")

    def test_eq_differ(self, capsys):
        code, out, _ = run(capsys, "fim", "eq", "a", "b")
        assert (code, out.strip()) == (1, "DIFFER")

    def test_letters_flag_widens_the_alphabet(self, capsys):
        code, out, _ = run(capsys, "fim", "eval", "a", "--letters", "a,b")
        assert code == 0 and out.strip() == "(P={eps,a}; g=a)"

    def test_bad_word_is_a_data_error(self, capsys):
        code, _, err = run(capsys, "fim", "eval", "a~~b")
        assert code == 65
        assert "error:" in err


class TestSystems:
    def test_solve_idem_sat(self, capsys, tmp_path):
        code, out, _ = run(capsys, "fim", "solve-idem", path_for(tmp_path, "s.eq", IDEM))
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "SAT"
        assert "E1 = (P={eps}; g=eps)" in lines

    def test_solve_idem_unsat(self, capsys, tmp_path):
        bad = "letters: a\nvars: E:idem\nEa = E\n"
        code, out, _ = run(capsys, "fim", "solve-idem", path_for(tmp_path, "s.eq", bad))
        assert code == 1
        assert out.splitlines()[0] == "UNSAT_WITHIN_BOUND"

    def test_lift(self, capsys, tmp_path):
        system = path_for(tmp_path, "s.eq", "letters: a b\nvars: X:gen\nXa = aX\n")
        gamma = path_for(tmp_path, "g.txt", "X = aa\n")
        code, out, _ = run(capsys, "fim", "lift", system, gamma)
        assert code == 0
        assert out.splitlines()[0] == "SAT"

    def test_lift_rejects_non_solution_gamma(self, capsys, tmp_path):
        system = path_for(tmp_path, "s.eq", "letters: a b\nvars: X:gen\nXa = aX\n")
        gamma = path_for(tmp_path, "g.txt", "X = b\n")
        code, _, err = run(capsys, "fim", "lift", system, gamma)
        assert code == 65
        assert "group projection" in err

    def test_langeq_group(self, capsys, tmp_path):
        code, out, _ = run(capsys, "langeq", "solve", path_for(tmp_path, "s.eq", GGS1))
        assert code == 0
        assert out.splitlines()[0] == "SAT"

    def test_langeq_monoid(self, capsys, tmp_path):
        code, out, _ = run(capsys, "langeq", "solve", path_for(tmp_path, "s.eq", MONO))
        assert code == 1

    def test_langeq_marked_group_goes_to_the_bounded_solver(self, capsys, tmp_path):
        marked = "letters: a\ninterp: group\nmarked: {a~a} = {} + eps.X\n"
        code, out, _ = run(capsys, "langeq", "solve", path_for(tmp_path, "s.eq", marked))
        # a~a is not reduced, so no monoid-evaluated set matches it literally
        assert code == 1

    def test_typed_file_where_lang_expected(self, capsys, tmp_path):
        code, _, err = run(capsys, "langeq", "solve", path_for(tmp_path, "s.eq", IDEM))
        assert code == 65
        assert "expected a language" in err

    def test_witness_json(self, capsys, tmp_path):
        code, out, _ = run(
            capsys, "--format", "json", "--seed", "11",
            "langeq", "solve", path_for(tmp_path, "s.eq", GGS1),
        )
        payload = json.loads(out)
        assert code == 0
        assert payload["status"] == "SAT"
        assert payload["witness"]["X"] == ["eps"]
        assert payload["seed"] == 11

    def test_trace_lines(self, capsys, tmp_path):
        code, out, _ = run(
            capsys, "--trace", "langeq", "solve", path_for(tmp_path, "s.eq", GGS1)
        )
        assert code == 0
        assert any(line.startswith("trace: ") for line in out.splitlines())


class TestSurgery:
    def test_single_stage_output_reparses(self, capsys, tmp_path):
        code, out, _ = run(
            capsys, "surgery", "run", path_for(tmp_path, "s.eq", MONO), "--stage", "s1"
        )
        assert code == 0
        stage = load_system(out)
        assert isinstance(stage, LangSystem)

    def test_full_chain_report(self, capsys, tmp_path):
        code, out, _ = run(
            capsys, "surgery", "run", path_for(tmp_path, "s.eq", MONO),
            "--stage", "all", "--report", "json",
        )
        assert code == 0
        payload = json.loads(out)
        assert [s["stage"] for s in payload["stages"]] == ["s1", "s2", "sprime", "fim"]
        assert len(payload["result"]["equations"]) == 2

    def test_all_stage_text_sections(self, capsys, tmp_path):
        code, out, _ = run(
            capsys, "surgery", "run", path_for(tmp_path, "s.eq", MONO), "--stage", "all"
        )
        assert code == 0
        assert out.count("== ") == 4

    def test_group_input_is_a_data_error(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "surgery", "run", path_for(tmp_path, "s.eq", GGS1), "--stage", "s1"
        )
        assert code == 65


class TestOnevar:
    def test_classify_typed(self, capsys, tmp_path):
        code, out, _ = run(capsys, "onevar", "classify", path_for(tmp_path, "s.eq", ONEVAR))
        assert code == 0
        assert out.strip() == "1: strongly-unbalanced SU1"

    def test_classify_untyped_and_balanced(self, capsys, tmp_path):
        text = "letters: a\nvars: X:gen\nX = a~a\nXa = aX\n"
        code, out, _ = run(capsys, "onevar", "classify", path_for(tmp_path, "s.eq", text))
        assert code == 0
        assert out.splitlines() == ["1: unbalanced", "2: balanced"]

    def test_classify_not_strong(self, capsys, tmp_path):
        text = "letters: a\nvars: x:red\nxa = ax\n"
        code, out, _ = run(capsys, "onevar", "classify", path_for(tmp_path, "s.eq", text))
        assert out.strip() == "1: not-strongly-unbalanced"

    def test_solve_typed(self, capsys, tmp_path):
        code, out, _ = run(capsys, "onevar", "solve", path_for(tmp_path, "s.eq", ONEVAR))
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "SAT"
        assert "x = a" in lines

    def test_solve_untyped_keeps_idempotent_solutions(self, capsys, tmp_path):
        code, out, _ = run(
            capsys, "--trace", "onevar", "solve", path_for(tmp_path, "s.eq", UNTYPED)
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "SAT"
        assert "Z@X = (P={eps,a}; g=eps)" in lines
        assert "trace: reduced to a strongly unbalanced typed system" in lines

    def test_solve_unsat_with_group_cap(self, capsys, tmp_path):
        text = "letters: a b\nvars: x:red\nxx = a\n"
        code, out, _ = run(
            capsys, "onevar", "solve", path_for(tmp_path, "s.eq", text),
            "--max-group-len", "4",
        )
        assert code == 1

    def test_balanced_input_is_a_data_error(self, capsys, tmp_path):
        text = "letters: a\nvars: x:red\nxa = ax\n"
        code, _, err = run(capsys, "onevar", "solve", path_for(tmp_path, "s.eq", text))
        assert code == 65
        assert "strongly unbalanced" in err


class TestPlumbing:
    def test_parse_input_returns_alphabet_and_system(self, tmp_path):
        alphabet, system = parse_input(path_for(tmp_path, "s.eq", IDEM))
        assert isinstance(system, TypedSystem)
        assert alphabet is system.alphabet
        _, lang = parse_input(path_for(tmp_path, "l.eq", GGS1))
        assert system_size(lang) == 22

    def test_usage_errors(self, capsys, tmp_path):
        assert run(capsys, "fim", "bogus")[0] == 64
        assert run(capsys, "bogus")[0] == 64
        assert run(capsys)[0] == 64
        idem = path_for(tmp_path, "s.eq", IDEM)
        assert run(capsys, "--max-len", "0", "fim", "solve-idem", idem)[0] == 64
        assert run(capsys, "--max-branches", "0", "fim", "solve-idem", idem)[0] == 64
        assert run(capsys, "--time-limit-ms", "0", "fim", "solve-idem", idem)[0] == 64

    def test_help_exits_zero(self, capsys):
        assert run(capsys, "--help")[0] == 0

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "fim", "solve-idem", str(tmp_path / "nope.eq"))
        assert code == 65

    def test_parse_error_is_located(self, capsys, tmp_path):
        bad = path_for(tmp_path, "s.eq", "letters: a\nvars: E:idem\nq = a\n")
        code, _, err = run(capsys, "fim", "solve-idem", bad)
        assert code == 65
        assert "line 3" in err

    def test_config_invariant(self):
        with pytest.raises(UsageError, match="positive"):
            RunConfig("fim eval", (), SolverBudget(max_len=0))

    def test_flags_after_the_subcommand(self, capsys, tmp_path):
        code, out, _ = run(
            capsys, "langeq", "solve", path_for(tmp_path, "s.eq", GGS1),
            "--format", "json",
        )
        assert code == 0
        assert json.loads(out)["status"] == "SAT"
