import io
import json

import pytest

from integrable_ops.cli import HELP, build_parser, main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


def test_certify_trunc():
    assert run("certify", "--expr", "trunc(x0)", "--sig", "t") == (0, "k=0 lambda={0:1}\n")


def test_certify_rejects_square():
    code, out = run("certify", "--expr", "sq(x0)")
    assert code == 1 and "not certifiable" in out


def test_classify_square():
    code, out = run("classify", "--expr", "sq(x0)", "--sig", "ext", "--box", "0=-3,3")
    assert code == 0
    assert out.splitlines()[0] == "integrability=false finite=false infty=true"
    assert "[0, 9]" in out


def test_classify_certified():
    code, out = run("classify", "--expr", "one", "--sig", "u")
    assert code == 0
    assert out.splitlines() == ["integrability=false finite=true infty=true", "certificate k=1 lambda={}"]


def test_eval_sum():
    assert run("eval", "--expr", "x0 + x1", "--at", "x0=1,x1=2") == (0, "3\n")


def test_eval_from_file(tmp_path):
    path = tmp_path / "t.txt"
    path.write_text("tsup[n] cap=trunc(x0) : n*(x0 - trunc(x0))\n")
    assert run("eval", "--term", str(path), "--at", "x0=3") == (0, "1\n")


def test_eval_json_lines():
    code, out = run("eval", "--expr", "x0 v x1", "--at", "x0=1/2,x1=-2", "--format", "json-lines")
    assert code == 0 and json.loads(out)["value"] == "1/2"


@pytest.mark.parametrize("argv", [
    ("eval", "--expr", "x0 +"),
    ("eval", "--expr", "x0", "--at", "y=1"),
    ("eval", "--expr", "one + x0", "--sig", "t"),
    ("eval", "--term", "/nonexistent/term.txt"),
    ("synth", "ind-gt", "--lambda", "-1"),
    ("axioms", "--model", "power:0"),
])
def test_usage_errors_exit_two(argv, capsys):
    code, _ = run(*argv)
    assert code == 2
    assert capsys.readouterr().err.startswith("error:")


def test_argparse_errors_exit_two(capsys):
    assert run("eval")[0] == 2
    assert "--expr" in capsys.readouterr().err


def test_witness_and_verify(tmp_path):
    path = tmp_path / "w.txt"
    code, out = run("witness", "--expr", "sq(x0)", "--atoms", "3", "--base", "3")
    assert code == 0
    assert out.splitlines()[:4] == ["p=1 mode=A N=3", "atom 0 weight 1", "atom 1 weight 1/9",
                                    "atom 2 weight 1/81"]
    assert run("witness", "--expr", "sq(x0)", "--atoms", "40", "--out", str(path))[0] == 0
    code, out = run("verify", "--expr", "sq(x0)", "--witness", str(path))
    assert code == 0
    assert "image_sum=40" in out and out.rstrip().endswith("verdict=DIVERGES")


def test_verify_below_threshold(tmp_path):
    path = tmp_path / "w.txt"
    run("witness", "--expr", "sq(x0)", "--atoms", "4", "--out", str(path))
    code, out = run("verify", "--expr", "sq(x0)", "--witness", str(path), "--threshold", "5")
    assert code == 1 and "INCONCLUSIVE" in out


def test_witness_not_found_is_a_verdict(capsys):
    code, _ = run("witness", "--expr", "x0", "--atoms", "3", "--budget", "50")
    assert code == 1 and "inconclusive" in capsys.readouterr().err


def test_synth_output_parses_back():
    from integrable_ops.dsl import parse
    from integrable_ops.evaluation import evaluate
    from gmpy2 import mpq

    code, out = run("synth", "ind-gt", "--var", "0", "--lambda", "3/2")
    assert code == 0
    t = parse(out)
    assert [evaluate(t, {0: mpq(x)}) for x in (2, mpq(3, 2), 0)] == [1, 0, 0]


def test_synth_simple(tmp_path):
    spec = {"dominator": "2*x0", "entries": [{"coef": "3/2", "region": "x0 > 1"}]}
    path = tmp_path / "s.json"
    path.write_text(json.dumps(spec))
    code, out = run("synth", "simple", "--spec", str(path))
    assert code == 0
    code, value = run("eval", "--expr", out.strip(), "--at", "x0=2")
    assert value == "3/2\n"


def test_axioms_lines():
    code, out = run("axioms", "--model", "quotient:3:2", "--samples", "50", "--id", "TS1",
                    "--id", "MEETUNIT")
    assert code == 0
    assert out.splitlines() == ["TS1 holds samples=50", "MEETUNIT holds samples=50"]


def test_axioms_mutations_fail():
    code, out = run("axioms", "--model", "r", "--samples", "10000", "--mutations", "--id", "TS3")
    assert code == 1 and out.startswith("TS3~ FAILS at=")


@pytest.mark.parametrize("lhs, rhs, sig, code", [
    ("(x0 v x1) + meet(x0, x1)", "x0 + x1", "t", 0),
    ("trunc(x0)", "meet(x0, one)", "u", 0),
    ("x0", "trunc(x0)", "t", 1),
])
def test_free_eq(lhs, rhs, sig, code):
    got, out = run("free-eq", "--lhs", lhs, "--rhs", rhs, "--sig", sig, "--samples", "2000")
    assert got == code
    assert out.startswith("agree" if code == 0 else "differ")


def test_strict_requires_seed():
    code, _ = run("axioms", "--model", "r", "--samples", "10", "--strict")
    assert code == 2
    assert run("axioms", "--model", "r", "--samples", "10", "--strict", "--seed", "3")[0] == 0


def test_output_is_deterministic():
    argv = ("axioms", "--model", "r", "--samples", "2000", "--mutations", "--seed", "9")
    assert run(*argv) == run(*argv)


def test_every_command_has_help():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.choices and "eval" in a.choices)
    assert set(sub.choices) == set(HELP)
    for name, p in sub.choices.items():
        assert HELP[name] in p.format_help().replace("\n", " ") or p.description == HELP[name]
