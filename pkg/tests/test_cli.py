from __future__ import annotations

import io
import shlex
import subprocess
import sys
from pathlib import Path

import pytest

from mvf.ake import Verdict
from mvf.cli import EXIT_ERROR, EXIT_NO, EXIT_OK, EXIT_UNKNOWN, main
from mvf.config import ConfigError, Workspace, load_workspace

DEMO = Path(__file__).resolve().parent.parent / "demo" / "workspace.cfg"


def run(cmd: str, fmt: str = "records") -> tuple[int, str]:
    out = io.StringIO()
    code = main(shlex.split(cmd) + ["--config", str(DEMO), "--format", fmt], out)
    return code, out.getvalue()


def record(text: str) -> dict:
    line = text.strip().splitlines()[0]
    return dict(tok.split("=", 1) for tok in shlex.split(line))


# configuration -------------------------------------------------------------


def test_demo_workspace_loads():
    ws = load_workspace([DEMO])
    assert set(ws.fields) >= {"K", "F", "A", "D2", "D4"}
    assert ws.fields["D4"].dg is not None
    assert ws.structures["Fg"].gauss
    assert "R+" in ws.grouptheories


@pytest.mark.parametrize(
    "text",
    [
        "group g = <2, 3>\ngroup g = <5, 7>",
        "field K = (group: nowhere, residue: Q)",
        "structure M = hahn(<2, 3>, s)",
        "auto g = gauss(s, a = 2)",
        "frobnicate x = 1",
        "group g = <2, -3>",
        "this is not a declaration",
        "field K = (group: <2, 3>)",
        "auto u = twist(2 => -1)\nstructure M = hahn(<2, 3>, u)",
        "auto g = gauss(id, a = t^(1/2))\nstructure M = hahn(<2, 3>, g)",
        "formula f = d(x,",
        "fieldtheory T = custom(weird=yes)",
    ],
)
def test_config_errors(text):
    with pytest.raises(ConfigError):
        Workspace().load_text(text)


def test_forward_references_are_rejected():
    with pytest.raises(ConfigError):
        Workspace().load_text("field K = (group: later, residue: Q)\ngroup later = <2, 3>")


def test_comments_and_custom_theories():
    ws = Workspace().load_text(
        "# comment\nfieldtheory T = custom(large=yes, fixed=unknown)  # trailing\n"
        "field X = (group: R+, residue: T)\n"
    )
    assert ws.fields["X"].residue.flags.large is True
    assert ws.fields["X"].residue.flags.fixed_point is None


# commands -----------------------------------------------------------------


def test_classify():
    code, out = run("classify K")
    r = record(out)
    assert code == EXIT_OK and r["class"] == "(Th<2, 3>,Q)" and r["shifted"] == "false"
    code, out = run("classify F")
    r = record(out)
    assert code == EXIT_OK and r["class"] == "(Th<2, 3>,Q)" and r["shifted"] == "true"
    code, out = run("classify A")
    assert record(out)["class"] == "(R+,ACF0)"
    assert run("classify D2")[0] == EXIT_UNKNOWN
    assert run("classify nope")[0] == EXIT_ERROR


def test_equiv():
    code, out = run("equiv K F")
    r = record(out)
    assert code == EXIT_OK and r["verdict"] == "yes" and r["cross_check"] == "agree"
    assert run("equiv D2 D3")[0] == EXIT_NO
    assert run("equiv Qd P")[0] == EXIT_NO
    assert run("equiv A R")[0] == EXIT_NO
    assert run("equiv D2 K")[0] == EXIT_ERROR


def test_eval():
    code, out = run("eval phi --structure M --assign x=a --witness grid:1,1")
    r = record(out)
    assert code == EXIT_OK and r["value"] == "1" and r["bound"] == "upper_bound_of_inf"
    code, out = run("eval phi --structure Fg --assign x=ga --witness list:W")
    r = record(out)
    assert r["value"] == "0" and r["witness_y"] == "[X : 1]"
    code, out = run("eval 'dist(inf, [0:1])' --structure M")
    assert code == EXIT_OK and record(out)["value"] == "1"
    code, out = run("eval dinf --structure M --assign x=b")
    assert record(out)["value"] == "2^1 * 3^-1"
    assert record(out)["approx_nonauthoritative"] == "0.666667"
    assert run("eval d(x, --structure M")[0] == EXIT_ERROR
    assert run("eval dinf --structure M")[0] == EXIT_ERROR


def test_hensel():
    code, out = run("hensel cube 1 --structure M --floor 10^-6")
    r = record(out)
    assert code == EXIT_OK
    assert r["leading"].startswith("1 + (1/3)*t^(1/2)")
    assert int(r["steps"]) <= int(r["step_bound"])
    assert run("hensel '[-2, 0, 1]' 1 --structure M")[0] == EXIT_ERROR
    code, out = run("hensel '[-2 - t^(1/3), 0, 1]' 1 --structure M")
    assert code == EXIT_ERROR


def test_check():
    assert run("check --structure Ms")[0] == EXIT_OK
    code, out = run("check --structure Fg --samples 20")
    assert code == EXIT_OK and "notes" in record(out)
    assert run("check --structure M --auto s --samples 20")[0] == EXIT_OK


def test_pi_and_density():
    code, out = run("pi 5 --n-from 1 --structure M --witness grid:0,1")
    assert code == EXIT_OK and len(out.strip().splitlines()) == 5
    assert all(record(line)["phi"] == "1" for line in out.strip().splitlines())
    assert run("pi 100 --bound 3 --structure M")[0] == EXIT_UNKNOWN
    code, out = run("density dense23 3/10 9/10")
    assert code == EXIT_OK and len(out.strip().splitlines()) == 2
    assert run("density disc2 1/2 --tolerance 1/1000")[0] in (EXIT_OK, EXIT_UNKNOWN)


def test_human_format():
    code, out = run("classify K", fmt="human")
    assert code == EXIT_OK and "class: (Th<2, 3>,Q)" in out


def test_records_are_deterministic():
    cmd = "check --structure Ms --samples 30 --seed 7"
    assert run(cmd)[1] == run(cmd)[1]
    cmd = "eval phi --structure M --assign x=b --witness grid:1,1"
    assert run(cmd)[1] == run(cmd)[1]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mvf", "equiv", "K", "F", "--config", str(DEMO), "--format", "records"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == EXIT_OK
    assert "verdict=yes" in proc.stdout


def test_usage_errors_exit_with_error_code():
    with pytest.raises(SystemExit) as exc:
        main(["classify"])
    assert exc.value.code == EXIT_ERROR


def test_verdict_exit_codes_are_distinct():
    assert len({EXIT_OK, EXIT_NO, EXIT_UNKNOWN, EXIT_ERROR}) == 4
    assert {v.value for v in Verdict} == {"yes", "no", "unknown"}
