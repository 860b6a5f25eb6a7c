import io
import subprocess
import sys

import pytest

from decor import lemmas
from decor.cli import main
from decor.lemmas import data_dir

STATE = """\
type V;
location X : V;
pure c : 1 -> V;
pure s : V -> V;
inhabit V = c;
"""

EXC = """\
type V;
exception T : V;
pure c : V -> 0;
pure s : V -> V;
inhabit V = c;
"""

MODEL = """\
model state;
carrier V = 0 1;
table c { * -> 0; }
table s { 0 -> 1; 1 -> 0; }
"""


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in (("st.sig", STATE), ("exc.sig", EXC), ("m.mdl", MODEL)):
        p = tmp_path / name
        p.write_text(text)
        paths[name] = str(p)
    paths["dir"] = tmp_path
    return paths


def run(*argv):
    out = io.StringIO()
    code = main([*argv], out)
    return code, out.getvalue()


def fields(text):
    keys = {}
    for line in text.splitlines():
        if line and not line.startswith(" "):
            k, _, v = line.partition(":")
            keys[k] = v.strip()
    return keys


def test_check_ok():
    d = data_dir()
    code, out = run("--format", "structured", "check", str(d / "lemmas.sig"),
                    str(d / "update_lookup.drv"))
    assert code == 0
    f = fields(out)
    assert f["command"] == "check" and f["verdict"] == "ok" and "time" in f


def test_check_rejected(files):
    bad = files["dir"] / "bad.drv"
    bad.write_text("theory L_st;\n1: lookupdate { X = X } from [] |- lkp[X] . upd[X] == id(V);\n")
    code, out = run("--format", "structured", "check", files["st.sig"], str(bad))
    assert code == 1
    f = fields(out)
    assert f["verdict"] == "rejected" and f["step"] == "1"


def test_empty_derivation(files):
    empty = files["dir"] / "empty.drv"
    empty.write_text("")
    assert run("check", files["st.sig"], str(empty))[0] == 0


def test_decide_equivalent_round_trip(files):
    cert = files["dir"] / "cert.drv"
    code, out = run("--format", "structured", "decide", files["st.sig"],
                    "upd[X] . lkp[X] == id(1)", "--emit-cert", str(cert))
    assert code == 0 and fields(out)["certificate"] == str(cert)
    assert run("check", files["st.sig"], str(cert))[0] == 0


def test_decide_not_equivalent(files):
    code, out = run("--format", "structured", "decide", files["st.sig"],
                    "lkp[X] . upd[X] == id(V)")
    assert code == 1
    f = fields(out)
    assert f["verdict"] == "not-equivalent" and "countermodel" in f
    assert "witness input: (0, (1))" in out


def test_decide_unknown(files):
    sig = files["dir"] / "ax.sig"
    sig.write_text(STATE + "pure t : V -> V;\naxiom comm : s . t == t . s;\n")
    code, _ = run("decide", str(sig), "s . lkp[X] == t . lkp[X]")
    assert code == 3
    code, _ = run("decide", str(sig), "s . lkp[X] == t . lkp[X]", "--oracle", "semantic",
                  "--max-size", "2")
    assert code == 1


def test_decide_exceptions(files):
    assert run("decide", files["exc.sig"], "tag[T] . untag[T] == id(0)")[0] == 0
    assert run("decide", files["exc.sig"], "untag[T] . tag[T] == id(V)")[0] == 1


@pytest.mark.parametrize("argv", [
    ("decide", "{sig2}", "lkp[X] == lkp[Y]"),
    ("decide", "{st}", "id(V) == id(V)", "--theory", "mon"),
    ("reduce", "{exc}", "tag[T] == tag[T]"),
])
def test_fragment_exit(files, argv):
    sig2 = files["dir"] / "two.sig"
    sig2.write_text("type V; location X : V; location Y : V; pure c : 1 -> V; inhabit V = c;")
    argv = [a.format(sig2=sig2, st=files["st.sig"], exc=files["exc.sig"]) for a in argv]
    assert run(*argv)[0] == 4


def test_missing_inhabitant_is_fragment(files):
    sig = files["dir"] / "noinh.sig"
    sig.write_text("type V; location X : V;")
    assert run("decide", str(sig), "lkp[X] . upd[X] == id(V)")[0] == 4


@pytest.mark.parametrize("eq", ["lkp[X] . upd[X] ==", "lkp[Y] == lkp[Y]", "upd[X] == lkp[X]"])
def test_parse_errors(files, eq):
    code, out = run("decide", files["st.sig"], eq)
    assert code == 2 and "parse" in out


def test_missing_file(files):
    assert run("check", files["st.sig"], "/nonexistent.drv")[0] == 2


def test_normalize(files):
    cert = files["dir"] / "n.drv"
    code, out = run("--format", "structured", "normalize", files["st.sig"],
                    "upd[X] . lkp[X] . upd[X]", "--emit-cert", str(cert))
    assert code == 0
    assert fields(out)["canonical"] == "final(V) . lkp[X] . upd[X] . id(V)"
    assert run("check", files["st.sig"], str(cert))[0] == 0


def test_normalize_exceptions(files):
    cert = files["dir"] / "e.drv"
    code, out = run("--format", "structured", "normalize", files["exc.sig"],
                    "tag[T] . untag[T] . tag[T]", "--emit-cert", str(cert))
    assert code == 0
    assert run("check", files["exc.sig"], str(cert))[0] == 0


def test_reduce_writes_both_certificates(files):
    cert = files["dir"] / "r.drv"
    code, out = run("--format", "structured", "reduce", files["st.sig"],
                    "upd[X] == final(V)", "--emit-cert", str(cert))
    assert code == 0
    back = files["dir"] / "r.backward.drv"
    assert back.exists() and fields(out)["backward"] == str(back)
    assert run("check", files["st.sig"], str(cert))[0] == 0
    assert run("check", files["st.sig"], str(back))[0] == 0


def test_eval_table(files):
    code, out = run("--format", "structured", "eval", files["st.sig"], "s . lkp[X]",
                    "--model", files["m.mdl"])
    assert code == 0
    rows = [ln.strip() for ln in out.splitlines() if ln.startswith("  ")]
    assert rows == ["(*, (0)) -> (1, (0))", "(*, (1)) -> (0, (1))"]


def test_eval_bad_model(files):
    bad = files["dir"] / "bad.mdl"
    bad.write_text("model state; carrier V = 0;")
    assert run("eval", files["st.sig"], "c", "--model", str(bad))[0] == 2


def test_dualize_signature(tmp_path):
    d = data_dir()
    out = tmp_path / "x.sig"
    args = ["dualize", str(d / "state_axioms.sig"), "-o", str(out)]
    for m in lemmas.AXIOM_MAP:
        args += ["--map", m]
    assert run(*args)[0] == 0
    assert out.read_text() == (d / "exc_axioms.sig").read_text()


def test_dualize_derivation(tmp_path):
    d = data_dir()
    out = tmp_path / "x.drv"
    args = ["dualize", str(d / "state_axioms.drv"), "--sig", str(d / "state_axioms.sig"),
            "-o", str(out)]
    for m in lemmas.AXIOM_MAP:
        args += ["--map", m]
    assert run(*args)[0] == 0
    assert out.read_text() == (d / "exc_axioms.drv").read_text()
    assert run("check", str(d / "exc_axioms.sig"), str(out))[0] == 0


def test_text_format(files):
    code, out = run("decide", files["st.sig"], "upd[X] . lkp[X] == id(1)")
    assert code == 0 and "verdict  equivalent" in out


def test_module_entry_point(files):
    p = subprocess.run([sys.executable, "-m", "decor", "decide", files["st.sig"],
                        "lkp[X] . upd[X] ~~ id(V)"], capture_output=True, text=True)
    assert p.returncode == 0, p.stderr
