import io
import re
import subprocess
import sys

import numpy as np
import pytest

from kufpmul import cli
from kufpmul.bitvec import UBits
from kufpmul.urdhva import partial_terms_4x4


def run(*argv, stdin=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = cli.main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("a,b,expected", [
    ("3F800000", "3F800000", "3F800000 flags=-"),
    ("40000000", "40400000", "40C00000 flags=-"),
    ("7F7FFFFF", "40000000", "7F800000 flags=INF"),
    ("00000000", "3F800000", "00000000 flags=ZERO"),
    ("7FC00000", "3F800000", "7FC00000 flags=NAN"),
])
def test_mul_single(a, b, expected):
    code, out, _ = run("mul", "--format", "single", a, b)
    assert code == 0
    assert out.strip() == expected


def test_mul_double():
    code, out, _ = run("mul", "--format", "double", "3FF8000000000000", "3FF8000000000000")
    assert (code, out.strip()) == (0, "4002000000000000 flags=-")


def test_mul_lowercase_hex_accepted():
    assert run("mul", "3f800000", "40400000")[1].strip() == "40400000 flags=-"


@pytest.mark.parametrize("argv", [
    ["mul", "3F80", "3F800000"],
    ["mul", "3F80000G", "3F800000"],
    ["mul", "3F800000"],
    ["mul", "--format", "double", "3F800000", "3F800000"],
    ["mul", "--format", "bogus", "3F800000", "3F800000"],
    ["mul", "--threshold", "9", "3F800000", "3F800000"],
])
def test_mul_usage_errors_exit_2(argv, capsys):
    code, out, err = run(*argv)
    assert code == 2
    assert out == ""
    assert err or capsys.readouterr().err


def test_batch_file_keeps_order(tmp_path):
    f = tmp_path / "pairs.txt"
    f.write_text("# header comment\n3F800000 3F800000\n\n40000000 40400000\n"
                 "   # indented comment\n7F7FFFFF 40000000\n")
    code, out, _ = run("mul", "--file", str(f))
    assert code == 0
    assert out.splitlines() == ["3F800000 flags=-", "40C00000 flags=-", "7F800000 flags=INF"]


def test_batch_file_matches_single_calls(tmp_path, rng):
    pats = rng.integers(0, 2**32, size=(50, 2), dtype="uint64").tolist()
    f = tmp_path / "pairs.txt"
    f.write_text("".join(f"{a:08X} {b:08X}\n" for a, b in pats))
    code, out, _ = run("mul", "--file", str(f))
    assert code == 0
    singles = [run("mul", f"{a:08X}", f"{b:08X}")[1].strip() for a, b in pats]
    assert out.splitlines() == singles


def test_batch_stdin(monkeypatch):
    code, out, _ = run("mul", "--file", "-", stdin="3F800000 40000000\n", monkeypatch=monkeypatch)
    assert (code, out.strip()) == (0, "40000000 flags=-")


def test_batch_bad_line_reports_line_number(tmp_path):
    f = tmp_path / "pairs.txt"
    f.write_text("3F800000 3F800000\n3F800000\n")
    code, _, err = run("mul", "--file", str(f))
    assert code == 2
    assert "line 2" in err


def test_batch_missing_file_is_usage_error(tmp_path):
    assert run("mul", "--file", str(tmp_path / "nope.txt"))[0] == 2


def test_batch_wide_format_uses_structural_path(tmp_path):
    fmt = "custom:15:64:16383"
    one = "3FFF" + "0" * 16
    f = tmp_path / "pairs.txt"
    f.write_text(f"{one} {one}\n")
    code, out, _ = run("mul", "--format", fmt, "--file", str(f))
    assert code == 0
    assert out.strip() == f"{one} flags=-"


def test_trace_identity_has_zero_shift():
    code, out, _ = run("trace", "3F800000", "3F800000")
    assert code == 0
    assert "normalize: shift 0, exponent 127" in out
    assert out.splitlines()[-1] == "3F800000 flags=-"


def test_trace_overflow_bit_shifts_right():
    code, out, _ = run("trace", "3FC00000", "3FC00000")
    assert code == 0
    assert "overflow bit set, right shift 1, exponent -> 128" in out
    assert out.splitlines()[-1] == "40100000 flags=-"


def test_trace_leaf_terms_match_column_sums():
    code, out, _ = run("trace", "--threshold", "4", "--format", "custom:4:7:7", "3C0", "3C0")
    assert code == 0
    leaves = re.findall(r"urdhva 4x4: a=0x([0-9a-f]+) b=0x([0-9a-f]+)\n\s+(t0=.*)", out)
    assert len(leaves) == 3
    for a, b, terms in leaves:
        t = partial_terms_4x4(UBits(4, int(a, 16)), UBits(4, int(b, 16)))
        got = [int(v) for v in re.findall(r"t\d+=(\d+)", terms)]
        assert got == [int(x) for x in t.terms()]


def test_trace_bad_operand():
    assert run("trace", "XYZ", "3F800000")[0] == 2


def test_verify_urdhva4():
    code, out, _ = run("verify", "urdhva4")
    assert (code, out.strip()) == (0, "256/256 pass")


def test_verify_urdhva8():
    code, out, _ = run("verify", "urdhva8")
    assert (code, out.strip()) == (0, "65536/65536 pass")


@pytest.mark.parametrize("scope", ["karatsuba:24:500", "karatsuba:64:500", "karatsuba:80:50"])
def test_verify_karatsuba(scope):
    code, out, _ = run("verify", scope)
    total = scope.rsplit(":", 1)[1]
    assert (code, out.strip()) == (0, f"{total}/{total} pass")


@pytest.mark.parametrize("scope", ["fp:single:2000", "fp:double:2000", "fp:custom:5:10:15:2000"])
def test_verify_fp(scope):
    code, out, _ = run("verify", scope, "--seed", "3")
    assert (code, out.strip()) == (0, "2000/2000 pass")


def test_verify_normals_only():
    assert run("verify", "fp:single:1000", "--normals-only")[0] == 0


@pytest.mark.parametrize("backend", ["numba", "numpy"])
def test_verify_backend_choice(backend):
    if backend not in cli.kernels.available_backends():
        pytest.skip("backend unavailable")
    assert run("verify", "fp:single:500", "--backend", backend)[0] == 0


def test_verify_seed_is_deterministic():
    a = cli.random_operands(np.random.default_rng(7), 53, 20)
    b = cli.random_operands(np.random.default_rng(7), 53, 20)
    assert a == b


def test_verify_failure_exits_1(monkeypatch):
    monkeypatch.setattr(cli, "fp_multiply_ref", lambda a, b, *args: (0, 0))
    code, out, _ = run("verify", "fp:single:10", "--seed", "1")
    assert code == 1
    lines = out.splitlines()
    assert re.fullmatch(r"\d+/10 pass", lines[0])
    assert lines[1].startswith("first failure:")


@pytest.mark.parametrize("scope", ["nope", "karatsuba:16", "karatsuba:x:10", "fp:weird:10", "fp:single:0"])
def test_verify_bad_scope_exit_2(scope):
    assert run("verify", scope)[0] == 2


def test_bench_header_and_leaf_counts():
    code, out, _ = run("bench", "--widths", "16,32", "--thresholds", "8,4", "--trials", "50")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == cli.BENCH_HEADER
    rows = {(int(r[0]), int(r[1])): int(r[2]) for r in (ln.split(",") for ln in lines[1:])}
    assert rows == {(16, 8): 3, (32, 8): 9, (16, 4): 9, (32, 4): 27}
    for ln in lines[1:]:
        assert float(ln.split(",")[3]) > 0


def test_bench_extended_columns():
    code, out, _ = run("bench", "--widths", "16", "--thresholds", "8", "--trials", "20", "--extended")
    assert code == 0
    head = out.splitlines()[0].split(",")
    assert head[:4] == cli.BENCH_HEADER.split(",")
    assert "word_adds" in head


def test_bench_bad_list():
    assert run("bench", "--widths", "a,b")[0] == 2


def test_cost_text_and_csv():
    code, out, _ = run("cost", "--width", "16,32", "--threshold", "8")
    assert code == 0
    assert "leaf_multiplies: 3" in out and "leaf_multiplies: 9" in out
    code, out, _ = run("cost", "--width", "16", "--csv")
    assert out.splitlines()[1].startswith("16,8,3,")


def test_help_exits_zero():
    assert run("--help")[0] == 0


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "kufpmul", "mul", "3F800000", "40400000"],
                       capture_output=True, text=True)
    assert p.returncode == 0
    assert p.stdout.strip() == "40400000 flags=-"
