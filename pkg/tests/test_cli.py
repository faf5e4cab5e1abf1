"""End-to-end command-line tests.

Each test drives run() with an argv list and checks stdout plus the exit
code; a couple of subprocess tests confirm the installed entry point.
Exit codes: 0 success, 1 domain error, 2 verification failure, 3 budget
exhaustion.
"""

import json
import subprocess
import sys

import pytest

from polarcover.cli import run
from polarcover.counting import count_ti
from polarcover.ovoid import EXACT, OvoidSet, read_ovoid, verify, write_ovoid


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(scope="module")
def qplus32_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "qplus32.txt"
    assert run(["construct", "qplus32", "Q+(5,2)", "--out", str(path)]) == 0
    return str(path)


class TestSpaceInfo:
    def test_text(self, capsys):
        code, out, _ = invoke(capsys, "space", "info", "W(5,2)")
        assert code == 0
        assert "symplectic, rank 3 over GF(2)" in out
        assert "points 63, generators 135" in out

    def test_json(self, capsys):
        code, out, _ = invoke(capsys, "space", "info", "Q-(5,3)",
                              "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["kind"] == "elliptic"
        assert payload["rank"] == 2
        assert payload["e2"] == 4
        assert list(payload) == sorted(payload)


class TestCount:
    def test_bare_number(self, capsys):
        code, out, _ = invoke(capsys, "count", "W(5,2)", "--dim", "3")
        assert code == 0
        assert out.strip() == "135"

    def test_agrees_with_library(self, capsys):
        # (2^5 + 1)(2^4 - 1)/(2^2 - 1) = 165 points on H(4,4)
        _, out, _ = invoke(capsys, "count", "H(4,4)", "--dim", "1")
        assert int(out.strip()) == 165
        assert int(out.strip()) == count_ti("hermitian-even", 2, 1, 4)

    def test_bad_descriptor(self, capsys):
        code, _, err = invoke(capsys, "count", "Z(5,2)", "--dim", "1")
        assert code == 1
        assert err.startswith("error:")
        assert "\n" not in err.strip()

    def test_bad_dimension(self, capsys):
        code, _, err = invoke(capsys, "count", "W(5,2)", "--dim", "9")
        assert code == 1
        assert err.startswith("error:")


class TestEnumerate:
    def test_lists_generators(self, capsys):
        code, out, _ = invoke(capsys, "enumerate", "Q+(3,2)", "--dim", "2")
        rows = out.strip().splitlines()
        assert code == 0
        assert len(rows) == 6
        assert rows == sorted(rows)

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "lines.txt"
        code, out, _ = invoke(capsys, "enumerate", "Q+(3,2)", "--dim", "2",
                              "--out", str(path))
        assert code == 0
        assert "6 subspaces" in out
        assert len(path.read_text().strip().splitlines()) == 6


class TestBound:
    def test_bm(self, capsys):
        code, out, _ = invoke(capsys, "bound", "bm", "--p", "2", "--n", "6")
        assert code == 0
        assert "value = 7" in out
        assert "weak = 8" in out

    def test_rk_json_exact_value(self, capsys):
        code, out, _ = invoke(capsys, "bound", "rk", "--p", "2", "--h", "1",
                              "--r", "3", "--k", "2", "--e2", "2",
                              "--format", "json")
        payload = json.loads(out)
        assert code == 0
        assert payload["value"] == "1029/16"
        assert payload["cap_holds"] is True

    def test_schrijver_floor(self, capsys):
        code, out, _ = invoke(capsys, "bound", "schrijver",
                              "--v", "15", "--deg", "7")
        assert code == 0
        assert "floor = 4479809" in out

    def test_missing_action(self, capsys):
        code, _, err = invoke(capsys, "bound")
        assert code == 1
        assert err.startswith("error:")


class TestThreshold:
    def test_found(self, capsys):
        code, out, _ = invoke(capsys, "threshold", "--p", "2", "--k", "1",
                              "--e2", "0")
        assert code == 0
        assert out.strip() == "r* = 5"

    def test_unknown_rendering(self, capsys, monkeypatch):
        import polarcover.cli as cli
        monkeypatch.setattr(cli, "nonexistence_rank_threshold",
                            lambda *a, **kw: None)
        code, out, _ = invoke(capsys, "threshold", "--p", "2", "--k", "1",
                              "--e2", "0")
        assert code == 0
        assert out.strip() == "UNKNOWN"

    def test_bad_window(self, capsys):
        code, _, err = invoke(capsys, "threshold", "--p", "2", "--k", "1",
                              "--e2", "0", "--window", "-1")
        assert code == 1
        assert err.startswith("error:")

    def test_json_status(self, capsys):
        _, out, _ = invoke(capsys, "threshold", "--p", "3", "--k", "1",
                           "--e2", "2", "--format", "json")
        payload = json.loads(out)
        assert payload["status"] == "FOUND"
        assert payload["threshold"] >= 2


class TestOvoidVerify:
    def test_exact(self, capsys, qplus32_file):
        code, out, _ = invoke(capsys, "ovoid", "verify", qplus32_file)
        assert code == 0
        assert out.startswith("EXACT")

    def test_subset_is_invalid(self, capsys, qplus32_file, tmp_path):
        ovo = read_ovoid(qplus32_file)
        sub = OvoidSet.build(ovo.space, ovo.members[:10])
        path = tmp_path / "subset.txt"
        write_ovoid(path, sub)
        code, out, _ = invoke(capsys, "ovoid", "verify", str(path))
        assert code == 2
        assert out.startswith("INVALID")

    def test_subset_passes_partial(self, capsys, qplus32_file, tmp_path):
        ovo = read_ovoid(qplus32_file)
        sub = OvoidSet.build(ovo.space, ovo.members[:10])
        path = tmp_path / "subset.txt"
        write_ovoid(path, sub)
        code, out, _ = invoke(capsys, "ovoid", "verify", str(path),
                              "--partial")
        assert code == 0
        assert out.startswith("PARTIAL")

    def test_space_crosscheck(self, capsys, qplus32_file):
        code, _, err = invoke(capsys, "ovoid", "verify", qplus32_file,
                              "--space", "W(5,2)")
        assert code == 1
        assert "Q+(5,2)" in err and "W(5,2)" in err

    def test_space_crosscheck_match(self, capsys, qplus32_file):
        code, _, _ = invoke(capsys, "ovoid", "verify", qplus32_file,
                            "--space", "Q+(5,2)")
        assert code == 0

    def test_empty_file(self, capsys, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("")
        code, _, err = invoke(capsys, "ovoid", "verify", str(path))
        assert code == 1
        assert err.startswith("error:")

    def test_garbage_file(self, capsys, tmp_path):
        path = tmp_path / "garbage.txt"
        path.write_text("not an ovoid\nat all\n")
        code, _, err = invoke(capsys, "ovoid", "verify", str(path))
        assert code == 1

    def test_missing_file(self, capsys):
        code, _, err = invoke(capsys, "ovoid", "verify", "/nonexistent.txt")
        assert code == 1

    def test_json_fields(self, capsys, qplus32_file):
        _, out, _ = invoke(capsys, "ovoid", "verify", qplus32_file,
                           "--format", "json")
        payload = json.loads(out)
        assert payload["status"] == "EXACT"
        assert payload["size"] == 15
        assert payload["type"] == "2^15"
        assert payload["generators_checked"] == 30


class TestOvoidType:
    def test_type_line(self, capsys, qplus32_file):
        code, out, _ = invoke(capsys, "ovoid", "type", qplus32_file)
        assert code == 0
        assert out.strip() == "2^15"


class TestOvoidReduce:
    def test_pairwise_witness(self, capsys, qplus32_file):
        code, out, _ = invoke(capsys, "ovoid", "reduce", qplus32_file,
                              "--mode", "pairwise")
        assert code == 0
        assert out.startswith("reducible (pairwise)")

    def test_json_members_sorted(self, capsys, qplus32_file):
        _, out, _ = invoke(capsys, "ovoid", "reduce", qplus32_file,
                           "--format", "json")
        payload = json.loads(out)
        assert payload["reducible"] is True
        selected = payload["members_selected"]
        assert selected == sorted(selected)


class TestConstruct:
    def test_roundtrip(self, capsys, qplus32_file):
        # the whole workflow: construct, write, verify, exit 0
        ovo = read_ovoid(qplus32_file)
        assert len(ovo) == 15
        report = verify(ovo.space, ovo, rule=EXACT, generator_budget=None)
        assert report.status == EXACT

    def test_all_generators(self, capsys):
        code, out, _ = invoke(capsys, "construct", "all-generators",
                              "Q+(3,2)")
        assert code == 0
        assert "6 members" in out and "EXACT" in out

    def test_embedded_then_quotient(self, capsys, tmp_path):
        path = tmp_path / "embedded.txt"
        code, out, _ = invoke(capsys, "construct", "embedded", "Q+(5,2)",
                              "--out", str(path))
        assert code == 0
        assert "15 members" in out
        code, out, _ = invoke(capsys, "construct", "quotient", "Q+(5,2)",
                              "--ovoid", str(path))
        assert code == 0
        assert "6 members" in out
        assert "kept = 6" in out

    def test_quotient_needs_file(self, capsys):
        code, _, err = invoke(capsys, "construct", "quotient", "Q+(5,2)")
        assert code == 1
        assert "--ovoid" in err

    def test_matching_seeded(self, capsys):
        code, out, _ = invoke(capsys, "construct", "matching", "Q+(5,2)",
                              "--seed", "7", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["size"] == 15
        assert payload["verification"]["status"] == "EXACT"

    def test_product(self, capsys, tmp_path):
        points = tmp_path / "points.txt"
        assert run(["search", "homogeneous", "Q+(5,2)", "--k", "1",
                    "--out", str(points)]) == 0
        capsys.readouterr()
        code, out, _ = invoke(capsys, "construct", "product", "Q+(5,2)",
                              "--outer", str(points), "--inner-dim", "1")
        assert code == 0
        assert "15 members" in out

    def test_product_needs_flags(self, capsys):
        code, _, err = invoke(capsys, "construct", "product", "Q+(5,2)")
        assert code == 1
        assert "--outer" in err

    def test_qplus32_descriptor_check(self, capsys):
        code, _, err = invoke(capsys, "construct", "qplus32", "W(5,2)")
        assert code == 1
        assert "hyperbolic" in err

    def test_msystem32_descriptor_check(self, capsys):
        code, _, err = invoke(capsys, "construct", "msystem32", "Q+(7,2)")
        assert code == 1
        assert "Q-(7,2)" in err

    def test_unknown_name(self, capsys):
        code, _, err = invoke(capsys, "construct", "nonsense", "Q+(5,2)")
        assert code == 1

    def test_report_json(self, capsys):
        code, out, _ = invoke(capsys, "construct", "embedded", "Q+(5,2)",
                              "--report", "json")
        payload = json.loads(out)
        assert code == 0
        assert payload["auxiliary"]["section_space"] == "Q(4,2)"

    def test_verify_written_file(self, capsys, tmp_path):
        path = tmp_path / "matched.txt"
        assert run(["construct", "matching", "Q+(5,2)",
                    "--out", str(path)]) == 0
        capsys.readouterr()
        code, out, _ = invoke(capsys, "ovoid", "verify", str(path))
        assert code == 0
        assert out.startswith("EXACT")


class TestSearch:
    def test_min_optimal(self, capsys):
        code, out, _ = invoke(capsys, "search", "min", "Q+(5,2)",
                              "--dims", "1", "--deterministic")
        assert code == 0
        assert "status OPTIMAL, size 5" in out

    def test_min_budget_exhausted(self, capsys):
        code, out, _ = invoke(capsys, "search", "min", "W(5,2)",
                              "--dims", "1,2,3", "--budget-nodes", "5",
                              "--deterministic")
        assert code == 3
        assert "BUDGET_EXHAUSTED" in out

    def test_min_feasible_witness(self, capsys, tmp_path):
        path = tmp_path / "witness.txt"
        code, out, _ = invoke(capsys, "search", "min", "W(5,2)",
                              "--dims", "1,2,3", "--budget-nodes", "50000",
                              "--deterministic", "--out", str(path))
        assert code == 0
        assert "FEASIBLE, size 21" in out
        ovo = read_ovoid(str(path))
        assert verify(ovo.space, ovo, generator_budget=None).status == EXACT

    def test_homogeneous_infeasible(self, capsys):
        code, out, _ = invoke(capsys, "search", "homogeneous", "W(5,2)",
                              "--k", "1", "--deterministic")
        assert code == 0
        assert "INFEASIBLE" in out

    def test_warm_start(self, capsys, tmp_path):
        points = tmp_path / "points.txt"
        assert run(["search", "homogeneous", "Q+(5,2)", "--k", "1",
                    "--out", str(points)]) == 0
        capsys.readouterr()
        code, out, _ = invoke(capsys, "search", "homogeneous", "Q+(5,2)",
                              "--k", "1", "--warm-start", str(points),
                              "--deterministic")
        assert code == 0
        assert "backend warm-start" in out
        assert "nodes 0" in out

    def test_deterministic_json_is_byte_stable(self, capsys):
        _, first, _ = invoke(capsys, "search", "min", "Q+(5,2)",
                             "--dims", "1", "--format", "json",
                             "--deterministic")
        _, second, _ = invoke(capsys, "search", "min", "Q+(5,2)",
                              "--dims", "1", "--format", "json",
                              "--deterministic")
        assert first == second
        assert "seconds" not in json.loads(first)["stats"]

    def test_json_keys_sorted(self, capsys):
        _, out, _ = invoke(capsys, "search", "min", "Q+(5,2)",
                           "--dims", "1", "--format", "json",
                           "--deterministic")
        payload = json.loads(out)
        assert list(payload) == sorted(payload)
        assert list(payload["stats"]) == sorted(payload["stats"])

    def test_bad_dims(self, capsys):
        code, _, err = invoke(capsys, "search", "min", "W(5,2)",
                              "--dims", "4")
        assert code == 1
        assert err.startswith("error:")


class TestPlumbing:
    def test_no_args_prints_help(self, capsys):
        code, out, _ = invoke(capsys)
        assert code == 0
        assert "polarcover" in out

    def test_help_flag(self, capsys):
        code, _, _ = invoke(capsys, "--help")
        assert code == 0

    def test_unknown_command(self, capsys):
        code, _, err = invoke(capsys, "frobnicate")
        assert code == 1
        assert err.startswith("error:")

    def test_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "polarcover.cli", "count", "W(5,2)",
             "--dim", "3"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert proc.stdout.strip() == "135"

    def test_entry_point_error_is_stderr(self):
        proc = subprocess.run(
            [sys.executable, "-m", "polarcover.cli", "count", "Z(9,9)",
             "--dim", "1"],
            capture_output=True, text=True)
        assert proc.returncode == 1
        assert proc.stdout == ""
        assert proc.stderr.startswith("error:")
