import json
import math
import subprocess
import sys

import pytest

from tanmono.cli import main, parse_complex


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_complex():
    assert parse_complex("-1") == -1
    assert parse_complex("-1+0.5i") == complex(-1, 0.5)
    assert parse_complex("10,10") == complex(10, 10)


def test_critical_points_tan(capsys):
    code, out, _ = run(["critical-points", "--family", "tan", "--kmax", "3"], capsys)
    rows = out.strip().splitlines()[1:]
    assert code == 0 and len(rows) == 7
    assert all(r.split()[-1] == "3" for r in rows)


def test_critical_points_cubic(capsys):
    code, out, _ = run(["critical-points", "--family", "cubic"], capsys)
    rows = out.strip().splitlines()[1:]
    assert code == 0 and len(rows) == 2 and all(r.split()[-1] == "2" for r in rows)


def test_critical_points_kmax_zero(capsys):
    code, _, err = run(["critical-points", "--kmax", "0"], capsys)
    assert code == 1 and "kmax" in err


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["census", "--a", "nonsense"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1


def test_census_rouche(capsys):
    code, out, _ = run(["census", "--a", "0", "--verify-rouche", "3"], capsys)
    assert code == 0
    assert "total with multiplicity: 7" in out
    assert "all real: yes" in out


def test_census_conjugate_pair(capsys):
    code, out, _ = run(["census", "--a", "-1"], capsys)
    assert code == 0 and "1 conjugate pair" in out


def test_census_empty_box(capsys):
    code, out, _ = run(["census", "--a", "0", "--rect-center", "10,10", "--rect-half", "0.5,0.5"], capsys)
    assert code == 0 and "total with multiplicity: 0" in out


def test_census_contour_failure_exit_2(capsys):
    # sin and cos overflow at |Im x| = 800, so no nudge can rescue the count
    code, _, err = run(["census", "--a", "0", "--rect-half", "3,800"], capsys)
    assert code == 2 and "numerical failure" in err and "not finite" in err


def test_track_constant_path(tmp_path, capsys):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"basepoint": [-1, 0], "segments": [], "closed": True}))
    code, out, _ = run(["track", "--path", str(f)], capsys)
    assert code == 0 and out.strip() == "()"


def test_loop_then_track_three_cycle(tmp_path, capsys):
    f = tmp_path / "loop0.json"
    code, _, _ = run(["loop", "--critical-value", "0", "--out", str(f)], capsys)
    assert code == 0
    csv_path, svg_path = tmp_path / "t.csv", tmp_path / "t.svg"
    code, out, _ = run(["track", "--path", str(f), "--csv", str(csv_path), "--figure", str(svg_path)], capsys)
    assert code == 0
    assert out.strip() == "(c_1 z_0 c_2)"
    assert csv_path.read_text().startswith("t,a_re,a_im,label,x_re,x_im,residual\n")
    assert svg_path.read_text().startswith("<?xml")


def test_loop_prints_json(capsys):
    code, out, _ = run(["loop", "--target", "2", "--sides", "ABOVE"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["loop"]["target_index"] == 2 and doc["loop"]["detour_sides"] == ["ABOVE"]


def test_loop_rejects_non_critical_value(capsys):
    code, _, err = run(["loop", "--critical-value", "-1.5"], capsys)
    assert code == 1


def test_track_invalid_path_file(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text('{"basepoint": [-1, 0],\n "segments": [')
    code, _, err = run(["track", "--path", str(f)], capsys)
    assert code == 1 and "line 2" in err
    f.write_text(json.dumps({"basepoint": [-1, 0], "segments": [{"kind": "LINE", "start": [-1, 0]}]}))
    code, _, err = run(["track", "--path", str(f)], capsys)
    assert code == 1 and "segments[0]" in err


def test_track_refuses_basepoint_near_critical_value(tmp_path, capsys):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"basepoint": [-math.pi + 0.03, 0], "segments": []}))
    code, _, err = run(["track", "--path", str(f)], capsys)
    assert code == 1 and "within 0.05" in err


def test_certify_tan(tmp_path, capsys):
    report = tmp_path / "r.json"
    code, out, _ = run(["certify", "--family", "tan", "--nmax", "4", "--report", str(report)], capsys)
    assert code == 0
    assert "conclusion: no elementary solution" in out
    doc = json.loads(report.read_text())
    assert doc["conclusion"] == "no elementary solution"
    assert doc["group_order"] == 60


def test_certify_cubic(capsys):
    code, out, _ = run(["certify", "--family", "cubic"], capsys)
    assert code == 0 and "conclusion: no obstruction found" in out


def test_certify_absurd_tolerance(tmp_path, capsys):
    report = tmp_path / "r.json"
    code, out, err = run(["certify", "--family", "tan", "--nmax", "2", "--tol", "residual_tol=1e-40",
                          "--report", str(report)], capsys)
    assert code == 2
    assert "conclusion" not in out
    assert not report.exists()


def test_certify_config_file_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"family": "quintic", "report": str(tmp_path / "from_file.json")}))
    code, out, _ = run(["certify", "--config", str(cfg), "--family", "cubic"], capsys)
    assert code == 0 and "no obstruction found" in out
    assert json.loads((tmp_path / "from_file.json").read_text())["family"]["kind"] == "CUBIC_VALIDATION"


def test_certify_bad_config(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"clearance": 0.5}))
    code, _, err = run(["certify", "--config", str(cfg)], capsys)
    assert code == 1 and "clearance" in err


def test_certify_figures(tmp_path, capsys):
    figs = tmp_path / "figs"
    code, _, _ = run(["certify", "--family", "cubic", "--figures", str(figs)], capsys)
    assert code == 0
    assert sorted(p.name for p in figs.iterdir()) == ["loop_0.csv", "loop_0.svg", "loop_1.csv", "loop_1.svg"]


def test_plot(tmp_path, capsys):
    path = tmp_path / "p.json"
    run(["loop", "--target", "2", "--sides", "ABOVE", "--out", str(path)], capsys)
    csv_path = tmp_path / "t.csv"
    run(["track", "--path", str(path), "--csv", str(csv_path)], capsys)
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert run(["plot", str(csv_path), str(a)], capsys)[0] == 0
    assert run(["plot", str(csv_path), str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_plot_errors(tmp_path, capsys):
    empty = tmp_path / "e.csv"
    empty.write_text("")
    code, _, err = run(["plot", str(empty), str(tmp_path / "e.svg")], capsys)
    assert code == 1
    bad = tmp_path / "m.csv"
    bad.write_text("t,a_re,a_im,label,x_re,x_im,residual\n0,1,0,z_1,1,0,0\n0.5,1,0,z_1,oops,0,0\n")
    code, _, err = run(["plot", str(bad), str(tmp_path / "m.svg")], capsys)
    assert code == 1 and "line 3" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tanmono", "critical-points", "--kmax", "0"],
                          capture_output=True, text=True)
    assert proc.returncode == 1
