import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tanmono.critical import critical_values
from tanmono.errors import GeometryError, ParameterError
from tanmono.families import FunctionFamily
from tanmono.paths import (ArcSegment, LineSegment, LoopSpec, ParamPath, Side, elementary_loop, jitter, paper_path,
                           path_from_json, path_to_json, realized_clearance, validate_path, winding_number)

TAN = FunctionFamily.TAN_MINUS_X
CVS = critical_values(TAN, 6)
SIDES3 = (Side.ABOVE, Side.ABOVE)


def test_elementary_loop_around_zero():
    p = elementary_loop(0j, -1 + 0j, LoopSpec(0, 1, 0.1, 0.1))
    assert p.closed and p.start_point == p.end_point == -1
    assert winding_number(p, 0j) == 1
    assert validate_path(p, CVS) == []
    assert [s.kind for s in p.segments] == ["LINE", "ARC", "LINE"]


def test_winding_two_and_negative():
    p = elementary_loop(0j, -1 + 0j, LoopSpec(0, 2, 0.1, 0.1))
    assert winding_number(p, 0j) == 2
    q = elementary_loop(0j, -1 + 0j, LoopSpec(0, -1, 0.1, 0.1))
    assert winding_number(q, 0j) == -1


def test_corridor_path_geometry():
    p = paper_path(3, 1, detour_sides=SIDES3)
    assert p.loop.detour_sides == SIDES3
    assert winding_number(p, -3 * math.pi + 0j) == 1
    for m in (1, 2):
        assert winding_number(p, -m * math.pi + 0j) == 0
    assert winding_number(p, 0j) == 0
    arcs = [s for s in p.segments if s.kind == "ARC"]
    # two detours out, one circle, two detours back
    assert len(arcs) == 5
    assert all(s.point(0.5).imag > 0 for s in arcs if abs(abs(s.sweep) - math.pi) < 1e-12)
    assert validate_path(p, CVS) == []


def test_below_detours_pass_under():
    p = paper_path(2, 1, detour_sides=(Side.BELOW,))
    semis = [s for s in p.segments if s.kind == "ARC" and abs(abs(s.sweep) - math.pi) < 1e-12]
    assert all(s.point(0.5).imag < 0 for s in semis)


def test_detour_side_count_mismatch():
    with pytest.raises(ParameterError):
        elementary_loop(-2 * math.pi + 0j, -1 + 0j, LoopSpec(2, 1, 0.1, 0.1, ()))


def test_basepoint_too_close():
    with pytest.raises(GeometryError):
        elementary_loop(0j, 0.12 + 0j, LoopSpec(0, 1, 0.1, 0.1))


def test_loop_spec_validation():
    with pytest.raises(ParameterError):
        LoopSpec(1, 3)
    with pytest.raises(ParameterError):
        LoopSpec(1, 1, 0.0, 0.1)


def test_validate_path_reports_clearance():
    p = ParamPath(-1 + 0j, (LineSegment(-1 + 0j, 1 + 0j), LineSegment(1 + 0j, -1 + 0j)))
    v = validate_path(p, CVS)
    assert v and all(x.kind == "clearance" for x in v)
    assert abs(v[0].critical_value) < 1e-12


def test_validate_path_continuity_and_closure():
    p = ParamPath(-1 + 0j, (LineSegment(-1 + 0j, -1 + 1j), LineSegment(-1 + 1.1j, -2 + 0j)))
    kinds = {x.kind for x in validate_path(p, CVS)}
    assert kinds == {"continuity", "closure"}


def test_validate_path_radius_whitelist():
    p = ParamPath(-1 + 0j, (LineSegment(-1 + 0j, -0.2 + 0j), ArcSegment(0j, 0.2, math.pi, 3 * math.pi),
                            LineSegment(-0.2 + 0j, -1 + 0j)))
    assert validate_path(p, CVS) == []
    assert [x.kind for x in validate_path(p, CVS, radii={0.1})] == ["radius"]


def test_reverse_and_then():
    p = paper_path(1)
    r = p.reversed()
    assert winding_number(r, -math.pi + 0j) == -1
    pp = p.then(p)
    assert winding_number(pp, -math.pi + 0j) == 2
    with pytest.raises(GeometryError):
        p.then(ParamPath(5 + 0j, (LineSegment(5 + 0j, 6 + 0j),)))


def test_json_round_trip():
    p = paper_path(3, 2, detour_sides=SIDES3)
    q = path_from_json(path_to_json(p))
    assert q == p
    assert q.loop == p.loop


def test_json_errors_have_locations():
    with pytest.raises(ParameterError, match="line 1, column"):
        path_from_json("{")
    with pytest.raises(ParameterError, match=r"segments\[0\]\.end"):
        path_from_json(json.dumps({"basepoint": [-1, 0], "segments": [{"kind": "LINE", "start": [-1, 0], "end": "x"}]}))
    with pytest.raises(ParameterError, match=r"segments\[1\]\.kind"):
        path_from_json(json.dumps({"basepoint": [-1, 0], "segments": [
            {"kind": "LINE", "start": [-1, 0], "end": [0, 1]}, {"kind": "SPLINE"}]}))
    with pytest.raises(ParameterError, match="missing key 'segments'"):
        path_from_json(json.dumps({"basepoint": [-1, 0]}))


def test_jitter_zero_is_identity():
    p = paper_path(2, detour_sides=(Side.ABOVE,))
    assert jitter(p, 0.0, 7) is p


def test_jitter_bounds():
    p = paper_path(2, detour_sides=(Side.ABOVE,))
    assert realized_clearance(p, CVS) == pytest.approx(0.1)
    with pytest.raises(ParameterError):
        jitter(p, 0.05, 1)
    with pytest.raises(ParameterError):
        jitter(p, -0.01, 1)


def test_jitter_valid_and_same_class():
    p = paper_path(2, 1, detour_sides=(Side.ABOVE,))
    q = jitter(p, 0.03, 7)
    assert q != p
    assert validate_path(q, CVS, clearance=0.05) == []
    for m in range(0, 4):
        assert winding_number(q, -m * math.pi + 0j) == winding_number(p, -m * math.pi + 0j)


@settings(max_examples=25)
@given(seed=st.integers(0, 2 ** 31), mag=st.floats(0.001, 0.049))
def test_jitter_preserves_windings(seed, mag):
    p = paper_path(3, 1, detour_sides=SIDES3)
    q = jitter(p, mag, seed)
    assert abs(q.start_point - p.start_point) == 0 and abs(q.end_point - p.end_point) == 0
    pts = q.sample(32)
    assert np.min(np.abs(pts[:, None] - CVS[None, :])) >= 0.05
    for m in range(0, 5):
        assert winding_number(q, -m * math.pi + 0j) == winding_number(p, -m * math.pi + 0j)


@given(theta=st.floats(-10, 10), sweep=st.floats(-7, 7).filter(lambda s: abs(s) > 1e-3), r=st.floats(0.05, 2))
def test_arc_geometry(theta, sweep, r):
    a = ArcSegment(1 + 1j, r, theta, theta + sweep)
    assert a.length == pytest.approx(r * abs(sweep))
    assert abs(a.start_point - (1 + 1j)) == pytest.approx(r)
    assert a.reversed().start_point == pytest.approx(a.end_point)
