import json
import math
from collections import Counter

import pytest

from tanmono.certify import (INDETERMINATE, NO_ELEMENTARY_SOLUTION, NO_OBSTRUCTION, CertifyOptions,
                             expected_three_cycle, replay_configuration, run_certification)
from tanmono.errors import CertificationError, ParameterError
from tanmono.families import FunctionFamily
from tanmono.paths import jitter, paper_path
from tanmono.permutations import Permutation, compose, generate_group
from tanmono.tracker import TrackOptions, default_window, initial_roots, track

TAN = FunctionFamily.TAN_MINUS_X


@pytest.fixture(scope="module")
def tan_report():
    return run_certification(TAN, 4)


def test_tan_verdict(tan_report):
    r = tan_report
    assert r.conclusion == NO_ELEMENTARY_SOLUTION
    assert r.group_order == 60
    assert not r.verdict.solvable
    assert r.verdict.derived_chain_orders == [60, 60]
    assert "contains alternating group on {z_1..z_5}" in r.verdict.certificate
    assert all(v is True for v in r.checks.values())


def test_tan_generators_are_consecutive_three_cycles(tan_report):
    assert [str(g) for g in tan_report.generators] == ["(z_1 z_3 z_2)", "(z_2 z_4 z_3)", "(z_3 z_5 z_4)"]
    for n, g in zip(range(2, 5), tan_report.generators):
        assert g in (expected_three_cycle(n), expected_three_cycle(n).inverse())


def test_tan_loops_record_windings_and_sides(tan_report):
    loops = tan_report.loops_used
    assert [rec.spec.target_index for rec in loops] == [1, 2, 3, 4, 5]
    for rec in loops:
        assert rec.spec.winding in (1, 2)
        assert len(rec.spec.detour_sides) == rec.spec.target_index - 1
        assert abs(rec.critical_value + rec.spec.target_index * math.pi) < 1e-12


def test_group_order_matches_brute_force(tan_report):
    elems = {Permutation()}
    gens = tan_report.generators
    while True:
        new = elems | {compose(e, g) for e in elems for g in gens}
        if new == elems:
            break
        elems = new
    assert len(elems) == tan_report.group_order


def test_report_json_field_order(tan_report):
    doc = json.loads(tan_report.to_json())
    assert list(doc)[:9] == ["family", "window", "basepoint", "critical_points", "loops_used", "generators",
                             "group_order", "verdict", "conclusion"]
    assert doc["tolerances"]["track_step_factor"] == 0.2
    assert doc["basepoint"] == [-1.0, 0.0]


def test_report_deterministic(tan_report):
    assert run_certification(TAN, 4).to_json() == tan_report.to_json()


def test_cubic_control():
    r = run_certification(FunctionFamily.CUBIC_VALIDATION)
    assert r.conclusion == NO_OBSTRUCTION
    assert r.verdict.solvable and r.verdict.derived_chain_orders == [6, 3, 1]
    assert all(g.cycle_type() == (2,) for g in r.generators)


def test_quintic_control():
    r = run_certification(FunctionFamily.QUINTIC_VALIDATION)
    assert r.group_order == 120
    assert not r.verdict.solvable
    assert r.verdict.derived_chain_orders == [120, 60, 60]
    assert len(r.generators) == 4 and all(g.cycle_type() == (2,) for g in r.generators)
    g = generate_group(r.generators)
    assert len(g.points) == 5


def test_n_max_validation():
    with pytest.raises(ParameterError):
        run_certification(TAN, 1)


def test_capped_group_is_indeterminate():
    r = run_certification(TAN, 4, opts=CertifyOptions(cap=10))
    assert r.conclusion == INDETERMINATE
    assert r.verdict is None and r.group_order is None


def test_tracking_failure_names_stage():
    with pytest.raises(CertificationError) as exc:
        run_certification(TAN, 2, opts=CertifyOptions(track=TrackOptions(residual_tol=1e-40)))
    assert exc.value.stage


def test_jittered_generators_identical(tan_report):
    """Ten jitter seeds give the same generator multiset."""
    window = default_window(TAN, 4)
    roots = initial_roots(TAN, window, -1.0, mode="conjugate")
    ref = Counter(str(g) for g in tan_report.generators)
    paths = {rec.spec.target_index: rec.path for rec in tan_report.loops_used}
    for seed in range(10):
        perms = {n: track(TAN, jitter(p, 0.03, seed), roots).permutation for n, p in paths.items()}
        gens = Counter(str(compose(perms[n], perms[n + 1])) for n in range(2, 5))
        assert gens == ref


def test_replay_configuration_two():
    snaps = {s.stage: s for s in replay_configuration(2)}
    first = snaps["first"]
    # after the first critical value c_1 occupies the leftmost real slot and z_1 is aloft
    assert first.real[0] == "c_1"
    assert "z_1" in first.upper
    final = snaps["final"]
    assert "c_1" in final.upper
    assert final.lower == ("z_1",)
    comp = snaps["composite"]
    assert comp.upper == ("c_1",) and comp.lower == ("c_2",)
    assert comp.real[:3] == ("z_2", "z_3", "z_1")


def test_replay_configuration_three():
    snaps = {s.stage: s for s in replay_configuration(3)}
    last = snaps["intermediate"]
    assert len(last.upper) == 1
    comp = snaps["composite"]
    assert comp.upper == ("c_1",) and comp.lower == ("c_2",)
    # (z_1, ..., z_{n-2}, z_n, z_{n+1}, z_{n-1}, ...)
    assert comp.real[:4] == ("z_1", "z_3", "z_4", "z_2")


def test_replay_needs_n2():
    with pytest.raises(ParameterError):
        replay_configuration(1)


def test_rebuilt_path_matches_report(tan_report):
    rec = tan_report.loops_used[2]
    p = paper_path(3, rec.spec.winding, detour_sides=rec.spec.detour_sides)
    assert p == rec.path
