import json

import numpy as np
import pytest

from corpus import corpus, read_data
from octakit.coloring import check_representation, decorate, propagate_shadow
from octakit.diagram import build_combinatorics, parse_diagram
from octakit.geometry.shapes import (
    ShapeQuad,
    all_shapes_from_coloring,
    all_shapes_from_rep,
    arc_faithful_report,
    is_arc_faithful,
    pinched_report,
    shapes_from_coloring,
    shapes_from_rep,
)
from octakit.io import shadow_from_representation
from octakit.mat2 import DegenerateError, random_sl2
from octakit.octahedral import OctahedralColor, OctahedralColoring, associated_coloring, propagate_crossing


def _one_crossing_coloring(c1, c2):
    d = parse_diagram(read_data("one_crossing.json"))
    c = build_combinatorics(d)
    x = d.crossings[0]
    o1, o2 = propagate_crossing(c1, c2, x.sign)
    return OctahedralColoring(d, c, {x.s1: c1, x.s2: c2, x.s1p: o1, x.s2p: o2})


def test_worked_example_shapes():
    chi = _one_crossing_coloring(OctahedralColor(2, 1, 2), OctahedralColor(3, 5, 7))
    q = shapes_from_coloring(chi, 0)
    assert isinstance(q, ShapeQuad)
    assert np.allclose(q, (5 / 2, 5 / 2, 65 / 2, 65 / 2), rtol=1e-12)


def test_equal_trivial_colors_are_pinched():
    chi = _one_crossing_coloring(OctahedralColor(1, 3, 1), OctahedralColor(1, 3, 1))
    assert shapes_from_coloring(chi, 0).zW == 1


def test_random_shapes_finite_nonzero():
    for sc in corpus():
        for q in all_shapes_from_coloring(associated_coloring(sc)):
            assert all(np.isfinite(z) and z != 0 for z in q)


def test_rep_route_matches_coloring_route():
    for sc in corpus():
        for qr, qc in zip(all_shapes_from_rep(sc), all_shapes_from_coloring(associated_coloring(sc))):
            assert np.allclose(qr, qc, rtol=1e-9, atol=0)


def test_parallel_lines_give_unit_zw():
    # the kink: the two incoming lines are the same line
    d = parse_diagram(read_data("kink.json"))
    c = build_combinatorics(d)
    sc = shadow_from_representation(json.loads(read_data("kink_rep.json")), d, c)
    assert shapes_from_rep(sc, 0).zW == pytest.approx(1, abs=1e-14)


def test_inadmissible_corner_raises():
    sc = corpus()[0]
    bad = propagate_shadow(sc.decorated, u_seed=[0, 1])
    with pytest.raises(DegenerateError):
        all_shapes_from_rep(bad)


def test_kink_flagged_under_any_representation():
    d = parse_diagram(read_data("kink.json"))
    c = build_combinatorics(d)
    rng = np.random.default_rng(0)
    for _ in range(50):
        dc = decorate(check_representation(d, c, {0: random_sl2(rng)}), {0: int(rng.integers(0, 2))})
        rep = pinched_report(dc)
        assert rep.pinched == [0] and not rep.smooth_candidate


def test_figure_eight_geometric_rep_not_pinched():
    d = parse_diagram(read_data("figure8.json"))
    c = build_combinatorics(d)
    sc = shadow_from_representation(json.loads(read_data("figure8_rep.json")), d, c)
    rep = pinched_report(sc.decorated)
    assert rep.smooth_candidate and min(rep.angles) > 1e-3
    assert is_arc_faithful(sc.decorated.coloring)


def test_trivial_rep_shared_line_all_pinched():
    d = parse_diagram(read_data("figure8.json"))
    c = build_combinatorics(d)
    col = check_representation(d, c, {k: np.eye(2) for k in range(len(c.arcs))})
    rep = pinched_report(decorate(col, {0: np.array([1, 2])}))
    assert rep.pinched == [0, 1, 2, 3]
    assert not is_arc_faithful(col)
    assert arc_faithful_report(col).gaps == [0.0] * 4


def test_pinched_iff_zw_one():
    for sc in corpus():
        flags = pinched_report(sc.decorated).flags
        for k, f in enumerate(flags):
            assert f == (abs(shapes_from_rep(sc, k).zW - 1) <= 1e-9)


def test_kink_not_arc_faithful():
    d = parse_diagram(read_data("kink.json"))
    c = build_combinatorics(d)
    col = check_representation(d, c, {0: random_sl2(np.random.default_rng(1))})
    assert not is_arc_faithful(col)
