import json
import random

import numpy as np
import pytest

from corpus import braid_diagram, corpus, read_data
from octakit.diagram import (
    DiagramError,
    build_combinatorics,
    diagram_from_dict,
    over_path,
    parse_diagram,
    region_tree,
    wirtinger_presentation,
)
from octakit.octahedral import associated_coloring, region_holonomies, word_holonomy


def test_one_crossing_tangle():
    d = parse_diagram(read_data("one_crossing.json"))
    assert len(d.crossings) == 1 and d.crossings[0].sign == 1
    assert len(d.segments) == 4
    c = build_combinatorics(d)
    assert len(c.regions) == 4
    assert len(c.arcs) == 3


def test_figure_eight_counts():
    d = parse_diagram(read_data("figure8.json"))
    c = build_combinatorics(d)
    assert (len(d.crossings), len(d.segments)) == (4, 8)
    assert len(c.regions) == 6
    assert len(d.crossings) - len(d.segments) + len(c.regions) == 2
    assert len(c.arcs) == 4
    assert len(c.components) == 1


def test_duplicate_output_rejected():
    doc = {
        "crossings": [
            {"sign": 1, "s1": 0, "s2": 1, "s1p": 3, "s2p": 2},
            {"sign": 1, "s1": 2, "s2": 4, "s1p": 3, "s2p": 5},
        ]
    }
    with pytest.raises(DiagramError):
        diagram_from_dict(doc)


def test_syntax_error_reports_position():
    with pytest.raises(DiagramError, match="line 2"):
        parse_diagram('{"crossings": [\n  {"sign": 1,, }]}')


def test_unknown_field_rejected():
    with pytest.raises(DiagramError, match="unknown"):
        parse_diagram('{"crossings": [], "colour": 1}')


def test_bad_rotation_rejected():
    doc = {"crossings": [{"sign": 1, "s1": 0, "s2": 1, "s1p": 1, "s2p": 0, "ccw": ["0:in", "0:out", "1:in", "1:out"]}]}
    with pytest.raises(DiagramError, match="rotation"):
        diagram_from_dict(doc)


def test_rotation_accepted_in_any_cyclic_shift():
    doc = {"crossings": [{"sign": 1, "s1": 0, "s2": 1, "s1p": 1, "s2p": 0, "ccw": ["1:in", "1:out", "0:out", "0:in"]}]}
    diagram_from_dict(doc)


def test_unknot_without_crossings():
    d = diagram_from_dict({"segments": [0]})
    c = build_combinatorics(d)
    assert len(c.arcs) == 1 and len(c.components) == 1 and len(c.regions) == 2


def test_kink_has_one_arc_and_degenerate_relation():
    d = parse_diagram(read_data("kink.json"))
    c = build_combinatorics(d)
    assert len(c.components) == 1
    x = d.crossings[0]
    assert c.arc_of[x.over[0]] == c.arc_of[x.under[0]]
    rel = wirtinger_presentation(d, c).relations[0]
    assert rel.degenerate


def test_wirtinger_relations_by_sign():
    pos = braid_diagram(2, [1], close=False)
    c = build_combinatorics(pos)
    x = pos.crossings[0]
    rel = wirtinger_presentation(pos, c).relations[0]
    a1, a2 = c.arc_of[x.s1], c.arc_of[x.s2]
    assert rel.lhs == c.arc_of[x.s2p] and rel.word == ((a1, -1), (a2, 1), (a1, 1))
    assert c.arc_of[x.s1] == c.arc_of[x.s1p]
    neg = braid_diagram(2, [-1], close=False)
    c = build_combinatorics(neg)
    x = neg.crossings[0]
    rel = wirtinger_presentation(neg, c).relations[0]
    a1, a2 = c.arc_of[x.s1], c.arc_of[x.s2]
    assert rel.lhs == c.arc_of[x.s1p] and rel.word == ((a2, 1), (a1, 1), (a2, -1))
    assert c.arc_of[x.s2] == c.arc_of[x.s2p]


def test_split_diagram_rejected():
    doc = {"crossings": [
        {"sign": 1, "s1": 0, "s2": 1, "s1p": 1, "s2p": 0},
        {"sign": 1, "s1": 2, "s2": 3, "s1p": 3, "s2p": 2},
    ]}
    with pytest.raises(DiagramError, match="split"):
        build_combinatorics(diagram_from_dict(doc))


def test_over_path_of_three_strand_tangle():
    d = diagram_from_dict({"boundary_in": [1, 2, 3], "boundary_out": [1, 2, 3]})
    c = build_combinatorics(d)
    assert str(over_path(c, c.base_region)) == "1"
    assert str(over_path(c, c.dn[2])) == "x1^+ x2^+"


def test_corner_regions_close_up():
    for sc in corpus()[:30]:
        c = sc.comb
        for k, x in enumerate(sc.diagram.crossings):
            n, w, s, e = (c.corners[k][q] for q in "NWSE")
            assert (c.up[x.s1], c.dn[x.s1]) == (n, w)
            assert (c.up[x.s2], c.dn[x.s2]) == (w, s)
            assert (c.up[x.s1p], c.dn[x.s1p]) == (e, s)
            assert (c.up[x.s2p], c.dn[x.s2p]) == (n, e)


def test_euler_characteristic_on_corpus():
    for sc in corpus():
        d, c = sc.diagram, sc.comb
        v = len(d.crossings) + (1 if d.is_tangle else 0)
        assert v - len(d.segments) + len(c.regions) == 2


def test_over_path_independence():
    for sc in corpus()[:40]:
        chi = associated_coloring(sc)
        hol = region_holonomies(sc.comb, chi)
        for j in sc.comb.regions:
            for seed in (1, 2):
                word = over_path(sc.comb, j, seed=seed)
                got = word_holonomy(word, chi)
                scale = max(1.0, np.abs(hol[j]).max())
                assert np.abs(got - hol[j]).max() <= 1e-10 * scale


def test_arc_partition_invariant_under_crossing_relabel():
    rng = random.Random(3)
    for sc in corpus()[:30]:
        doc = sc.diagram.to_dict()
        c1 = build_combinatorics(sc.diagram)
        rng.shuffle(doc["crossings"])
        c2 = build_combinatorics(diagram_from_dict(doc))
        assert sorted(c1.arcs) == sorted(c2.arcs)
        assert sorted(c1.components) == sorted(c2.components)


def test_dumps_round_trip():
    for sc in corpus()[:20]:
        d = sc.diagram
        assert parse_diagram(d.dumps()) == d
        assert json.loads(d.dumps()) == d.to_dict()


def test_region_tree_covers_all_regions():
    sc = corpus()[0]
    tree = region_tree(sc.comb)
    assert tree[0][0] == sc.comb.base_region
    assert sorted(r for r, _, _ in tree) == list(sc.comb.regions)
