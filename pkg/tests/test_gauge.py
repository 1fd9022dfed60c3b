import json

import numpy as np
import pytest

from corpus import corpus, read_data
from octakit.coloring import check_representation, decorate, propagate_shadow
from octakit.diagram import build_combinatorics, parse_diagram
from octakit.gauge import (
    GaugeMove,
    GaugeSearchError,
    apply_gauge,
    find_admissible_gauge,
    find_nonunit_shapes,
    identity_move,
)
from octakit.geometry.potential import volume
from octakit.geometry.shapes import all_shapes_from_coloring, all_shapes_from_rep, pinched_report
from octakit.io import shadow_from_representation
from octakit.mat2 import E2, NotSL2Error, projective_distance, random_sl2
from octakit.octahedral import admissibility_report, associated_coloring, verify_match


def _figure_eight():
    d = parse_diagram(read_data("figure8.json"))
    c = build_combinatorics(d)
    return shadow_from_representation(json.loads(read_data("figure8_rep.json")), d, c)


def _kink(seed):
    d = parse_diagram(read_data("kink.json"))
    c = build_combinatorics(d)
    rng = np.random.default_rng(seed)
    col = check_representation(d, c, {0: random_sl2(rng)})
    return propagate_shadow(decorate(col), u_seed=rng.standard_normal(2) + 1j)


def test_move_requires_sl2():
    with pytest.raises(NotSL2Error):
        GaugeMove("A", np.diag([2, 2]))
    with pytest.raises(ValueError):
        GaugeMove("C", np.eye(2))


def test_move_round_trip():
    mv = GaugeMove("B", random_sl2(np.random.default_rng(0)))
    back = GaugeMove.from_dict(json.loads(json.dumps(mv.to_dict())))
    assert back.kind == "B" and np.array_equal(back.h, mv.h)


def test_identity_b_move():
    sc = corpus()[0]
    out = apply_gauge(sc, identity_move("B"))
    for r in sc.u:
        np.testing.assert_array_equal(out.u[r], sc.u[r])
    assert out.g is sc.g


def test_a_move_b_formula():
    rng = np.random.default_rng(1)
    for sc in corpus()[:20]:
        h = random_sl2(rng)
        out = apply_gauge(sc, GaugeMove("A", h))
        chi = associated_coloring(out)
        if not hasattr(chi, "colors"):
            continue
        for s in sc.diagram.segments:
            v, u = sc.lines[s].v, sc.u[sc.comb.up[s]]
            assert chi[s].b == pytest.approx(-(v @ h @ E2) / (v @ u), rel=1e-9)


def test_moves_preserve_validity():
    rng = np.random.default_rng(2)
    cases = corpus()
    worst_rel = worst_mono = 0.0
    for k in range(1000):
        sc = cases[k % len(cases)]
        out = apply_gauge(sc, GaugeMove("AB"[k % 2], random_sl2(rng)))
        worst_rel = max(worst_rel, max(out.decorated.coloring.crossing_residuals()))
        worst_mono = max(worst_mono, out.monodromy())
        for s in out.diagram.segments:
            v, g = out.lines[s].v, out.g[s]
            assert projective_distance(v @ g, v) <= 1e-9
    assert worst_rel <= 1e-9 and worst_mono <= 1e-9


def test_a_moves_compose():
    rng = np.random.default_rng(3)
    sc = corpus()[7]
    h1, h2 = random_sl2(rng), random_sl2(rng)
    two = apply_gauge(apply_gauge(sc, GaugeMove("A", h1)), GaugeMove("A", h2))
    one = apply_gauge(sc, GaugeMove("A", h1 @ h2))
    for s in sc.diagram.segments:
        np.testing.assert_allclose(two.g[s], one.g[s], rtol=1e-10, atol=1e-10)
        assert projective_distance(two.lines[s].v, one.lines[s].v) <= 1e-10
    for r in sc.u:
        np.testing.assert_allclose(two.u[r], one.u[r], rtol=1e-10, atol=1e-10)


def test_pinched_flags_gauge_invariant():
    rng = np.random.default_rng(4)
    cases = list(corpus()[:40]) + [_kink(s) for s in range(5)]
    for sc in cases:
        flags = pinched_report(sc.decorated).flags
        for kind in "AB":
            out = apply_gauge(sc, GaugeMove(kind, random_sl2(rng)))
            assert pinched_report(out.decorated).flags == flags


def test_b_move_shapes_follow_the_new_shadows():
    # Re-seeding the shadows moves the shapes; both routes to them still agree.
    rng = np.random.default_rng(5)
    sc = corpus()[9]
    out = apply_gauge(sc, GaugeMove("B", random_sl2(rng)))
    assert admissibility_report(out).admissible
    for q_rep, q_col in zip(all_shapes_from_rep(out), all_shapes_from_coloring(associated_coloring(out))):
        assert np.allclose(q_rep, q_col, rtol=1e-9)


def test_volume_gauge_invariant_on_knots():
    rng = np.random.default_rng(6)
    cases = [sc for sc in corpus() if not sc.diagram.is_tangle and pinched_report(sc.decorated).smooth_candidate]
    cases.append(_figure_eight())
    checked = 0
    for sc in cases:
        v = volume(associated_coloring(sc))
        for kind in "AB":
            out = apply_gauge(sc, GaugeMove(kind, random_sl2(rng)))
            if admissibility_report(out).admissible:
                assert volume(associated_coloring(out)) == pytest.approx(v, abs=1e-8)
                checked += 1
    assert checked > 20


def test_verify_match_after_moves():
    rng = np.random.default_rng(7)
    for sc in corpus()[:30]:
        fixed = find_admissible_gauge(apply_gauge(sc, GaugeMove("A", random_sl2(rng))), seed=1).coloring
        assert verify_match(fixed, associated_coloring(fixed)).passed


def test_admissible_input_accepted_on_first_try():
    fix = find_admissible_gauge(corpus()[0])
    assert fix.tries == 1
    assert all(np.array_equal(m.h, np.eye(2)) for m in fix.moves)


def test_search_is_deterministic():
    sc = propagate_shadow(corpus()[3].decorated, u_seed=E2)
    a, b = find_admissible_gauge(sc, seed=42), find_admissible_gauge(sc, seed=42)
    assert a.tries == b.tries and all(np.array_equal(x.h, y.h) for x, y in zip(a.moves, b.moves))


def test_trivial_rep_with_forced_zero_is_fixable():
    d = parse_diagram(read_data("figure8.json"))
    c = build_combinatorics(d)
    col = check_representation(d, c, {k: np.eye(2) for k in range(len(c.arcs))})
    sc = propagate_shadow(decorate(col, {0: np.array([1, 0])}))
    assert not admissibility_report(sc).admissible
    fixed = find_admissible_gauge(sc, max_tries=20).coloring
    assert admissibility_report(fixed).admissible


def test_search_failure_reported():
    sc = propagate_shadow(corpus()[3].decorated, u_seed=E2)
    with pytest.raises(GaugeSearchError):
        find_admissible_gauge(sc, max_tries=1)


def test_nonunit_rejects_pinched():
    with pytest.raises(GaugeSearchError, match="pinched, unit-circle avoidance impossible"):
        find_nonunit_shapes(_kink(0))


def test_nonunit_on_figure_eight():
    fix = find_nonunit_shapes(_figure_eight(), seed=0, max_tries=20)
    for q in all_shapes_from_rep(fix.coloring):
        assert all(abs(abs(z) - 1) > 1e-6 for z in q)


def _on_circle(sc, rng):
    """An A-move of ``sc`` that puts the W shape of crossing 0 on the unit circle."""
    gen = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    gen -= np.trace(gen) / 2 * np.eye(2)

    def moved(t):
        w, vecs = np.linalg.eig(t * gen)
        h = vecs @ np.diag(np.exp(w)) @ np.linalg.inv(vecs)
        return apply_gauge(sc, GaugeMove("A", h / np.sqrt(np.linalg.det(h))))

    def f(t):
        return abs(all_shapes_from_rep(moved(t))[0].zW) - 1

    ts = np.linspace(-1, 1, 41)
    vals = [f(t) for t in ts]
    for lo, hi, flo, fhi in zip(ts, ts[1:], vals, vals[1:]):
        if flo * fhi < 0:
            for _ in range(60):
                mid = (lo + hi) / 2
                if f(mid) * flo > 0:
                    lo, flo = mid, f(mid)
                else:
                    hi = mid
            return moved(lo)
    return None


def test_nonunit_moves_shapes_off_the_circle():
    rng = np.random.default_rng(8)
    on = None
    while on is None:
        on = _on_circle(_figure_eight(), rng)
    assert abs(abs(all_shapes_from_rep(on)[0].zW) - 1) <= 1e-9
    fix = find_nonunit_shapes(on, seed=3, max_tries=20)
    assert fix.tries > 1
    for q in all_shapes_from_rep(fix.coloring):
        assert all(abs(abs(z) - 1) > 1e-6 for z in q)
