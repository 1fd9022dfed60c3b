"""SL(2,C) colorings of a diagram, their decorations, and shadow colorings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagram import Combinatorics, Diagram, region_tree
from .mat2 import (
    ALL_LINES,
    DEFAULT,
    E1,
    NumericContext,
    RowLine,
    eigen_lines,
    inv,
    inverse_eigenvalue,
    normalize,
    projective_distance,
    require_sl2,
)


class ColoringError(ValueError):
    pass


class RelationError(ColoringError):
    def __init__(self, crossing: int, residual: float):
        super().__init__(f"Wirtinger relation fails at crossing {crossing} (residual {residual:.3g})")
        self.crossing = crossing
        self.residual = residual


class MonodromyError(ColoringError):
    pass


def _rel_residual(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.abs(x - y).max() / max(1.0, np.abs(y).max()))


@dataclass(frozen=True, eq=False)
class Sl2Coloring:
    diagram: Diagram
    comb: Combinatorics
    g: dict  # segment -> matrix

    def arc_matrix(self, arc: int) -> np.ndarray:
        return self.g[self.comb.arcs[arc][0]]

    def crossing_residuals(self) -> list[float]:
        out = []
        for x in self.diagram.crossings:
            g = self.g
            if x.sign > 0:
                out.append(_rel_residual(g[x.s2p], inv(g[x.s1]) @ g[x.s2] @ g[x.s1]))
            else:
                out.append(_rel_residual(g[x.s1p], g[x.s2] @ g[x.s1] @ inv(g[x.s2])))
        return out


def check_representation(d: Diagram, c: Combinatorics, arc_g: dict, ctx: NumericContext = DEFAULT) -> Sl2Coloring:
    """Expand per-arc matrices to segments and check every Wirtinger relation."""
    missing = set(range(len(c.arcs))) - set(arc_g)
    if missing:
        raise ColoringError(f"no matrix given for arc(s) {sorted(missing)}")
    g = {}
    for k, arc in enumerate(c.arcs):
        m = np.asarray(arc_g[k], dtype=complex)
        require_sl2(m, ctx)
        for s in arc:
            g[s] = m
    col = Sl2Coloring(d, c, g)
    for k, r in enumerate(col.crossing_residuals()):
        if r > ctx.relation:
            raise RelationError(k, r)
    return col


@dataclass(frozen=True, eq=False)
class DecoratedColoring:
    coloring: Sl2Coloring
    lines: dict  # segment -> RowLine

    @property
    def comb(self) -> Combinatorics:
        return self.coloring.comb

    @property
    def diagram(self) -> Diagram:
        return self.coloring.diagram

    @property
    def g(self) -> dict:
        return self.coloring.g


def _strand_order(d: Diagram, c: Combinatorics, comp: tuple[int, ...]) -> list[int]:
    """Segments of a component in strand order, starting from its entry point."""
    nxt = {}
    for x in d.crossings:
        nxt[x.s1] = x.s1p
        nxt[x.s2] = x.s2p
    has_prev = {nxt[s] for s in comp if s in nxt}
    starts = [s for s in comp if s not in has_prev]
    s = starts[0] if starts else comp[0]
    order = [s]
    while s in nxt and nxt[s] != order[0]:
        s = nxt[s]
        order.append(s)
    return order


def _next_line(x, seg: int, line: np.ndarray, g: dict) -> np.ndarray:
    if x.sign > 0:
        return line if seg == x.s1 else line @ g[x.s1]
    return line if seg == x.s2 else line @ inv(g[x.s2])


def decorate(col: Sl2Coloring, choice: dict | None = None, ctx: NumericContext = DEFAULT) -> DecoratedColoring:
    """Choose an invariant line per component and carry it along the strand.

    ``choice`` maps a component id to an eigen-line index (into
    :func:`eigen_lines` of the component's first segment) or to an explicit
    row vector. Missing components default to index 0. Parabolic meridians have
    a single line, so the index is ignored for them.
    """
    d, c = col.diagram, col.comb
    choice = choice or {}
    into = {}
    for x in d.crossings:
        into[x.s1] = x
        into[x.s2] = x
    outgoing = {}
    for x in d.crossings:
        outgoing[x.s1] = x.s1p
        outgoing[x.s2] = x.s2p
    vecs: dict = {}
    for k, comp in enumerate(c.components):
        order = _strand_order(d, c, comp)
        first = order[0]
        pick = choice.get(k, 0)
        if isinstance(pick, (int, np.integer)):
            lines = eigen_lines(col.g[first], ctx)
            if lines is ALL_LINES:
                raise ColoringError(
                    f"component {k}: meridian image is central; an explicit decoration line is required"
                )
            v = lines[min(int(pick), len(lines) - 1)].v
        else:
            v = normalize(np.asarray(pick, dtype=complex))
        v0 = v
        for s in order:
            vecs[s] = normalize(v)
            if s in into:
                v = _next_line(into[s], s, v, col.g)
        if order[-1] in outgoing and outgoing[order[-1]] == first:
            if projective_distance(v, v0) > ctx.projective:
                raise ColoringError(f"component {k}: decoration does not close up around the component")
    lines = {}
    for s in d.segments:
        v = vecs[s]
        w = v @ col.g[s]
        if projective_distance(w, v) > ctx.projective:
            raise ColoringError(f"segment {s}: decoration line is not invariant under its matrix")
        lines[s] = RowLine(v, inverse_eigenvalue(col.g[s], v))
    return DecoratedColoring(col, lines)


@dataclass(frozen=True, eq=False)
class ShadowColoring:
    decorated: DecoratedColoring
    u: dict  # region -> column vector

    @property
    def comb(self) -> Combinatorics:
        return self.decorated.comb

    @property
    def diagram(self) -> Diagram:
        return self.decorated.diagram

    @property
    def g(self) -> dict:
        return self.decorated.g

    @property
    def lines(self) -> dict:
        return self.decorated.lines

    @property
    def base_shadow(self) -> np.ndarray:
        return self.u[self.comb.base_region]

    def monodromy(self) -> float:
        worst = 0.0
        for s in self.diagram.segments:
            up, dn = self.u[self.comb.up[s]], self.u[self.comb.dn[s]]
            r = np.linalg.norm(dn - self.g[s] @ up) / max(1.0, np.linalg.norm(dn))
            worst = max(worst, float(r))
        return worst


def propagate_shadow(
    dc: DecoratedColoring,
    seed_region: int | None = None,
    u_seed=None,
    ctx: NumericContext = DEFAULT,
) -> ShadowColoring:
    """Fill in region vectors from one seed using u_dn(i) = g_i u_up(i)."""
    c = dc.comb
    seed_region = c.base_region if seed_region is None else seed_region
    u0 = E1 if u_seed is None else np.asarray(u_seed, dtype=complex)
    if not np.any(u0):
        raise ColoringError("shadow seed must be nonzero")
    u = {seed_region: u0}
    # region_tree is rooted at the base region; re-root by walking from the seed.
    pending = [seed_region]
    while pending:
        r = pending.pop()
        for seg, nb in c.adjacency[r]:
            if nb in u:
                continue
            g = dc.g[seg]
            u[nb] = g @ u[r] if c.up[seg] == r else inv(g) @ u[r]
            pending.append(nb)
    region_tree(c)  # raises on unreachable regions
    sc = ShadowColoring(dc, u)
    if sc.monodromy() > ctx.relation:
        raise MonodromyError(f"shadow monodromy {sc.monodromy():.3g} around a face is not trivial")
    return sc
