"""Octahedral colorings: crossing rules, the coloring associated to a shadow
coloring, admissibility, and reconstruction of the holonomy representation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .coloring import ShadowColoring
from .diagram import Combinatorics, Diagram, region_tree
from .mat2 import (
    DEFAULT,
    E2,
    DegenerateError,
    NumericContext,
    det,
    hol_matrices,
    inv,
    pairing,
    up_of,
)


class OctahedralColor(NamedTuple):
    a: complex
    b: complex
    m: complex

    def matrices(self):
        return hol_matrices(self.a, self.b, self.m)


class DegenerateCrossingError(DegenerateError):
    def __init__(self, factor: str, crossing: int | None = None):
        where = "" if crossing is None else f" at crossing {crossing}"
        super().__init__(f"degenerate crossing{where}: {factor} vanishes")
        self.factor = factor
        self.crossing = crossing


class GroupoidRelationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class OctahedralColoring:
    diagram: Diagram
    comb: Combinatorics
    colors: dict  # segment -> OctahedralColor

    def __getitem__(self, segment: int) -> OctahedralColor:
        return self.colors[segment]


@dataclass
class Violation:
    kind: str  # 'region', 'segment-e2' or 'segment-up'
    index: int
    magnitude: float

    def __str__(self):
        what = {
            "region": "det(u_j, e2) = 0 at region",
            "segment-e2": "v_i e2 = 0 at segment",
            "segment-up": "v_i u_up(i) = 0 at segment",
        }[self.kind]
        return f"{what} {self.index} (|value| = {self.magnitude:.3g})"


@dataclass
class AdmissibilityReport:
    violations: list = field(default_factory=list)

    @property
    def admissible(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.admissible


def _scaled_abs(x: complex, *norms: float) -> float:
    return abs(x) / max(1e-300, float(np.prod(norms)))


def admissibility_report(sc: ShadowColoring, ctx: NumericContext = DEFAULT) -> AdmissibilityReport:
    """List every vanishing denominator of the associated-coloring formula.

    Magnitudes are scale-free: each pairing is divided by the norms of the
    vectors entering it, then compared against ``ctx.zero``.
    """
    c = sc.comb
    out = []
    for r in c.regions:
        u = sc.u[r]
        mag = _scaled_abs(pairing(u, E2), np.linalg.norm(u))
        if mag <= ctx.zero:
            out.append(Violation("region", r, mag))
    for s in sc.diagram.segments:
        v = sc.lines[s].v
        mag = _scaled_abs(v @ E2, np.linalg.norm(v))
        if mag <= ctx.zero:
            out.append(Violation("segment-e2", s, mag))
        u = sc.u[c.up[s]]
        mag = _scaled_abs(v @ u, np.linalg.norm(v), np.linalg.norm(u))
        if mag <= ctx.zero:
            out.append(Violation("segment-up", s, mag))
    return AdmissibilityReport(out)


def associated_coloring(sc: ShadowColoring, ctx: NumericContext = DEFAULT):
    """The octahedral coloring of a shadow coloring, or its admissibility report."""
    report = admissibility_report(sc, ctx)
    if not report.admissible:
        return report
    c = sc.comb
    colors = {}
    for s in sc.diagram.segments:
        line = sc.lines[s]
        u_up, u_dn = sc.u[c.up[s]], sc.u[c.dn[s]]
        a = pairing(u_dn, E2) / pairing(u_up, E2)
        b = -complex(line.v @ E2) / complex(line.v @ u_up)
        colors[s] = OctahedralColor(complex(a), b, complex(line.m))
    return OctahedralColoring(sc.diagram, c, colors)


def propagate_crossing(chi1: OctahedralColor, chi2: OctahedralColor, sign: int):
    """Colors (chi1', chi2') of the outgoing segments of a crossing."""
    a1, b1, m1 = chi1
    a2, b2, m2 = chi2
    if 0 in (a1, b1, m1, a2, b2, m2):
        raise DegenerateCrossingError("an input color component")
    if sign > 0:
        w = 1 - b2 / (m1 * b1)
        big_a = 1 - (m1 * b1 / b2) * (1 - a1 / m1) * (1 - 1 / (m2 * a2))
        denom = 1 - m2 * a2 * w
        if big_a == 0:
            raise DegenerateCrossingError("A")
        if denom == 0:
            raise DegenerateCrossingError("1 - m2 a2 (1 - b2/(m1 b1))")
        b1p = (m2 * b2 / m1) / denom
        b2p = b1 * (1 - (m1 / a1) * w)
    else:
        w = 1 - m1 * b1 / b2
        big_a = 1 - (b2 / (m1 * b1)) * (1 - m1 * a1) * (1 - m2 / a2)
        denom = 1 - w / (m1 * a1)
        if big_a == 0:
            raise DegenerateCrossingError("A~")
        if denom == 0:
            raise DegenerateCrossingError("1 - (1 - m1 b1/b2)/(m1 a1)")
        b1p = (m2 * b2 / m1) * (1 - (a2 / m2) * w)
        b2p = b1 / denom
    if b1p == 0 or b2p == 0:
        raise DegenerateCrossingError("an outgoing b")
    return (
        OctahedralColor(a1 / big_a, b1p, m1),
        OctahedralColor(a2 * big_a, b2p, m2),
    )


def _color_residual(x: OctahedralColor, y: OctahedralColor) -> float:
    return max(abs(p - q) / max(1.0, abs(q)) for p, q in zip(x, y))


@dataclass
class ResidualReport:
    per_crossing: list
    tolerance: float

    @property
    def max_residual(self) -> float:
        return max(self.per_crossing, default=0.0)

    @property
    def worst(self) -> int | None:
        if not self.per_crossing:
            return None
        return int(np.argmax(self.per_crossing))

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


def verify_octahedral(d: Diagram, c: Combinatorics, chi, ctx: NumericContext = DEFAULT) -> ResidualReport:
    """Largest relative residual of the six crossing equations at each crossing."""
    colors = chi.colors if isinstance(chi, OctahedralColoring) else chi
    res = []
    for x in d.crossings:
        try:
            o1, o2 = propagate_crossing(colors[x.s1], colors[x.s2], x.sign)
        except DegenerateCrossingError:
            res.append(float("inf"))
            continue
        res.append(max(_color_residual(colors[x.s1p], o1), _color_residual(colors[x.s2p], o2)))
    return ResidualReport(res, ctx.relation)


def groupoid_residuals(d: Diagram, chi) -> list[float]:
    """Residuals of the three groupoid relations under up/dn holonomy, per crossing."""
    colors = chi.colors if isinstance(chi, OctahedralColoring) else chi
    out = []
    for x in d.crossings:
        u1, d1, _ = colors[x.s1].matrices()
        u2, d2, _ = colors[x.s2].matrices()
        u1p, d1p, _ = colors[x.s1p].matrices()
        u2p, d2p, _ = colors[x.s2p].matrices()
        pairs = [((u1, u2), (u2p, u1p)), ((d1, d2), (d2p, d1p))]
        if x.sign > 0:
            pairs.append(((d1, u2), (u2p, d1p)))
        else:
            pairs.append(((u1, d2), (d2p, u1p)))
        out.append(max(_product_gap(lhs, rhs) for lhs, rhs in pairs))
    return out


def _product_gap(lhs, rhs) -> float:
    """Distance between two matrix products, relative to the size of the factors."""
    p, q = lhs[0] @ lhs[1], rhs[0] @ rhs[1]
    scale = max(
        1.0,
        np.abs(lhs[0]).max() * np.abs(lhs[1]).max(),
        np.abs(rhs[0]).max() * np.abs(rhs[1]).max(),
    )
    return float(np.abs(p - q).max() / scale)


def region_holonomies(c: Combinatorics, chi) -> dict:
    """Hol(s_j^+) for every region j, built once along a breadth-first tree."""
    colors = chi.colors if isinstance(chi, OctahedralColoring) else chi
    hol = {}
    for r, parent, seg in region_tree(c):
        if parent < 0:
            hol[r] = np.eye(2, dtype=complex)
            continue
        up = colors[seg].matrices()[0]
        hol[r] = hol[parent] @ up if c.up[seg] == parent else hol[parent] @ inv(up)
    return hol


def word_holonomy(word, chi) -> np.ndarray:
    colors = chi.colors if isinstance(chi, OctahedralColoring) else chi
    out = np.eye(2, dtype=complex)
    for letter in word.letters:
        up, dn, _ = colors[letter.segment].matrices()
        mat = up if letter.level == "+" else dn
        out = out @ (mat if letter.exponent > 0 else inv(mat))
    return out


def segment_holonomy(d: Diagram, c: Combinatorics, chi, u0, ctx: NumericContext = DEFAULT) -> dict:
    """hol_{chi,u0}(w_i) for every segment i."""
    worst = max(groupoid_residuals(d, chi), default=0.0)
    if worst > ctx.relation:
        raise GroupoidRelationError(f"groupoid relations fail (residual {worst:.3g}); coloring is invalid")
    colors = chi.colors if isinstance(chi, OctahedralColoring) else chi
    hol = region_holonomies(c, colors)
    base = up_of(np.asarray(u0, dtype=complex))
    out = {}
    for s in d.segments:
        p = base @ hol[c.up[s]]
        out[s] = p @ colors[s].matrices()[2] @ inv(p)
    return out


def reconstruct_holonomy(d: Diagram, c: Combinatorics, chi, u0, ctx: NumericContext = DEFAULT) -> dict:
    """Holonomy images of the Wirtinger generators, keyed by arc."""
    per_seg = segment_holonomy(d, c, chi, u0, ctx)
    return {k: per_seg[arc[0]] for k, arc in enumerate(c.arcs)}


@dataclass
class MatchReport:
    per_arc: list
    tolerance: float

    @property
    def max_residual(self) -> float:
        return max(self.per_arc, default=0.0)

    @property
    def worst_arc(self) -> int | None:
        return int(np.argmax(self.per_arc)) if self.per_arc else None

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


def verify_match(sc: ShadowColoring, chi: OctahedralColoring, ctx: NumericContext = DEFAULT) -> MatchReport:
    """Compare the holonomy of ``chi`` (based at the base shadow) with the coloring's matrices."""
    d, c = sc.diagram, sc.comb
    per_seg = segment_holonomy(d, c, chi, sc.base_shadow, ctx)
    per_arc = []
    for arc in c.arcs:
        per_arc.append(
            max(float(np.abs(per_seg[s] - sc.g[s]).max() / max(1.0, np.abs(sc.g[s]).max())) for s in arc)
        )
    return MatchReport(per_arc, ctx.match)


def shadow_lemma_extract(g, u, m: complex, v=None, ctx: NumericContext = DEFAULT) -> OctahedralColor:
    """The unique color chi with up(u) around(chi) up(u)^{-1} = g.

    ``v`` is a row vector with v g = v/m; it is computed when omitted.
    """
    g = np.asarray(g, dtype=complex)
    u = np.asarray(u, dtype=complex)
    if v is None:
        lam = 1 / m
        c1 = np.array([g[1, 0], lam - g[0, 0]])
        c2 = np.array([lam - g[1, 1], g[0, 1]])
        v = c1 if np.linalg.norm(c1) >= np.linalg.norm(c2) else c2
        if not np.any(np.abs(v) > 0):
            raise DegenerateError("g is central; pass the row vector v explicitly")
    v = np.asarray(v, dtype=complex)
    a = pairing(g @ u, E2) / pairing(u, E2)
    b = -complex(v @ E2) / complex(v @ u)
    chi = OctahedralColor(complex(a), b, complex(m))
    p = up_of(u)
    back = p @ chi.matrices()[2] @ inv(p)
    off = float(np.abs(back - g).max() / max(1.0, np.abs(g).max()))
    if off > ctx.relation:
        raise DegenerateError(f"g is not conjugate into around-form by up(u) (residual {off:.3g})")
    return chi


def det_check(mats: dict) -> float:
    return max((abs(det(m) - 1) for m in mats.values()), default=0.0)
