"""Shape parameters of the four tetrahedra at each crossing, pinched crossings
and arc-faithfulness at a representation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..coloring import DecoratedColoring, ShadowColoring, Sl2Coloring
from ..mat2 import DEFAULT, DegenerateError, NumericContext, hopf, projective_distance, up_of
from ..octahedral import OctahedralColoring


class ShapeQuad(NamedTuple):
    zN: complex
    zW: complex
    zS: complex
    zE: complex


def shapes_from_coloring(chi: OctahedralColoring, k: int) -> ShapeQuad:
    x = chi.diagram.crossings[k]
    _, b1, m1 = chi[x.s1]
    _, b2, m2 = chi[x.s2]
    b1p = chi[x.s1p].b
    b2p = chi[x.s2p].b
    return ShapeQuad(b2p / b1, b2 / (m1 * b1), m2 * b2 / (m1 * b1p), m2 * b2p / b1p)


def all_shapes_from_coloring(chi: OctahedralColoring) -> list[ShapeQuad]:
    return [shapes_from_coloring(chi, k) for k in range(len(chi.diagram.crossings))]


# Which pair of strand lines is read off at each corner.
_CORNER_LINES = {"N": ("s1", "s2p"), "W": ("s1", "s2"), "S": ("s1p", "s2"), "E": ("s1p", "s2p")}


def _corner_shape(sc: ShadowColoring, k: int, corner: str) -> complex:
    x = sc.diagram.crossings[k]
    u = sc.u[sc.comb.corners[k][corner]]
    p = up_of(u)
    ra, rb = _CORNER_LINES[corner]
    ha = hopf(sc.lines[getattr(x, ra)].v @ p)
    hb = hopf(sc.lines[getattr(x, rb)].v @ p)
    if not (np.isfinite(ha) and np.isfinite(hb)) or hb == 0:
        raise DegenerateError(f"crossing {k}: corner {corner} is inadmissible (Hopf image at infinity)")
    return ha / hb


def shapes_from_rep(sc: ShadowColoring, k: int) -> ShapeQuad:
    """Shapes as ratios of Hopf images of the strand lines seen from each corner."""
    return ShapeQuad(*(_corner_shape(sc, k, c) for c in ("N", "W", "S", "E")))


def all_shapes_from_rep(sc: ShadowColoring) -> list[ShapeQuad]:
    return [shapes_from_rep(sc, k) for k in range(len(sc.diagram.crossings))]


@dataclass
class PinchedReport:
    flags: list  # per crossing
    angles: list  # |sin| of the angle between the two incoming lines

    @property
    def pinched(self) -> list[int]:
        return [k for k, f in enumerate(self.flags) if f]

    @property
    def smooth_candidate(self) -> bool:
        return not any(self.flags)


def pinched_report(dc: DecoratedColoring, ctx: NumericContext = DEFAULT) -> PinchedReport:
    """Flag crossings whose two incoming decoration lines coincide."""
    flags, angles = [], []
    for x in dc.diagram.crossings:
        s = projective_distance(dc.lines[x.s1].v, dc.lines[x.s2].v)
        angles.append(s)
        flags.append(s <= ctx.projective)
    return PinchedReport(flags, angles)


@dataclass
class ArcFaithfulReport:
    gaps: list  # per crossing, distance between over and under generators

    def tolerance_flags(self, tol: float) -> list[bool]:
        return [g <= tol for g in self.gaps]


def arc_faithful_report(col: Sl2Coloring) -> ArcFaithfulReport:
    """Per crossing, how far apart the over and incoming-under generators are."""
    gaps = []
    for x in col.diagram.crossings:
        over, under = (x.s1, x.s2) if x.sign > 0 else (x.s2, x.s1)
        go, gu = col.g[over], col.g[under]
        gaps.append(float(np.abs(go - gu).max() / max(1.0, np.abs(go).max())))
    return ArcFaithfulReport(gaps)


def is_arc_faithful(col: Sl2Coloring, ctx: NumericContext = DEFAULT) -> bool:
    return not any(arc_faithful_report(col).tolerance_flags(ctx.match))
