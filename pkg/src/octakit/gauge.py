"""Gauge transformations of shadow colorings and the randomized searches for
admissible colorings and for shapes off the unit circle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coloring import DecoratedColoring, ShadowColoring, Sl2Coloring, propagate_shadow
from .geometry.shapes import all_shapes_from_rep, pinched_report
from .mat2 import DEFAULT, DegenerateError, NumericContext, RowLine, inv, random_sl2, require_sl2
from .octahedral import admissibility_report


class GaugeSearchError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class GaugeMove:
    kind: str  # 'A' or 'B'
    h: np.ndarray

    def __post_init__(self):
        if self.kind not in ("A", "B"):
            raise ValueError(f"gauge move kind must be 'A' or 'B', not {self.kind!r}")
        h = np.asarray(self.h, dtype=complex)
        require_sl2(h)
        object.__setattr__(self, "h", h)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "h": [[[z.real, z.imag] for z in row] for row in self.h]}

    @classmethod
    def from_dict(cls, doc: dict) -> "GaugeMove":
        h = np.array([[complex(*z) for z in row] for row in doc["h"]])
        return cls(doc["kind"], h)


def identity_move(kind: str) -> GaugeMove:
    return GaugeMove(kind, np.eye(2, dtype=complex))


def apply_gauge(sc: ShadowColoring, mv: GaugeMove) -> ShadowColoring:
    """Apply a gauge move.

    Type A conjugates every color by ``h``, moves lines to ``L h`` and shadows to
    ``h^-1 u``. Type B keeps the decorated coloring and replaces the base
    shadow by ``h^-1 u_base``; the other shadows follow from the shadow rule,
    which amounts to pulling an ``h``-colored strand under the diagram from
    the base region (its color is conjugated as it passes under each arc).
    """
    h, hi = mv.h, inv(mv.h)
    if mv.kind == "B":
        base = sc.comb.base_region
        return propagate_shadow(sc.decorated, base, hi @ sc.u[base])
    u = {r: hi @ x for r, x in sc.u.items()}
    col = sc.decorated.coloring
    g = {s: hi @ x @ h for s, x in col.g.items()}
    lines = {s: RowLine(line.v @ h, line.m) for s, line in sc.lines.items()}
    dc = DecoratedColoring(Sl2Coloring(col.diagram, col.comb, g), lines)
    return ShadowColoring(dc, u)


@dataclass
class GaugeFix:
    moves: tuple  # (A-move, B-move)
    coloring: ShadowColoring
    tries: int


def find_admissible_gauge(
    sc: ShadowColoring, seed: int = 0, max_tries: int = 64, ctx: NumericContext = DEFAULT
) -> GaugeFix:
    """Type A by a random h, then type B by the inverse of a random k.

    Try 1 uses identities; the first admissible result is returned.
    """
    rng = np.random.default_rng(seed)
    for t in range(1, max_tries + 1):
        if t == 1:
            a, b = identity_move("A"), identity_move("B")
        else:
            h = random_sl2(rng)
            k = random_sl2(rng)
            a, b = GaugeMove("A", h), GaugeMove("B", inv(k))
        out = apply_gauge(apply_gauge(sc, a), b)
        if admissibility_report(out, ctx).admissible:
            return GaugeFix((a, b), out, t)
    raise GaugeSearchError(f"no admissible gauge found in {max_tries} tries")


def _off_unit_circle(sc: ShadowColoring, ctx: NumericContext) -> bool:
    if not admissibility_report(sc, ctx).admissible:
        return False
    try:
        quads = all_shapes_from_rep(sc)
    except DegenerateError:
        return False
    for quad in quads:
        for z in quad:
            if not np.isfinite(z) or z == 0 or abs(abs(z) - 1) <= ctx.unit_circle:
                return False
    return True


@dataclass
class UnitCircleFix:
    move: GaugeMove
    coloring: ShadowColoring
    tries: int


def find_nonunit_shapes(
    sc: ShadowColoring, seed: int = 0, max_tries: int = 64, ctx: NumericContext = DEFAULT
) -> UnitCircleFix:
    """A type-A move after which the coloring is admissible and no shape
    parameter has modulus 1."""
    flags = pinched_report(sc.decorated, ctx)
    if not flags.smooth_candidate:
        raise GaugeSearchError(
            f"crossing(s) {flags.pinched} pinched, unit-circle avoidance impossible"
        )
    rng = np.random.default_rng(seed)
    for t in range(1, max_tries + 1):
        mv = identity_move("A") if t == 1 else GaugeMove("A", random_sl2(rng))
        out = apply_gauge(sc, mv)
        if _off_unit_circle(out, ctx):
            return UnitCircleFix(mv, out, t)
    raise GaugeSearchError(f"shapes stayed on the unit circle for {max_tries} tries")
