"""Combinatorial tangle and link diagrams.

A diagram is a list of crossings. Every crossing has two incoming segments
(roles ``s1``, ``s2``) and two outgoing ones (``s1p``, ``s2p``); strand
``s1 -> s1p`` runs from the upper-left to the lower-right corner and strand
``s2 -> s2p`` from the lower-left to the upper-right. At a positive crossing
strand 1 is over, at a negative crossing strand 2 is over. Counterclockwise,
the four ends are therefore ``s2p, s1, s2, s1p`` and the four corner regions
are N (between ``s2p`` and ``s1``), W, S and E.

The region *above* an oriented segment is the one on its left.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

CORNERS = ("N", "W", "S", "E")
ROLES = ("s1", "s2", "s1p", "s2p")
_CROSSING_KEYS = {"sign", "s1", "s2", "s1p", "s2p", "ccw"}
_TOP_KEYS = {"crossings", "boundary_in", "boundary_out", "base_region_hint", "segments"}


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class Crossing:
    sign: int
    s1: int
    s2: int
    s1p: int
    s2p: int

    @property
    def rotation(self) -> tuple:
        """Counterclockwise segment ends, as (segment, 'in'|'out') pairs."""
        return ((self.s2p, "out"), (self.s1, "in"), (self.s2, "in"), (self.s1p, "out"))

    @property
    def over(self) -> tuple[int, int]:
        return (self.s1, self.s1p) if self.sign > 0 else (self.s2, self.s2p)

    @property
    def under(self) -> tuple[int, int]:
        return (self.s2, self.s2p) if self.sign > 0 else (self.s1, self.s1p)


@dataclass(frozen=True)
class Diagram:
    crossings: tuple[Crossing, ...]
    segments: tuple[int, ...]
    boundary_in: tuple[int, ...] = ()
    boundary_out: tuple[int, ...] = ()
    base_region_hint: tuple[int, str] | None = None

    @property
    def is_tangle(self) -> bool:
        return bool(self.boundary_in or self.boundary_out)

    def to_dict(self) -> dict:
        out: dict = {
            "crossings": [
                {
                    "sign": c.sign,
                    "s1": c.s1,
                    "s2": c.s2,
                    "s1p": c.s1p,
                    "s2p": c.s2p,
                    "ccw": [f"{s}:{end}" for s, end in c.rotation],
                }
                for c in self.crossings
            ],
            "boundary_in": list(self.boundary_in),
            "boundary_out": list(self.boundary_out),
        }
        used = {s for c in self.crossings for s in (c.s1, c.s2, c.s1p, c.s2p)}
        used |= set(self.boundary_in) | set(self.boundary_out)
        if set(self.segments) - used:
            out["segments"] = list(self.segments)
        if self.base_region_hint is not None:
            seg, side = self.base_region_hint
            out["base_region_hint"] = {"segment": seg, "side": side}
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def _parse_end(ref, crossing: Crossing, k: int):
    if isinstance(ref, bool):
        raise DiagramError(f"crossing {k}: bad segment-end reference {ref!r}")
    if isinstance(ref, int):
        ends = [e for e in crossing.rotation if e[0] == ref]
        if len(ends) != 1:
            raise DiagramError(
                f"crossing {k}: segment {ref} is ambiguous or absent; use '{ref}:in' or '{ref}:out'"
            )
        return ends[0]
    if isinstance(ref, str) and ref.count(":") == 1:
        seg, end = ref.split(":")
        try:
            seg_id = int(seg)
        except ValueError:
            raise DiagramError(f"crossing {k}: bad segment-end reference {ref!r}") from None
        if end in ("in", "out"):
            return (seg_id, end)
    raise DiagramError(f"crossing {k}: bad segment-end reference {ref!r}")


def _check_rotation(ccw, crossing: Crossing, k: int) -> None:
    if not isinstance(ccw, list) or len(ccw) != 4:
        raise DiagramError(f"crossing {k}: 'ccw' must list four segment ends")
    given = [_parse_end(r, crossing, k) for r in ccw]
    expected = list(crossing.rotation)
    if sorted(given) != sorted(expected):
        raise DiagramError(f"crossing {k}: 'ccw' does not list the four incident segment ends once each")
    for shift in range(4):
        if given == expected[shift:] + expected[:shift]:
            return
    raise DiagramError(
        f"crossing {k}: rotation {ccw} is inconsistent with the roles "
        "(counterclockwise order must be s2p, s1, s2, s1p)"
    )


def _as_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DiagramError(f"{where}: expected an integer segment id, got {value!r}")
    return value


def diagram_from_dict(doc: dict) -> Diagram:
    if not isinstance(doc, dict):
        raise DiagramError("diagram document must be a mapping")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise DiagramError(f"unknown field(s): {sorted(unknown)}")
    raw = doc.get("crossings", [])
    if not isinstance(raw, list):
        raise DiagramError("'crossings' must be a list")
    crossings = []
    for k, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise DiagramError(f"crossing {k}: expected a mapping")
        bad = set(entry) - _CROSSING_KEYS
        if bad:
            raise DiagramError(f"crossing {k}: unknown field(s) {sorted(bad)}")
        missing = {"sign", *ROLES} - set(entry)
        if missing:
            raise DiagramError(f"crossing {k}: missing field(s) {sorted(missing)}")
        if entry["sign"] not in (1, -1) or isinstance(entry["sign"], bool):
            raise DiagramError(f"crossing {k}: sign must be +1 or -1")
        c = Crossing(entry["sign"], *(_as_int(entry[r], f"crossing {k}.{r}") for r in ROLES))
        if "ccw" in entry:
            _check_rotation(entry["ccw"], c, k)
        crossings.append(c)
    b_in = tuple(_as_int(s, "boundary_in") for s in doc.get("boundary_in", []))
    b_out = tuple(_as_int(s, "boundary_out") for s in doc.get("boundary_out", []))
    declared = tuple(_as_int(s, "segments") for s in doc.get("segments", []))
    hint = doc.get("base_region_hint")
    if hint is not None:
        if not isinstance(hint, dict) or set(hint) != {"segment", "side"} or hint["side"] not in ("up", "dn"):
            raise DiagramError("base_region_hint must be {segment: id, side: 'up'|'dn'}")
        hint = (_as_int(hint["segment"], "base_region_hint"), hint["side"])
    used = {s for c in crossings for s in (c.s1, c.s2, c.s1p, c.s2p)} | set(b_in) | set(b_out)
    segments = tuple(sorted(used | set(declared)))
    d = Diagram(tuple(crossings), segments, b_in, b_out, hint)
    validate(d)
    return d


def parse_diagram(text: str) -> Diagram:
    """Parse and validate a diagram document (JSON)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagramError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return diagram_from_dict(doc)


def load_diagram(path) -> Diagram:
    with open(path, encoding="utf-8") as fh:
        return parse_diagram(fh.read())


def _free_loops(d: Diagram) -> set[int]:
    used = {s for c in d.crossings for s in (c.s1, c.s2, c.s1p, c.s2p)}
    used |= set(d.boundary_in) | set(d.boundary_out)
    return set(d.segments) - used


def validate(d: Diagram) -> None:
    heads: dict[int, list[str]] = {s: [] for s in d.segments}
    tails: dict[int, list[str]] = {s: [] for s in d.segments}
    for k, c in enumerate(d.crossings):
        heads[c.s1].append(f"crossing {k}")
        heads[c.s2].append(f"crossing {k}")
        tails[c.s1p].append(f"crossing {k}")
        tails[c.s2p].append(f"crossing {k}")
    for s in d.boundary_in:
        tails[s].append("boundary_in")
    for s in d.boundary_out:
        heads[s].append("boundary_out")
    loops = _free_loops(d)
    for s in d.segments:
        if s in loops:
            continue
        if len(heads[s]) != 1:
            raise DiagramError(
                f"segment {s} enters {len(heads[s])} places ({', '.join(heads[s]) or 'none'}); expected exactly one"
            )
        if len(tails[s]) != 1:
            raise DiagramError(
                f"segment {s} leaves {len(tails[s])} places ({', '.join(tails[s]) or 'none'}); expected exactly one"
            )
    if d.base_region_hint is not None and d.base_region_hint[0] not in heads:
        raise DiagramError(f"base_region_hint names unknown segment {d.base_region_hint[0]}")
    # Euler and connectivity checks happen in build_combinatorics.
    build_combinatorics(d)


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def _partition(items: Iterable[int], uf: _UnionFind) -> tuple[tuple[int, ...], ...]:
    groups: dict = {}
    for s in items:
        groups.setdefault(uf.find(s), []).append(s)
    return tuple(sorted(tuple(sorted(g)) for g in groups.values()))


@dataclass(frozen=True, eq=False)
class Combinatorics:
    diagram: Diagram
    regions: tuple[int, ...]
    up: dict
    dn: dict
    arcs: tuple[tuple[int, ...], ...]
    arc_of: dict
    components: tuple[tuple[int, ...], ...]
    component_of: dict
    corners: tuple[dict, ...]
    base_region: int
    # region -> list of (segment, neighbour region), sorted
    adjacency: dict = field(repr=False)

    def region_of(self, segment: int, side: str) -> int:
        return self.up[segment] if side == "up" else self.dn[segment]


def build_combinatorics(d: Diagram) -> Combinatorics:
    sides = _UnionFind()
    for s in d.segments:
        sides.find((s, "L"))
        sides.find((s, "R"))
    for c in d.crossings:
        sides.union((c.s1, "L"), (c.s2p, "L"))  # N
        sides.union((c.s1, "R"), (c.s2, "L"))  # W
        sides.union((c.s2, "R"), (c.s1p, "R"))  # S
        sides.union((c.s1p, "L"), (c.s2p, "R"))  # E
    # Walk the box boundary counterclockwise: down the left wall, up the right wall.
    walk = [(s, "in") for s in d.boundary_in] + [(s, "out") for s in reversed(d.boundary_out)]
    after = {"in": "R", "out": "L"}
    before = {"in": "L", "out": "R"}
    for k, (s, end) in enumerate(walk):
        t, end2 = walk[(k + 1) % len(walk)]
        sides.union((s, after[end]), (t, before[end2]))

    region_id: dict = {}
    up: dict = {}
    dn: dict = {}
    for s in d.segments:
        for side, table in (("L", up), ("R", dn)):
            root = sides.find((s, side))
            if root not in region_id:
                region_id[root] = len(region_id)
            table[s] = region_id[root]
    regions = tuple(range(len(region_id)))

    loops = _free_loops(d)
    vertices = len(d.crossings) + len(loops) + (1 if walk else 0)
    euler = vertices - len(d.segments) + len(regions)

    graph = _UnionFind()
    for s in d.segments:
        graph.find(("seg", s))
    for k, c in enumerate(d.crossings):
        for s in (c.s1, c.s2, c.s1p, c.s2p):
            graph.union(("seg", s), ("x", k))
    for s, _ in walk:
        graph.union(("seg", s), ("box",))
    pieces = {graph.find(("seg", s)) for s in d.segments}
    if len(pieces) > 1:
        raise DiagramError(f"diagram is split into {len(pieces)} disconnected pieces")
    if d.segments and euler != 2:
        raise DiagramError(f"face trace is not planar: V - E + F = {euler}, expected 2")

    arcs_uf = _UnionFind()
    comp_uf = _UnionFind()
    for s in d.segments:
        arcs_uf.find(s)
        comp_uf.find(s)
    for c in d.crossings:
        arcs_uf.union(*c.over)
        comp_uf.union(c.s1, c.s1p)
        comp_uf.union(c.s2, c.s2p)
    arcs = _partition(d.segments, arcs_uf)
    comps = _partition(d.segments, comp_uf)
    arc_of = {s: k for k, arc in enumerate(arcs) for s in arc}
    component_of = {s: k for k, comp in enumerate(comps) for s in comp}

    corners = tuple(
        {"N": up[c.s1], "W": dn[c.s1], "S": dn[c.s2], "E": up[c.s1p]} for c in d.crossings
    )

    adjacency: dict = {r: [] for r in regions}
    for s in d.segments:
        if up[s] != dn[s]:
            adjacency[up[s]].append((s, dn[s]))
            adjacency[dn[s]].append((s, up[s]))
    for r in regions:
        adjacency[r].sort()

    if d.base_region_hint is not None:
        seg, side = d.base_region_hint
        base = up[seg] if side == "up" else dn[seg]
    elif d.boundary_in:
        base = up[d.boundary_in[0]]
    elif d.boundary_out:
        base = up[d.boundary_out[0]]
    elif regions:
        size = {r: 0 for r in regions}
        for s in d.segments:
            size[up[s]] += 1
            size[dn[s]] += 1
        base = max(regions, key=lambda r: (size[r], -r))
    else:
        base = 0

    return Combinatorics(d, regions, up, dn, arcs, arc_of, comps, component_of, corners, base, adjacency)


@dataclass(frozen=True)
class WirtingerRelation:
    """lhs = word, with the word given as (arc, exponent) letters."""

    crossing: int
    lhs: int
    word: tuple[tuple[int, int], ...]

    @property
    def degenerate(self) -> bool:
        return all(a == self.lhs for a, _ in self.word)

    def __str__(self):
        rhs = " ".join(f"w{a}" + ("^-1" if e < 0 else "") for a, e in self.word)
        return f"w{self.lhs} = {rhs}"


@dataclass(frozen=True)
class WirtingerPresentation:
    generators: tuple[int, ...]
    relations: tuple[WirtingerRelation, ...]


def wirtinger_presentation(d: Diagram, c: Combinatorics) -> WirtingerPresentation:
    rels = []
    for k, x in enumerate(d.crossings):
        a1, a2 = c.arc_of[x.s1], c.arc_of[x.s2]
        if x.sign > 0:
            rels.append(WirtingerRelation(k, c.arc_of[x.s2p], ((a1, -1), (a2, 1), (a1, 1))))
        else:
            rels.append(WirtingerRelation(k, c.arc_of[x.s1p], ((a2, 1), (a1, 1), (a2, -1))))
    return WirtingerPresentation(tuple(range(len(c.arcs))), tuple(rels))


@dataclass(frozen=True)
class Letter:
    segment: int
    level: str  # '+' above the strand, '-' below it
    exponent: int


@dataclass(frozen=True)
class GroupoidWord:
    letters: tuple[Letter, ...]
    domain: int
    codomain: int

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(
            f"x{l.segment}^{l.level}" + ("" if l.exponent > 0 else "^-1") for l in self.letters
        )


def _step(c: Combinatorics, seg: int, frm: int) -> Letter:
    return Letter(seg, "+", 1 if c.up[seg] == frm else -1)


def over_path(c: Combinatorics, j: int, seed: int | None = None) -> GroupoidWord:
    """Over path from the base region to region ``j`` as a word in the x_i^+.

    Without a seed the path follows a breadth-first tree; with a seed the tree
    comes from a randomized depth-first search instead, which gives a different
    path to the same region (useful for path-independence checks).
    """
    if j not in c.adjacency:
        raise DiagramError(f"unknown region {j}")
    base = c.base_region
    if seed is None:
        order = lambda nbrs: nbrs  # noqa: E731
    else:
        rng = random.Random(seed)
        order = lambda nbrs: rng.sample(nbrs, len(nbrs))  # noqa: E731
    parent: dict = {base: None}
    if seed is None:
        queue = deque([base])
        while queue:
            r = queue.popleft()
            for seg, nb in order(c.adjacency[r]):
                if nb not in parent:
                    parent[nb] = (seg, r)
                    queue.append(nb)
    else:
        stack = [base]
        while stack:
            r = stack.pop()
            for seg, nb in order(c.adjacency[r]):
                if nb not in parent:
                    parent[nb] = (seg, r)
                    stack.append(nb)
    if j not in parent:
        raise DiagramError(f"region {j} is unreachable from the base region {base}")
    letters = []
    r = j
    while parent[r] is not None:
        seg, prev = parent[r]
        letters.append(_step(c, seg, prev))
        r = prev
    return GroupoidWord(tuple(reversed(letters)), base, j)


def region_tree(c: Combinatorics) -> list[tuple[int, int, int]]:
    """Breadth-first (region, parent region, segment) triples, base region first."""
    base = c.base_region
    seen = {base}
    out = [(base, -1, -1)]
    queue = deque([base])
    while queue:
        r = queue.popleft()
        for seg, nb in c.adjacency[r]:
            if nb not in seen:
                seen.add(nb)
                out.append((nb, r, seg))
                queue.append(nb)
    if len(seen) != len(c.regions):
        missing = sorted(set(c.regions) - seen)
        raise DiagramError(f"regions {missing} are unreachable from the base region {base}")
    return out
