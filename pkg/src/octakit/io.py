"""File formats: representations, octahedral colorings, log-coordinate vectors.

Complex numbers are written as ``[re, im]`` pairs of JSON numbers; Python's
shortest round-trip float repr makes write-then-read exact.
"""

from __future__ import annotations

import json

import numpy as np

from .coloring import Sl2Coloring, check_representation, decorate, propagate_shadow
from .diagram import Combinatorics, Diagram
from .mat2 import DEFAULT, NumericContext
from .octahedral import OctahedralColor, OctahedralColoring


class FormatError(ValueError):
    pass


def cx(value) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(isinstance(x, (int, float)) for x in value):
        return complex(value[0], value[1])
    raise FormatError(f"expected a number or an [re, im] pair, got {value!r}")


def enc(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def enc_matrix(g) -> list:
    return [[enc(z) for z in row] for row in np.asarray(g)]


def dec_matrix(doc) -> np.ndarray:
    if not (isinstance(doc, list) and len(doc) == 2 and all(isinstance(r, list) and len(r) == 2 for r in doc)):
        raise FormatError("a matrix is a 2x2 nested list of numbers or [re, im] pairs")
    return np.array([[cx(z) for z in row] for row in doc], dtype=complex)


def load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{what}: syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


# Representation files
#   {"arcs": [{"arc": k | "segment": s, "matrix": M}, ...],
#    "decorations": [{"component": k, "index": i} | {"component": k, "line": [v1, v2]}],
#    "shadow": {"region": r, "vector": [u1, u2]}}            (optional)


def parse_representation(doc, d: Diagram, c: Combinatorics):
    """(arc -> matrix, decoration choice, shadow seed region, shadow seed vector)."""
    if not isinstance(doc, dict):
        raise FormatError("representation document must be a mapping")
    unknown = set(doc) - {"arcs", "decorations", "shadow"}
    if unknown:
        raise FormatError(f"representation: unknown field(s) {sorted(unknown)}")
    arc_g: dict = {}
    for k, entry in enumerate(doc.get("arcs", [])):
        if not isinstance(entry, dict) or "matrix" not in entry:
            raise FormatError(f"arcs[{k}]: expected {{arc|segment, matrix}}")
        if "arc" in entry:
            arc = entry["arc"]
            if not isinstance(arc, int) or not 0 <= arc < len(c.arcs):
                raise FormatError(f"arcs[{k}]: no arc {arc!r} (diagram has {len(c.arcs)})")
        elif "segment" in entry:
            if entry["segment"] not in c.arc_of:
                raise FormatError(f"arcs[{k}]: no segment {entry['segment']!r}")
            arc = c.arc_of[entry["segment"]]
        else:
            raise FormatError(f"arcs[{k}]: give 'arc' or 'segment'")
        g = dec_matrix(entry["matrix"])
        if arc in arc_g and not np.allclose(arc_g[arc], g, rtol=0, atol=1e-12):
            raise FormatError(f"arcs[{k}]: conflicting matrices for arc {arc}")
        arc_g[arc] = g
    choice: dict = {}
    for k, entry in enumerate(doc.get("decorations", [])):
        if not isinstance(entry, dict) or "component" not in entry:
            raise FormatError(f"decorations[{k}]: expected {{component, index|line}}")
        comp = entry["component"]
        if not isinstance(comp, int) or not 0 <= comp < len(c.components):
            raise FormatError(f"decorations[{k}]: no component {comp!r}")
        if "index" in entry:
            choice[comp] = int(entry["index"])
        elif "line" in entry:
            v = entry["line"]
            if not isinstance(v, list) or len(v) != 2:
                raise FormatError(f"decorations[{k}]: a line is a pair of numbers")
            choice[comp] = np.array([cx(z) for z in v])
        else:
            raise FormatError(f"decorations[{k}]: give 'index' or 'line'")
    region, vector = None, None
    if "shadow" in doc:
        sh = doc["shadow"]
        if not isinstance(sh, dict) or "vector" not in sh:
            raise FormatError("shadow: expected {region?, vector}")
        region = sh.get("region")
        if region is not None and region not in c.adjacency:
            raise FormatError(f"shadow: no region {region!r}")
        vector = np.array([cx(z) for z in sh["vector"]])
    return arc_g, choice, region, vector


def shadow_from_representation(doc, d: Diagram, c: Combinatorics, ctx: NumericContext = DEFAULT):
    arc_g, choice, region, vector = parse_representation(doc, d, c)
    col = check_representation(d, c, arc_g, ctx)
    dc = decorate(col, choice, ctx)
    return propagate_shadow(dc, region, vector, ctx)


def representation_to_dict(col: Sl2Coloring, choice: dict | None = None) -> dict:
    doc: dict = {"arcs": [{"arc": k, "matrix": enc_matrix(col.arc_matrix(k))} for k in range(len(col.comb.arcs))]}
    if choice:
        decs = []
        for comp, pick in sorted(choice.items()):
            if isinstance(pick, (int, np.integer)):
                decs.append({"component": comp, "index": int(pick)})
            else:
                decs.append({"component": comp, "line": [enc(z) for z in pick]})
        doc["decorations"] = decs
    return doc


# Octahedral coloring files: [{"segment": s, "a": z, "b": z, "m": z}, ...]


def coloring_to_list(chi: OctahedralColoring) -> list:
    return [
        {"segment": s, "a": enc(col.a), "b": enc(col.b), "m": enc(col.m)}
        for s, col in sorted(chi.colors.items())
    ]


def coloring_from_list(doc, d: Diagram, c: Combinatorics) -> OctahedralColoring:
    if not isinstance(doc, list):
        raise FormatError("an octahedral coloring file is a list of {segment, a, b, m}")
    colors = {}
    for k, entry in enumerate(doc):
        if not isinstance(entry, dict) or set(entry) != {"segment", "a", "b", "m"}:
            raise FormatError(f"entry {k}: expected exactly the fields segment, a, b, m")
        s = entry["segment"]
        if s not in c.up:
            raise FormatError(f"entry {k}: no segment {s!r} in the diagram")
        col = OctahedralColor(cx(entry["a"]), cx(entry["b"]), cx(entry["m"]))
        if 0 in col:
            raise FormatError(f"entry {k}: octahedral colors must be nonzero")
        colors[s] = col
    missing = set(d.segments) - set(colors)
    if missing:
        raise FormatError(f"no color for segment(s) {sorted(missing)}")
    return OctahedralColoring(d, c, colors)


def parse_vector(doc, n: int, what: str) -> np.ndarray:
    if not isinstance(doc, list) or len(doc) != n:
        raise FormatError(f"{what}: expected a list of {n} values")
    return np.array([cx(z) for z in doc], dtype=complex)


def parse_mu(text: str) -> list[complex]:
    """Comma-separated log-meridians; each entry is a real or a Python complex literal."""
    out = []
    for part in text.split(","):
        part = part.strip()
        try:
            out.append(complex(part.replace(" ", "")))
        except ValueError:
            raise FormatError(f"--mu: cannot read {part!r} as a number") from None
    return out


__all__ = [
    "FormatError",
    "cx",
    "enc",
    "enc_matrix",
    "dec_matrix",
    "load_json",
    "parse_representation",
    "shadow_from_representation",
    "representation_to_dict",
    "coloring_to_list",
    "coloring_from_list",
    "parse_vector",
    "parse_mu",
]


def dumps(doc) -> str:
    """JSON with one list entry per line and everything below that inline."""

    def inline(x):
        return json.dumps(x, separators=(", ", ": "))

    def block(x, pad):
        if isinstance(x, dict) and x:
            items = [f'{pad} {json.dumps(k)}: {block(v, pad + " ")}' for k, v in x.items()]
            return "{\n" + ",\n".join(items) + "\n" + pad + "}"
        if isinstance(x, list) and x and all(isinstance(e, dict) for e in x):
            return "[\n" + ",\n".join(f"{pad} {inline(e)}" for e in x) + "\n" + pad + "]"
        return inline(x)

    return block(doc, "") + "\n"
