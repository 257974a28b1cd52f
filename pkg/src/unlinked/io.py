"""JSON model documents, CSV tables and SVG rendering.

Rationals cross the file boundary as ``"p/q"`` strings (integers may be
plain JSON numbers); floats appear only in grid and bifurcation tables,
written with 17 significant digits.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .deformations import BifurcationDiagram, LinearFamily, SpecialFamily
from .errors import MalformedInput
from .ingest import ScalarGrid
from .morse_tree import PlaneTree, TreeEdge, Node, SpectrumEntry, spectrum
from .profile import RhoProfile
from .rational import fmt, fmt_float
from .reeb_surface import SurfaceEdge, SurfaceReebGraph, SurfaceVertex
from .sphere import CounterexampleReport, HeightProfile

VERSION = 1
KINDS = ("plane_tree", "surface", "sphere", "family", "grid")


@dataclass(frozen=True)
class ModelDocument:
    kind: str
    version: int
    payload: Any


def _q(x, where: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise MalformedInput(f"{where}: expected an integer or a 'p/q' string, got {x!r}")
    try:
        return Fraction(x.strip()) if isinstance(x, str) else Fraction(x)
    except (ValueError, ZeroDivisionError):
        raise MalformedInput(f"{where}: not a rational: {x!r}") from None


def _get(d, key: str, where: str):
    if not isinstance(d, dict):
        raise MalformedInput(f"{where}: expected an object")
    if key not in d:
        raise MalformedInput(f"{where}: missing field {key!r}")
    return d[key]


def _list(x, where: str) -> list:
    if not isinstance(x, list):
        raise MalformedInput(f"{where}: expected a list")
    return x


def _pl(points, where: str) -> tuple:
    out = []
    for i, p in enumerate(_list(points, where)):
        if not isinstance(p, list) or len(p) != 2:
            raise MalformedInput(f"{where}[{i}]: expected a pair")
        out.append((_q(p[0], f"{where}[{i}]"), _q(p[1], f"{where}[{i}]")))
    return tuple(out)


# --------------------------------------------------------------------------
# profiles and trees

def profile_to_json(profile: RhoProfile, level_at_lo: Fraction) -> dict:
    return {"rho": [[fmt(a), fmt(r)] for a, r in profile.breakpoints],
            "area_lo": fmt(profile.area_lo), "level_at_lo": fmt(level_at_lo)}


def profile_from_json(d, where: str = "profile") -> tuple[RhoProfile, Fraction]:
    bp = _pl(_get(d, "rho", where), f"{where}.rho")
    if not bp:
        raise MalformedInput(f"{where}.rho: empty")
    if "area_lo" in d and _q(d["area_lo"], f"{where}.area_lo") != bp[0][0]:
        raise MalformedInput(f"{where}: area_lo disagrees with the first breakpoint")
    return RhoProfile(bp), _q(_get(d, "level_at_lo", where), f"{where}.level_at_lo")


def tree_to_json(t: PlaneTree) -> dict:
    return {
        "nodes": [{"id": n.id, "kind": n.kind, "level": fmt(n.level)} for n in t.nodes],
        "edges": [{"id": e.id, "inner": e.inner, "outer": e.outer, "profile": profile_to_json(e.profile, e.level_at_lo)}
                  for e in t.edges],
    }


def tree_from_json(d, where: str = "payload") -> PlaneTree:
    nodes = []
    for i, n in enumerate(_list(_get(d, "nodes", where), f"{where}.nodes")):
        w = f"{where}.nodes[{i}]"
        nodes.append(Node(str(_get(n, "id", w)), str(_get(n, "kind", w)), _q(_get(n, "level", w), w + ".level")))
    edges = []
    for i, e in enumerate(_list(_get(d, "edges", where), f"{where}.edges")):
        w = f"{where}.edges[{i}]"
        prof, l0 = profile_from_json(_get(e, "profile", w), w + ".profile")
        outer = _get(e, "outer", w)
        edges.append(TreeEdge(str(_get(e, "id", w)), prof, l0, str(_get(e, "inner", w)),
                              None if outer is None else str(outer)))
    return PlaneTree(tuple(nodes), tuple(edges))


def forest_from_json(d, where: str = "payload") -> list[PlaneTree]:
    """A single tree payload or ``{"trees": [...]}``."""
    if isinstance(d, dict) and "trees" in d:
        return [tree_from_json(t, f"{where}.trees[{i}]") for i, t in enumerate(_list(d["trees"], where + ".trees"))]
    return [tree_from_json(d, where)]


def forest_to_json(ts: Sequence[PlaneTree]) -> dict:
    if len(ts) == 1:
        return tree_to_json(ts[0])
    return {"trees": [tree_to_json(t) for t in ts]}


# --------------------------------------------------------------------------
# surfaces, spheres, families, grids

def surface_to_json(g: SurfaceReebGraph) -> dict:
    edges = []
    for e in g.edges:
        item = {"id": e.id, "ends": list(e.ends)}
        if e.profile is not None:
            item["profile"] = profile_to_json(e.profile, e.level_at_lo)
        edges.append(item)
    return {"genus": g.genus,
            "vertices": [{"id": v.id, "kind": v.kind, "level": fmt(v.level)} for v in g.vertices],
            "edges": edges}


def surface_from_json(d, where: str = "payload") -> SurfaceReebGraph:
    genus = _get(d, "genus", where)
    if isinstance(genus, bool) or not isinstance(genus, int):
        raise MalformedInput(f"{where}.genus: expected an integer")
    vs = []
    for i, v in enumerate(_list(_get(d, "vertices", where), f"{where}.vertices")):
        w = f"{where}.vertices[{i}]"
        vs.append(SurfaceVertex(str(_get(v, "id", w)), str(_get(v, "kind", w)), _q(_get(v, "level", w), w + ".level")))
    es = []
    for i, e in enumerate(_list(_get(d, "edges", where), f"{where}.edges")):
        w = f"{where}.edges[{i}]"
        ends = _list(_get(e, "ends", w), w + ".ends")
        if len(ends) != 2:
            raise MalformedInput(f"{w}.ends: expected two vertex ids")
        prof = l0 = None
        if e.get("profile") is not None:
            prof, l0 = profile_from_json(e["profile"], w + ".profile")
        es.append(SurfaceEdge(str(_get(e, "id", w)), (str(ends[0]), str(ends[1])), prof, l0))
    return SurfaceReebGraph(genus, tuple(vs), tuple(es))


def sphere_to_json(hp: HeightProfile) -> dict:
    return {"dh": [[fmt(z), fmt(v)] for z, v in hp.dh], "h0": fmt(hp.h0)}


def sphere_from_json(d, where: str = "payload") -> HeightProfile:
    dh = _pl(_get(d, "dh", where), where + ".dh")
    h0 = _q(_get(d, "h0", where), where + ".h0")
    if len(dh) < 2 or dh[0][0] != 0 or dh[-1][0] != 1:
        raise MalformedInput(f"{where}.dh: must span [0, 1] with at least two breakpoints")
    if any(b[0] <= a[0] for a, b in zip(dh, dh[1:])):
        raise MalformedInput(f"{where}.dh: breakpoints must be strictly increasing")
    return HeightProfile(dh, h0)


def _model_tree(d, where: str) -> PlaneTree:
    if isinstance(d, dict) and d.get("kind") == "plane_tree":
        d = _get(d, "payload", where)
    return tree_from_json(d, where)


def family_from_json(d, where: str = "payload"):
    kind = _get(d, "kind", where)
    if kind == "linear":
        return LinearFamily(_model_tree(_get(d, "from", where), where + ".from"),
                            _model_tree(_get(d, "to", where), where + ".to"))
    if kind == "special":
        g = _get(d, "g", where)
        prof = RhoProfile(_pl(_get(g, "rho", where + ".g"), where + ".g.rho"))
        width = d.get("flatten_width")
        width = None if width is None else _q(width, where + ".flatten_width")
        inside = [_model_tree(t, f"{where}.inside[{i}]") for i, t in enumerate(_list(d.get("inside", []), where + ".inside"))]
        return SpecialFamily.from_profile(prof, width, inside)
    raise MalformedInput(f"{where}.kind: unknown family kind {kind!r}")


def family_to_json(f, flatten_width=None, g: RhoProfile | None = None) -> dict:
    if isinstance(f, LinearFamily):
        return {"kind": "linear", "from": tree_to_json(f.t0), "to": tree_to_json(f.t1)}
    if g is None:
        raise ValueError("special families are serialized from their input profile")
    out = {"kind": "special", "g": {"rho": [[fmt(a), fmt(r)] for a, r in g.breakpoints], "area_lo": fmt(g.area_lo)},
           "flatten_width": None if flatten_width is None else fmt(flatten_width)}
    if f.inside:
        out["inside"] = [tree_to_json(t) for t in f.inside]
    return out


def grid_to_json(g: ScalarGrid) -> dict:
    return {"width": g.width, "height": g.height, "spacing": g.spacing,
            "values": [[float(x) for x in row] for row in g.values]}


def grid_from_json(d, where: str = "payload") -> ScalarGrid:
    try:
        w, h = int(_get(d, "width", where)), int(_get(d, "height", where))
        s = float(_get(d, "spacing", where))
        vals = np.array(_get(d, "values", where), dtype=float)
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"{where}: {exc}") from None
    if vals.shape != (h, w):
        raise MalformedInput(f"{where}.values: expected {h} rows of {w} values")
    return ScalarGrid(w, h, s, vals)


# --------------------------------------------------------------------------
# documents

_DECODERS = {
    "plane_tree": forest_from_json,
    "surface": surface_from_json,
    "sphere": sphere_from_json,
    "family": family_from_json,
    "grid": grid_from_json,
}


def parse_document(text: str) -> ModelDocument:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"not valid JSON: {exc}") from None
    kind = _get(d, "kind", "document")
    version = _get(d, "version", "document")
    if kind not in KINDS:
        raise MalformedInput(f"unknown document kind {kind!r}")
    if version != VERSION:
        raise MalformedInput(f"unsupported version {version!r}; expected {VERSION}")
    return ModelDocument(kind, version, _get(d, "payload", "document"))


def decode(doc: ModelDocument):
    return _DECODERS[doc.kind](doc.payload)


def load_model(path):
    with open(path) as fh:
        doc = parse_document(fh.read())
    return doc.kind, decode(doc)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=True) + "\n"


def document(kind: str, payload) -> dict:
    return {"kind": kind, "version": VERSION, "payload": payload}


def encode(kind: str, model) -> str:
    enc = {"plane_tree": lambda m: forest_to_json(m) if isinstance(m, (list, tuple)) else tree_to_json(m),
           "surface": surface_to_json, "sphere": sphere_to_json, "grid": grid_to_json}[kind]
    return dumps(document(kind, enc(model)))


def report_to_json(r: CounterexampleReport) -> dict:
    return {
        "c_sum": fmt(r.c_sum), "c_sum_error": fmt(r.c_sum_error), "c1": fmt(r.c1), "c1_is_upper_bound": True,
        "c2": fmt(r.c2), "gap": fmt(r.gap), "gap_lower": fmt(r.gap_lower),
        "parameters": {k: (fmt(v) if isinstance(v, Fraction) else v) for k, v in r.parameters.items()},
    }


# --------------------------------------------------------------------------
# tables

SPECTRUM_COLUMNS = ("source", "kind", "area", "k", "level", "action", "negative")
BIFURCATION_COLUMNS = ("sigma", "branch_id", "action", "provenance")


def spectrum_rows(ts: Sequence[PlaneTree]) -> list[tuple]:
    rows = []
    multi = len(ts) > 1
    seen_y = False
    for i, t in enumerate(ts):
        for s in spectrum(t):
            if s.kind == "trivial":
                if seen_y:
                    continue
                seen_y = True
            src = s.label if (not multi or s.kind == "trivial") else f"{i}:{s.label}"
            rows.append((src, s.kind, fmt(s.area), fmt(s.rho), fmt(s.level), fmt(s.action),
                         "true" if s.negative else "false"))
    return rows


def write_csv(columns: Sequence[str], rows, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)


def spectrum_csv(ts: Sequence[PlaneTree]) -> str:
    buf = io.StringIO()
    write_csv(SPECTRUM_COLUMNS, spectrum_rows(ts), buf)
    return buf.getvalue()


def read_csv(text: str, columns: Sequence[str]) -> list[dict]:
    r = csv.DictReader(io.StringIO(text))
    if tuple(r.fieldnames or ()) != tuple(columns):
        raise MalformedInput(f"expected columns {','.join(columns)}")
    return list(r)


def bifurcation_rows(d: BifurcationDiagram) -> list[tuple]:
    rows = []
    for b in d.branches:
        for s, v in zip(b.sigmas, b.values):
            rows.append((fmt_float(s), b.id, fmt_float(v), b.provenance))
    rows.sort(key=lambda r: (float(r[0]), r[1]))
    return rows


def bifurcation_csv(d: BifurcationDiagram) -> str:
    buf = io.StringIO()
    write_csv(BIFURCATION_COLUMNS, bifurcation_rows(d), buf)
    return buf.getvalue()


def read_bifurcation_csv(text: str) -> dict[int, tuple[str, list[tuple[float, float]]]]:
    """Branches keyed by id: ``(provenance, [(sigma, action), ...])``."""
    out: dict[int, tuple[str, list]] = {}
    for row in read_csv(text, BIFURCATION_COLUMNS):
        try:
            bid = int(row["branch_id"])
            pt = (float(row["sigma"]), float(row["action"]))
        except ValueError as exc:
            raise MalformedInput(str(exc)) from None
        out.setdefault(bid, (row["provenance"], []))[1].append(pt)
    return out


# --------------------------------------------------------------------------
# svg

_COLOURS = {"inside": "#1f77b4", "outside": "#d62728", "model": "#2ca02c"}


def render_svg(branches: dict[int, tuple[str, list[tuple[float, float]]]], width: int = 640, height: int = 400) -> str:
    """Bifurcation diagram as one polyline per branch (sigma across, action up)."""
    pad = 40
    pts = [p for _, ps in branches.values() for p in ps]
    if pts:
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def X(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def Y(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
             f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
             f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
             f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
             f'<text x="{width / 2:.1f}" y="{height - 8}" font-size="12" text-anchor="middle">sigma</text>',
             f'<text x="12" y="{height / 2:.1f}" font-size="12" transform="rotate(-90 12 {height / 2:.1f})" text-anchor="middle">action</text>',
             f'<text x="{pad - 4}" y="{Y(y1) + 4:.1f}" font-size="10" text-anchor="end">{y1:.4g}</text>',
             f'<text x="{pad - 4}" y="{Y(y0) + 4:.1f}" font-size="10" text-anchor="end">{y0:.4g}</text>']
    for bid in sorted(branches):
        prov, ps = branches[bid]
        col = _COLOURS.get(prov, "#555555")
        coords = " ".join(f"{X(x):.3f},{Y(y):.3f}" for x, y in sorted(ps))
        lines.append(f'<polyline data-branch="{bid}" fill="none" stroke="{col}" stroke-width="1.5" points="{coords}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def diagram_svg(d: BifurcationDiagram) -> str:
    return render_svg({b.id: (b.provenance, list(zip(b.sigmas, b.values))) for b in d.branches})
