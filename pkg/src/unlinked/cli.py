"""Command-line front end: ``unlinked <subcommand> ...``.

Exit codes: 0 success, 1 malformed input, 2 validation failure,
3 computation error, 4 recursion/oracle mismatch.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from fractions import Fraction

from . import io as uio
from .deformations import BifurcationDiagram, bifurcation, continue_c, default_grid
from .errors import Diagnostic, MalformedInput, UnlinkedError, ValidationFailed
from .morse_tree import nu_forest, nu_oracle, nu_recursive, validate_tree
from .rational import fmt, fmt_float
from .reeb_surface import (core_graph, heavy, nu_surface, superheavy, validate_surface, zeta, zeta_scan)

EXIT_OK, EXIT_MALFORMED, EXIT_INVALID, EXIT_COMPUTE, EXIT_MISMATCH = 0, 1, 2, 3, 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="unlinked", description="Spectral invariants of model Hamiltonians on the plane, "
                                              "closed surfaces and the sphere.")
    p.add_argument("--version", action="version", version="%(prog)s " + __import__("unlinked").__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="check a model document and list diagnostics")
    s.add_argument("model", help="model JSON (any kind)")

    s = sub.add_parser("spectrum", help="action spectrum of a plane tree as CSV")
    s.add_argument("model", help="plane_tree JSON (a single tree or a forest)")
    s.add_argument("--out", help="write the CSV here instead of stdout")

    s = sub.add_parser("nu", help="the invariant of a plane tree, forest or surface")
    s.add_argument("model", help="plane_tree or surface JSON")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--oracle", action="store_true", help="use brute-force enumeration instead of the recursion")
    g.add_argument("--both", action="store_true", help="print both values; exit 4 if they differ")
    s.add_argument("--cap", type=int, default=20, help="largest number of negative fixed points the oracle accepts")

    s = sub.add_parser("zeta", help="quasi-state of a surface Hamiltonian")
    s.add_argument("model", help="surface JSON")
    s.add_argument("--scan", action="store_true", help="also evaluate by superlevel-set scanning and print both")

    s = sub.add_parser("heavy", help="heaviness of a union of cells")
    s.add_argument("model", help="surface JSON")
    s.add_argument("--cells", nargs="+", required=True, help="vertex and edge ids forming the set")

    s = sub.add_parser("decompose", help="core graph and disk decomposition as JSON")
    s.add_argument("model", help="surface JSON")

    s = sub.add_parser("bifurcate", help="sample a family and write its bifurcation diagram")
    s.add_argument("model", help="family JSON")
    s.add_argument("--steps", type=int, default=512, help="number of sigma samples on [0, 1] (default 512)")
    s.add_argument("--out", help="CSV output path (default stdout)")
    s.add_argument("--svg", help="also render the diagram to this SVG file")
    s.add_argument("--tol", type=float, default=1e-9, help="tracking tolerance")

    s = sub.add_parser("continue-c", help="follow the spectral value c0 through a family")
    s.add_argument("model", help="family JSON")
    s.add_argument("--c0", type=_rational, required=True, help="starting value at sigma = 0 (rational)")
    s.add_argument("--steps", type=int, default=512, help="number of sigma samples on [0, 1] (default 512)")
    s.add_argument("--tol", type=float, default=1e-9, help="matching tolerance")

    s = sub.add_parser("sphere", help="capped orbits and c for a sphere height profile, or the counterexample")
    s.add_argument("target", help="sphere JSON, or the word 'counterexample'")
    s.add_argument("--zbeta", type=_rational, default=Fraction(1, 10), help="z_beta for the counterexample (default 1/10)")
    s.add_argument("--delta", type=_rational, default=Fraction(1, 100),
                   help="flattening half-width for the counterexample (default 1/100)")
    s.add_argument("--cappings", type=int, default=1, help="list cappings m in [-M, M] (default 1)")

    s = sub.add_parser("ingest-grid", help="plane tree from a sampled field (CSV, UNLK binary or grid JSON)")
    s.add_argument("grid", help="grid file")
    s.add_argument("--levels", type=int, default=256, help="thresholds per contour-tree edge (default 256)")
    s.add_argument("--prune", type=float, default=0.0, help="drop leaf features with level span below this")
    s.add_argument("--out", help="write the plane_tree JSON here instead of stdout")

    s = sub.add_parser("svg", help="render a bifurcation CSV as SVG polylines")
    s.add_argument("--diagram", required=True, help="bifurcation CSV written by 'bifurcate'")
    s.add_argument("--out", help="SVG output path (default stdout)")
    return p


# --------------------------------------------------------------------------

def _emit(text: str, path: str | None, out) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)


def _load(path: str, *kinds: str):
    try:
        with open(path) as fh:
            doc = uio.parse_document(fh.read())
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from None
    if kinds and doc.kind not in kinds:
        raise MalformedInput(f"{path}: expected a {' or '.join(kinds)} document, got {doc.kind!r}")
    return doc.kind, uio.decode(doc)


def _require(diags, what: str) -> None:
    if diags:
        raise ValidationFailed(diags, what)


def _validate_trees(ts) -> None:
    for t in ts:
        _require(validate_tree(t), "plane tree")


def cmd_validate(a, out) -> int:
    kind, m = _load(a.model)
    try:
        diags = _diagnose(kind, m)
    except UnlinkedError as exc:
        diags = [Diagnostic(type(exc).__name__, str(exc))]
    if diags:
        for d in diags:
            out.write(f"{d}\n")
        return EXIT_INVALID
    out.write(f"ok: valid {kind}\n")
    return EXIT_OK


def _diagnose(kind: str, m) -> list:
    diags = []
    if kind == "plane_tree":
        diags = [d for t in m for d in validate_tree(t)]
    elif kind == "surface":
        diags = validate_surface(m)
    elif kind == "sphere":
        from .sphere import sphere_fixed_points
        sphere_fixed_points(m)
    elif kind == "grid":
        from .ingest import validate_grid
        diags = validate_grid(m)
    elif kind == "family":
        m.spectrum_at(Fraction(0))
        m.spectrum_at(Fraction(1))
    return diags


def cmd_spectrum(a, out) -> int:
    _, ts = _load(a.model, "plane_tree")
    _validate_trees(ts)
    _emit(uio.spectrum_csv(ts), a.out, out)
    return EXIT_OK


def cmd_nu(a, out) -> int:
    kind, m = _load(a.model, "plane_tree", "surface")
    if kind == "surface":
        if a.oracle or a.both:
            raise MalformedInput("--oracle/--both apply to plane trees only")
        out.write(fmt(nu_surface(m)) + "\n")
        return EXIT_OK
    _validate_trees(m)
    rec = nu_recursive(m[0]) if len(m) == 1 else nu_forest(m)
    if a.oracle:
        out.write(fmt(nu_oracle(m if len(m) > 1 else m[0], a.cap)) + "\n")
        return EXIT_OK
    if a.both:
        orc = nu_oracle(m if len(m) > 1 else m[0], a.cap)
        out.write(f"recursive={fmt(rec)} oracle={fmt(orc)}\n")
        return EXIT_OK if rec == orc else EXIT_MISMATCH
    out.write(fmt(rec) + "\n")
    return EXIT_OK


def _scan_thresholds(g):
    levels = sorted({v.level for v in g.vertices})
    mids = [(x + y) / 2 for x, y in zip(levels, levels[1:])]
    return [levels[0] - 1] + mids + [levels[-1] + 1]


def cmd_zeta(a, out) -> int:
    _, g = _load(a.model, "surface")
    z = zeta(g)
    if a.scan:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            zs = zeta_scan(g, _scan_thresholds(g))
        for w in caught:
            a.err.write(f"warning: {w.message}\n")
        out.write(f"zeta={fmt(z)} scan={fmt(zs)}\n")
        return EXIT_OK if z == zs else EXIT_MISMATCH
    out.write(fmt(z) + "\n")
    return EXIT_OK


def cmd_heavy(a, out) -> int:
    _, g = _load(a.model, "surface")
    cells = sorted(set(a.cells))
    h, sh = heavy(g, cells), superheavy(g, cells)
    out.write(f"heavy={str(h).lower()} superheavy={str(sh).lower()}\n")
    return EXIT_OK


def cmd_decompose(a, out) -> int:
    _, g = _load(a.model, "surface")
    dec = core_graph(g)
    disks = []
    for d in sorted(dec.disks, key=lambda d: (d.attachment, sorted(d.vertex_ids))):
        disks.append({
            "attachment": d.attachment,
            "boundary_level": fmt(d.boundary_level),
            "vertices": sorted(d.vertex_ids),
            "edges": sorted(d.edge_ids),
            "nu": None if d.tree is None else fmt(nu_recursive(d.tree)),
        })
    doc = {"core_vertices": sorted(dec.core_vertices), "core_edges": sorted(dec.core_edges), "disks": disks}
    out.write(uio.dumps(doc))
    return EXIT_OK


def _grid(steps: int):
    if steps < 2:
        raise MalformedInput("--steps must be at least 2")
    return default_grid(steps)


def cmd_bifurcate(a, out) -> int:
    _, fam = _load(a.model, "family")
    d: BifurcationDiagram = bifurcation(fam, _grid(a.steps), tol=a.tol)
    _emit(uio.bifurcation_csv(d), a.out, out)
    if a.svg:
        _emit(uio.diagram_svg(d), a.svg, out)
    return EXIT_OK


def cmd_continue_c(a, out) -> int:
    _, fam = _load(a.model, "family")
    d = bifurcation(fam, _grid(a.steps), tol=a.tol)
    path = continue_c(d, float(a.c0), tol=a.tol)
    out.write("sigma,c\n")
    for s, v in path:
        out.write(f"{fmt_float(s)},{fmt_float(v)}\n")
    return EXIT_OK


def cmd_sphere(a, out) -> int:
    from .sphere import c_simple_bump, capped_orbits, counterexample, sphere_fixed_points
    from .errors import HypothesisViolated

    if a.target == "counterexample":
        r = counterexample(a.zbeta, a.delta)
        out.write(uio.dumps(uio.report_to_json(r)))
        return EXIT_OK
    _, hp = _load(a.target, "sphere")
    m = max(0, a.cappings)
    orbits = capped_orbits(hp, range(-m, m + 1))
    doc = {
        "fixed_points": [[fmt(z), k] for z, k in sphere_fixed_points(hp)],
        "capped_orbits": [{"z": fmt(o.z), "k": o.k, "m": o.m, "action": fmt(o.action), "cz_index": o.cz_index}
                          for o in orbits],
    }
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            doc["c"] = fmt(c_simple_bump(hp))
        except HypothesisViolated as exc:
            doc["c"] = None
            doc["hypothesis_violated"] = exc.clause
    for w in caught:
        a.err.write(f"warning: {w.message}\n")
    out.write(uio.dumps(doc))
    return EXIT_OK


def cmd_ingest(a, out) -> int:
    from .ingest import ingest, load_grid

    if a.grid.endswith(".json"):
        _, grid = _load(a.grid, "grid")
    else:
        try:
            grid = load_grid(a.grid)
        except OSError as exc:
            raise MalformedInput(f"cannot read {a.grid}: {exc.strerror}") from None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        t = ingest(grid, a.levels, a.prune)
    for w in caught:
        a.err.write(f"warning: {w.message}\n")
    _emit(uio.encode("plane_tree", t), a.out, out)
    return EXIT_OK


def cmd_svg(a, out) -> int:
    try:
        with open(a.diagram) as fh:
            text = fh.read()
    except OSError as exc:
        raise MalformedInput(f"cannot read {a.diagram}: {exc.strerror}") from None
    _emit(uio.render_svg(uio.read_bifurcation_csv(text)), a.out, out)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate, "spectrum": cmd_spectrum, "nu": cmd_nu, "zeta": cmd_zeta, "heavy": cmd_heavy,
    "decompose": cmd_decompose, "bifurcate": cmd_bifurcate, "continue-c": cmd_continue_c, "sphere": cmd_sphere,
    "ingest-grid": cmd_ingest, "svg": cmd_svg,
}


def run(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except _UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_MALFORMED
    a.err = err
    try:
        return COMMANDS[a.command](a, out)
    except MalformedInput as exc:
        err.write(f"malformed input: {exc}\n")
        return EXIT_MALFORMED
    except ValidationFailed as exc:
        for d in exc.diagnostics:
            err.write(f"{d}\n")
        return EXIT_INVALID
    except UnlinkedError as exc:
        err.write(f"error ({type(exc).__name__}): {exc}\n")
        return EXIT_COMPUTE
    except (ValueError, KeyError) as exc:
        err.write(f"error ({type(exc).__name__}): {exc}\n")
        return EXIT_COMPUTE


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
