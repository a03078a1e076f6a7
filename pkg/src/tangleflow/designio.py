"""Design-file grammar, serialization, and result writers.

A design file is a sequence of directive lines; '#' starts a comment and
blank lines are ignored.  The first directive must be `kind`, which selects
the grammar:

    kind entangled-graph          kind weave
    vertices N                    threads NB NR
    lattice a b c d               spacing S
    edge U V SX SY   (repeated)   sign +/- ... (NB rows of NR entries)
    sign +/- ...     (one row)

Malformed tokens and unknown directives are syntax errors carrying the
1-based line and column of the offending token; structurally invalid but
well-formed input (wrong counts, bad ranges, zero signs) is a semantic
error.
"""
from __future__ import annotations

import json
import math
import re
from pathlib import Path

from .errors import DesignSemanticError, DesignSyntaxError, IoError
from .model import (
    GraphDesign,
    PeriodicQuotientGraph,
    WeaveDesign,
    build_entangled_system,
    build_weave_system,
)

__all__ = [
    "parse_design",
    "serialize_design",
    "load_design",
    "design_to_system",
    "write_trajectory_csv",
    "write_configuration_json",
]

_TOKEN = re.compile(r"\S+")
_INT = re.compile(r"[+-]?\d+\Z")

_KNOWN_DIRECTIVES = {"kind", "vertices", "lattice", "edge", "sign", "threads", "spacing"}
_GRAPH_ONLY = {"vertices", "lattice", "edge"}
_WEAVE_ONLY = {"threads", "spacing"}


def _tokenize(text):
    rows = []
    for line_no, raw in enumerate(text.splitlines(), 1):
        hash_pos = raw.find("#")
        content = raw if hash_pos < 0 else raw[:hash_pos]
        tokens = [(m.start() + 1, m.group()) for m in _TOKEN.finditer(content)]
        if tokens:
            rows.append((line_no, tokens))
    return rows


def _parse_int(line_no, token):
    col, text = token
    if not _INT.match(text):
        raise DesignSyntaxError(line_no, col, f"expected an integer, got {text!r}")
    return int(text)


def _parse_float(line_no, token):
    col, text = token
    try:
        value = float(text)
    except ValueError:
        raise DesignSyntaxError(line_no, col, f"expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise DesignSyntaxError(line_no, col, f"expected a finite number, got {text!r}")
    return value


def _parse_sign(line_no, token):
    col, text = token
    if text == "+":
        return 1
    if text == "-":
        return -1
    if _INT.match(text):
        value = int(text)
        if value in (1, -1):
            return value
        raise DesignSemanticError(f"sign entries must be + or -, got {text!r}")
    raise DesignSyntaxError(line_no, col, f"expected a sign entry (+ or -), got {text!r}")


def parse_design(text):
    """Parse design text into a GraphDesign or WeaveDesign."""
    rows = _tokenize(text)
    if not rows:
        raise DesignSemanticError("empty design: the kind directive is missing")

    kind = None
    scalars = {}  # vertices, threads, spacing, lattice
    edges = []
    sign_rows = []

    for index, (line_no, tokens) in enumerate(rows):
        col0, directive = tokens[0]
        if directive not in _KNOWN_DIRECTIVES:
            raise DesignSyntaxError(line_no, col0, f"unknown directive {directive!r}")
        if index == 0 and directive != "kind":
            raise DesignSemanticError("the first directive must be kind")
        args = tokens[1:]

        def need(count):
            if len(args) != count:
                raise DesignSyntaxError(
                    line_no,
                    col0,
                    f"directive {directive!r} takes {count} value(s), got {len(args)}",
                )

        if directive == "kind":
            need(1)
            if kind is not None:
                raise DesignSemanticError("duplicate kind directive")
            col, value = args[0]
            if value not in ("entangled-graph", "weave"):
                raise DesignSyntaxError(
                    line_no, col, f"kind must be entangled-graph or weave, got {value!r}"
                )
            kind = value
            continue

        if (directive in _GRAPH_ONLY and kind != "entangled-graph") or (
            directive in _WEAVE_ONLY and kind != "weave"
        ):
            raise DesignSemanticError(
                f"directive {directive!r} is not valid for kind {kind!r}"
            )

        if directive == "vertices":
            need(1)
            if "vertices" in scalars:
                raise DesignSemanticError("duplicate vertices directive")
            scalars["vertices"] = _parse_int(line_no, args[0])
        elif directive == "lattice":
            need(4)
            if "lattice" in scalars:
                raise DesignSemanticError("duplicate lattice directive")
            a, b, c, d = (_parse_float(line_no, t) for t in args)
            scalars["lattice"] = ((a, b), (c, d))
        elif directive == "edge":
            need(4)
            u, v, sx, sy = (_parse_int(line_no, t) for t in args)
            edges.append((u, v, (sx, sy)))
        elif directive == "threads":
            need(2)
            if "threads" in scalars:
                raise DesignSemanticError("duplicate threads directive")
            scalars["threads"] = tuple(_parse_int(line_no, t) for t in args)
        elif directive == "spacing":
            need(1)
            if "spacing" in scalars:
                raise DesignSemanticError("duplicate spacing directive")
            scalars["spacing"] = _parse_float(line_no, args[0])
        elif directive == "sign":
            if not args:
                raise DesignSyntaxError(
                    line_no, col0, "directive 'sign' needs at least one entry"
                )
            sign_rows.append(tuple(_parse_sign(line_no, t) for t in args))

    if kind == "entangled-graph":
        return _assemble_graph(scalars, edges, sign_rows)
    return _assemble_weave(scalars, sign_rows)


def _assemble_graph(scalars, edges, sign_rows):
    if "vertices" not in scalars:
        raise DesignSemanticError("missing vertices directive")
    if "lattice" not in scalars:
        raise DesignSemanticError("missing lattice directive")
    if not sign_rows:
        raise DesignSemanticError("missing sign directive")
    if len(sign_rows) != 1:
        raise DesignSemanticError(
            f"a graph design takes one sign line, got {len(sign_rows)}"
        )
    n = scalars["vertices"]
    if n < 1:
        raise DesignSemanticError(f"vertex count must be positive, got {n}")
    sign = sign_rows[0]
    if len(sign) != n:
        raise DesignSemanticError(
            f"sign line has {len(sign)} entries for {n} vertices"
        )
    for u, v, _shift in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise DesignSemanticError(
                f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}"
            )
    graph = PeriodicQuotientGraph(
        n_vertices=n, edges=tuple(edges), lattice_basis=scalars["lattice"]
    )
    return GraphDesign(graph=graph, sign=sign)


def _assemble_weave(scalars, sign_rows):
    if "threads" not in scalars:
        raise DesignSemanticError("missing threads directive")
    if "spacing" not in scalars:
        raise DesignSemanticError("missing spacing directive")
    n_blue, n_red = scalars["threads"]
    if n_blue < 1 or n_red < 1:
        raise DesignSemanticError(
            f"thread counts must be positive, got {n_blue} and {n_red}"
        )
    if len(sign_rows) != n_blue:
        raise DesignSemanticError(
            f"expected {n_blue} sign rows, got {len(sign_rows)}"
        )
    for i, row in enumerate(sign_rows):
        if len(row) != n_red:
            raise DesignSemanticError(
                f"sign row {i + 1} has {len(row)} entries, expected {n_red}"
            )
    spacing = scalars["spacing"]
    if not spacing > 0:
        raise DesignSemanticError(f"spacing must be positive, got {spacing!r}")
    return WeaveDesign(
        n_blue=n_blue, n_red=n_red, sign=tuple(sign_rows), spacing=spacing
    )


def _g17(value) -> str:
    return format(float(value), ".17g")


def _sign_token(value) -> str:
    return "+" if value == 1 else "-"


def serialize_design(design) -> str:
    """Canonical text for a design; parse_design inverts it exactly."""
    if isinstance(design, GraphDesign):
        graph = design.graph
        lines = [
            "kind entangled-graph",
            f"vertices {graph.n_vertices}",
            "lattice "
            + " ".join(_g17(x) for row in graph.lattice_basis for x in row),
        ]
        for u, v, (sx, sy) in graph.edges:
            lines.append(f"edge {u} {v} {sx} {sy}")
        lines.append("sign " + " ".join(_sign_token(s) for s in design.sign))
    elif isinstance(design, WeaveDesign):
        lines = [
            "kind weave",
            f"threads {design.n_blue} {design.n_red}",
            f"spacing {_g17(design.spacing)}",
        ]
        for row in design.sign:
            lines.append("sign " + " ".join(_sign_token(s) for s in row))
    else:
        raise TypeError(f"not a design: {design!r}")
    return "\n".join(lines) + "\n"


def load_design(path):
    """Read and parse a design file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoError(f"cannot read design file {path}: {exc}") from None
    return parse_design(text)


def design_to_system(design):
    """Build the runnable system for a parsed design."""
    if isinstance(design, GraphDesign):
        return build_entangled_system(design.graph, design.sign)
    if isinstance(design, WeaveDesign):
        return build_weave_system(design)
    raise TypeError(f"not a design: {design!r}")


def write_trajectory_csv(path, trajectory):
    """Write samples as CSV: 17-significant-digit cells, '\\n' line endings.

    Columns: t, energy, grad_norm, min_gap, M_B, M_R, then one M_W column per
    tangle component for weave runs.
    """
    samples = trajectory.samples
    k = len(samples[0].m_components) if samples else 0
    header = "t,energy,grad_norm,min_gap,M_B,M_R" + "".join(
        f",M_W{i}" for i in range(1, k + 1)
    )
    lines = [header]
    for s in samples:
        cells = [
            _g17(s.t),
            _g17(s.energy),
            _g17(s.grad_norm),
            _g17(s.min_gap),
            _g17(s.m_blue),
            _g17(s.m_red),
        ]
        cells.extend(_g17(m) for m in s.m_components)
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


def write_configuration_json(path, system, config):
    """Write one configuration as JSON: per-vertex records plus the edge list
    (graphs) or thread polylines with their wrap shifts (weaves)."""
    payload = {
        "kind": system.kind,
        "lattice_basis": [[float(x) for x in row] for row in system.lattice_basis],
        "vertices": [
            {
                "x": float(config.x[v, 0]),
                "y": float(config.x[v, 1]),
                "z_blue": float(config.z_blue[v]),
                "z_red": float(config.z_red[v]),
                "sign": int(system.sign[v]),
            }
            for v in range(system.n_vertices)
        ],
    }
    if system.kind == "entangled-graph":
        payload["edges"] = [
            {"u": int(u), "v": int(v), "shift": [int(sx), int(sy)]}
            for u, v, (sx, sy) in system.edges
        ]
    else:
        threads = []
        for index, thread in enumerate(system.blue_threads, 1):
            threads.append(
                {
                    "family": "blue",
                    "index": index,
                    "vertices": [int(v) for v in thread],
                    "wrap_shift": [1, 0],
                }
            )
        for index, thread in enumerate(system.red_threads, 1):
            threads.append(
                {
                    "family": "red",
                    "index": index,
                    "vertices": [int(v) for v in thread],
                    "wrap_shift": [0, 1],
                }
            )
        payload["threads"] = threads
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")
