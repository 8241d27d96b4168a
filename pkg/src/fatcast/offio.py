"""Reading and writing polyhedra in the ASCII OFF format."""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .errors import OFFParseError
from .geometry import ConvexPolyhedron, DEFAULT_TOL, _newell


def _tokens(text: str):
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            yield line.split()


def parse_off(text: str, tol: float = DEFAULT_TOL) -> ConvexPolyhedron:
    """Parse OFF text into a validated convex polyhedron.

    Facet loops are reoriented if they are listed clockwise.  The edge count
    in the header is ignored (0 is the usual placeholder).
    """
    rows = list(_tokens(text))
    if not rows or not rows[0][0].upper().endswith("OFF"):
        raise OFFParseError("missing OFF header")
    head = rows[0][1:]
    body = rows[1:]
    if not head:
        if not body:
            raise OFFParseError("missing counts line")
        head, body = body[0], body[1:]
    try:
        nv, nf = int(head[0]), int(head[1])
    except (IndexError, ValueError) as exc:
        raise OFFParseError("bad counts line") from exc
    if nv < 4 or nf < 4 or len(body) < nv + nf:
        raise OFFParseError(f"expected {nv} vertices and {nf} facets, file is too short")
    try:
        verts = np.array([[float(x) for x in row[:3]] for row in body[:nv]])
        facets = []
        for row in body[nv:nv + nf]:
            k = int(row[0])
            loop = [int(x) for x in row[1:1 + k]]
            if len(loop) != k:
                raise OFFParseError("facet line shorter than its vertex count")
            facets.append(loop)
    except ValueError as exc:
        raise OFFParseError(str(exc)) from exc
    if verts.shape != (nv, 3):
        raise OFFParseError("vertex lines need three coordinates")
    if any(i < 0 or i >= nv for loop in facets for i in loop):
        raise OFFParseError("facet references a missing vertex")

    inside = verts.mean(axis=0)
    oriented = []
    for loop in facets:
        pts = verts[loop]
        if len(loop) >= 3 and _newell(pts) @ (pts.mean(axis=0) - inside) < 0:
            loop = loop[::-1]
        oriented.append(loop)
    return ConvexPolyhedron.from_facets(verts, oriented, tol=tol)


def read_off(path, tol: float = DEFAULT_TOL) -> ConvexPolyhedron:
    try:
        text = Path(path).read_text()
    except UnicodeDecodeError as exc:
        raise OFFParseError("not a text file") from exc
    return parse_off(text, tol)


def format_off(P: ConvexPolyhedron) -> str:
    buf = io.StringIO()
    buf.write("OFF\n")
    buf.write(f"{len(P.vertices)} {len(P.facets)} {len(P.edges)}\n")
    for row in P.vertices.tolist():
        buf.write(" ".join(repr(x) for x in row) + "\n")
    for loop in P.facets:
        buf.write(" ".join(str(i) for i in (len(loop), *loop)) + "\n")
    return buf.getvalue()


def write_off(P: ConvexPolyhedron, path) -> None:
    Path(path).write_text(format_off(P))
