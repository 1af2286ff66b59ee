"""Quiver spec files and representation JSON.

Quiver spec format, one directive per line, ``#`` starts a comment::

    vertex <id> dim=<nonneg int> alpha=<p or p/q>
    edge <tail-id> -> <head-id>

Edges may repeat; their order of appearance is their index.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

import numpy as np

from .quiver import DimensionVector, Quiver, QuiverError, QuiverSetup, Representation, StabilityParameter


class QuiverParseError(QuiverError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


_RATIONAL = re.compile(r"[+-]?\d+(?:/\d+)?\Z")
_VERTEX = re.compile(r"vertex\s+(\S+)\s+(.*)\Z")
_EDGE = re.compile(r"edge\s+(\S+)\s*->\s*(\S+)\Z")


def parse_rational(text: str) -> Fraction:
    if not _RATIONAL.match(text):
        raise ValueError(f"malformed rational {text!r} (expected p or p/q)")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ValueError(f"malformed rational {text!r} (zero denominator)") from None


def parse_quiver_file(text: str) -> QuiverSetup:
    vertices: list[str] = []
    dims: list[int] = []
    alphas: list[Fraction] = []
    edges: list[tuple[str, str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _VERTEX.match(line)
        if m:
            vid, rest = m.groups()
            if vid in vertices:
                raise QuiverParseError(lineno, f"duplicate vertex id {vid!r}")
            fields = {}
            for tok in rest.split():
                key, eq, val = tok.partition("=")
                if not eq or key not in ("dim", "alpha") or key in fields:
                    raise QuiverParseError(lineno, f"unexpected field {tok!r}")
                fields[key] = val
            if set(fields) != {"dim", "alpha"}:
                raise QuiverParseError(lineno, "vertex needs both dim= and alpha=")
            if not re.fullmatch(r"\d+", fields["dim"]):
                raise QuiverParseError(lineno, f"dim must be a nonnegative integer, got {fields['dim']!r}")
            try:
                alpha = parse_rational(fields["alpha"])
            except ValueError as exc:
                raise QuiverParseError(lineno, str(exc)) from None
            vertices.append(vid)
            dims.append(int(fields["dim"]))
            alphas.append(alpha)
            continue
        m = _EDGE.match(line)
        if m:
            edges.append((m.group(1), m.group(2), lineno))
            continue
        raise QuiverParseError(lineno, f"unknown directive {line.split()[0]!r}")
    for t, h, lineno in edges:
        for end in (t, h):
            if end not in vertices:
                raise QuiverParseError(lineno, f"edge endpoint {end!r} is not a declared vertex")
    q = Quiver(tuple(vertices), tuple((t, h) for t, h, _ in edges))
    return QuiverSetup(q, DimensionVector(q.vertices, dims), StabilityParameter(q.vertices, alphas))


def serialize_quiver(setup: QuiverSetup) -> str:
    lines = [
        f"vertex {v} dim={d} alpha={a}"
        for v, d, a in zip(setup.quiver.vertices, setup.dims.values, setup.alpha.values)
    ]
    lines += [f"edge {t} -> {h}" for t, h in setup.quiver.edges]
    return "\n".join(lines) + "\n"


def representation_to_dict(rep: Representation) -> dict:
    edges = []
    for (t, h), m in zip(rep.quiver.edges, rep.matrices):
        matrix = [[[float(z.real), float(z.imag)] for z in row] for row in m]
        edges.append({"tail": t, "head": h, "matrix": matrix})
    return {"dims": rep.dims.as_dict(), "edges": edges}


def serialize_representation(rep: Representation) -> str:
    return json.dumps(representation_to_dict(rep), sort_keys=True) + "\n"


def parse_representation(text: str, setup: QuiverSetup) -> Representation:
    """Read a representation JSON document against the given quiver setup."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise QuiverError(f"representation file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "dims" not in doc or "edges" not in doc:
        raise QuiverError("representation JSON needs 'dims' and 'edges'")
    q = setup.quiver
    dims = doc["dims"]
    if set(dims) != set(q.vertices):
        raise QuiverError("representation dims do not cover exactly the quiver's vertices")
    dv = DimensionVector.from_mapping(q.vertices, dims)
    if dv != setup.dims:
        raise QuiverError(f"representation dims {dv} differ from the quiver file's {setup.dims}")
    if len(doc["edges"]) != len(q.edges):
        raise QuiverError(f"expected {len(q.edges)} edges, found {len(doc['edges'])}")
    mats = []
    for a, (entry, (t, h)) in enumerate(zip(doc["edges"], q.edges)):
        if (entry.get("tail"), entry.get("head")) != (t, h):
            raise QuiverError(f"edge {a}: expected {t} -> {h}, found {entry.get('tail')} -> {entry.get('head')}")
        try:
            arr = np.array(entry["matrix"], dtype=float)
            if arr.size == 0:
                mats.append(np.zeros((dv[h], dv[t]), complex))
                continue
            if arr.ndim != 3 or arr.shape[-1] != 2:
                raise ValueError("entries must be [re, im] pairs")
            mats.append(arr[..., 0] + 1j * arr[..., 1])
        except (KeyError, TypeError, ValueError) as exc:
            raise QuiverError(f"edge {a}: malformed matrix ({exc})") from None
    return Representation(q, dv, mats)
