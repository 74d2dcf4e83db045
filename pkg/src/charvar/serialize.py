"""JSON and CSV round-trips for representations, flow traces, and
census reports.

Matrices serialize row-major with one [re, im] pair per entry.  JSON is
written with sorted keys and a fixed layout, so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import BadInput
from .kempfness import FlowTrace
from .presentation import (
    Family,
    GraphSpec,
    GroupPresentation,
    parse_presentation,
    presentation_to_text,
)
from .repvar import Rep, kn_residual, norm_sq, relation_residual

_REP_FORMAT = "charvar-rep"
_REP_VERSION = 1


def matrix_to_list(m: np.ndarray) -> list:
    """Row-major nested list with [re, im] pairs for entries."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_list(obj) -> np.ndarray:
    try:
        rows = [[complex(re, im) for re, im in row] for row in obj]
    except (TypeError, ValueError) as exc:
        raise BadInput(f"matrix entries must be [re, im] pairs: {exc}") from exc
    m = np.array(rows, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise BadInput(f"matrix shape {m.shape} is not square")
    return m


def rep_to_dict(rep: Rep) -> dict:
    """Plain-dict form of a representation, presentation included.

    The presentation text carries names and relators; the family tag,
    commutation graph, and fixed indices ride alongside because plain
    text has no slot for them.
    """
    pres = rep.presentation
    return {
        "format": _REP_FORMAT,
        "version": _REP_VERSION,
        "dim": rep.dim,
        "presentation": {
            "text": presentation_to_text(pres),
            "family": pres.family.value,
            "graph_edges": (
                None if pres.graph is None else pres.graph.sorted_edges()
            ),
            "fixed": list(pres.fixed),
        },
        "images": [matrix_to_list(a) for a in rep.images],
    }


def rep_from_dict(obj: dict) -> Rep:
    """Inverse of :func:`rep_to_dict`; validates format and rebuilds the
    annotated presentation."""
    if not isinstance(obj, dict) or obj.get("format") != _REP_FORMAT:
        raise BadInput("not a representation document")
    if obj.get("version") != _REP_VERSION:
        raise BadInput(f"unsupported document version {obj.get('version')!r}")
    pd = obj["presentation"]
    parsed = parse_presentation(pd["text"])
    edges = pd.get("graph_edges")
    graph = (
        None
        if edges is None
        else GraphSpec(
            len(parsed.generator_names),
            frozenset(frozenset(e) for e in edges),
        )
    )
    pres = GroupPresentation(
        parsed.generator_names,
        parsed.relators,
        family=Family(pd.get("family", "custom")),
        graph=graph,
        fixed=tuple(pd.get("fixed", ())),
    )
    images = tuple(matrix_from_list(m) for m in obj["images"])
    return Rep(pres, images)


def to_plain(obj):
    """Recursively strip dataclasses, enums, arrays, and numpy scalars
    down to JSON-ready primitives."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: to_plain(getattr(obj, f.name))
            for f in dataclasses.fields(obj)
        }
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return matrix_to_list(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = list(obj)
        if isinstance(obj, (set, frozenset)):
            items = sorted(items)
        return [to_plain(v) for v in items]
    return obj


def dumps_json(obj) -> str:
    """Canonical JSON text: sorted keys, two-space indent, newline end."""
    return json.dumps(to_plain(obj), sort_keys=True, indent=2) + "\n"


def write_json(obj, path) -> Path:
    path = Path(path)
    path.write_text(dumps_json(obj), encoding="utf-8")
    return path


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_trace_csv(trace: FlowTrace, path) -> Path:
    """Flow trace as CSV with columns iter, norm_sq, kn_residual,
    step_size, one row per iteration."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "norm_sq", "kn_residual", "step_size"])
        for step in trace.steps:
            writer.writerow(
                [
                    step.iteration,
                    repr(step.norm_sq),
                    repr(step.kn_residual),
                    repr(step.step_size),
                ]
            )
    return path


def write_invariants_csv(reps, path) -> Path:
    """Per-sample conjugation invariants as CSV: residuals, norm, and
    the trace of every generator image (real and imaginary columns)."""
    reps = list(reps)
    if not reps:
        raise BadInput("need at least one representation")
    rank = reps[0].presentation.rank
    if any(r.presentation.rank != rank for r in reps):
        raise BadInput("all representations must share a generator count")
    header = ["sample_id", "relation_residual", "kn_residual", "norm_sq"]
    for j in range(rank):
        header += [f"tr{j}_re", f"tr{j}_im"]
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for index, rep in enumerate(reps):
            row = [
                index,
                repr(relation_residual(rep)),
                repr(kn_residual(rep)),
                repr(norm_sq(rep)),
            ]
            for a in rep.images:
                tr = complex(np.trace(a))
                row += [repr(tr.real), repr(tr.imag)]
            writer.writerow(row)
    return path
