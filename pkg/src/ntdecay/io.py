"""Line-oriented file formats for sequences and measures, and report output.

A sequence file is JSON lines: a header object followed by one record per
line. Records are explicit points {"rho", "phi"[, "tag"]} or symbolic
descriptors {"ring": n}, {"rings": [...], "rule": ...} and
{"cantor": gspec, "depth": N}. A measure file is a single JSON object
holding the level exponents and gtilde values of the selection.
"""

from __future__ import annotations

import json
import math

import numpy as np

from ntdecay.classes import parse_g
from ntdecay.construction import DyadicMeasure, LevelSelection, RingSequence, construct_lemma61
from ntdecay.geometry import DiskSequence, concat

SEQUENCE_FORMAT = "ntdecay.sequence/1"
MEASURE_FORMAT = "ntdecay.measure/1"
REPORT_FORMAT = "ntdecay.report/1"

TAG_P, TAG_B, TAG_A = 0, 1, 2


class FormatError(ValueError):
    pass


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def write_report(report: dict, path: str | None):
    text = dumps({"format": REPORT_FORMAT, **report})
    if path is None:
        import sys

        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)
    return text


# --------------------------------------------------------------------------
# sequences


def write_sequence(path: str, seq: DiskSequence, meta: dict | None = None, symbolic: list | None = None):
    lines = [json.dumps(_clean({"format": SEQUENCE_FORMAT, "meta": meta or {}}), sort_keys=True)]
    for rec in symbolic or []:
        lines.append(json.dumps(_clean(rec), sort_keys=True))
    tags = seq.tags if seq.tags is not None else None
    for i in range(len(seq)):
        rec = {"rho": float(seq.rho[i]), "phi": float(seq.phi[i])}
        if tags is not None:
            rec["tag"] = int(tags[i])
        lines.append(json.dumps(rec, sort_keys=True))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


class SequenceFile:
    """Parsed sequence file: explicit points plus symbolic families."""

    def __init__(self, meta: dict, points: DiskSequence, rings: RingSequence | None, cantor: list):
        self.meta = meta
        self.points = points
        self.rings = rings
        self.cantor = cantor

    @property
    def purely_rings(self) -> bool:
        return self.rings is not None and len(self.points) == 0 and not self.cantor

    def expand(self, max_ring_level: int = 22) -> DiskSequence:
        parts = [self.points]
        if self.rings is not None:
            r = self.rings.expand(max_ring_level)
            r.tags = np.full(len(r), TAG_P, dtype=np.int64)
            parts.append(r)
        for gspec, depth in self.cantor:
            con = construct_lemma61(parse_g(gspec), depth)
            p, b = con.p, con.b
            parts.append(DiskSequence(p.rho, p.phi, np.full(len(p), TAG_P, dtype=np.int64)))
            parts.append(DiskSequence(b.rho, b.phi, np.full(len(b), TAG_B, dtype=np.int64)))
        if self.points.tags is None:
            parts[0] = DiskSequence(self.points.rho, self.points.phi, np.full(len(self.points), TAG_P, dtype=np.int64))
        return concat(*parts)


def read_sequence(path: str) -> SequenceFile:
    try:
        fh = open(path)
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from exc
    with fh:
        lines = [ln for ln in fh.read().splitlines()]
    if not lines:
        raise FormatError(f"{path}: empty file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:1: header is not JSON ({exc.msg})") from exc
    if not isinstance(header, dict) or header.get("format") != SEQUENCE_FORMAT:
        raise FormatError(f"{path}:1: expected header with format {SEQUENCE_FORMAT!r}")
    rho, phi, tag = [], [], []
    ring_levels: list[int] = []
    rule = None
    cantor = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}:{i}: not JSON ({exc.msg})") from exc
        if not isinstance(rec, dict):
            raise FormatError(f"{path}:{i}: record must be an object")
        try:
            if "rho" in rec:
                r, p = float(rec["rho"]), float(rec.get("phi", 0.0))
                if not (0.0 <= r < 1.0) or not math.isfinite(p):
                    raise FormatError(f"{path}:{i}: rho must lie in [0, 1)")
                rho.append(r)
                phi.append(p)
                tag.append(int(rec.get("tag", TAG_P)))
            elif "ring" in rec:
                ring_levels.append(int(rec["ring"]))
            elif "rings" in rec:
                ring_levels.extend(int(n) for n in rec["rings"])
                rule = rec.get("rule")
            elif "cantor" in rec:
                cantor.append((str(rec["cantor"]), int(rec["depth"])))
            else:
                raise FormatError(f"{path}:{i}: unknown record {sorted(rec)}")
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"{path}:{i}: malformed record ({exc})") from exc
    try:
        rings = RingSequence(tuple(sorted(ring_levels)), rule) if ring_levels else None
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    pts = DiskSequence(np.array(rho, dtype=float), np.array(phi, dtype=float), np.array(tag, dtype=np.int64))
    return SequenceFile(header.get("meta", {}), pts, rings, cantor)


# --------------------------------------------------------------------------
# measures


def write_measure(path: str, mu: DyadicMeasure, meta: dict | None = None):
    sel = mu.selection
    obj = {
        "format": MEASURE_FORMAT,
        "spec": sel.spec,
        "depth": mu.depth,
        "l": [int(x) for x in sel.l],
        "gtilde": [float(x) for x in sel.gt],
        "meta": meta or {},
    }
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def read_measure(path: str) -> tuple[DyadicMeasure, dict]:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:{exc.lineno}: not JSON ({exc.msg})") from exc
    if obj.get("format") != MEASURE_FORMAT:
        raise FormatError(f"{path}: expected format {MEASURE_FORMAT!r}")
    l = np.asarray(obj["l"], dtype=np.int64)
    d = np.diff(l)
    if l.size != int(obj["depth"]) + 1 or np.any((d < 0) | (d > 1)):
        raise FormatError(f"{path}: inconsistent level table")
    sel = LevelSelection(l, np.asarray(obj["gtilde"], dtype=float), obj.get("spec", ""))
    return DyadicMeasure(sel), obj.get("meta", {})
