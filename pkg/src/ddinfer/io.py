"""File formats: channel, experiment-record and result JSON, counts and boundary CSV.

JSON is written with a fixed key order and two-space indentation so equal
inputs give byte-identical files.  Floats use Python's shortest round-trip
representation.
"""

from __future__ import annotations

import csv
import json
import re
from pathlib import Path

import numpy as np

from .errors import MissingPair, ValidationError
from .qubit_model import CanonicalChannel, Canonicalization, QubitChannel, canonicalize
from .tomography import PAIRS, ExperimentRecord

PAIR_KEY = re.compile(r"^k([123])l([123])$")
COUNTS_HEADER = ["probe_axis", "meas_axis", "n11", "n21", "n12", "n22"]


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


def read_json(path):
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


# -- channels ----------------------------------------------------------------


def channel_from_dict(d: dict):
    """Parse any of the accepted channel layouts.

    ``{"A", "b"}`` gives a :class:`QubitChannel`; ``{"d": [d1, d2, d3], "c3"}``
    and the inference result layout (``"d": [lo, hi, "interval"]`` with
    ``"d2"``, ``"d3"``, ``"c3"``) give a :class:`CanonicalChannel`.
    """
    if not isinstance(d, dict):
        raise ValidationError("channel record must be a JSON object")
    try:
        if "A" in d:
            return QubitChannel(np.asarray(d["A"], dtype=float), np.asarray(d.get("b", [0, 0, 0]), dtype=float))
        if "d" in d and "d2" in d:
            lo, hi, tag = d["d"]
            if tag != "interval":
                raise ValidationError("result record needs d = [lo, hi, \"interval\"]")
            return CanonicalChannel(float(hi), float(d["d2"]), float(d["d3"]), float(d["c3"]))
        if "d" in d:
            d1, d2, d3 = (float(v) for v in d["d"])
            return CanonicalChannel(d1, d2, d3, float(d.get("c3", 0.0)))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad channel record: {exc}") from None
    raise ValidationError("channel record needs either \"A\"/\"b\" or \"d\"/\"c3\"")


def read_channel(path):
    return channel_from_dict(read_json(path))


def read_canonical(path, c3_mode: str = "zero") -> CanonicalChannel:
    ch = read_channel(path)
    if isinstance(ch, QubitChannel):
        return canonicalize(ch, c3_mode=c3_mode).channel
    return ch


def canonical_to_dict(ch: CanonicalChannel) -> dict:
    return {"d": [ch.d1, ch.d2, ch.d3], "c3": ch.c3}


def reconstruction_to_dict(canon: Canonicalization, inverted: QubitChannel | None = None) -> dict:
    out = canonical_to_dict(canon.channel)
    out["residual"] = canon.residual
    if inverted is not None:
        out["linear_inversion"] = {"A": inverted.A.tolist(), "b": inverted.b.tolist()}
    return out


# -- experiment records --------------------------------------------------------


def record_to_dict(rec: ExperimentRecord) -> dict:
    counts = {f"k{k}l{l}": list(rec.counts[(k, l)]) for k, l in sorted(rec.counts)}
    return {"shots": rec.shots, "seed": rec.seed, "source": rec.source, "counts": counts}


def record_from_dict(d: dict) -> ExperimentRecord:
    if not isinstance(d, dict) or not isinstance(d.get("counts"), dict):
        raise ValidationError("experiment record needs a \"counts\" object")
    counts = {}
    for key, row in d["counts"].items():
        m = PAIR_KEY.match(key)
        if m is None:
            raise ValidationError(f"bad pair key {key!r}; expected k<probe>l<meas>")
        if not isinstance(row, list) or len(row) != 4:
            raise ValidationError(f"pair {key} needs four counts")
        try:
            counts[(int(m[1]), int(m[2]))] = tuple(_number(v) for v in row)
        except (TypeError, ValueError):
            raise ValidationError(f"pair {key} has non-numeric counts: {row}") from None
    return ExperimentRecord(counts, shots=d.get("shots"), seed=d.get("seed"), source=d.get("source", "ingested"))


def _number(v):
    if isinstance(v, bool):
        raise TypeError("boolean count")
    return v if isinstance(v, int) else float(v)


def write_record(path, rec: ExperimentRecord):
    write_json(path, record_to_dict(rec))


def read_counts_csv(path) -> ExperimentRecord:
    """Ingest ``probe_axis,meas_axis,n11,n21,n12,n22`` rows."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != COUNTS_HEADER:
            raise ValidationError(f"{path}: header must be {','.join(COUNTS_HEADER)}")
        counts = {}
        for line, row in enumerate(reader, start=2):
            try:
                k, l = int(row["probe_axis"]), int(row["meas_axis"])
                vals = tuple(int(row[c]) for c in COUNTS_HEADER[2:])
            except (TypeError, ValueError):
                raise ValidationError(f"{path}:{line}: counts must be integers") from None
            if (k, l) in counts:
                raise ValidationError(f"{path}:{line}: duplicate pair ({k}, {l})")
            counts[(k, l)] = vals
    sizes = {n for row in counts.values() for n in (row[0] + row[1], row[2] + row[3])}
    shots = sizes.pop() if len(sizes) == 1 else None
    return ExperimentRecord(counts, shots=shots, source="ingested")


def read_record(path) -> ExperimentRecord:
    if Path(path).suffix.lower() == ".csv":
        return read_counts_csv(path)
    return record_from_dict(read_json(path))


def require_complete(rec: ExperimentRecord):
    missing = [p for p in PAIRS if p not in rec.counts]
    if missing:
        raise MissingPair(f"missing (probe, measurement) pairs: {missing}")


# -- results and tables ----------------------------------------------------------


def result_to_dict(res) -> dict:
    ch = res.channel
    lo, hi = res.d1_interval
    return {
        "d": [lo, hi, "interval"],
        "d2": ch.d2,
        "d3": ch.d3,
        "c3": ch.c3,
        "mu": res.mu,
        "regime": res.regime.value,
        "identified": list(res.identified),
        "area": res.objective,
        "converged": bool(res.converged),
        "iterations": res.iterations,
    }


def write_xy_csv(path, rows, header=("x", "y")):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
