"""On-disk bundles: field.txt, meta.txt, points.csv, certificate.txt.

Text files are YAML (key: value with nested indentation); the point list is
a one-column CSV of projective residues. Polynomial coefficients are written
constant term first. Re-importing a bundle rebuilds the field from (p, s)
with the deterministic rules of ``gf`` and refuses to continue if the stored
modulus or generator differs.
"""

from __future__ import annotations

import csv
import dataclasses
import io
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from .construct import ConstructionParams, OvoidCandidate, build_candidate
from .errors import BadParameters
from .gf import MAX_ORDER, Field
from .verify import Certificate, candidate_summary

FIELD_FILE = "field.txt"
META_FILE = "meta.txt"
POINTS_FILE = "points.csv"
CERT_FILE = "certificate.txt"


class _Dumper(yaml.SafeDumper):
    pass


def _plain(obj):
    """Convert numpy scalars, tuples and sets to plain YAML types."""
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, (int, np.integer)) else int(k): _plain(v)
                for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_plain(v) for v in obj)
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dump_text(data) -> str:
    return yaml.dump(_plain(data), Dumper=_Dumper, sort_keys=False,
                     default_flow_style=None, width=100)


def load_text(text: str):
    return yaml.safe_load(text)


# ---------------------------------------------------------------------------

def field_record(field: Field) -> dict:
    return {"p": field.p, "s": field.s,
            "modulus": list(field.modulus), "generator": list(field.generator)}


def meta_record(cand: OvoidCandidate) -> dict:
    prm = cand.params
    return {
        "p": prm.p, "l": prm.ell, "t": prm.t, "e": prm.e, "r": prm.r, "N": prm.N,
        "d0": prm.d0, "b": len(cand.orbit_indices), "orbits": list(cand.orbit_indices),
        "J": cand.J.sorted(), "m_claimed": cand.m_claimed, "points": int(len(cand.M)),
        "labels": cand.labels,
    }


def points_csv(M) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["point"])
    for y in np.asarray(M).tolist():
        w.writerow([y])
    return buf.getvalue()


def write_points(path, M) -> None:
    Path(path).write_text(points_csv(M))


def read_points(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["point"]:
        raise BadParameters(f"{path}: expected a 'point' header")
    return np.array([int(r[0]) for r in rows[1:] if r], dtype=np.int64)


def write_bundle(out_dir, cand: OvoidCandidate, cert: Optional[Certificate] = None) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / FIELD_FILE).write_text(dump_text(field_record(cand.space.field)))
    (out / META_FILE).write_text(dump_text(meta_record(cand)))
    write_points(out / POINTS_FILE, cand.M)
    if cert is not None:
        write_certificate(out, cert)
    return out


def write_certificate(out_dir, cert: Certificate) -> Path:
    path = Path(out_dir) / CERT_FILE
    path.write_text(dump_text(cert.to_dict()))
    return path


def read_certificate(out_dir) -> dict:
    return load_text((Path(out_dir) / CERT_FILE).read_text())


def load_bundle(path, max_order: int = MAX_ORDER) -> OvoidCandidate:
    """Rebuild a candidate from disk, keeping the stored point list as is."""
    path = Path(path)
    try:
        frec = load_text((path / FIELD_FILE).read_text())
        meta = load_text((path / META_FILE).read_text())
    except FileNotFoundError as exc:
        raise BadParameters(f"incomplete bundle: {exc}") from exc
    params = ConstructionParams(int(meta["p"]), int(meta["l"]), int(meta["t"]), int(meta["r"]),
                                int(meta["b"]), tuple(meta["orbits"]))
    cand = build_candidate(params, max_order=max_order)
    field = cand.space.field
    if (frec["p"], frec["s"]) != (field.p, field.s):
        raise BadParameters(f"field.txt describes GF({frec['p']}^{frec['s']}), "
                            f"parameters give GF({field.p}^{field.s})")
    if tuple(frec["modulus"]) != field.modulus or tuple(frec["generator"]) != field.generator:
        raise BadParameters("field.txt modulus or generator differs from the rebuilt field")
    if sorted(meta["J"]) != cand.J.sorted():
        raise BadParameters(f"meta J={meta['J']} differs from orbits {meta['orbits']}")
    M = read_points(path / POINTS_FILE)
    if len(M) and (M.min() < 0 or M.max() >= cand.space.num_points):
        raise BadParameters("points.csv holds residues outside the point range")
    if len(np.unique(M)) != len(M):
        raise BadParameters("points.csv lists a point twice")
    return dataclasses.replace(cand, M=np.sort(M), m_claimed=int(meta["m_claimed"]))


def intersection_summary(cand: OvoidCandidate, chunk: int = 4096) -> dict:
    """Sizes |<y>^perp ∩ M| over every hyperplane, with frequencies."""
    space = cand.space
    M = np.asarray(cand.M, dtype=np.int64)
    sizes: dict[int, int] = {}
    for lo in range(0, space.num_points, chunk):
        ys = np.arange(lo, min(lo + chunk, space.num_points), dtype=np.int64)
        vals, cnts = np.unique(space.perp_counts(ys, M), return_counts=True)
        for v, c in zip(vals.tolist(), cnts.tolist()):
            sizes[v] = sizes.get(v, 0) + c
    sizes = dict(sorted(sizes.items()))
    return {"hyperplanes": space.num_points, "points": int(len(M)),
            "sizes": sizes, "two_intersection": len(sizes) == 2}


__all__ = [
    "dump_text", "load_text", "field_record", "meta_record", "write_points", "read_points",
    "points_csv", "write_bundle", "write_certificate", "read_certificate", "load_bundle",
    "intersection_summary", "candidate_summary",
]
