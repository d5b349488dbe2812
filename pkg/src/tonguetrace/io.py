"""Serialization: PGM charts, curve CSV files, JSON documents."""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .floquet import StabilityChart
from .solver import CurvePoint, TransitionCurve

STABLE_GREY = 170
UNSTABLE_BLACK = 0
OVERLAY_WHITE = 255


def _fmt(x):
    """Shortest text that round-trips a binary64 value (17 significant digits)."""
    if x is None:
        return ""
    return format(float(x), ".17g")


def _parse(text):
    return None if text == "" else float(text)


# -- charts -----------------------------------------------------------------


def chart_pixels(chart: StabilityChart, overlay=()):
    """Grey/black raster, top row = largest eps; ``overlay`` is (delta, eps) pairs."""
    img = np.where(chart.cells == 1, UNSTABLE_BLACK, STABLE_GREY).astype(np.uint8)
    for delta, eps in overlay:
        lo_d, hi_d = sorted(chart.delta_range)
        lo_e, hi_e = sorted(chart.eps_range)
        if not (lo_d <= delta <= hi_d and lo_e <= eps <= hi_e):
            continue
        i, j = chart.cell_of(delta, eps)
        img[j, i] = OVERLAY_WHITE
    return img[::-1]


def write_pgm(path, pixels: np.ndarray):
    """Binary P5, maxval 255, row-major."""
    pixels = np.asarray(pixels, dtype=np.uint8)
    ny, nx = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{nx} {ny}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end])
        pos = end
    pos += 1
    if tokens[0] != b"P5" or int(tokens[3]) != 255:
        raise ValueError("not an 8-bit binary PGM")
    nx, ny = int(tokens[1]), int(tokens[2])
    return np.frombuffer(data[pos:pos + nx * ny], dtype=np.uint8).reshape(ny, nx)


def chart_metadata_json(chart: StabilityChart) -> str:
    return json.dumps(chart.metadata(), sort_keys=True)


def chart_metadata_from_json(text) -> dict:
    meta = json.loads(text)
    meta["delta_range"] = tuple(meta["delta_range"])
    meta["eps_range"] = tuple(meta["eps_range"])
    return meta


# -- curves -----------------------------------------------------------------


def curve_header(n_h):
    return (["epsilon", "delta"] + [f"h{k}" for k in range(1, n_h + 1)]
            + ["zeta0", "newton_iters", "residual_norm", "floquet_check"])


def write_curve_csv(path, curve: TransitionCurve):
    n_h = len(curve.points[0].h) if curve.points else 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(curve_header(n_h))
        for p in curve.points:
            w.writerow([_fmt(p.epsilon), _fmt(p.delta)] + [_fmt(x) for x in p.h]
                       + [_fmt(p.zeta0), str(p.newton_iters), _fmt(p.residual_norm), _fmt(p.floquet_check)])


def read_curve_csv(path, branch_id="") -> TransitionCurve:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    n_h = sum(1 for col in header if col.startswith("h") and col[1:].isdigit())
    if header != curve_header(n_h):
        raise ValueError(f"unexpected curve header {header}")
    points = []
    for row in body:
        eps, delta = float(row[0]), float(row[1])
        h = tuple(float(x) for x in row[2:2 + n_h])
        zeta0 = _parse(row[2 + n_h])
        points.append(CurvePoint(eps, delta, h, zeta0, int(row[3 + n_h]),
                                 float(row[4 + n_h]), float(row[5 + n_h])))
    return TransitionCurve(branch_id, points)


def point_to_dict(p: CurvePoint) -> dict:
    return {
        "epsilon": p.epsilon,
        "delta": p.delta,
        "h": list(p.h),
        "zeta0": p.zeta0,
        "newton_iters": p.newton_iters,
        "residual_norm": p.residual_norm,
        "floquet_check": None if math.isnan(p.floquet_check) else p.floquet_check,
    }


def point_from_dict(d) -> CurvePoint:
    fc = d.get("floquet_check")
    return CurvePoint(d["epsilon"], d["delta"], tuple(d["h"]), d.get("zeta0"), d["newton_iters"],
                      d["residual_norm"], math.nan if fc is None else fc)


def write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
