"""Floquet ground truth: RK4 monodromy matrices, stability charts, closed-form trace.

Everything here is independent of the HAM pipeline; it is the oracle the
transition curves are checked against.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

STEPS_PER_PERIOD = 2000
STABLE, UNSTABLE = 0, 1
CLASSIFY_TOL = 1e-9


@dataclass(frozen=True)
class MonodromyMatrix:
    m: np.ndarray

    @property
    def trace(self):
        return float(self.m[0, 0] + self.m[1, 1])

    @property
    def det(self):
        return float(np.linalg.det(self.m))

    def multipliers(self):
        return np.linalg.eigvals(self.m)


def _rk4_segment(x, v, delta, eps, c, t0, t1, steps, smooth):
    """Advance states ``(x, v)`` (arrays, broadcast together) from t0 to t1."""
    h = (t1 - t0) / steps
    h2, h6 = 0.5 * h, h / 6.0
    for i in range(steps):
        t = t0 + i * h
        if smooth:
            a0 = delta + eps * math.cos(t)
            ah = delta + eps * math.cos(t + h2)
            a1 = delta + eps * math.cos(t + h)
        else:
            a0 = ah = a1 = delta
        k1x = v
        k1v = -a0 * x - c * v
        x2 = x + h2 * k1x
        v2 = v + h2 * k1v
        k2v = -ah * x2 - c * v2
        x3 = x + h2 * v2
        v3 = v + h2 * k2v
        k3v = -ah * x3 - c * v3
        x4 = x + h * v3
        v4 = v + h * k3v
        k4v = -a1 * x4 - c * v4
        x = x + h6 * (k1x + 2.0 * (v2 + v3) + v4)
        v = v + h6 * (k1v + 2.0 * (k2v + k3v) + k4v)
    return x, v


def monodromy_arrays(variant, delta, eps, c=0.0, steps=STEPS_PER_PERIOD, jump_sign=1.0):
    """Vectorised monodromy entries over one excitation period ``2 pi``.

    ``delta`` and ``eps`` broadcast together; returns ``(m11, m12, m21, m22)``.
    ``jump_sign`` exists only for negative-control runs of the verifier.
    """
    delta = np.asarray(delta, dtype=float)
    eps = np.asarray(eps, dtype=float)
    delta, eps = np.broadcast_arrays(delta, eps)
    shape = delta.shape
    d = np.stack([delta, delta])
    e = np.stack([eps, eps])
    x = np.stack([np.ones(shape), np.zeros(shape)])
    v = np.stack([np.zeros(shape), np.ones(shape)])
    damping = c if variant == "damped" else 0.0
    if variant == "impulsive":
        half = steps // 2
        x, v = _rk4_segment(x, v, d, e, 0.0, 0.0, math.pi, half, smooth=False)
        v = v - jump_sign * e * x
        x, v = _rk4_segment(x, v, d, e, 0.0, math.pi, 2.0 * math.pi, steps - half, smooth=False)
    else:
        x, v = _rk4_segment(x, v, d, e, damping, 0.0, 2.0 * math.pi, steps, smooth=True)
    return x[0], x[1], v[0], v[1]


def monodromy(variant, delta, eps, c=0.0, period=2.0 * math.pi, steps=STEPS_PER_PERIOD) -> MonodromyMatrix:
    """Monodromy matrix at one parameter point; columns start from (1,0) and (0,1)."""
    if not math.isclose(period, 2.0 * math.pi):
        raise ValueError("monodromy is taken over the excitation period 2*pi")
    m11, m12, m21, m22 = monodromy_arrays(variant, delta, eps, c, steps)
    return MonodromyMatrix(np.array([[float(m11), float(m12)], [float(m21), float(m22)]]))


def integrate(variant, delta, eps, x0, v0, t_end, c=0.0, samples=400,
              steps_per_period=STEPS_PER_PERIOD, jump_sign=1.0):
    """Sample one trajectory on ``linspace(0, t_end, samples)``.

    RK4 with the fixed step ``2 pi / steps_per_period`` (shortened to hit
    every sample time and every impulse time exactly); the impulsive
    variant applies ``v -= eps x`` at ``t = (2k+1) pi``.
    """
    ts = np.linspace(0.0, t_end, samples)
    marks = set(ts.tolist())
    kicks = set()
    if variant == "impulsive":
        k = 0
        while (2 * k + 1) * math.pi < t_end:
            kicks.add((2 * k + 1) * math.pi)
            k += 1
        marks |= kicks
    damping = c if variant == "damped" else 0.0
    smooth = variant != "impulsive"
    h = 2.0 * math.pi / steps_per_period
    x, v = np.array(float(x0)), np.array(float(v0))
    out = {0.0: float(x)}
    t = 0.0
    for mark in sorted(marks):
        if mark > t:
            n = max(1, int(math.ceil((mark - t) / h - 1e-9)))
            x, v = _rk4_segment(x, v, delta, eps, damping, t, mark, n, smooth)
            t = mark
        if mark in kicks:
            v = v - jump_sign * eps * x
        out[mark] = float(x)
    return ts, np.array([out[tt] for tt in ts.tolist()])


def classify_arrays(variant, m11, m12, m21, m22):
    """Vectorised stable/unstable decision (1 = unstable)."""
    tr = m11 + m22
    if variant != "damped":
        return (np.abs(tr) > 2.0 + CLASSIFY_TOL).astype(np.uint8)
    det = m11 * m22 - m12 * m21
    disc = tr * tr - 4.0 * det
    sq = np.sqrt(np.abs(disc))
    real_max = np.maximum(np.abs(0.5 * (tr + sq)), np.abs(0.5 * (tr - sq)))
    complex_mod = np.sqrt(np.abs(det))
    rho = np.where(disc >= 0, real_max, complex_mod)
    return (rho > 1.0 + CLASSIFY_TOL).astype(np.uint8)


def classify(m: MonodromyMatrix, variant) -> str:
    flag = classify_arrays(variant, *(np.array(v) for v in m.m.ravel()))
    return "unstable" if int(flag) else "stable"


def floquet_check(variant, delta, eps, c=0.0) -> float:
    """Distance from the stability boundary: ``|trace|-2`` or ``max|mult|-1``."""
    m = monodromy(variant, delta, eps, c)
    if variant == "damped":
        return float(np.max(np.abs(m.multipliers())) - 1.0)
    return abs(m.trace) - 2.0


def impulsive_trace(Delta, eps):
    """Closed-form trace of the impulsive monodromy: half-period rotation, kick, rotation."""
    Delta = np.asarray(Delta, dtype=float)
    eps = np.asarray(eps, dtype=float)
    out = np.empty(np.broadcast(Delta, eps).shape)
    D, E = np.broadcast_arrays(Delta, eps)
    pos, neg, zero = D > 0, D < 0, D == 0
    w = np.sqrt(np.abs(D))
    out[pos] = 2.0 * np.cos(2 * np.pi * w[pos]) - E[pos] / w[pos] * np.sin(2 * np.pi * w[pos])
    out[neg] = 2.0 * np.cosh(2 * np.pi * w[neg]) - E[neg] / w[neg] * np.sinh(2 * np.pi * w[neg])
    out[zero] = 2.0 - 2.0 * np.pi * E[zero]
    return out if out.shape else float(out)


# -- charts -----------------------------------------------------------------


def axis(lo, hi, n):
    if n == 1:
        return np.array([0.5 * (lo + hi)])
    return np.linspace(lo, hi, n)


@dataclass
class StabilityChart:
    variant: str
    delta_range: tuple
    eps_range: tuple
    nx: int
    ny: int
    damping: float = 0.0
    cells: np.ndarray = field(default=None, repr=False)  # (ny, nx) uint8, row j <-> eps[j]

    @property
    def deltas(self):
        return axis(*self.delta_range, self.nx)

    @property
    def epsilons(self):
        return axis(*self.eps_range, self.ny)

    def cell_of(self, delta, eps):
        """Nearest grid cell indices (i along delta, j along eps)."""
        i = int(np.argmin(np.abs(self.deltas - delta)))
        j = int(np.argmin(np.abs(self.epsilons - eps)))
        return i, j

    def metadata(self):
        return {
            "variant": self.variant,
            "delta_range": list(self.delta_range),
            "eps_range": list(self.eps_range),
            "nx": self.nx,
            "ny": self.ny,
            "damping": self.damping,
        }


def _scan_rows(args):
    variant, deltas, eps_rows, c, steps = args
    d = deltas[None, :]
    e = np.asarray(eps_rows)[:, None]
    m = monodromy_arrays(variant, d, e, c, steps)
    return classify_arrays(variant, *m)


def default_workers():
    env = os.environ.get("TONGUETRACE_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def grid_scan(variant, delta_range, eps_range, nx, ny, c=0.0, workers=None,
              rows_per_task=16, steps=STEPS_PER_PERIOD) -> StabilityChart:
    """Classify every grid point; rows are independent, so output ignores ``workers``."""
    if nx < 1 or ny < 1:
        raise ValueError("grid needs nx, ny >= 1")
    chart = StabilityChart(variant, tuple(delta_range), tuple(eps_range), nx, ny, c)
    deltas = chart.deltas
    eps = chart.epsilons
    tasks = [(variant, deltas, eps[j:j + rows_per_task], c, steps) for j in range(0, ny, rows_per_task)]
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(tasks) == 1:
        blocks = [_scan_rows(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_scan_rows, tasks))
    chart.cells = np.concatenate(blocks, axis=0).astype(np.uint8)
    return chart


def boundary_bracketed(chart: StabilityChart, delta, eps, radius=1):
    """True if the cell at (delta, eps) has a neighbour of opposite class."""
    i, j = chart.cell_of(delta, eps)
    here = chart.cells[j, i]
    lo_j, hi_j = max(0, j - radius), min(chart.ny, j + radius + 1)
    lo_i, hi_i = max(0, i - radius), min(chart.nx, i + radius + 1)
    return bool(np.any(chart.cells[lo_j:hi_j, lo_i:hi_i] != here))
