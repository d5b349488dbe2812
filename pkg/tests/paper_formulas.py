"""Closed forms printed for the impulsive and classical cases, used as oracles."""

import numpy as np

PI = np.pi


def impulsive_x3_printed(t, Delta, eps, h1, h2, h3, h1h2_den=12):
    """Three-term impulsive 2pi solution as printed, with H = H(t - pi).

    ``h1h2_den`` is the denominator (times pi) of the ``h1 h2`` term in the
    ``sin(t) H`` coefficient; it is printed as 12, the expansion gives 2.
    """
    t = np.asarray(t, dtype=float)
    D, e, P = Delta, eps, PI
    H = (t >= P).astype(float)
    c, s = np.cos(t), np.sin(t)
    a = 2 * P * D + e
    out = c.copy()
    out -= e**2 * h1 / 2 * (3 * h1 + h2 + a * h1**2 / P) * c * H
    out += e * (
        3 * h1 + h2 + h3 / 6
        + (6 * P * D + 3 * e) * h1**2 / (2 * P)
        + a * h1 * h2 / (h1h2_den * P)
        + ((1 - P**2) * e**2 + 4 * P * D * (P * D + e)) * h1**3 / (4 * P**2)
    ) * s * H
    out -= e / (2 * P) * (
        3 * h1 + h2 + h3 / 6
        + 3 * a * h1**2 / (2 * P)
        + a * h1 * h2 / (2 * P)
        + (12 * P * D * (P * D + e) + (3 - P**2) * e**2) * h1**3 / (12 * P**2)
    ) * t * s
    out += e**2 * (a * h1**3 / (2 * P**2) + 3 * h1**2 / (2 * P) + h1 * h2 / (2 * P)) * t * c * H
    out += e**3 * h1**3 / (4 * P) * t * s * H
    out -= e**2 * h1 / (8 * P**2) * (3 * h1 + h2 + a * h1**2 / P) * t**2 * c
    out -= e**3 * h1**3 / (8 * P**2) * t**2 * s * H
    out += e**3 * h1**3 / (48 * P**3) * t**3 * s
    return out
