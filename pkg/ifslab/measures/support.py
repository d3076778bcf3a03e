"""Support diagnostics: largest empty arc and windowed atom detection."""

import numpy as np

from ..engine.measure import EmpiricalMeasure
from ..geometry.circle import Arc, CirclePoint, wrap


def max_gap_points(values) -> tuple[float, Arc]:
    """Longest atom-free arc between consecutive points of a finite set."""
    v = np.unique(wrap(np.atleast_1d(np.asarray(values, dtype=float))))
    if v.size == 0:
        raise ValueError("max_gap needs at least one point")
    if v.size == 1:
        return 1.0, Arc.whole(v[0])
    gaps = np.diff(np.append(v, v[0] + 1.0))
    i = int(np.argmax(gaps))
    return float(gaps[i]), Arc(CirclePoint(v[i]), CirclePoint(v[(i + 1) % v.size]))


def max_gap(mu: EmpiricalMeasure) -> tuple[float, Arc]:
    return max_gap_points(mu.positions)


def atom_scan(mu: EmpiricalMeasure, window: float, threshold: float) -> list[tuple[CirclePoint, float]]:
    """Heaviest atom of every window [a, a + window] whose mass exceeds ``threshold``.

    Windows are anchored at atoms; once a window is reported, windows starting
    within ``window`` of it are skipped.
    """
    if window <= 0:
        raise ValueError("window must be positive")
    pos = mu.positions
    masses = mu.arc_masses(pos, pos + window)
    hits = np.flatnonzero(masses > threshold)
    if hits.size == 0:
        return []

    accepted: list[float] = []
    found: dict[float, float] = {}
    for i in hits[np.argsort(-masses[hits], kind="stable")]:
        start = float(pos[i])
        if any(min(wrap(start - a), wrap(a - start)) < window for a in accepted):
            continue
        accepted.append(start)
        inside = np.flatnonzero(wrap(pos - start) <= window)
        heaviest = inside[np.argmax(mu.weights[inside])]
        found.setdefault(float(pos[heaviest]), float(masses[i]))
    return sorted(((CirclePoint(p), m) for p, m in found.items()), key=lambda item: item[0].value)
