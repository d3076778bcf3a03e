"""Finitely supported probability measures on the circle."""

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional

import numpy as np

from ..geometry.circle import Arc, CirclePoint, PointLike, _value, wrap

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Weighted atoms kept sorted by position with weights summing to 1."""

    positions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pos = wrap(np.atleast_1d(np.asarray(self.positions, dtype=float)))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if pos.shape != w.shape or pos.size == 0:
            raise ValueError("a measure needs at least one atom and one weight per atom")
        if np.any(w <= 0.0):
            raise ValueError("atom weights must be positive")
        total = float(w.sum())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"weights sum to {total}, expected 1")
        order = np.argsort(pos, kind="stable")
        pos = pos[order]
        w = w[order] / total
        pos.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "weights", w)
        cum = np.concatenate([[0.0], np.cumsum(w)])
        cum.setflags(write=False)
        object.__setattr__(self, "_cum", cum)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple[PointLike, float]], normalize: bool = False) -> "EmpiricalMeasure":
        atoms = list(atoms)
        pos = np.array([_value(p) for p, _ in atoms], dtype=float)
        w = np.array([float(wt) for _, wt in atoms], dtype=float)
        if normalize and w.size:
            w = w / w.sum()
        return cls(pos, w)

    @classmethod
    def dirac(cls, x: PointLike) -> "EmpiricalMeasure":
        return cls(np.array([_value(x)]), np.array([1.0]))

    @classmethod
    def uniform_grid(cls, n: int, offset: float = 0.0) -> "EmpiricalMeasure":
        if n < 1:
            raise ValueError("grid size must be positive")
        return cls(offset + np.arange(n) / n, np.full(n, 1.0 / n))

    @classmethod
    def from_samples(cls, values) -> "EmpiricalMeasure":
        """Equal-weight measure of sample points; repeated values become one atom."""
        values = wrap(np.atleast_1d(np.asarray(values, dtype=float)))
        uniq, counts = np.unique(values, return_counts=True)
        return cls(uniq, counts / values.size)

    # -- queries ------------------------------------------------------------

    def __len__(self) -> int:
        return int(self.positions.size)

    @property
    def atoms(self) -> list[tuple[CirclePoint, float]]:
        return [(CirclePoint(p), float(w)) for p, w in zip(self.positions, self.weights)]

    def expect(self, f: Callable) -> float:
        """Integral of a vectorized function (or an object with ``evaluate``)."""
        fn = getattr(f, "evaluate", f)
        return float(np.dot(self.weights, np.asarray(fn(self.positions), dtype=float)))

    def arc_masses(self, starts, ends) -> np.ndarray:
        """Masses of the closed arcs [start, end], vectorized."""
        s = wrap(np.atleast_1d(np.asarray(starts, dtype=float)))
        e = wrap(np.atleast_1d(np.asarray(ends, dtype=float)))
        upper = self._cum[np.searchsorted(self.positions, e, side="right")]
        lower = self._cum[np.searchsorted(self.positions, s, side="left")]
        mass = upper - lower + (s > e)
        return np.clip(mass, 0.0, 1.0)

    def arc_mass(self, arc: Arc) -> float:
        if arc.full:
            return 1.0
        return float(self.arc_masses(arc.start.value, arc.end.value)[0])

    def max_atom(self) -> tuple[CirclePoint, float]:
        i = int(np.argmax(self.weights))
        return CirclePoint(self.positions[i]), float(self.weights[i])

    def thin(self, max_atoms: int) -> "EmpiricalMeasure":
        """Equal-weight quantile subsample with at most ``max_atoms`` atoms."""
        if max_atoms < 1:
            raise ValueError("max_atoms must be positive")
        if len(self) <= max_atoms:
            return self
        levels = (np.arange(max_atoms) + 0.5) / max_atoms
        idx = np.minimum(np.searchsorted(self._cum[1:], levels, side="left"), len(self) - 1)
        return EmpiricalMeasure.from_samples(self.positions[idx])

    # -- IO ---------------------------------------------------------------

    def to_rows(self) -> list[dict]:
        return [{"position": float(p), "weight": float(w)} for p, w in zip(self.positions, self.weights)]

    def to_json(self) -> list[list[float]]:
        return [[float(p), float(w)] for p, w in zip(self.positions, self.weights)]

    @classmethod
    def from_json(cls, data) -> "EmpiricalMeasure":
        if isinstance(data, str):
            data = json.loads(data)
        return cls.from_atoms((float(p), float(w)) for p, w in data)

    def write_csv(self, path: Path, metadata: Optional[dict] = None) -> Path:
        path = Path(path)
        with open(path, "w", newline="") as fh:
            for key, value in (metadata or {}).items():
                fh.write(f"# {key}: {value}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["position", "weight"])
            for p, w in zip(self.positions, self.weights):
                writer.writerow([repr(float(p)), repr(float(w))])
        return path

    @classmethod
    def read_csv(cls, path: Path) -> "EmpiricalMeasure":
        with open(path, newline="") as fh:
            lines = [line for line in fh if not line.startswith("#")]
        reader = csv.DictReader(lines)
        return cls.from_atoms((float(row["position"]), float(row["weight"])) for row in reader)
