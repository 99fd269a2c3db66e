"""Synthetic Gaussian mixtures and the CSV/JSON formats the CLI speaks.

Points travel as headerless CSV, one point per line, coordinates printed
with repr so values round-trip exactly.  Generated files get a sidecar
<name>.json recording the mixture spec, n, and seed; regenerating with
the same spec and seed is byte-identical.
"""

import csv
import json
from dataclasses import dataclass

import numpy as np

from .core import PointSet, as_pointset


@dataclass(frozen=True)
class MixtureSpec:
    """Isotropic Gaussian mixture: weights, component means, per-component
    standard deviations (0 collapses the component onto its mean)."""

    weights: np.ndarray
    means: np.ndarray
    scales: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        mu = np.asarray(self.means, dtype=np.float64)
        sc = np.asarray(self.scales, dtype=np.float64)
        if mu.ndim == 1:
            mu = mu.reshape(-1, 1)
        if w.ndim != 1 or mu.ndim != 2 or sc.ndim != 1:
            raise ValueError("weights (k,), means (k, d), scales (k,) expected")
        if not (w.shape[0] == mu.shape[0] == sc.shape[0] >= 1):
            raise ValueError("component counts must match")
        if np.any(w < 0.0) or w.sum() <= 0.0:
            raise ValueError("weights must be nonnegative with positive sum")
        if np.any(sc < 0.0):
            raise ValueError("scales must be nonnegative")
        object.__setattr__(self, "weights", w / w.sum())
        object.__setattr__(self, "means", mu)
        object.__setattr__(self, "scales", sc)

    @property
    def k(self):
        return self.weights.shape[0]

    @property
    def d(self):
        return self.means.shape[1]

    def sample(self, n, seed=0):
        if n < 1:
            raise ValueError("n must be >= 1")
        rng = np.random.default_rng(seed)
        comp = rng.choice(self.k, size=n, p=self.weights)
        noise = rng.standard_normal((n, self.d))
        return self.means[comp] + self.scales[comp, None] * noise

    def to_dict(self):
        return {
            "weights": self.weights.tolist(),
            "means": self.means.tolist(),
            "scales": self.scales.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(
                weights=np.asarray(data["weights"], dtype=np.float64),
                means=np.asarray(data["means"], dtype=np.float64),
                scales=np.asarray(data["scales"], dtype=np.float64),
            )
        except KeyError as e:
            raise ValueError(f"mixture spec is missing {e.args[0]!r}") from None


def save_points(path, points):
    """Headerless CSV, repr-formatted coordinates."""
    ps = as_pointset(points)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in ps.points:
            writer.writerow([repr(float(v)) for v in row])


def load_points(path):
    with open(path, newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    if not rows:
        raise ValueError(f"{path} holds no points")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path} has ragged rows")
    return PointSet(np.asarray(rows, dtype=np.float64))


def sidecar_path(csv_path):
    return f"{csv_path}.json"


def generate_dataset(spec, n, seed, out):
    """Sample the mixture, write the CSV plus its sidecar, return points."""
    pts = spec.sample(n, seed)
    save_points(out, pts)
    with open(sidecar_path(out), "w") as fh:
        json.dump({"spec": spec.to_dict(), "n": int(n), "seed": int(seed)},
                  fh, indent=2)
        fh.write("\n")
    return PointSet(pts)
