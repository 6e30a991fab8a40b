"""Coordinate charts: named coordinates, a sampling box, domain constraints.

A chart is an open box in R^n, optionally cut down by strict-inequality
constraints (each stored as an expression required to be positive, e.g. the
punctured plane keeps x^2 + y^2 - delta > 0). Sampling is uniform on the box
with rejection against the constraints.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .expr import Expr, FUNCTION_ARITY, evaluate_many_multi, free_vars

__all__ = ["Chart", "ChartError", "SamplingError", "RESERVED_NAMES"]

RESERVED_NAMES = frozenset({"pi"}) | frozenset(FUNCTION_ARITY)


class ChartError(ValueError):
    """Invalid chart definition."""


class SamplingError(RuntimeError):
    """Rejection sampling failed to hit the constrained region."""


@dataclass(frozen=True)
class Chart:
    """An open coordinate box with optional strict positivity constraints."""

    coords: tuple
    box: tuple
    constraints: tuple = field(default_factory=tuple)

    def __post_init__(self):
        coords = tuple(self.coords)
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if not coords:
            raise ChartError("chart needs at least one coordinate")
        if len(set(coords)) != len(coords):
            raise ChartError(f"duplicate coordinate names in {coords}")
        for c in coords:
            if not c.isidentifier():
                raise ChartError(f"coordinate name {c!r} is not an identifier")
            if c in RESERVED_NAMES:
                raise ChartError(f"coordinate name {c!r} is reserved")
        if len(box) != len(coords):
            raise ChartError("box must give one interval per coordinate")
        for c, (lo, hi) in zip(coords, box):
            if not lo < hi:
                raise ChartError(f"empty interval for {c}: [{lo}, {hi}]")
        names = set(coords)
        for g in self.constraints:
            extra = free_vars(g) - names
            if extra:
                raise ChartError(
                    f"constraint uses unknown coordinates {sorted(extra)}")
        if self.constraints:
            # fail fast on an unsatisfiable region rather than at probe time
            probe = np.random.default_rng(0)
            for _ in range(40):
                batch = self.sample_box(256, probe)
                if np.any(self._mask_ok(batch)):
                    break
            else:
                raise ChartError("constraints reject every sampled point")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def env(self, points: np.ndarray) -> dict:
        """Columns of a (n, dim) point array keyed by coordinate name."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        return {c: pts[:, i] for i, c in enumerate(self.coords)}

    def point(self, values: Sequence) -> dict:
        if len(values) != self.dim:
            raise ChartError(f"expected {self.dim} values, got {len(values)}")
        return dict(zip(self.coords, (float(v) for v in values)))

    def sample_box(self, n: int, rng: np.random.Generator) -> np.ndarray:
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        return rng.uniform(lo, hi, size=(n, self.dim))

    def _mask_ok(self, pts: np.ndarray) -> np.ndarray:
        if not self.constraints:
            return np.ones(len(pts), dtype=bool)
        vals = evaluate_many_multi(list(self.constraints), self.env(pts))
        ok = np.ones(len(pts), dtype=bool)
        for v in vals:
            ok &= v > 0
        return ok

    def contains(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        inside = np.all((pts > lo) & (pts < hi), axis=1)
        inside &= self._mask_ok(pts)
        return inside

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw n points uniformly from the constrained box.

        Raises SamplingError after 1000*n rejected draws.
        """
        if n <= 0:
            raise ChartError("sample count must be positive")
        got = []
        have = 0
        budget = 1000 * n
        while have < n:
            want = min(max(n - have, 64), budget)
            if want <= 0:
                raise SamplingError(
                    f"could not draw {n} points from the constrained region "
                    f"after {1000 * n} attempts")
            batch = self.sample_box(want, rng)
            budget -= want
            keep = batch[self._mask_ok(batch)]
            if len(keep):
                got.append(keep)
                have += len(keep)
        return np.concatenate(got)[:n]
