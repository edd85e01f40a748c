"""Right-continuous piecewise-constant functions on the real line.

A step function with breakpoints b_1 < ... < b_m carries m+1 values:
``values[0]`` on (-inf, b_1), ``values[i]`` on [b_i, b_{i+1}), and
``values[m]`` on [b_m, inf).  Evaluation at a breakpoint returns the value
to its right.  Eigenvalue counting functions, singular value functions and
spectral shift functions are all represented this way, so the arithmetic
here (union of breakpoints, exact interval integrals, tolerant equality)
is the backbone of every exact identity checked by the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "StepFunction",
    "pairing_exact",
    "step_equal",
]


@dataclass(frozen=True)
class StepFunction:
    """Immutable right-continuous step function.

    ``breakpoints`` is strictly increasing with shape (m,); ``values`` has
    shape (m+1,).  A compactly supported instance has both tail values
    exactly 0.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if bp.ndim != 1 or vals.ndim != 1:
            raise ValueError("breakpoints and values must be 1-d")
        if vals.size != bp.size + 1:
            raise ValueError(
                f"need {bp.size + 1} values for {bp.size} breakpoints, got {vals.size}"
            )
        if bp.size and not np.all(np.diff(bp) > 0):
            raise ValueError("breakpoints must be strictly increasing")
        if not np.all(np.isfinite(bp)) or not np.all(np.isfinite(vals)):
            raise ValueError("breakpoints and values must be finite")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    # -- construction -------------------------------------------------

    @staticmethod
    def constant(value: float) -> "StepFunction":
        return StepFunction(np.empty(0), np.array([float(value)]))

    @staticmethod
    def from_jumps(left_value, locations, jumps, merge_tol=0.0) -> "StepFunction":
        """Build from a left-tail value and signed jumps at given locations.

        Locations closer than ``merge_tol`` are merged (their jumps add; the
        merged breakpoint is the jump-weighted mean of the cluster).
        """
        locations = np.asarray(locations, dtype=float)
        jumps = np.asarray(jumps, dtype=float)
        if locations.size == 0:
            return StepFunction.constant(left_value)
        order = np.argsort(locations, kind="stable")
        locations, jumps = locations[order], jumps[order]
        bps, js = [], []
        cluster = [0]
        for i in range(1, locations.size):
            if locations[i] - locations[cluster[-1]] <= merge_tol:
                cluster.append(i)
            else:
                bps.append(_cluster_location(locations[cluster], jumps[cluster]))
                js.append(jumps[cluster].sum())
                cluster = [i]
        bps.append(_cluster_location(locations[cluster], jumps[cluster]))
        js.append(jumps[cluster].sum())
        values = np.concatenate([[left_value], left_value + np.cumsum(js)])
        return StepFunction(np.array(bps), values).canonicalize()

    # -- evaluation ---------------------------------------------------

    def __call__(self, t):
        idx = np.searchsorted(self.breakpoints, t, side="right")
        return self.values[idx]

    @property
    def is_compact(self) -> bool:
        return self.values[0] == 0.0 and self.values[-1] == 0.0

    def support(self):
        """Smallest closed interval outside of which the function is 0.

        Returns None for the zero function.  Only defined for compactly
        supported instances.
        """
        if not self.is_compact:
            raise ValueError("support is defined for compactly supported step functions")
        nz = np.nonzero(self.values != 0.0)[0]
        if nz.size == 0:
            return None
        return self.breakpoints[nz[0] - 1], self.breakpoints[nz[-1]]

    # -- arithmetic ---------------------------------------------------

    def __neg__(self) -> "StepFunction":
        return StepFunction(self.breakpoints, -self.values)

    def __add__(self, other: "StepFunction") -> "StepFunction":
        return _combine(self, other, np.add)

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        return _combine(self, other, np.subtract)

    def __abs__(self) -> "StepFunction":
        return StepFunction(self.breakpoints, np.abs(self.values)).canonicalize()

    def shift(self, c: float) -> "StepFunction":
        """Translate the graph right by c: result(s) = self(s - c)."""
        return StepFunction(self.breakpoints + c, self.values)

    def canonicalize(self) -> "StepFunction":
        """Drop breakpoints whose jump is exactly zero."""
        if self.breakpoints.size == 0:
            return self
        keep = self.values[1:] != self.values[:-1]
        if keep.all():
            return self
        return StepFunction(self.breakpoints[keep], np.concatenate([[self.values[0]], self.values[1:][keep]]))

    def simplify(self, bp_tol: float, value_tol: float = 0.0) -> "StepFunction":
        """Merge breakpoints closer than ``bp_tol`` and drop jumps below ``value_tol``."""
        if self.breakpoints.size == 0:
            return self
        jumps = np.diff(self.values)
        merged = StepFunction.from_jumps(self.values[0], self.breakpoints, jumps, merge_tol=bp_tol)
        if value_tol <= 0.0:
            return merged
        keep = np.abs(np.diff(merged.values)) > value_tol
        if keep.all():
            return merged
        vals = [merged.values[0]]
        for i, k in enumerate(keep):
            vals.append(vals[-1] + (merged.values[i + 1] - merged.values[i]) if k else vals[-1])
        return StepFunction(merged.breakpoints[keep], np.array(vals)).canonicalize()

    # -- integrals ----------------------------------------------------

    def integral(self, lo: float = -np.inf, hi: float = np.inf) -> float:
        """Exact integral over [lo, hi]; infinite bounds need compact support."""
        if lo > hi:
            raise ValueError("empty integration interval")
        edges = np.concatenate([[lo], self.breakpoints, [hi]])
        edges = np.clip(edges, lo, hi)
        lengths = np.diff(edges)
        live = lengths > 0
        unbounded = live & ~np.isfinite(lengths)
        if np.any(self.values[unbounded] != 0.0):
            raise ValueError("divergent integral: nonzero value on an unbounded interval")
        finite = live & np.isfinite(lengths)
        return float(np.sum(self.values[finite] * lengths[finite]))

    def l1_norm(self) -> float:
        if not self.is_compact:
            raise ValueError("L1 norm needs compact support")
        return abs(self).integral()

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def moment(self, m: int) -> float:
        """Exact value of the weighted moment  integral of m * s^(m-1) * f(s) ds."""
        if m < 1:
            raise ValueError("moment order must be >= 1")
        if not self.is_compact:
            raise ValueError("moments need compact support")
        b = self.breakpoints
        if b.size == 0:
            return 0.0
        powers = b ** m
        # interior intervals only; both tails carry value 0
        return float(np.sum(self.values[1:-1] * np.diff(powers)))

    # -- serialization ------------------------------------------------

    def to_csv(self) -> str:
        """Canonical CSV: a header row naming the left-tail value, then
        one ``breakpoint,value_right`` row per breakpoint."""
        lines = [f"# left_tail = {self.values[0]!r}", "breakpoint,value_right"]
        for b, v in zip(self.breakpoints, self.values[1:]):
            lines.append(f"{b!r},{v!r}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_csv(text: str) -> "StepFunction":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if len(lines) < 2 or not lines[0].startswith("# left_tail"):
            raise ValueError("not a step-function CSV: missing left-tail header")
        left = float(lines[0].split("=", 1)[1])
        if lines[1] != "breakpoint,value_right":
            raise ValueError("not a step-function CSV: missing column header")
        bps, vals = [], [left]
        for ln in lines[2:]:
            b, v = ln.split(",")
            bps.append(float(b))
            vals.append(float(v))
        return StepFunction(np.array(bps), np.array(vals))


def _cluster_location(locs: np.ndarray, jumps: np.ndarray) -> float:
    w = np.abs(jumps)
    tot = w.sum()
    if tot == 0.0:
        return float(locs.mean())
    return float(np.sum(locs * w) / tot)


def _combine(f: StepFunction, g: StepFunction, op) -> StepFunction:
    bp = np.union1d(f.breakpoints, g.breakpoints)
    fi = np.searchsorted(f.breakpoints, bp, side="right")
    gi = np.searchsorted(g.breakpoints, bp, side="right")
    vals = op(
        np.concatenate([[f.values[0]], f.values[fi]]),
        np.concatenate([[g.values[0]], g.values[gi]]),
    )
    return StepFunction(bp, vals).canonicalize()


def pairing_exact(step: StepFunction, antiderivative) -> float:
    """Exact integral of g'(s) * step(s) ds for a function g given by its
    antiderivative evaluator: the sum of value * (g(b_next) - g(b)) over
    the intervals of a compactly supported step function."""
    if not step.is_compact:
        raise ValueError("exact pairing needs compact support")
    b = step.breakpoints
    if b.size == 0:
        return 0.0
    gb = np.asarray(antiderivative(b), dtype=float)
    return float(np.sum(step.values[1:-1] * np.diff(gb)))


def step_equal(f: StepFunction, g: StepFunction, bp_tol: float, value_tol: float = 0.0) -> bool:
    """Equality of step functions up to breakpoint tolerance.

    Both sides are simplified first (breakpoints within ``bp_tol`` merged,
    jumps of magnitude <= ``value_tol`` dropped); they are equal when the
    simplified breakpoint lists match within ``bp_tol`` and all values match
    within ``value_tol``.
    """
    fs = f.simplify(bp_tol, value_tol)
    gs = g.simplify(bp_tol, value_tol)
    if fs.breakpoints.size != gs.breakpoints.size:
        return False
    if fs.breakpoints.size and np.max(np.abs(fs.breakpoints - gs.breakpoints)) > bp_tol:
        return False
    return bool(np.max(np.abs(fs.values - gs.values), initial=0.0) <= value_tol)
