"""Block-diagonal Hermitian operators under a weighted trace.

The pair (algebra, trace) is a finite list of square blocks, each with a
positive trace scale: tr_w(X) = sum_k scale_k * tr(X_k).  Integer scales on
a single block recover the ordinary matrix trace; fractional scales make
eigenvalue counting functions non-integer valued, which is the behaviour
the rest of the package exercises.

Everything here is exact dense linear algebra (numpy/LAPACK): spectral
decomposition, functional calculus, positive/negative parts, support
projections, counting and singular value functions, Schatten norms, and
the Hilbert-Schmidt commutator norm.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .stepfun import StepFunction

__all__ = [
    "TraceAlgebra",
    "HermitianOperator",
    "SpectralDecomposition",
    "EigensolverError",
    "spectral_decompose",
    "pos_neg_parts",
    "support_projection",
    "counting_function",
    "counting_from_spectra",
    "singular_value_function",
    "schatten_norm",
    "commutator_hs_norm",
    "block_trace",
    "RANK_EPS",
    "MERGE_EPS",
]

# relative threshold below which an eigenvalue counts as zero for support/rank
RANK_EPS = 1e-10
# relative breakpoint-merging threshold for step functions built from spectra
MERGE_EPS = 1e-12


class EigensolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class TraceAlgebra:
    """Ordered blocks of (dimension, trace_scale); the weighted-trace model."""

    blocks: tuple[tuple[int, float], ...]

    def __post_init__(self):
        blocks = tuple((int(d), float(s)) for d, s in self.blocks)
        if not blocks:
            raise ValueError("algebra needs at least one block")
        for d, s in blocks:
            if d < 1:
                raise ValueError(f"block dimension must be >= 1, got {d}")
            if not (s > 0.0) or not np.isfinite(s):
                raise ValueError(f"trace scale must be positive and finite, got {s}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.blocks)

    @property
    def scales(self) -> tuple[float, ...]:
        return tuple(s for _, s in self.blocks)

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    @property
    def trace_of_identity(self) -> float:
        """tau(1) = sum of scale * dimension."""
        return float(sum(s * d for d, s in self.blocks))


def block_trace(algebra: TraceAlgebra, blocks: Sequence[np.ndarray]) -> complex:
    """Weighted trace of raw (possibly non-Hermitian) block matrices."""
    return complex(sum(s * np.trace(m) for (_, s), m in zip(algebra.blocks, blocks)))


def _check_blocks(algebra: TraceAlgebra, blocks) -> tuple[np.ndarray, ...]:
    if len(blocks) != len(algebra.blocks):
        raise ValueError(f"expected {len(algebra.blocks)} blocks, got {len(blocks)}")
    out = []
    for (d, _), m in zip(algebra.blocks, blocks):
        m = np.asarray(m, dtype=complex)
        if m.shape != (d, d):
            raise ValueError(f"block shape {m.shape} does not match algebra dimension {d}")
        out.append(m)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Block-diagonal Hermitian matrix bound to a TraceAlgebra.

    Blocks are stored exactly symmetrized ((M + M*)/2), so ``A == A*``
    holds entrywise with zero tolerance after construction.
    """

    algebra: TraceAlgebra
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = _check_blocks(self.algebra, self.blocks)
        sym = tuple((m + m.conj().T) / 2 for m in blocks)
        for b in sym:
            b.setflags(write=False)
        object.__setattr__(self, "blocks", sym)

    @staticmethod
    def zeros(algebra: TraceAlgebra) -> "HermitianOperator":
        return HermitianOperator(algebra, tuple(np.zeros((d, d)) for d in algebra.dims))

    @staticmethod
    def identity(algebra: TraceAlgebra) -> "HermitianOperator":
        return HermitianOperator(algebra, tuple(np.eye(d) for d in algebra.dims))

    @staticmethod
    def diagonal(algebra: TraceAlgebra, values: Sequence[float]) -> "HermitianOperator":
        """Diagonal operator from a flat list of entries, block order."""
        values = np.asarray(values, dtype=float)
        if values.size != algebra.total_dim:
            raise ValueError("diagonal length does not match total dimension")
        blocks, i = [], 0
        for d in algebra.dims:
            blocks.append(np.diag(values[i : i + d]))
            i += d
        return HermitianOperator(algebra, tuple(blocks))

    # -- arithmetic (Hermitian-closed) ----------------------------------

    def _same_algebra(self, other: "HermitianOperator"):
        if self.algebra != other.algebra:
            raise ValueError("operators live in different algebras")

    def __add__(self, other):
        self._same_algebra(other)
        return HermitianOperator(self.algebra, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other):
        self._same_algebra(other)
        return HermitianOperator(self.algebra, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __neg__(self):
        return HermitianOperator(self.algebra, tuple(-a for a in self.blocks))

    def __mul__(self, scalar):
        s = float(scalar)
        return HermitianOperator(self.algebra, tuple(s * a for a in self.blocks))

    __rmul__ = __mul__

    def trace(self) -> float:
        return float(np.real(block_trace(self.algebra, self.blocks)))

    def hs_norm(self) -> float:
        """Weighted Hilbert-Schmidt norm (tau(A*A))^(1/2)."""
        return float(
            np.sqrt(sum(s * np.sum(np.abs(m) ** 2) for (_, s), m in zip(self.algebra.blocks, self.blocks)))
        )

    @cached_property
    def decomposition(self) -> "SpectralDecomposition":
        return spectral_decompose(self)

    def op_norm(self) -> float:
        eigs = self.decomposition.eigenvalues
        return float(max(np.max(np.abs(e)) for e in eigs))

    def min_eigenvalue(self) -> float:
        return float(min(np.min(e) for e in self.decomposition.eigenvalues))

    def content_hash(self) -> str:
        """Stable fingerprint of the algebra layout and block entries."""
        h = hashlib.sha256()
        for (d, s), m in zip(self.algebra.blocks, self.blocks):
            h.update(f"{d}:{s!r}".encode())
            h.update(np.ascontiguousarray(m).tobytes())
        return h.hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Per-block ascending eigenvalues with unitary eigenvector matrices."""

    algebra: TraceAlgebra
    eigenvalues: tuple[np.ndarray, ...]
    eigenvectors: tuple[np.ndarray, ...]

    def apply(self, fn: Callable[[np.ndarray], np.ndarray]) -> HermitianOperator:
        """Functional calculus for a real-valued function: U f(L) U*."""
        blocks = tuple(
            (u * fn(lam)) @ u.conj().T for lam, u in zip(self.eigenvalues, self.eigenvectors)
        )
        return HermitianOperator(self.algebra, blocks)

    def apply_complex(self, fn: Callable[[np.ndarray], np.ndarray]) -> tuple[np.ndarray, ...]:
        """Functional calculus for a complex-valued function; raw blocks."""
        return tuple((u * fn(lam)) @ u.conj().T for lam, u in zip(self.eigenvalues, self.eigenvectors))

    def weighted_spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        """All eigenvalues with their trace weights, block order."""
        eigs = np.concatenate(self.eigenvalues)
        weights = np.concatenate(
            [np.full(len(lam), s) for lam, (_, s) in zip(self.eigenvalues, self.algebra.blocks)]
        )
        return eigs, weights

    def reconstruction_error(self, A: HermitianOperator) -> float:
        """Max per-block Frobenius error of U L U* against A."""
        err = 0.0
        for lam, u, m in zip(self.eigenvalues, self.eigenvectors, A.blocks):
            err = max(err, float(np.linalg.norm((u * lam) @ u.conj().T - m)))
        return err


def spectral_decompose(A: HermitianOperator) -> SpectralDecomposition:
    eigenvalues, eigenvectors = [], []
    for k, m in enumerate(A.blocks):
        try:
            lam, u = np.linalg.eigh(m)
        except np.linalg.LinAlgError as exc:
            raise EigensolverError(f"eigensolver failed to converge on block {k}") from exc
        eigenvalues.append(lam)
        eigenvectors.append(u)
    return SpectralDecomposition(A.algebra, tuple(eigenvalues), tuple(eigenvectors))


def pos_neg_parts(A: HermitianOperator) -> tuple[HermitianOperator, HermitianOperator]:
    """Spectral positive and negative parts: A = A_plus - A_minus, both >= 0."""
    dec = A.decomposition
    plus = dec.apply(lambda lam: np.maximum(lam, 0.0))
    minus = dec.apply(lambda lam: np.maximum(-lam, 0.0))
    return plus, minus


def support_projection(A: HermitianOperator) -> tuple[HermitianOperator, float]:
    """Projection onto the range of |A| and its weighted trace.

    Eigenvalues with |lambda| <= RANK_EPS * max|lambda| count as zero; ties
    at the threshold round toward zero, keeping the support conservative.
    """
    dec = A.decomposition
    sup = A.op_norm()
    thr = RANK_EPS * sup
    p = dec.apply(lambda lam: (np.abs(lam) > thr).astype(float))
    tau = float(
        sum(s * int(np.sum(np.abs(lam) > thr)) for lam, (_, s) in zip(dec.eigenvalues, A.algebra.blocks))
    )
    return p, tau


def counting_from_spectra(eigs: np.ndarray, weights: np.ndarray, tau_identity: float) -> StepFunction:
    """Counting function n(t) = weighted number of eigenvalues > t.

    Right-continuous, value tau(1) on the left tail and 0 on the right tail.
    Eigenvalues closer than MERGE_EPS times the spectral diameter merge.
    """
    eigs = np.asarray(eigs, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if eigs.size == 0:
        return StepFunction.constant(0.0)
    diameter = float(eigs.max() - eigs.min())
    return StepFunction.from_jumps(
        tau_identity, eigs, -weights, merge_tol=MERGE_EPS * diameter
    )


def counting_function(A: HermitianOperator) -> StepFunction:
    eigs, weights = A.decomposition.weighted_spectrum()
    return counting_from_spectra(eigs, weights, A.algebra.trace_of_identity)


def singular_value_function(A: HermitianOperator) -> StepFunction:
    """Decreasing rearrangement of |eigenvalues| with trace-weight plateau
    lengths: the generalized inverse of the counting function of |A|."""
    eigs, weights = A.decomposition.weighted_spectrum()
    mags = np.abs(eigs)
    order = np.argsort(-mags, kind="stable")
    mags, weights = mags[order], weights[order]
    tol = MERGE_EPS * float(mags.max())
    plateau_vals: list[float] = []
    plateau_lens: list[float] = []
    for m, w in zip(mags, weights):
        if plateau_vals and plateau_vals[-1] - m <= tol:
            plateau_lens[-1] += w
        else:
            plateau_vals.append(float(m))
            plateau_lens.append(float(w))
    breakpoints = np.concatenate([[0.0], np.cumsum(plateau_lens)])
    values = np.concatenate([[0.0], plateau_vals, [0.0]])
    return StepFunction(breakpoints, values).canonicalize()


def schatten_norm(A: HermitianOperator, p: float) -> float:
    """(tau(|A|^p))^(1/p); p = inf gives the largest eigenvalue magnitude."""
    if p != np.inf and p < 1:
        raise ValueError(f"Schatten exponent must satisfy p >= 1 or p = inf, got {p}")
    eigs, weights = A.decomposition.weighted_spectrum()
    mags = np.abs(eigs)
    if p == np.inf:
        return float(mags.max()) if mags.size else 0.0
    return float(np.sum(weights * mags**p) ** (1.0 / p))


def commutator_hs_norm(A: HermitianOperator, P: HermitianOperator) -> float:
    """Weighted Hilbert-Schmidt norm of the commutator AP - PA."""
    A._same_algebra(P)
    total = 0.0
    for (_, s), a, p in zip(A.algebra.blocks, A.blocks, P.blocks):
        c = a @ p - p @ a
        total += s * float(np.sum(np.abs(c) ** 2))
    return float(np.sqrt(total))
