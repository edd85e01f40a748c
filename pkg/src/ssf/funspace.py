"""Function families with integrable-Fourier-derivative control.

The family of interest consists of bounded C^1 functions f whose derivative
has an integrable Fourier transform, seminorm ||F(f')||_1.  The Fourier
convention throughout the package is

    F(g)(s) = (2 pi)^{-1} integral g(t) exp(-i s t) dt,
    g(t)    = integral F(g)(s) exp(i s t) ds,

under which the primitive of a unit Gaussian has seminorm exactly 1 and the
profile t -> t / sqrt(alpha^2 + t^2) has seminorm exactly 1 for every alpha.

Four constructible families are provided (Gaussian primitives, clamped
polynomial windows, the smooth odd profile above, and cubic-spline sampled
data), plus the two increasing-bijection families used to transplant
spectral problems into a bounded window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import erf

__all__ = [
    "W1Function",
    "SeminormResult",
    "BijectionH",
    "HassReport",
    "GridCoverageError",
    "gaussian_primitive",
    "polynomial_window",
    "h_alpha_profile",
    "sampled_function",
    "w1_function_from_spec",
    "w1_seminorm",
    "w1_seminorm_of_difference",
    "approximate_in_w1",
    "make_h_alpha",
    "make_h_window",
    "bijection_from_callables",
    "check_hass",
    "derivative_mismatch",
]

SQRT2PI = math.sqrt(2.0 * math.pi)


class GridCoverageError(ValueError):
    """The sampling window does not cover the numerical support of f'."""


def _scalar_ok(fn):
    """Wrap an array evaluator so scalar input returns a plain float."""

    def wrapped(t):
        out = fn(np.asarray(t, dtype=float))
        return float(out) if np.ndim(out) == 0 else out

    wrapped.__name__ = getattr(fn, "__name__", "eval")
    return wrapped


@dataclass(frozen=True, eq=False)
class W1Function:
    """A function f with evaluators for f and f', a family tag with
    JSON-serializable parameters, an exact seminorm when the family has a
    closed form, a natural length scale, and an interval on which f'
    carries its mass (used by derivative checks and default grids)."""

    family: str
    params: dict
    f: Callable
    fprime: Callable
    seminorm_exact: float | None
    scale: float
    core: tuple[float, float]
    _seminorm_cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def to_spec(self) -> dict:
        if self.family not in ("gaussian_primitive", "polynomial_window", "h_alpha_profile", "sampled"):
            raise ValueError(f"family {self.family!r} has no serialized form")
        return {"family": self.family, "params": self.params}

    def seminorm(self, grid: tuple[float, int] | None = None) -> float:
        if grid not in self._seminorm_cache:
            self._seminorm_cache[grid] = w1_seminorm(self, grid).value
        return self._seminorm_cache[grid]


@dataclass(frozen=True)
class SeminormResult:
    """Seminorm value plus the grid estimate retained for cross-checking."""

    value: float
    grid_estimate: float
    exact: float | None

    def __float__(self):
        return self.value


# ---------------------------------------------------------------------------
# families


def gaussian_primitive(center: float, width: float) -> W1Function:
    """f(t) = integral up to t of exp(-(u-center)^2 / (2 width^2)).

    f' is the (unnormalized) Gaussian; the seminorm is exactly 1 under the
    package Fourier convention, independent of center and width.
    """
    c, w = float(center), float(width)
    if not w > 0:
        raise ValueError(f"width must be positive, got {width}")

    @_scalar_ok
    def f(t):
        return w * math.sqrt(math.pi / 2.0) * (1.0 + erf((t - c) / (w * math.sqrt(2.0))))

    @_scalar_ok
    def fprime(t):
        return np.exp(-((t - c) ** 2) / (2.0 * w * w))

    return W1Function(
        family="gaussian_primitive",
        params={"center": c, "width": w},
        f=f,
        fprime=fprime,
        seminorm_exact=1.0,
        scale=w,
        core=(c - 4.0 * w, c + 4.0 * w),
    )


def polynomial_window(coefficients, interval) -> W1Function:
    """A function equal to the polynomial (coefficients in ascending degree
    order) on [a, b], extended to constants outside.

    The extension blends the derivative with a cubic smoothstep weight on
    margins of width (b - a) / 10, which keeps the result C^2 with a
    compactly supported derivative; the seminorm is finite but has no
    closed form and is estimated on a grid.
    """
    coefficients = [float(x) for x in coefficients]
    if not coefficients:
        raise ValueError("empty coefficient list")
    a, b = (float(x) for x in interval)
    if not b > a:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    Poly = np.polynomial.Polynomial
    p = Poly(coefficients)
    m = (b - a) / 10.0
    dp = p.deriv()
    # weight polynomials on the blending margins, expressed in t
    down = Poly([1.0, 0.0, -3.0, 2.0])(Poly([-b / m, 1.0 / m]))        # 1 -> 0 on [b, b+m]
    up = Poly([0.0, 0.0, 3.0, -2.0])(Poly([-(a - m) / m, 1.0 / m]))    # 0 -> 1 on [a-m, a]
    q_right = dp * down
    q_left = dp * up
    F_right = q_right.integ()
    F_left = q_left.integ()
    right_const = float(p(b) + F_right(b + m) - F_right(b))
    left_const = float(p(a) + F_left(a - m) - F_left(a))

    @_scalar_ok
    def f(t):
        return np.piecewise(
            t,
            [t < a - m, (a - m <= t) & (t < a), (a <= t) & (t <= b), (b < t) & (t <= b + m), t > b + m],
            [left_const, lambda s: p(a) + F_left(s) - F_left(a), p, lambda s: p(b) + F_right(s) - F_right(b), right_const],
        )

    @_scalar_ok
    def fprime(t):
        return np.piecewise(
            t,
            [(a - m <= t) & (t < a), (a <= t) & (t <= b), (b < t) & (t <= b + m)],
            [q_left, dp, q_right, 0.0],
        )

    return W1Function(
        family="polynomial_window",
        params={"coefficients": coefficients, "interval": [a, b]},
        f=f,
        fprime=fprime,
        seminorm_exact=None,
        scale=m,
        core=(a - m, b + m),
    )


def h_alpha_profile(alpha: float) -> W1Function:
    """The increasing odd profile t / sqrt(alpha^2 + t^2) as a function-class
    member; its derivative alpha^2 (alpha^2 + t^2)^{-3/2} has Fourier
    transform |s| K_1(alpha |s|)-shaped with total integral exactly 1."""
    al = float(alpha)
    if not al > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")

    @_scalar_ok
    def f(t):
        return t / np.hypot(al, t)

    @_scalar_ok
    def fprime(t):
        return al * al / np.hypot(al, t) ** 3

    return W1Function(
        family="h_alpha_profile",
        params={"alpha": al},
        f=f,
        fprime=fprime,
        seminorm_exact=1.0,
        scale=al,
        core=(-6.0 * al, 6.0 * al),
    )


def sampled_function(grid, values) -> W1Function:
    """Cubic-spline interpolant of uniformly spaced samples of f.

    Outside the sampled window f continues with its boundary values and f'
    is 0.  A constant sample set is recognized exactly (zero derivative,
    zero seminorm).
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if grid.ndim != 1 or grid.size < 4 or grid.shape != values.shape:
        raise ValueError("sampled family needs >= 4 matching grid/value samples")
    steps = np.diff(grid)
    if not np.all(steps > 0):
        raise ValueError("sample grid must be strictly increasing")
    if np.max(steps) - np.min(steps) > 1e-9 * np.max(steps):
        raise ValueError("sample grid must be uniformly spaced")
    lo, hi = float(grid[0]), float(grid[-1])
    params = {"grid": grid.tolist(), "values": values.tolist()}

    if np.all(values == values[0]):
        const = float(values[0])

        @_scalar_ok
        def f(t):
            return np.full_like(t, const)

        @_scalar_ok
        def fprime(t):
            return np.zeros_like(t)

        return W1Function("sampled", params, f, fprime, 0.0, hi - lo, (lo, hi))

    spline = CubicSpline(grid, values)
    dspline = spline.derivative()

    @_scalar_ok
    def f(t):
        inside = (t >= lo) & (t <= hi)
        return np.where(inside, spline(np.clip(t, lo, hi)), np.where(t < lo, values[0], values[-1]))

    @_scalar_ok
    def fprime(t):
        inside = (t >= lo) & (t <= hi)
        return np.where(inside, dspline(np.clip(t, lo, hi)), 0.0)

    return W1Function("sampled", params, f, fprime, None, float(np.mean(steps)) * 8, (lo, hi))


_FAMILIES = {
    "gaussian_primitive": lambda p: gaussian_primitive(p["center"], p["width"]),
    "polynomial_window": lambda p: polynomial_window(p["coefficients"], p["interval"]),
    "h_alpha_profile": lambda p: h_alpha_profile(p["alpha"]),
    "sampled": lambda p: sampled_function(p["grid"], p["values"]),
}


def w1_function_from_spec(spec: dict) -> W1Function:
    try:
        family = spec["family"]
        params = spec["params"]
    except (KeyError, TypeError):
        raise ValueError("function spec needs 'family' and 'params'") from None
    if family not in _FAMILIES:
        raise ValueError(f"unknown function family {family!r}")
    return _FAMILIES[family](params)


# ---------------------------------------------------------------------------
# seminorm


def _default_grid(f: W1Function) -> tuple[float, int]:
    if f.family == "gaussian_primitive":
        c, w = f.params["center"], f.params["width"]
        return max(8.0, abs(c) + 12.0 * w), 2**14
    if f.family == "h_alpha_profile":
        # cubic tail decay: |f'| falls to 1e-12 of its peak near 1e4 * alpha
        al = f.params["alpha"]
        return 1.2e4 * al, 2**18
    lo, hi = f.core
    return max(abs(lo), abs(hi)) * 1.25 + 1.0, 2**16


def _grid_transform_l1(fprime: Callable, L: float, N: int) -> float:
    """Integral of |F(f')| by midpoint sampling on [-L, L] and FFT."""
    dt = 2.0 * L / N
    t = -L + (np.arange(N) + 0.5) * dt
    g = np.asarray(fprime(t), dtype=float)
    s = np.fft.fftfreq(N, d=dt) * 2.0 * math.pi
    F = dt / (2.0 * math.pi) * np.exp(-1j * s * t[0]) * np.fft.fft(g)
    return float(np.sum(np.abs(F)) * math.pi / L)


def _check_grid(f: W1Function, L: float, N: int):
    if N < 1024 or (N & (N - 1)) != 0:
        raise ValueError(f"grid size must be a power of two >= 1024, got {N}")
    probe = np.linspace(-L, L, 4097)
    mags = np.abs(np.asarray(f.fprime(probe), dtype=float))
    peak = float(mags.max())
    boundary = float(max(mags[0], mags[-1]))
    if peak > 0.0 and boundary > 1e-12 * peak:
        raise GridCoverageError(
            f"grid [-{L}, {L}] does not cover the support of f': boundary magnitude "
            f"{boundary:.3e} exceeds 1e-12 of peak {peak:.3e}"
        )


def w1_seminorm(f: W1Function, grid: tuple[float, int] | None = None) -> SeminormResult:
    """Seminorm ||F(f')||_1.

    The grid estimate is always computed (discrete transform of midpoint
    samples of f' on [-L, L]); families with a closed form report the exact
    value and keep the estimate for cross-checking.
    """
    L, N = grid if grid is not None else _default_grid(f)
    _check_grid(f, L, N)
    estimate = _grid_transform_l1(f.fprime, L, int(N))
    if f.seminorm_exact is not None:
        return SeminormResult(f.seminorm_exact, estimate, f.seminorm_exact)
    return SeminormResult(estimate, estimate, None)


def w1_seminorm_of_difference(f: W1Function, g: W1Function, grid: tuple[float, int] | None = None) -> float:
    """Grid estimate of the seminorm of f - g (no closed forms assumed)."""
    if grid is None:
        Lf, Nf = _default_grid(f)
        Lg, Ng = _default_grid(g)
        grid = (max(Lf, Lg), max(Nf, Ng))
    L, N = grid
    return _grid_transform_l1(lambda t: np.asarray(f.fprime(t)) - np.asarray(g.fprime(t)), L, int(N))


# ---------------------------------------------------------------------------
# approximation by primitives of rapidly decaying derivatives


def approximate_in_w1(f: W1Function, n: int) -> W1Function:
    """Truncate f' to [-n, n], mollify with a Gaussian of width 1/n, and
    integrate back, anchored so the approximant matches f at 0.

    A constant input (zero derivative) is returned unchanged.
    """
    n = int(n)
    if n < 1:
        raise ValueError("approximation index must be >= 1")
    lo, hi = f.core
    probe = np.linspace(min(lo, -1.0), max(hi, 1.0), 2001)
    if float(np.max(np.abs(np.asarray(f.fprime(probe), dtype=float)))) == 0.0:
        return f

    sigma = 1.0 / n
    h = min(sigma / 10.0, f.scale / 10.0)
    span = n + 10.0 * sigma
    npts = int(math.ceil(2.0 * span / h)) + 1
    grid = np.linspace(-span, span, npts)
    fp = np.asarray(f.fprime(grid), dtype=float)
    fp = np.where(np.abs(grid) <= n, fp, 0.0)

    radius = int(math.ceil(9.0 * sigma / (grid[1] - grid[0])))
    u = (np.arange(-radius, radius + 1)) * (grid[1] - grid[0])
    kernel = np.exp(-(u**2) / (2.0 * sigma * sigma))
    kernel /= kernel.sum()
    fn_prime = np.convolve(fp, kernel, mode="same")

    primitive = CubicSpline(grid, fn_prime).antiderivative()
    values = primitive(grid) - primitive(0.0) + f.f(0.0)
    return sampled_function(grid, values)


# ---------------------------------------------------------------------------
# increasing bijections


@dataclass(frozen=True, eq=False)
class BijectionH:
    """A smooth increasing bijection from the line onto (c0, c1) with
    evaluators for h, h' and the inverse."""

    family: str
    params: dict
    h: Callable
    hprime: Callable
    hinv: Callable
    c0: float
    c1: float

    def to_spec(self) -> dict:
        if self.family not in ("h_alpha", "h_window"):
            raise ValueError(f"bijection family {self.family!r} has no serialized form")
        return {"family": self.family, "params": self.params}


def make_h_alpha(alpha: float) -> BijectionH:
    """s -> s / sqrt(alpha^2 + s^2), a C^2 bijection onto (-1, 1); rescaling
    satisfies h_alpha(s) = h_1(s / alpha)."""
    al = float(alpha)
    if not al > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")

    @_scalar_ok
    def h(s):
        return s / np.hypot(al, s)

    @_scalar_ok
    def hprime(s):
        return al * al / np.hypot(al, s) ** 3

    @_scalar_ok
    def hinv(y):
        return al * y / np.sqrt((1.0 - y) * (1.0 + y))

    return BijectionH("h_alpha", {"alpha": al}, h, hprime, hinv, -1.0, 1.0)


def make_h_window(a: float, b: float, alpha: float) -> BijectionH:
    """Bijection with unit derivative on [a, b] and cubically decaying
    derivative tails; maps the line onto (0, c).

    c is assembled from the closed-form tail antiderivative
    T(u) = alpha * u / sqrt(alpha^2 + u^2): each tail contributes
    T(inf) = alpha, so c = (b - a) + 2 alpha.
    """
    a, b, al = float(a), float(b), float(alpha)
    if not b > a:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    if not al > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")

    def T(u):
        return al * u / np.hypot(al, u)

    def Tinv(v):
        return al * v / np.sqrt((al - v) * (al + v))

    tail = al  # limit of T at +inf
    c = (b - a) + 2.0 * tail

    @_scalar_ok
    def h(t):
        return np.piecewise(
            t,
            [t < a, (a <= t) & (t <= b)],
            [lambda s: tail + T(s - a), lambda s: tail + (s - a), lambda s: tail + (b - a) + T(s - b)],
        )

    @_scalar_ok
    def hprime(t):
        return np.piecewise(
            t,
            [t < a, (a <= t) & (t <= b)],
            [lambda s: al**3 / np.hypot(al, s - a) ** 3, 1.0, lambda s: al**3 / np.hypot(al, s - b) ** 3],
        )

    @_scalar_ok
    def hinv(y):
        return np.piecewise(
            y,
            [y < tail, (tail <= y) & (y <= tail + (b - a))],
            [lambda v: a + Tinv(v - tail), lambda v: a + (v - tail), lambda v: b + Tinv(v - tail - (b - a))],
        )

    return BijectionH("h_window", {"a": a, "b": b, "alpha": al}, h, hprime, hinv, 0.0, c)


def bijection_from_callables(h, hprime, hinv, c0: float, c1: float, params: dict | None = None) -> BijectionH:
    """Escape hatch for custom bijections (not serializable); used to probe
    the inverse-growth condition on families outside the shipped two."""
    return BijectionH("custom", params or {}, h, hprime, hinv, float(c0), float(c1))


# ---------------------------------------------------------------------------
# growth condition on the inverse near the range endpoints


@dataclass(frozen=True)
class HassEndpoint:
    targets: np.ndarray
    ratio_first: np.ndarray
    ratio_second: np.ndarray
    bounded_first: bool
    bounded_second: bool


@dataclass(frozen=True)
class HassReport:
    """Measured growth of (h^{-1})' and (h^{-1})'' against |h^{-1}|^n along
    probes approaching the two range endpoints.  Report only: boundedness of
    an asymptotic order condition is judged from the probe trend, not
    decided."""

    exponent: int
    lower: HassEndpoint
    upper: HassEndpoint

    @property
    def all_bounded(self) -> bool:
        return (
            self.lower.bounded_first
            and self.lower.bounded_second
            and self.upper.bounded_first
            and self.upper.bounded_second
        )


def _trend_bounded(r: np.ndarray) -> bool:
    # bounded when the tail of the probe sequence has stopped growing
    mid = r[len(r) // 2]
    return bool(r[-1] <= 10.0 * mid + 1e-12)


def check_hass(h: BijectionH, n: int, fractions=None) -> HassReport:
    """Probe (h^{-1})'(t) / |h^{-1}(t)|^n and (h^{-1})''(t) / |h^{-1}(t)|^n
    as t approaches the range endpoints geometrically.

    The first derivative comes from 1 / h'(x); the second from
    -h''(x) / h'(x)^3 with h'' by central differences of h'.
    """
    if fractions is None:
        fractions = np.geomspace(1e-2, 1e-11, 10)
    width = h.c1 - h.c0

    def probe(ts):
        x = np.asarray(h.hinv(ts), dtype=float)
        hp = np.asarray(h.hprime(x), dtype=float)
        step = 1e-6 * np.maximum(1.0, np.abs(x))
        hpp = (np.asarray(h.hprime(x + step)) - np.asarray(h.hprime(x - step))) / (2.0 * step)
        d1 = 1.0 / hp
        d2 = -hpp / hp**3
        base = np.abs(x) ** n
        r1, r2 = np.abs(d1) / base, np.abs(d2) / base
        return HassEndpoint(ts, r1, r2, _trend_bounded(r1), _trend_bounded(r2))

    lower = probe(h.c0 + width * np.asarray(fractions))
    upper = probe(h.c1 - width * np.asarray(fractions))
    return HassReport(int(n), lower, upper)


# ---------------------------------------------------------------------------
# derivative consistency


def derivative_mismatch(f: W1Function, rng: np.random.Generator, npoints: int = 1000) -> float:
    """Largest relative deviation between central finite differences of f
    and the f' evaluator, probed where f' carries mass.

    The pointwise scale is |f'| + 1e-3 * peak|f'|, so zeros of f' (where no
    finite-difference scheme can deliver relative accuracy) do not inflate
    the quotient while real mismatches anywhere in the mass region do.
    """
    lo, hi = f.core
    t = rng.uniform(lo, hi, size=npoints)
    step = 1e-5 * f.scale
    fd = (np.asarray(f.f(t + step)) - np.asarray(f.f(t - step))) / (2.0 * step)
    exact = np.asarray(f.fprime(t), dtype=float)
    peak = float(np.max(np.abs(exact)))
    if peak == 0.0:
        return float(np.max(np.abs(fd)))
    return float(np.max(np.abs(fd - exact) / (np.abs(exact) + 1e-3 * peak)))
