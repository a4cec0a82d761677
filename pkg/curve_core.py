"""
Curve Core Module
=================
Absolutely continuous parametric curves over a compact interval.

Key Pieces:
- Interval arithmetic for closed parameter sub-domains (bisection, containment)
- Curve bases: Bezier (de Casteljau), power polynomial, trigonometric, custom
- Arc length s(Q) by adaptive 15-point Gauss-Kronrod quadrature
- Closed-form antiderivative of the speed squared and the arc-length
  upper bound u(Q) = sqrt(|Q| * integral of psi'.psi' over Q)

Every curve is immutable after construction; all evaluation methods are
pure and safe to call from several threads at once.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import integrate
from scipy.special import comb

from errors import (
    ConstantCurveError,
    CurveDomainError,
    DegenerateIntervalError,
    DimensionMismatchError,
    QuadratureError,
    UnsupportedCapabilityError,
)

logger = logging.getLogger(__name__)


class Tolerances:
    """Numerical thresholds shared across the library."""
    DOMAIN_SLACK = 1e-12  # parameter roundoff absorbed by domain checks
    DEGENERATE_AXIS = 1e-12  # foci closer than this make the hull a ball
    HULL_CLAMP_RELATIVE = 1e-9  # bound may undershoot the chord by this much
    REFINEMENT_FLOOR = 64  # multiples of machine epsilon times |I|
    CUSTOM_SAMPLES = 17  # Chebyshev points for the custom constant-map check
    CUSTOM_ZERO_NORM = 1e-14
    ZERO_FREQUENCY = 1e-14


@dataclass(frozen=True)
class QuadratureConfig:
    """Settings for the adaptive Gauss-Kronrod arc-length path."""
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_panels: int = 64


DEFAULT_QUADRATURE = QuadratureConfig()


# ============================================================================
# Intervals
# ============================================================================

@dataclass(frozen=True)
class Interval:
    """Closed parameter interval [lo, hi]."""
    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ValueError(f"interval endpoints must be finite: [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise ValueError(f"interval has lo > hi: [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        # lo + half-width keeps the midpoint inside [lo, hi] without overflow
        return self.lo + (self.hi - self.lo) / 2

    def contains(self, t: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= t <= self.hi + slack

    def within(self, other: "Interval", slack: float = 0.0) -> bool:
        """True if this interval is a subset of `other`."""
        return self.lo >= other.lo - slack and self.hi <= other.hi + slack

    def bisect(self) -> Tuple["Interval", "Interval"]:
        return bisect(self)

    def to_list(self) -> List[float]:
        return [self.lo, self.hi]


def bisect(Q: Interval) -> Tuple[Interval, Interval]:
    """Split Q at its midpoint into two closed halves sharing the midpoint."""
    if Q.length <= 0:
        raise DegenerateIntervalError(f"cannot bisect zero-length interval [{Q.lo}, {Q.hi}]")
    mid = Q.midpoint
    return Interval(Q.lo, mid), Interval(mid, Q.hi)


# ============================================================================
# Curve base class
# ============================================================================

class CurveSpec(ABC):
    """
    A parametric curve psi: I -> R^d.

    Subclasses supply vectorized position/velocity evaluation and, where a
    closed form exists, the antiderivative F of psi'(t).psi'(t). Everything
    else (domain checks, quadrature, the arc-length upper bound) lives here.
    """

    basis: str = "abstract"

    def __init__(self, dimension: int, domain: Interval):
        if int(dimension) < 1:
            raise ValueError(f"dimension must be positive, got {dimension}")
        if not isinstance(domain, Interval):
            domain = Interval(*domain)
        if domain.length <= 0:
            raise ValueError(f"curve domain must have positive length, got {domain.to_list()}")
        self.dimension = int(dimension)
        self.domain = domain

    # --- basis-specific hooks ------------------------------------------------

    @abstractmethod
    def _positions(self, ts: np.ndarray) -> np.ndarray:
        """Positions for a 1-D array of parameters, shape (n, d)."""

    @abstractmethod
    def _velocities(self, ts: np.ndarray) -> np.ndarray:
        """Derivatives for a 1-D array of parameters, shape (n, d)."""

    def _antiderivative(self, t: float) -> float:
        raise UnsupportedCapabilityError(
            f"{self.basis} curve has no closed-form speed-squared antiderivative"
        )

    @property
    def has_antiderivative(self) -> bool:
        return True

    # --- evaluation ----------------------------------------------------------

    def _check_parameter(self, t: float) -> float:
        t = float(t)
        if not self.domain.contains(t, Tolerances.DOMAIN_SLACK):
            raise CurveDomainError(t, self.domain.lo, self.domain.hi)
        return min(max(t, self.domain.lo), self.domain.hi)

    def _check_parameters(self, ts) -> np.ndarray:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        slack = Tolerances.DOMAIN_SLACK
        bad = (ts < self.domain.lo - slack) | (ts > self.domain.hi + slack) | ~np.isfinite(ts)
        if np.any(bad):
            raise CurveDomainError(float(ts[bad][0]), self.domain.lo, self.domain.hi)
        return np.clip(ts, self.domain.lo, self.domain.hi)

    def _check_interval(self, Q: Interval) -> Interval:
        if not Q.within(self.domain, Tolerances.DOMAIN_SLACK):
            bad = Q.lo if Q.lo < self.domain.lo else Q.hi
            raise CurveDomainError(bad, self.domain.lo, self.domain.hi)
        return Interval(max(Q.lo, self.domain.lo), min(Q.hi, self.domain.hi))

    def evaluate(self, t: float) -> np.ndarray:
        t = self._check_parameter(t)
        return self._positions(np.array([t]))[0]

    def derivative(self, t: float) -> np.ndarray:
        t = self._check_parameter(t)
        return self._velocities(np.array([t]))[0]

    def evaluate_many(self, ts) -> np.ndarray:
        return self._positions(self._check_parameters(ts))

    def derivative_many(self, ts) -> np.ndarray:
        return self._velocities(self._check_parameters(ts))

    def speed_squared_antiderivative(self, t: float) -> float:
        return float(self._antiderivative(self._check_parameter(t)))

    # --- arc length ----------------------------------------------------------

    def _integrate(self, integrand: Callable[[float], float], Q: Interval,
                   cfg: QuadratureConfig, what: str) -> float:
        value, error, info = integrate.quad_vec(
            integrand,
            Q.lo,
            Q.hi,
            epsabs=cfg.abs_tol,
            epsrel=cfg.rel_tol,
            limit=cfg.max_panels,
            quadrature="gk15",
            full_output=True,
        )
        if not info.success:
            raise QuadratureError(
                f"{what} quadrature on [{Q.lo}, {Q.hi}] did not converge: {info.message}",
                float(value),
                float(error),
            )
        return float(value)

    def arc_length(self, Q: Optional[Interval] = None,
                   quadrature_cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
        """s(Q) = integral of |psi'(t)| over Q, by adaptive GK15 quadrature."""
        Q = self._check_interval(Q or self.domain)
        if Q.length == 0:
            return 0.0

        def speed(t: float) -> float:
            return float(np.linalg.norm(self._velocities(np.array([t]))[0]))

        return self._integrate(speed, Q, quadrature_cfg, "arc length")

    def speed_squared_integral(self, Q: Optional[Interval] = None,
                               quadrature_cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
        """Integral of psi'.psi' over Q; closed form when the basis allows it."""
        Q = self._check_interval(Q or self.domain)
        if Q.length == 0:
            return 0.0
        if self.has_antiderivative:
            value = self._antiderivative(Q.hi) - self._antiderivative(Q.lo)
        else:
            def speed_squared(t: float) -> float:
                v = self._velocities(np.array([t]))[0]
                return float(v @ v)

            value = self._integrate(speed_squared, Q, quadrature_cfg, "speed squared")
        return max(float(value), 0.0)

    def arc_length_upper_bound(self, Q: Optional[Interval] = None,
                               quadrature_cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
        """u(Q) = sqrt(|Q| * integral of psi'.psi' over Q); never below s(Q)."""
        Q = self._check_interval(Q or self.domain)
        if Q.length == 0:
            return 0.0
        return float(np.sqrt(Q.length * self.speed_squared_integral(Q, quadrature_cfg)))

    # --- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        raise UnsupportedCapabilityError(f"{self.basis} curves cannot be serialized")

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dimension={self.dimension}, domain={self.domain.to_list()})"


# ============================================================================
# Bezier basis
# ============================================================================

def de_casteljau(control_points: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Evaluate a Bezier polynomial at local parameters u in [0, 1].

    control_points has shape (n+1, ...) and u shape (m,); result (m, ...).
    """
    u = np.asarray(u, dtype=float)
    pts = np.broadcast_to(control_points, (u.shape[0],) + control_points.shape).copy()
    w = u.reshape((-1,) + (1,) * control_points.ndim)
    for _ in range(control_points.shape[0] - 1):
        pts = (1.0 - w) * pts[:, :-1] + w * pts[:, 1:]
    return pts[:, 0]


def bernstein_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Bernstein coefficients of the dot product of two degree-m Bezier maps.

    a, b: (m+1, d) control points. Returns 2m+1 scalar coefficients.
    """
    m = a.shape[0] - 1
    i = np.arange(m + 1)
    weights = np.outer(comb(m, i), comb(m, i))
    dots = (a @ b.T) * weights
    out = np.zeros(2 * m + 1)
    for k in range(2 * m + 1):
        # anti-diagonal i + j = k
        out[k] = np.trace(np.fliplr(dots), offset=(m - k)) / comb(2 * m, k)
    return out


def bernstein_antiderivative(coefficients: np.ndarray) -> np.ndarray:
    """Degree p+1 Bernstein coefficients of the antiderivative vanishing at 0."""
    p = coefficients.shape[0] - 1
    return np.concatenate([[0.0], np.cumsum(coefficients)]) / (p + 1)


class BezierCurve(CurveSpec):
    """Bezier curve of order n over an arbitrary domain [lo, hi]."""

    basis = "bezier"

    def __init__(self, control_points: Sequence[Sequence[float]],
                 domain: Interval = Interval(0.0, 1.0)):
        points = np.array(control_points, dtype=float)
        if points.ndim != 2 or points.shape[0] < 1:
            raise ValueError("control_points must be a non-empty list of d-vectors")
        super().__init__(points.shape[1], domain)
        if points.shape[0] < 2 or np.all(points[1:] == points[:-1]):
            raise ConstantCurveError("Bezier curve with identical control points is constant")
        points.setflags(write=False)
        self.control_points = points
        self.order = points.shape[0] - 1

        # derivative in local parameter u, order n-1
        hodograph = self.order * np.diff(points, axis=0)
        hodograph.setflags(write=False)
        self._hodograph = hodograph

        # psi'.psi' in u-space is a Bernstein polynomial of degree 2(n-1)
        speed_sq = bernstein_product(hodograph, hodograph)
        self._speed_sq_antiderivative = bernstein_antiderivative(speed_sq)

    def _local(self, ts: np.ndarray) -> np.ndarray:
        return (ts - self.domain.lo) / self.domain.length

    def _positions(self, ts: np.ndarray) -> np.ndarray:
        return de_casteljau(self.control_points, self._local(ts))

    def _velocities(self, ts: np.ndarray) -> np.ndarray:
        return de_casteljau(self._hodograph, self._local(ts)) / self.domain.length

    def _antiderivative(self, t: float) -> float:
        # dt = h du and psi'(t) = dpsi/du / h, so F(t) = G(u) / h
        u = self._local(np.array([t]))
        return float(de_casteljau(self._speed_sq_antiderivative, u)[0]) / self.domain.length

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "domain": self.domain.to_list(),
            "basis": self.basis,
            "control_points": self.control_points.tolist(),
        }


# ============================================================================
# Power polynomial basis
# ============================================================================

class PowerCurve(CurveSpec):
    """Polynomial curve with per-dimension ascending coefficients in t."""

    basis = "power"

    def __init__(self, coefficients: Sequence[Sequence[float]], domain: Interval):
        coeffs = [np.atleast_1d(np.array(c, dtype=float)) for c in coefficients]
        if not coeffs or any(c.size == 0 for c in coeffs):
            raise ValueError("coefficients must list at least one term per dimension")
        super().__init__(len(coeffs), domain)
        self.coefficients = tuple(coeffs)
        self._derivatives = tuple(npoly.polyder(c) for c in coeffs)
        if all(np.all(d == 0) for d in self._derivatives):
            raise ConstantCurveError("power polynomial curve has zero derivative")
        speed_sq = np.zeros(1)
        for d in self._derivatives:
            speed_sq = npoly.polyadd(speed_sq, npoly.polymul(d, d))
        self._speed_sq_antiderivative = npoly.polyint(speed_sq)

    def _positions(self, ts: np.ndarray) -> np.ndarray:
        return np.stack([npoly.polyval(ts, c) for c in self.coefficients], axis=-1)

    def _velocities(self, ts: np.ndarray) -> np.ndarray:
        return np.stack(
            [npoly.polyval(ts, d) * np.ones_like(ts) for d in self._derivatives], axis=-1
        )

    def _antiderivative(self, t: float) -> float:
        return float(npoly.polyval(t, self._speed_sq_antiderivative))

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "domain": self.domain.to_list(),
            "basis": self.basis,
            "coefficients": [c.tolist() for c in self.coefficients],
        }


# ============================================================================
# Trigonometric basis
# ============================================================================

@dataclass(frozen=True)
class TrigTerm:
    """One term a*cos(w t + phi) + b*sin(w t + phi) of output dimension `dim`."""
    dim: int
    amplitude_cos: float = 0.0
    amplitude_sin: float = 0.0
    frequency: float = 1.0
    phase: float = 0.0

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "amplitude_cos": self.amplitude_cos,
            "amplitude_sin": self.amplitude_sin,
            "frequency": self.frequency,
            "phase": self.phase,
        }


def _integrated_cos(lam: np.ndarray, t: float) -> np.ndarray:
    """Antiderivative of cos(lam t): sin(lam t)/lam, or t when lam == 0."""
    zero = np.abs(lam) < Tolerances.ZERO_FREQUENCY
    safe = np.where(zero, 1.0, lam)
    return np.where(zero, t, np.sin(safe * t) / safe)


def _integrated_sin(lam: np.ndarray, t: float) -> np.ndarray:
    """Antiderivative of sin(lam t): -cos(lam t)/lam, or 0 when lam == 0."""
    zero = np.abs(lam) < Tolerances.ZERO_FREQUENCY
    safe = np.where(zero, 1.0, lam)
    return np.where(zero, 0.0, -np.cos(safe * t) / safe)


class TrigCurve(CurveSpec):
    """
    Sum of sinusoids plus an affine part per dimension:

        psi_d(t) = offset_d + slope_d * t + sum_k a_k cos(w_k t + phi_k) + b_k sin(w_k t + phi_k)

    The speed squared is a trigonometric polynomial; product-to-sum identities
    give its antiderivative in closed form.
    """

    basis = "trig"

    def __init__(self, dimension: int, terms: Sequence[TrigTerm], domain: Interval,
                 affine: Optional[Sequence[Sequence[float]]] = None):
        super().__init__(dimension, domain)
        terms = tuple(t if isinstance(t, TrigTerm) else TrigTerm(**t) for t in terms)
        for term in terms:
            if not 0 <= term.dim < self.dimension:
                raise DimensionMismatchError(
                    f"trig term targets dimension {term.dim} of a {self.dimension}-D curve"
                )
        if affine is None:
            affine = np.zeros((self.dimension, 2))
        affine = np.array(affine, dtype=float).reshape(self.dimension, 2)
        affine.setflags(write=False)
        self.terms = terms
        self.affine = affine

        self._dims = np.array([t.dim for t in terms], dtype=int)
        self._a = np.array([t.amplitude_cos for t in terms], dtype=float)
        self._b = np.array([t.amplitude_sin for t in terms], dtype=float)
        self._w = np.array([t.frequency for t in terms], dtype=float)
        self._phi = np.array([t.phase for t in terms], dtype=float)
        self._scatter = np.zeros((len(terms), self.dimension))
        self._scatter[np.arange(len(terms)), self._dims] = 1.0

        # psi'_d(t) = slope_d + sum p_k cos(w_k t) + q_k sin(w_k t)
        self._p = self._w * (self._b * np.cos(self._phi) - self._a * np.sin(self._phi))
        self._q = -self._w * (self._a * np.cos(self._phi) + self._b * np.sin(self._phi))
        if np.all(self.affine[:, 1] == 0) and np.all(self._p == 0) and np.all(self._q == 0):
            raise ConstantCurveError("trigonometric curve has zero derivative")
        self._build_antiderivative()

    def _build_antiderivative(self) -> None:
        cos_freqs, cos_coeffs, sin_freqs, sin_coeffs = [], [], [], []
        for d in range(self.dimension):
            mask = self._dims == d
            w = np.concatenate([[0.0], self._w[mask]])
            p = np.concatenate([[self.affine[d, 1]], self._p[mask]])
            q = np.concatenate([[0.0], self._q[mask]])
            diff = np.subtract.outer(w, w).ravel()
            total = np.add.outer(w, w).ravel()
            pp, qq = np.outer(p, p).ravel(), np.outer(q, q).ravel()
            pq, qp = np.outer(p, q).ravel(), np.outer(q, p).ravel()
            cos_freqs += [diff, total]
            cos_coeffs += [0.5 * (pp + qq), 0.5 * (pp - qq)]
            sin_freqs += [total, diff]
            sin_coeffs += [0.5 * (pq + qp), 0.5 * (qp - pq)]
        self._cos_freqs = np.concatenate(cos_freqs)
        self._cos_coeffs = np.concatenate(cos_coeffs)
        self._sin_freqs = np.concatenate(sin_freqs)
        self._sin_coeffs = np.concatenate(sin_coeffs)

    def _positions(self, ts: np.ndarray) -> np.ndarray:
        angles = np.outer(ts, self._w) + self._phi
        waves = self._a * np.cos(angles) + self._b * np.sin(angles)
        return self.affine[:, 0] + np.outer(ts, self.affine[:, 1]) + waves @ self._scatter

    def _velocities(self, ts: np.ndarray) -> np.ndarray:
        angles = np.outer(ts, self._w) + self._phi
        waves = self._w * (self._b * np.cos(angles) - self._a * np.sin(angles))
        return self.affine[:, 1] + waves @ self._scatter

    def _antiderivative(self, t: float) -> float:
        return float(
            self._cos_coeffs @ _integrated_cos(self._cos_freqs, t)
            + self._sin_coeffs @ _integrated_sin(self._sin_freqs, t)
        )

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "domain": self.domain.to_list(),
            "basis": self.basis,
            "terms": [t.to_dict() for t in self.terms],
            "affine": self.affine.tolist(),
        }


# ============================================================================
# Custom curves
# ============================================================================

class CustomCurve(CurveSpec):
    """
    User-supplied position and derivative maps.

    Absolute continuity is declared, not checked. The derivative is
    mandatory: the hull bounds consume psi' directly and a finite-difference
    stand-in would silently break their certificates.
    """

    basis = "custom"

    def __init__(
        self,
        position: Callable[[float], Sequence[float]],
        derivative: Callable[[float], Sequence[float]],
        dimension: int,
        domain: Interval,
        antiderivative: Optional[Callable[[float], float]] = None,
        name: str = "custom",
    ):
        super().__init__(dimension, domain)
        self.position_map = position
        self.derivative_map = derivative
        self.antiderivative_map = antiderivative
        self.name = name

        # Chebyshev sample of psi'; incomplete for adversarial curves
        k = np.arange(Tolerances.CUSTOM_SAMPLES)
        nodes = self.domain.midpoint + 0.5 * self.domain.length * np.cos(
            np.pi * (2 * k + 1) / (2 * Tolerances.CUSTOM_SAMPLES)
        )
        speeds = np.linalg.norm(self._velocities(nodes), axis=1)
        if np.all(speeds < Tolerances.CUSTOM_ZERO_NORM):
            raise ConstantCurveError(f"custom curve '{name}' has zero derivative at all samples")

    def _call(self, fn: Callable, ts: np.ndarray) -> np.ndarray:
        out = np.array([np.atleast_1d(np.asarray(fn(float(t)), dtype=float)) for t in ts])
        if out.ndim != 2 or out.shape[1] != self.dimension:
            raise DimensionMismatchError(
                f"custom curve '{self.name}' returned shape {out.shape[1:]} "
                f"for a {self.dimension}-D curve"
            )
        return out

    def _positions(self, ts: np.ndarray) -> np.ndarray:
        return self._call(self.position_map, ts)

    def _velocities(self, ts: np.ndarray) -> np.ndarray:
        return self._call(self.derivative_map, ts)

    @property
    def has_antiderivative(self) -> bool:
        return self.antiderivative_map is not None

    def _antiderivative(self, t: float) -> float:
        if self.antiderivative_map is None:
            return super()._antiderivative(t)
        return float(self.antiderivative_map(float(t)))

    def __repr__(self) -> str:
        return f"CustomCurve(name={self.name!r}, dimension={self.dimension}, domain={self.domain.to_list()})"


# ============================================================================
# Segments
# ============================================================================

@dataclass(frozen=True)
class CurveSegment:
    """A curve restricted to a sub-interval of its domain."""
    curve: CurveSpec
    interval: Interval

    def __post_init__(self):
        object.__setattr__(self, "interval", self.curve._check_interval(self.interval))

    @property
    def start(self) -> np.ndarray:
        return self.curve.evaluate(self.interval.lo)

    @property
    def end(self) -> np.ndarray:
        return self.curve.evaluate(self.interval.hi)

    @property
    def midpoint_parameter(self) -> float:
        return self.interval.midpoint

    def upper_bound(self, quadrature_cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
        return self.curve.arc_length_upper_bound(self.interval, quadrature_cfg)


# ============================================================================
# Convenience functions
# ============================================================================

def evaluate(curve: CurveSpec, t: float) -> np.ndarray:
    """psi(t)."""
    return curve.evaluate(t)


def derivative(curve: CurveSpec, t: float) -> np.ndarray:
    """psi'(t)."""
    return curve.derivative(t)


def arc_length(curve: CurveSpec, Q: Interval,
               quadrature_cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    return curve.arc_length(Q, quadrature_cfg)


def speed_squared_antiderivative(curve: CurveSpec, t: float) -> float:
    return curve.speed_squared_antiderivative(t)


def arc_length_upper_bound(curve: CurveSpec, Q: Interval,
                           quadrature_cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    return curve.arc_length_upper_bound(Q, quadrature_cfg)
