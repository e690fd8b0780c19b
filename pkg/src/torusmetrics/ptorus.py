"""The once-punctured-torus model in trace coordinates.

A discrete faithful representation of the punctured-torus group is pinned,
up to conjugacy, by the traces (x, y, z) of two generators and their
product.  Cusped structures satisfy x^2 + y^2 + z^2 = x*y*z, and the trace
of the simple closed curve of any slope follows from the vertex recursion
t_mediant = t_a * t_b - t_opposite over the Farey triangulation: slope 1/0
carries x, 0/1 carries y, 1/1 carries z.  Hyperbolic lengths are
2*arccosh(trace/2).

Traces grow doubly exponentially along balanced Farey paths and overflow
doubles near depth 12, so the recursion is carried in log space together
with the gradient of log(trace); lengths and their differentials stay
accurate at any depth.  Public jets still expose the raw trace and
gradient, which may round to infinity for very complicated curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import InvalidPointError, OutOfChartError
from .farey import FareyNode, Slope, slope_parents
from .supratio import SupQuery, SupRatioResult, maximize

__all__ = [
    "MarkovPoint",
    "TraceJet",
    "PTTangent",
    "PTCovector",
    "WeightedLamination",
    "from_parameters",
    "trace_of_slope",
    "TraceCache",
    "length",
    "d_length",
    "tangent_from_chart",
    "thurston_distance",
    "thurston_norm",
    "dehn_twist",
    "normalized_length_functional",
    "markov_residual",
]

_LOG2 = math.log(2.0)
_MIN_TRACE = 2.0 + 1e-12
_TWIST_OVERFLOW = 1e150


def markov_residual(x: float, y: float, z: float) -> float:
    """Relative defect of the cusped trace relation x^2+y^2+z^2 = xyz."""
    return abs(x * x + y * y + z * z - x * y * z) / (1.0 + abs(x * y * z))


@dataclass(frozen=True)
class MarkovPoint:
    """Trace triple (x, y, z) of a cusped punctured-torus structure."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name, t in (("x", self.x), ("y", self.y), ("z", self.z)):
            if not (math.isfinite(t) and t > _MIN_TRACE):
                raise InvalidPointError(
                    f"trace {name} = {t} is not above 2; the structure degenerates"
                )
        res = self.residual
        if res > 1e-9:
            raise InvalidPointError(
                f"triple ({self.x}, {self.y}, {self.z}) misses the trace relation "
                f"(relative residual {res:.3e})"
            )

    @property
    def residual(self) -> float:
        return markov_residual(self.x, self.y, self.z)

    @classmethod
    def parse(cls, text: str) -> "MarkovPoint":
        body = text.strip()
        try:
            if body.startswith("chart:"):
                parts = [float(p) for p in body[len("chart:"):].split(",")]
                if len(parts) != 2:
                    raise InvalidPointError(f"chart point must be 'chart:x,y', got {text!r}")
                return from_parameters(*parts)
            parts = [float(p) for p in body.split(",")]
        except ValueError:
            raise InvalidPointError(f"point must be 'x,y,z' or 'chart:x,y', got {text!r}")
        if len(parts) != 3:
            raise InvalidPointError(f"point must be 'x,y,z' or 'chart:x,y', got {text!r}")
        return cls(*parts)

    def to_json_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "z": self.z}

    def __str__(self):
        return f"{self.x!r},{self.y!r},{self.z!r}"


def from_parameters(x: float, y: float) -> MarkovPoint:
    """The point with generator traces (x, y) and the larger product trace.

    z is the larger root of z^2 - xyz + (x^2 + y^2); the smaller root gives
    the mirror-image structure.
    """
    if not (x > 2.0 and y > 2.0):
        raise OutOfChartError(f"chart needs x > 2 and y > 2, got ({x}, {y})")
    disc = x * x * y * y - 4.0 * (x * x + y * y)
    if disc < 0.0:
        raise OutOfChartError(
            f"no real structure for chart parameters ({x}, {y}): discriminant {disc:.6g}"
        )
    z = 0.5 * (x * y + math.sqrt(disc))
    return MarkovPoint(x, y, z)


@dataclass(frozen=True)
class WeightedLamination:
    """weight * (simple closed curve of the given slope)."""

    weight: float
    slope: Slope

    def __post_init__(self):
        if not (self.weight > 0 and math.isfinite(self.weight)):
            raise ValueError(f"lamination weight must be positive, got {self.weight}")


@dataclass(frozen=True)
class TraceJet:
    """Trace of a slope's geodesic with its gradient in (x, y, z).

    ``t`` and ``grad`` may round to infinity for very complicated slopes;
    ``log_t`` and ``dlog`` (the gradient of log t) are always finite and
    are what the length computations consume.
    """

    t: float
    grad: tuple[float, float, float]
    log_t: float
    dlog: tuple[float, float, float]


@dataclass(frozen=True)
class PTTangent:
    """Tangent vector (wx, wy, wz) at a Markov point, tangent to the variety."""

    wx: float
    wy: float
    wz: float
    at: MarkovPoint

    def __post_init__(self):
        p = self.at
        f = (2 * p.x - p.y * p.z, 2 * p.y - p.x * p.z, 2 * p.z - p.x * p.y)
        pairing = f[0] * self.wx + f[1] * self.wy + f[2] * self.wz
        scale = math.sqrt(f[0] ** 2 + f[1] ** 2 + f[2] ** 2) * math.sqrt(
            self.wx ** 2 + self.wy ** 2 + self.wz ** 2
        )
        if abs(pairing) > 1e-9 * (1.0 + scale):
            raise ValueError(
                f"({self.wx}, {self.wy}, {self.wz}) is not tangent to the trace variety "
                f"at {self.at} (defect {pairing:.3e})"
            )

    def scaled(self, factor: float) -> "PTTangent":
        return PTTangent(factor * self.wx, factor * self.wy, factor * self.wz, self.at)

    def __neg__(self) -> "PTTangent":
        return self.scaled(-1.0)

    def __add__(self, other: "PTTangent") -> "PTTangent":
        if other.at != self.at:
            raise ValueError("cannot add tangent vectors at different points")
        return PTTangent(self.wx + other.wx, self.wy + other.wy, self.wz + other.wz, self.at)


@dataclass(frozen=True)
class PTCovector:
    """Linear functional on PTTangent vectors."""

    gx: float
    gy: float
    gz: float

    def pair(self, v: PTTangent) -> float:
        return self.gx * v.wx + self.gy * v.wy + self.gz * v.wz

    def scaled(self, factor: float) -> "PTCovector":
        return PTCovector(factor * self.gx, factor * self.gy, factor * self.gz)


def tangent_from_chart(point: MarkovPoint, vx: float, vy: float) -> PTTangent:
    """Lift a chart velocity (dx, dy) through the implicit trace relation."""
    fx = 2 * point.x - point.y * point.z
    fy = 2 * point.y - point.x * point.z
    fz = 2 * point.z - point.x * point.y
    if abs(fz) < 1e-12 * (1.0 + abs(point.x * point.y)):
        raise OutOfChartError(
            f"chart is singular at {point} (double root); cannot lift tangents"
        )
    vz = -(fx * vx + fy * vy) / fz
    return PTTangent(vx, vy, vz, point)


# -- trace recursion ----------------------------------------------------------

class TraceCache:
    """Memoized log-trace jets of one Markov point, keyed by slope.

    Each slope costs O(1) amortized when neighborhoods of the Farey tree
    are swept, because its Farey parents land in the cache first.
    """

    __slots__ = ("point", "_log", "_raw", "_dlog")

    def __init__(self, point: MarkovPoint):
        self.point = point
        x, y, z = point.x, point.y, point.z
        self._log = {
            (1, 0): math.log(x),
            (0, 1): math.log(y),
            (1, 1): math.log(z),
        }
        # raw traces in parallel: exact float recursion while it fits,
        # infinity beyond that (log values stay finite regardless)
        self._raw = {(1, 0): x, (0, 1): y, (1, 1): z}
        self._dlog = {
            (1, 0): (1.0 / x, 0.0, 0.0),
            (0, 1): (0.0, 1.0 / y, 0.0),
            (1, 1): (0.0, 0.0, 1.0 / z),
        }

    def _resolve(self, key: tuple[int, int]) -> None:
        log, dlog = self._log, self._dlog
        stack = [key]
        while stack:
            k = stack[-1]
            if k in log:
                stack.pop()
                continue
            a, b, c = slope_parents(Slope(*k))
            ka, kb, kc = (a.p, a.q), (b.p, b.q), (c.p, c.q)
            missing = [kk for kk in (ka, kb, kc) if kk not in log]
            if missing:
                stack.extend(missing)
                continue
            stack.pop()
            la, lb, lc = log[ka], log[kb], log[kc]
            ratio = math.exp(lc - la - lb)  # t_c / (t_a t_b), in (0, 1)
            if ratio >= 1.0:
                raise InvalidPointError(
                    f"trace recursion degenerated at slope {k[0]}/{k[1]} of {self.point}"
                )
            lk = la + lb + math.log1p(-ratio)
            if lk <= _LOG2:
                raise InvalidPointError(
                    f"slope {k[0]}/{k[1]} has trace <= 2 at {self.point}; not Fuchsian"
                )
            ua, ub, uc = dlog[ka], dlog[kb], dlog[kc]
            r = math.exp(lc - lk)  # t_c / t_k
            s = 1.0 + r            # t_a t_b / t_k
            log[k] = lk
            raw = self._raw
            product = raw[ka] * raw[kb]
            raw[k] = math.inf if math.isinf(product) else product - raw[kc]
            dlog[k] = (
                s * (ua[0] + ub[0]) - r * uc[0],
                s * (ua[1] + ub[1]) - r * uc[1],
                s * (ua[2] + ub[2]) - r * uc[2],
            )

    def log_trace(self, slope: Slope) -> float:
        key = (slope.p, slope.q)
        if key not in self._log:
            self._resolve(key)
        return self._log[key]

    def log_grad(self, slope: Slope) -> tuple[float, float, float]:
        key = (slope.p, slope.q)
        if key not in self._dlog:
            self._resolve(key)
        return self._dlog[key]

    def jet(self, slope: Slope) -> TraceJet:
        lt = self.log_trace(slope)
        key = (slope.p, slope.q)
        u = self._dlog[key]
        t = self._raw[key]
        if math.isfinite(t):
            grad = (u[0] * t, u[1] * t, u[2] * t)
        else:
            grad = tuple(0.0 if ui == 0.0 else math.copysign(math.inf, ui) for ui in u)
        return TraceJet(t, grad, lt, u)

    def length(self, slope: Slope) -> float:
        """Geodesic length of the unit-weight curve, stable at any depth."""
        return _ell_from_log(self.log_trace(slope))

    def length_dlog(self, slope: Slope) -> tuple[float, float, float, float]:
        """(length, g1, g2, g3) with g the gradient of the unit-weight length."""
        lt = self.log_trace(slope)
        u = self._dlog[(slope.p, slope.q)]
        ell = _ell_from_log(lt)
        f = _dlen_factor(lt)
        return ell, f * u[0], f * u[1], f * u[2]


def _ell_from_log(lt: float) -> float:
    """2*arccosh(exp(lt)/2) without forming huge traces."""
    if lt < 30.0:
        return 2.0 * math.acosh(0.5 * math.exp(lt))
    return 2.0 * (lt - _LOG2 + math.log(1.0 + math.sqrt(1.0 - 4.0 * math.exp(-2.0 * lt))))


def _dlen_factor(lt: float) -> float:
    """d(length)/d(trace) * trace = 2 / sqrt(1 - 4/t^2)."""
    return 2.0 / math.sqrt(1.0 - 4.0 * math.exp(-2.0 * lt))


@lru_cache(maxsize=16)
def _cache_for(point: MarkovPoint) -> TraceCache:
    return TraceCache(point)


def trace_of_slope(point: MarkovPoint, slope: Slope) -> TraceJet:
    """Trace jet of the geodesic in the slope's isotopy class."""
    return _cache_for(point).jet(slope)


def length(point: MarkovPoint, lam: WeightedLamination) -> float:
    """Hyperbolic length weight * 2*arccosh(trace/2)."""
    return lam.weight * _cache_for(point).length(lam.slope)


def d_length(point: MarkovPoint, lam: WeightedLamination) -> PTCovector:
    """Exact differential of the length function in ambient (x, y, z)."""
    _, g1, g2, g3 = _cache_for(point).length_dlog(lam.slope)
    return PTCovector(lam.weight * g1, lam.weight * g2, lam.weight * g3)


# -- Thurston distance and norm ----------------------------------------------

def _collar_width(lt: float) -> float:
    """Embedded-collar width 2*arcsinh(1/sinh(length/2)) from log(trace)."""
    if lt < 300.0:
        t = math.exp(lt)
        return 2.0 * math.asinh(2.0 / math.sqrt(t * t - 4.0))
    return 4.0 * math.exp(-lt)


def _subtree_ratio_bound(cx: TraceCache, cy: TraceCache):
    """Upper bound for sup of ell_Y/ell_X over the interior of a Farey cell.

    Every interior slope is mu*a + nu*b with integer mu, nu >= 1 in the
    endpoint curves a, b.  The numerator uses length subadditivity over
    mediants (cosh((la+lb)/2) >= (ta/2)(tb/2) >= tm/2), so
    ell_Y(s) <= mu*ell_Y(a) + nu*ell_Y(b) exactly.  The denominator takes
    the better of two lower bounds: the vertex recursion gives
    t_s >= (1-g)^(mu+nu-1) * t_a^mu * t_b^nu with g = t_opp/(t_a t_b),
    which only shrinks down the subtree; and the collar crossing bound
    ell_X(s) >= i(s, gamma)*width(gamma) for gamma in {a, b}.  Both yield
    affine-fractional programs over the (mu, nu) cone whose suprema sit at
    the corner (1, 1) or on the two rays, so the bound is exact for its
    inputs and tightens as cells shrink.
    """

    def bound(node: FareyNode) -> float:
        a, b = node.endpoint_slopes()
        na = cy.length(a)
        nb = cy.length(b)
        lta = cx.log_trace(a)
        ltb = cx.log_trace(b)
        g = math.exp(cx.log_trace(node.opposite_slope()) - lta - ltb)
        decay = math.log1p(-g)
        la = 2.0 * (lta + decay)
        lb = 2.0 * (ltb + decay)
        c0 = 2.0 * (_LOG2 + decay)
        product_route = math.inf
        corner = la + lb - c0  # equals 2*log(t_mediant/2) > 0
        if la > 0.0 and lb > 0.0 and corner > 0.0:
            product_route = max((na + nb) / corner, na / la, nb / lb)
        wa = _collar_width(lta)
        wb = _collar_width(ltb)
        if wa > 0.0 and wb > 0.0:  # widths underflow for very long curves
            collar_route = na / wb + nb / wa
        else:
            collar_route = math.inf
        return min(product_route, collar_route)

    return bound


def thurston_distance(
    src: MarkovPoint,
    dst: MarkovPoint,
    tol: float = 1e-6,
    max_depth: int = 12,
    max_evals: int = 200_000,
    certified_bound: bool = False,
) -> SupRatioResult:
    """Sup of length ratios ell_dst/ell_src over slopes; distance = log(value).

    By default the engine sweeps the tree exhaustively to ``max_depth`` and
    reports certified = False with the empirical stabilization depth.  With
    ``certified_bound`` the collar/submultiplicativity subtree bound is
    used for best-first pruning; it certifies at coarse tolerances
    (roughly >= 1e-3) at practical cost.
    """
    cx = _cache_for(src)
    cy = _cache_for(dst)

    def objective(s: Slope) -> float:
        return cy.length(s) / cx.length(s)

    bound = _subtree_ratio_bound(cx, cy) if certified_bound else None
    return maximize(
        SupQuery(objective, bound, tolerance=tol, max_depth=max_depth, max_evals=max_evals)
    )


def thurston_norm(
    point: MarkovPoint,
    v: PTTangent,
    tol: float = 1e-6,
    max_depth: int = 12,
    max_evals: int = 200_000,
) -> SupRatioResult:
    """Sup of d(log length)(V) over slopes: the asymmetric Finsler norm.

    Weights cancel in d(length)(V)/length, so the sup over weighted
    laminations reduces to unweighted slopes.  No certified subtree bound
    is available for this sign-indefinite objective; the exhaustive sweep
    reports its stabilization depth instead.
    """
    if v.at != point:
        raise ValueError("tangent vector belongs to a different point")
    cache = _cache_for(point)

    def objective(s: Slope) -> float:
        ell, g1, g2, g3 = cache.length_dlog(s)
        return (g1 * v.wx + g2 * v.wy + g3 * v.wz) / ell

    return maximize(
        SupQuery(objective, None, tolerance=tol, max_depth=max_depth, max_evals=max_evals)
    )


# -- mapping classes and boundary experiments ---------------------------------

_TWIST_FORWARD = {
    (1, 0): lambda x, y, z: (x, z, x * z - y),
    (0, 1): lambda x, y, z: (z, y, y * z - x),
    (1, 1): lambda x, y, z: (y, y * z - x, z),
}

_TWIST_BACKWARD = {
    (1, 0): lambda x, y, z: (x, x * y - z, y),
    (0, 1): lambda x, y, z: (x * y - z, y, x),
    (1, 1): lambda x, y, z: (x * z - y, x, z),
}


def dehn_twist(point: MarkovPoint, about: Slope, k: int) -> MarkovPoint:
    """Apply k Dehn twists about one of the base slopes 1/0, 0/1, 1/1.

    The trace maps are polynomial and preserve the trace relation exactly;
    the trace of the twisting curve never changes.  Entries grow
    exponentially in |k| and the iteration refuses to overflow silently.
    """
    key = (about.p, about.q)
    if key not in _TWIST_FORWARD:
        raise ValueError(f"twists are implemented about 1/0, 0/1, 1/1, not {about}")
    step = _TWIST_FORWARD[key] if k >= 0 else _TWIST_BACKWARD[key]
    x, y, z = point.x, point.y, point.z
    for i in range(abs(k)):
        x, y, z = step(x, y, z)
        if max(abs(x), abs(y), abs(z)) > _TWIST_OVERFLOW:
            raise OverflowError(
                f"trace entries exceed {_TWIST_OVERFLOW:.0e} after {i + 1} twists"
            )
    return MarkovPoint(x, y, z)


def normalized_length_functional(
    base: MarkovPoint,
    point: MarkovPoint,
    lam: WeightedLamination,
    tol: float = 1e-6,
    max_depth: int = 12,
) -> float:
    """Length of lam at ``point`` divided by the best Lipschitz stretch from base.

    The normalizer is exp of the directed distance base -> point, i.e. the
    sup ratio itself.
    """
    stretch = thurston_distance(base, point, tol=tol, max_depth=max_depth).value
    return length(point, lam) / stretch
