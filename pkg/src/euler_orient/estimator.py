"""Closed-form estimates and bounds for the number of Eulerian orientations.

All values live in natural-log space (:class:`LogNumber`); they overflow a
double long before the graphs get interesting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import HypothesisError
from .graph import Graph, degree_sequence, is_all_even, is_connected
from .spectral import spectral_summary, spanning_tree_count

__all__ = [
    "LogNumber",
    "EstimateReport",
    "theta_estimate",
    "mckay_kn",
    "isaev_knn",
    "regular_bounds",
    "build_report",
]

LN2 = math.log(2.0)
LNPI = math.log(math.pi)

# resolution used when comparing a LogNumber with an exact integer
LOG_RESOLUTION = 1e-12


@dataclass(frozen=True, order=False)
class LogNumber:
    """A non-negative number stored as ``sign`` (0 or 1) and ``ln_mag``."""

    sign: int
    ln_mag: float = 0.0

    @classmethod
    def from_log(cls, ln_mag: float) -> LogNumber:
        if ln_mag == -math.inf:
            return ZERO
        return cls(1, float(ln_mag))

    @classmethod
    def from_value(cls, x) -> LogNumber:
        """Exact ints of any size are accepted; ``math.log`` handles big ints."""
        if x < 0:
            raise ValueError("LogNumber holds non-negative values only")
        if x == 0:
            return ZERO
        return cls(1, math.log(x))

    @property
    def ln(self) -> float:
        return self.ln_mag if self.sign else -math.inf

    def __mul__(self, other: LogNumber) -> LogNumber:
        if not (self.sign and other.sign):
            return ZERO
        return LogNumber(1, self.ln_mag + other.ln_mag)

    def __truediv__(self, other: LogNumber) -> LogNumber:
        if not other.sign:
            raise ZeroDivisionError("division by a zero LogNumber")
        if not self.sign:
            return ZERO
        return LogNumber(1, self.ln_mag - other.ln_mag)

    def __float__(self) -> float:
        return math.exp(self.ln_mag) if self.sign else 0.0

    def compare(self, exact: int, slack: float = LOG_RESOLUTION) -> int:
        """-1, 0 or 1 as ``self`` is below, within ``slack`` (in ln units) of, or above ``exact``."""
        other = LogNumber.from_value(exact)
        if not self.sign or not other.sign:
            return (self.sign > other.sign) - (self.sign < other.sign)
        diff = self.ln_mag - other.ln_mag
        if abs(diff) <= slack:
            return 0
        return 1 if diff > 0 else -1

    def format(self, digits: int = 6) -> str:
        if not self.sign:
            return "0"
        log10 = self.ln_mag / math.log(10)
        if abs(log10) < 15:
            return f"≈{math.exp(self.ln_mag):.{digits}g}"
        exp10 = math.floor(log10)
        mantissa = f"{10 ** (log10 - exp10):.{digits}g}"
        if float(mantissa) >= 10:
            exp10 += 1
            mantissa = f"{float(mantissa) / 10:.{digits}g}"
        return f"≈{mantissa}e{exp10}"


ZERO = LogNumber(0, 0.0)


def _ln_factorial(k: int) -> float:
    return math.lgamma(k + 1)


def _ln_double_factorial_odd(d: int) -> float:
    """``ln (2d-1)!!`` via ``(2d)! / (2^d d!)``."""
    return math.lgamma(2 * d + 1) - d * LN2 - math.lgamma(d + 1)


def theta_estimate(g: Graph, t: int | None = None) -> LogNumber:
    """``2^(m + n/2) * pi^(-n/2) / sqrt(t(G))`` for connected even-degree graphs."""
    if not is_all_even(g):
        raise HypothesisError("graph has a vertex of odd degree")
    if not is_connected(g):
        raise HypothesisError("graph is disconnected (no spanning trees)")
    if t is None:
        t = spanning_tree_count(g)
    n, m = g.n, g.m
    return LogNumber.from_log((m + n / 2) * LN2 - n / 2 * LNPI - 0.5 * math.log(t))


def mckay_kn(n: int) -> LogNumber:
    """Regular-tournament asymptotic ``(2^(n+1)/(pi n))^((n-1)/2) n^(1/2) e^(-1/2)``.

    Only odd ``n`` is accepted: ``K_n`` has even degrees exactly when ``n`` is odd.
    """
    if n < 3 or n % 2 == 0:
        raise HypothesisError(f"K_n has Eulerian orientations only for odd n >= 3, got {n}")
    ln = (n - 1) / 2 * ((n + 1) * LN2 - LNPI - math.log(n)) + 0.5 * math.log(n) - 0.5
    return LogNumber.from_log(ln)


def isaev_knn(n: int) -> LogNumber:
    """``K_{n,n}`` asymptotic ``e^(-1) 2^(n^2+n-1/2) / (pi^(n-1/2) n^(n-1))`` for even ``n``."""
    if n < 2 or n % 2:
        raise HypothesisError(f"K_(n,n) needs even n >= 2 for even degrees, got {n}")
    ln = -1 + (n * n + n - 0.5) * LN2 - (n - 0.5) * LNPI - (n - 1) * math.log(n)
    return LogNumber.from_log(ln)


def regular_bounds(n: int, d: int) -> tuple[LogNumber, LogNumber]:
    """Lower and upper bounds on the count for a ``2d``-regular graph on ``n`` vertices."""
    if d < 1 or n < 2:
        raise ValueError("need d >= 1 and n >= 2")
    ln_ratio = _ln_double_factorial_odd(d) - _ln_factorial(d)
    lower = d * LN2 + (n - 1) * ln_ratio
    upper = n / 2 * (_ln_factorial(2 * d) - 2 * _ln_factorial(d))
    return LogNumber.from_log(lower), LogNumber.from_log(upper)


@dataclass
class EstimateReport:
    graph_id: str
    n: int
    m: int
    lambda2: float
    gamma: float
    ln_t: float | None
    estimate: LogNumber
    method: str
    exact: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def ratio(self) -> float | None:
        """``exact / estimate``, present only when the exact count is known."""
        if self.exact is None:
            return None
        if self.exact == 0:
            return 0.0
        return math.exp(LogNumber.from_value(self.exact).ln_mag - self.estimate.ln_mag)

    def to_json(self) -> dict:
        return {
            "graph_id": self.graph_id,
            "n": self.n,
            "m": self.m,
            "lambda2": self.lambda2,
            "gamma": self.gamma,
            "ln_t": self.ln_t,
            "ln_estimate": self.estimate.ln if self.estimate.sign else None,
            "estimate": self.estimate.format(),
            "method": self.method,
            "exact": self.exact,
            "ratio": self.ratio,
            "notes": list(self.notes),
        }


def _complete_order(g: Graph) -> int | None:
    return g.n if g.m == g.n * (g.n - 1) // 2 else None


def _balanced_bipartite_side(g: Graph) -> int | None:
    """``k`` when ``g`` is ``K_{k,k}`` under some labelling, else None."""
    if g.n % 2 or g.m != (g.n // 2) ** 2:
        return None
    k = g.n // 2
    side = [-1] * g.n
    for start in range(g.n):
        if side[start] >= 0:
            continue
        side[start] = 0
        stack = [start]
        while stack:
            u = stack.pop()
            for v in g.neighbors(u):
                if side[v] < 0:
                    side[v] = 1 - side[u]
                    stack.append(v)
                elif side[v] == side[u]:
                    return None
    return k if side.count(0) == k else None


def build_report(g: Graph, method: str, graph_id: str = "",
                 exact: int | None = None) -> list[EstimateReport]:
    """Reports for one estimation method; ``bounds`` yields a lower and an upper report."""
    summary = spectral_summary(g)
    t = spanning_tree_count(g)
    ln_t = math.log(t) if t > 0 else None
    base = dict(graph_id=graph_id, n=g.n, m=g.m, lambda2=summary.lambda2,
                gamma=summary.gamma, ln_t=ln_t, exact=exact)
    if method == "theta":
        return [EstimateReport(estimate=theta_estimate(g, t), method="theta", **base)]
    if method == "mckay_kn":
        if _complete_order(g) is None:
            raise HypothesisError("mckay_kn applies to complete graphs only")
        note = ("the asymptotic for K_n is applied for odd n; "
                "K_n has no Eulerian orientation when n is even")
        return [EstimateReport(estimate=mckay_kn(g.n), method="mckay_kn",
                               notes=[note], **base)]
    if method == "isaev_knn":
        k = _balanced_bipartite_side(g)
        if k is None:
            raise HypothesisError("isaev_knn applies to balanced complete bipartite graphs only")
        return [EstimateReport(estimate=isaev_knn(k), method="isaev_knn", **base)]
    if method == "bounds":
        degrees = set(degree_sequence(g))
        if len(degrees) != 1 or next(iter(degrees)) % 2 or next(iter(degrees)) == 0:
            raise HypothesisError("bounds apply to 2d-regular graphs with d >= 1 only")
        d = next(iter(degrees)) // 2
        lower, upper = regular_bounds(g.n, d)
        return [
            EstimateReport(estimate=lower, method="bounds_lower", **base),
            EstimateReport(estimate=upper, method="bounds_upper", **base),
        ]
    raise ValueError(f"unknown estimation method {method!r}")
