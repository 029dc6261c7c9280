"""Monte Carlo estimates of the orientation count from its integral representations.

Two estimators:

* ``mc_S_uniform`` averages ``prod cos(theta_j - theta_k)`` over the cube
  ``[-pi/2, pi/2]^n``; the count is ``2^m`` times that average.
* ``mc_Int_gaussian`` draws ``theta`` from the Gaussian with precision
  ``Q + J`` and reweights by the quartic correction and a box indicator.

Sampling is split into fixed-size blocks. Block ``i`` draws from its own
generator seeded with ``(seed, i)`` and block statistics are reduced in
block order, so results do not depend on the number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import CapExceeded, HypothesisError
from .estimator import LogNumber
from .graph import Graph, is_all_even, is_connected
from .spectral import det_qhat_exact, qhat

__all__ = [
    "BLOCK_SIZE",
    "DEFAULT_EPSILON",
    "McResult",
    "BoxRegion",
    "mc_S_uniform",
    "mc_Int_gaussian",
    "gaussian_norm_check",
    "precision_sampler",
    "cos_product",
]

BLOCK_SIZE = 8192
DEFAULT_EPSILON = 0.1
UNIFORM_MAX_N = 12


@dataclass(frozen=True)
class BoxRegion:
    """The cube ``{theta : |theta_j| <= half_width}`` in ``n`` dimensions."""

    n: int
    half_width: float

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    def contains(self, theta: np.ndarray) -> np.ndarray:
        return np.all(np.abs(theta) <= self.half_width, axis=-1)


@dataclass
class McResult:
    estimate: LogNumber
    stderr_rel: float
    samples: int
    accepted: int
    seed: int
    method: str
    epsilon: float | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "ln_estimate": self.estimate.ln if self.estimate.sign else None,
            "estimate": self.estimate.format(),
            "stderr_rel": self.stderr_rel,
            "samples": self.samples,
            "accepted": self.accepted,
            "seed": self.seed,
            "epsilon": self.epsilon,
            **self.extra,
        }


@dataclass
class _BlockStats:
    # values are sign * exp(log_mag); sums are taken relative to exp(shift)
    shift: float
    s1: float
    s2: float
    count: int
    accepted: int


def _block_stats(sign: np.ndarray, logmag: np.ndarray, accepted: int) -> _BlockStats:
    finite = np.isfinite(logmag)
    if not finite.any():
        return _BlockStats(-math.inf, 0.0, 0.0, int(sign.shape[0]), accepted)
    shift = float(logmag[finite].max())
    scaled = np.where(finite, np.exp(np.where(finite, logmag, 0.0) - shift), 0.0)
    return _BlockStats(shift, float(np.sum(sign * scaled)), float(np.sum(scaled * scaled)),
                       int(sign.shape[0]), accepted)


def _reduce(blocks: list[_BlockStats]) -> tuple[float, int, float, int]:
    """``(ln mean, sign of mean, stderr_rel, accepted)`` from block statistics in order."""
    shift = max(b.shift for b in blocks)
    s1 = s2 = 0.0
    total = accepted = 0
    for b in blocks:
        f = math.exp(b.shift - shift) if b.shift > -math.inf else 0.0
        s1 += b.s1 * f
        s2 += b.s2 * f * f
        total += b.count
        accepted += b.accepted
    mean = s1 / total
    if mean <= 0:
        return -math.inf, 0, math.inf, accepted
    var = max(s2 / total - mean * mean, 0.0) * total / max(total - 1, 1)
    stderr_rel = math.sqrt(var / total) / mean
    return math.log(mean) + shift, 1, stderr_rel, accepted


def _run_blocks(block_fn, samples: int, seed: int, threads: int) -> list[_BlockStats]:
    if samples < 2:
        raise ValueError("need at least 2 samples")
    sizes = [BLOCK_SIZE] * (samples // BLOCK_SIZE)
    if samples % BLOCK_SIZE:
        sizes.append(samples % BLOCK_SIZE)

    def run(i: int) -> _BlockStats:
        rng = np.random.default_rng([seed, i])
        return block_fn(rng, sizes[i])

    if threads <= 1:
        return [run(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, range(len(sizes))))


def _edge_arrays(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    e = np.array(g.edges, dtype=np.intp).reshape(-1, 2)
    return e[:, 0], e[:, 1]


def cos_product(g: Graph, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``prod_{edges} cos(theta_j - theta_k)`` per row of ``theta`` as ``(sign, log|value|)``.

    A factor that is exactly zero gives ``log|value| = -inf``.
    """
    tail, head = _edge_arrays(g)
    c = np.cos(theta[..., tail] - theta[..., head])
    sign = np.prod(np.sign(c), axis=-1)
    with np.errstate(divide="ignore"):
        logmag = np.log(np.abs(c)).sum(axis=-1)
    return sign, logmag


def mc_S_uniform(g: Graph, samples: int, seed: int, threads: int = 1,
                 max_n: int = UNIFORM_MAX_N) -> McResult:
    """Count estimate ``2^m * mean(prod cos(theta_j - theta_k))`` with theta uniform on the cube.

    The cube has volume ``pi^n``, which cancels the ``pi^-n`` in front of the integral.
    """
    if not is_all_even(g):
        raise HypothesisError("graph has a vertex of odd degree")
    if g.n > max_n:
        raise CapExceeded(f"n = {g.n} exceeds the uniform sampler cap of {max_n}")

    def block(rng: np.random.Generator, size: int) -> _BlockStats:
        theta = rng.uniform(-math.pi / 2, math.pi / 2, size=(size, g.n))
        sign, logmag = cos_product(g, theta)
        return _block_stats(sign, logmag, size)

    ln_mean, sign, stderr_rel, accepted = _reduce(_run_blocks(block, samples, seed, threads))
    est = LogNumber(1, g.m * math.log(2) + ln_mean) if sign else LogNumber(0, 0.0)
    return McResult(est, stderr_rel, samples, accepted, seed, "uniform_S")


def precision_sampler(precision: np.ndarray):
    """Return ``draw(rng, size)`` sampling the centred Gaussian with the given precision matrix.

    Factor ``P = L L^T`` and solve ``L^T theta = z`` for standard normal ``z``.
    """
    try:
        chol = linalg.cholesky(np.asarray(precision, dtype=float), lower=True)
    except linalg.LinAlgError as exc:
        raise RuntimeError("precision matrix is not positive definite") from exc
    n = chol.shape[0]

    def draw(rng: np.random.Generator, size: int) -> np.ndarray:
        z = rng.standard_normal((n, size))
        return linalg.solve_triangular(chol, z, lower=True, trans="T").T

    return draw


def _check_gaussian_input(g: Graph) -> None:
    if not is_connected(g):
        raise HypothesisError("graph is disconnected; Q + J is singular")


def mc_Int_gaussian(g: Graph, samples: int, seed: int,
                    epsilon: float | None = DEFAULT_EPSILON, threads: int = 1) -> McResult:
    """Count estimate from the quartic-corrected Gaussian integral over a shrinking box.

    The integral is ``Z * E[w]`` where ``Z = (2 pi)^(n/2) / sqrt(det(Q + J))`` is
    the Gaussian mass and ``w = exp(-sum Delta^4 / 12) * 1[|theta_j| <= n^(-1/2+eps)]``.
    The count estimate is ``2^(m-1/2) pi^(-n+1/2) n`` times the integral.
    ``epsilon=None`` drops the box indicator.
    """
    if not is_all_even(g):
        raise HypothesisError("graph has a vertex of odd degree")
    _check_gaussian_input(g)
    if epsilon is not None and not 0 < epsilon < 1 / 6:
        raise ValueError("epsilon must lie in (0, 1/6)")
    n, m = g.n, g.m
    draw = precision_sampler(qhat(g))
    tail, head = _edge_arrays(g)
    box = BoxRegion(n, n ** (-0.5 + epsilon)) if epsilon is not None else None

    def block(rng: np.random.Generator, size: int) -> _BlockStats:
        theta = draw(rng, size)
        delta = theta[:, tail] - theta[:, head]
        logw = -(delta**4).sum(axis=1) / 12.0
        if box is not None:
            inside = box.contains(theta)
            logw = np.where(inside, logw, -np.inf)
            accepted = int(inside.sum())
        else:
            accepted = size
        return _block_stats(np.ones(size), logw, accepted)

    ln_mean, sign, stderr_rel, accepted = _reduce(_run_blocks(block, samples, seed, threads))
    ln_det = math.log(det_qhat_exact(g))
    ln_gauss = n / 2 * math.log(2 * math.pi) - ln_det / 2
    ln_prefactor = (m - 0.5) * math.log(2) + (0.5 - n) * math.log(math.pi) + math.log(n)
    est = LogNumber(1, ln_prefactor + ln_gauss + ln_mean) if sign else LogNumber(0, 0.0)
    return McResult(est, stderr_rel, samples, accepted, seed, "gaussian_Int", epsilon,
                    {"ln_int": ln_gauss + ln_mean if sign else None})


def gaussian_norm_check(g: Graph, a: float, samples: int, seed: int,
                        box_half_width: float | None = None, threads: int = 1) -> McResult:
    """Monte Carlo check of ``int exp(-a theta^T (Q+J) theta) = (pi/a)^(n/2) / sqrt(det(Q+J))``.

    Samples come from precision ``2a (Q + J)``, so the estimate of the integral
    divided by the closed form is the mean weight: exactly 1 without a box,
    the Gaussian mass inside the box otherwise. The returned estimate is that ratio.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    _check_gaussian_input(g)
    draw = precision_sampler(2 * a * qhat(g))
    box = BoxRegion(g.n, box_half_width) if box_half_width is not None else None

    def block(rng: np.random.Generator, size: int) -> _BlockStats:
        theta = draw(rng, size)
        if box is None:
            return _block_stats(np.ones(size), np.zeros(size), size)
        inside = box.contains(theta)
        return _block_stats(np.ones(size), np.where(inside, 0.0, -np.inf), int(inside.sum()))

    ln_mean, sign, stderr_rel, accepted = _reduce(_run_blocks(block, samples, seed, threads))
    closed = -g.n / 2 * math.log(a / math.pi) - math.log(det_qhat_exact(g)) / 2
    ratio = LogNumber(1, ln_mean) if sign else LogNumber(0, 0.0)
    return McResult(ratio, stderr_rel, samples, accepted, seed, "gaussian_norm", None,
                    {"a": a, "box_half_width": box_half_width, "ln_closed_form": closed})
