"""Numerical checks of the spectral lemmas on concrete graphs and matrices.

Each ``check_*`` returns a :class:`LemmaReport`. A violation on an instance
that satisfies the hypotheses is recorded with a replayable counterexample;
callers decide whether to raise (``LemmaReport.raise_for_violations``).
Instances whose hypotheses fail are counted as skipped, never as passes.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import HypothesisError, VerificationError
from .graph import (
    Graph,
    circulant,
    complete,
    complete_bipartite,
    cycle,
    degree_sequence,
    is_connected,
    random_even_graph,
)
from .spectral import (
    algebraic_connectivity,
    condition_number,
    det_qhat_exact,
    eigenvalues,
    laplacian,
    matrix_norm,
    qhat,
    spanning_tree_count,
)

__all__ = [
    "LemmaReport",
    "Layering",
    "check_fiedler",
    "check_condition_equiv",
    "check_condition_trend",
    "check_inverse_norm",
    "single_removal_constants",
    "check_det_drop",
    "build_layering",
    "check_layering",
    "check_cos_bound",
    "check_gaussian_upper_bounds",
    "builtin_corpus",
    "named_families",
    "merge_reports",
    "run_suite",
    "SUITES",
]


@dataclass
class LemmaReport:
    lemma: str
    instances: int = 0
    violations: int = 0
    skipped: int = 0
    observed: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)

    def violation(self, g: Graph | None, detail: str, **params) -> None:
        self.violations += 1
        entry = {"detail": detail, "params": params}
        if g is not None:
            entry["graph"] = g.to_edge_list()
        self.counterexamples.append(entry)

    def observe_max(self, key: str, value: float) -> None:
        old = self.observed.get(key)
        self.observed[key] = value if old is None else max(old, value)

    def observe_min(self, key: str, value: float) -> None:
        old = self.observed.get(key)
        self.observed[key] = value if old is None else min(old, value)

    def raise_for_violations(self) -> LemmaReport:
        if self.violations:
            raise VerificationError(f"{self.lemma}: {self.violations} violation(s)", self)
        return self

    def to_json(self) -> dict:
        return {
            "lemma": self.lemma,
            "instances": self.instances,
            "violations": self.violations,
            "skipped": self.skipped,
            "observed": dict(sorted(self.observed.items())),
            "params": dict(sorted(self.params.items())),
            "counterexamples": list(self.counterexamples),
        }


def merge_reports(lemma: str, reports: list[LemmaReport], params: dict | None = None) -> LemmaReport:
    """Combine per-instance reports in the given order; constants merge by max (or min)."""
    out = LemmaReport(lemma, params=dict(params or {}))
    for r in reports:
        out.instances += r.instances
        out.violations += r.violations
        out.skipped += r.skipped
        out.counterexamples.extend(r.counterexamples)
        for key, value in r.observed.items():
            if value is None:
                continue
            if key.startswith("min_") or key in ("alpha_achieved", "gamma_min"):
                out.observe_min(key, value)
            else:
                out.observe_max(key, value)
    return out


def _gamma(g: Graph) -> float:
    return algebraic_connectivity(g) / g.n


# -- Fiedler bounds ----------------------------------------------------------------


def check_fiedler(g: Graph, removals: list[list[int]]) -> LemmaReport:
    """``lambda2 <= n/(n-1) min d`` and ``lambda2(G - R) >= lambda2(G) - |R|``."""
    rep = LemmaReport("fiedler")
    n = g.n
    tol = 1e-7 * n
    lam2 = algebraic_connectivity(g)
    bound = n / (n - 1) * min(degree_sequence(g))
    rep.instances += 1
    if lam2 > bound + tol:
        rep.violation(g, "lambda2 exceeds n/(n-1) * min degree", lambda2=lam2, bound=bound)
    if bound > 0:
        rep.observe_max("ratio_lambda2_to_degree_bound", lam2 / bound)
    for removed in removals:
        rep.instances += 1
        sub = g.remove_vertices(removed)
        if sub.n < 2:
            rep.skipped += 1
            continue
        lam2_sub = algebraic_connectivity(sub)
        if lam2_sub < lam2 - len(removed) - tol:
            rep.violation(g, "lambda2 dropped by more than |R|", removed=list(removed),
                          lambda2=lam2, lambda2_removed=lam2_sub)
        rep.observe_min("min_removal_slack", lam2_sub - (lam2 - len(removed)))
    return rep


# -- condition numbers of I + X ----------------------------------------------------------


def check_condition_equiv(n: int, a: float, trials: int, seed: int) -> LemmaReport:
    """``mu_2(I+X) <= mu_inf(I+X)`` for random symmetric ``X`` with ``|X_ij| <= a/n``.

    The largest ``mu_inf / mu_2`` seen is reported as the empirical constant ``C``.
    Draws with ``I + X`` numerically singular are redrawn and counted as skipped.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    rep = LemmaReport("condition_equiv", params={"n": n, "a": a, "trials": trials, "seed": seed})
    rng = np.random.default_rng([seed, n])
    eye = np.eye(n)
    done = 0
    while done < trials:
        upper = np.triu(rng.uniform(-a / n, a / n, size=(n, n)))
        x = upper + np.triu(upper, 1).T
        m = eye + x
        ev = np.abs(eigenvalues(m, tol=1e-12))
        if ev.min() < 1e-10 * ev.max():
            rep.skipped += 1
            continue
        done += 1
        rep.instances += 1
        mu2 = float(ev.max() / ev.min())
        mu_inf = condition_number(m, math.inf)
        if mu2 > mu_inf * (1 + 1e-12):
            rep.violation(None, "mu_2 > mu_inf", n=n, a=a, trial=done, mu2=mu2, mu_inf=mu_inf)
        rep.observe_max("C", mu_inf / mu2)
    return rep


def check_condition_trend(ns=(20, 50, 100), a: float = 4.0, trials: int = 200,
                          seed: int = 0) -> LemmaReport:
    """Run :func:`check_condition_equiv` for several ``n``; ``C`` must not grow with ``n``.

    Growth test: the constant at the largest ``n`` is at most twice the one at the smallest.
    """
    parts = [check_condition_equiv(n, a, trials, seed) for n in ns]
    rep = merge_reports("condition_equiv", parts,
                        {"ns": list(ns), "a": a, "trials": trials, "seed": seed})
    per_n = {str(n): p.observed.get("C") for n, p in zip(ns, parts)}
    rep.observed["C_by_n"] = per_n
    first, last = parts[0].observed.get("C"), parts[-1].observed.get("C")
    if first is not None and last is not None and last > 2 * first:
        rep.violation(None, "empirical C grows with n", C_by_n=per_n)
    return rep


# -- inverse norm of Q + J -----------------------------------------------------------------


def check_inverse_norm(g: Graph, factor: float = 10.0) -> LemmaReport:
    """``||Qhat^-1||_1 = ||Qhat^-1||_inf`` and ``c_inf = n ||Qhat^-1||_inf <= factor / gamma``."""
    rep = LemmaReport("inverse_norm", params={"factor": factor})
    if not is_connected(g):
        raise HypothesisError("graph is disconnected; Q + J is singular")
    gamma = _gamma(g)
    inv = np.linalg.inv(qhat(g).astype(float))
    n1, ninf = matrix_norm(inv, 1), matrix_norm(inv, math.inf)
    rep.instances += 1
    if abs(n1 - ninf) > 1e-9 * max(ninf, 1.0):
        rep.violation(g, "1-norm and inf-norm of Qhat^-1 differ", norm1=n1, norm_inf=ninf)
    c_inf = g.n * ninf
    rep.observe_max("c_inf", c_inf)
    rep.observe_min("gamma_min", gamma)
    if c_inf > factor / gamma:
        rep.violation(g, "c_inf exceeds factor/gamma", c_inf=c_inf, gamma=gamma)
    return rep


# -- determinant drop under vertex removal ------------------------------------------------


def single_removal_constants(g: Graph) -> tuple[Fraction | None, Fraction | None, int]:
    """Largest per-vertex drops ``(det Qhat(G) / det Qhat(G - v)) / n`` and ``t(G) / (t(G - v) n)``.

    Returns ``(c1, c, skipped)``; removals that disconnect the graph are skipped.
    """
    det_g = det_qhat_exact(g)
    t_g = spanning_tree_count(g)
    c1 = c = None
    skipped = 0
    for v in range(g.n):
        sub = g.remove_vertices([v])
        det_sub = det_qhat_exact(sub)
        t_sub = spanning_tree_count(sub)
        if det_sub == 0 or t_sub == 0:
            skipped += 1
            continue
        r1 = Fraction(det_g, det_sub * g.n)
        r = Fraction(t_g, t_sub * g.n)
        c1 = r1 if c1 is None else max(c1, r1)
        c = r if c is None else max(c, r)
    return c1, c, skipped


def check_det_drop(g: Graph, r: int, c1: Fraction | None = None, c: Fraction | None = None,
                   sequences: int = 10, seed: int = 0) -> LemmaReport:
    """Exact-integer check of ``det Qhat(G_r) >= det Qhat(G) / (c1 n)^r`` on sampled removals.

    ``c1`` and ``c`` default to the constants observed on single removals from ``g``
    itself; a corpus run passes the corpus-wide maxima instead. The tree-count
    form ``t(G - v) >= t(G) / (c n)`` is checked for every vertex.
    """
    gamma = _gamma(g)
    if gamma <= 0:
        raise HypothesisError("graph is disconnected")
    if r < 1 or r > gamma * g.n / 2:
        raise HypothesisError(f"r = {r} outside 1..gamma n / 2 = {gamma * g.n / 2:.3f}")
    local_c1, local_c, skipped = single_removal_constants(g)
    c1 = local_c1 if c1 is None else Fraction(c1)
    c = local_c if c is None else Fraction(c)
    rep = LemmaReport("det_drop", skipped=skipped, params={"r": r, "sequences": sequences,
                                                           "seed": seed})
    if local_c1 is not None:
        rep.observe_max("c1", float(local_c1))
        rep.observe_max("c", float(local_c))
    det_g = det_qhat_exact(g)
    t_g = spanning_tree_count(g)
    n = g.n
    for v in range(n):
        t_sub = spanning_tree_count(g.remove_vertices([v]))
        if t_sub == 0:
            continue
        rep.instances += 1
        if c is not None and t_sub * c * n < t_g:
            rep.violation(g, "t(G - v) < t(G) / (c n)", vertex=v, c=str(c))
    if c1 is None:
        return rep
    rng = np.random.default_rng([seed, n, g.m])
    for _ in range(sequences):
        removed = [int(v) for v in rng.choice(n, size=r, replace=False)]
        sub = g.remove_vertices(removed)
        det_sub = det_qhat_exact(sub)
        if det_sub == 0:
            rep.skipped += 1
            continue
        rep.instances += 1
        if det_sub * (c1 * n) ** r < det_g:
            rep.violation(g, "det Qhat(G_r) < det Qhat(G) / (c1 n)^r", removed=removed,
                          c1=str(c1), det=det_g, det_removed=det_sub)
    return rep


# -- layering --------------------------------------------------------------------------


@dataclass
class Layering:
    h: list[int]
    H: int
    alpha: float
    threshold: int
    alpha_achieved: float | None


def build_layering(g: Graph, A, gamma: float | None = None) -> Layering:
    """Level function absorbing vertices with many neighbours already levelled.

    With ``a = |A|/n`` the threshold is ``alpha n`` neighbours, ``alpha = a gamma^3 / 32``;
    when ``|A| > n - gamma n / 4`` every remaining vertex goes to level 1 and
    ``alpha = gamma / 4``. Neighbour counts are compared against the integer
    ``ceil(alpha n)``.
    """
    n = g.n
    A = set(A)
    if not A:
        raise ValueError("seed set A must be non-empty")
    measured = _gamma(g)
    if gamma is None:
        gamma = measured
    if gamma <= 0 or measured < gamma * (1 - 1e-9):
        raise HypothesisError(f"lambda2 / n = {measured:.6g} is below the claimed gamma {gamma}")
    a = len(A) / n
    h = [0] * n
    if len(A) == n:
        return Layering(h, 0, gamma / 4, 0, None)
    if len(A) > n - gamma * n / 4:
        alpha = gamma / 4
        threshold = math.ceil(alpha * n)
        for v in range(n):
            if v not in A:
                h[v] = 1
        H = 1
    else:
        alpha = a * gamma**3 / 32
        threshold = math.ceil(alpha * n)
        level_mask = 0
        for v in A:
            level_mask |= 1 << v
        assigned = set(A)
        H = 0
        while len(assigned) < n:
            H += 1
            layer = [v for v in range(n) if v not in assigned
                     and (g.adjacency[v] & level_mask).bit_count() >= threshold]
            if not layer:
                raise HypothesisError(
                    f"layering stalled at level {H} with {n - len(assigned)} vertices left")
            for v in layer:
                h[v] = H
                assigned.add(v)
                level_mask |= 1 << v
    lower_counts = [sum(1 for w in g.neighbors(v) if h[w] < h[v]) for v in range(n) if v not in A]
    return Layering(h, H, alpha, threshold, min(lower_counts) / n)


def check_layering(g: Graph, A, gamma: float | None = None) -> LemmaReport:
    rep = LemmaReport("layering", params={"A_size": len(set(A))})
    A = set(A)
    try:
        lay = build_layering(g, A, gamma)
    except HypothesisError as exc:
        rep.instances += 1
        rep.violation(g, str(exc), A=sorted(A))
        return rep
    rep.instances += 1
    bad = [v for v in range(g.n) if v not in A
           and sum(1 for w in g.neighbors(v) if lay.h[w] < lay.h[v]) < lay.threshold]
    if bad or any(lay.h[v] != 0 for v in A):
        rep.violation(g, "layering property fails", vertices=bad, A=sorted(A))
    if lay.H > math.ceil(1 / lay.alpha) + 1:
        rep.violation(g, "too many levels", H=lay.H, alpha=lay.alpha)
    rep.observe_max("H", lay.H)
    if lay.alpha_achieved is not None:
        rep.observed["alpha_achieved"] = lay.alpha_achieved
    rep.observed["alpha"] = lay.alpha
    return rep


# -- scalar cosine bound ------------------------------------------------------------------


def check_cos_bound(grid_points: int = 10_000) -> LemmaReport:
    """``|cos x| <= exp(-x^2/2)`` on ``[-9pi/16, 9pi/16]``, plus a failure witness beyond it."""
    if grid_points < 1000:
        raise ValueError("grid_points must be at least 1000")
    rep = LemmaReport("cos_bound", params={"grid_points": grid_points})
    edge = 9 * math.pi / 16
    x = np.linspace(-edge, edge, grid_points)
    excess = np.abs(np.cos(x)) - np.exp(-x * x / 2)
    rep.instances = grid_points
    for i in np.flatnonzero(excess > 1e-12):
        rep.violation(None, "|cos x| > exp(-x^2/2)", x=float(x[i]))
    rep.observed["max_excess_inside"] = float(excess.max())
    outside = np.linspace(edge, math.pi, grid_points)[1:]
    fails = np.flatnonzero(np.abs(np.cos(outside)) > np.exp(-outside**2 / 2))
    if fails.size:
        rep.observed["outside_witness"] = float(outside[fails[0]])
    else:
        rep.violation(None, "no failure found beyond 9pi/16")
    return rep


# -- Gaussian integral over the cube ---------------------------------------------------------


def _cube_quadrature(q: np.ndarray, nodes: int) -> float:
    n = q.shape[0]
    x, w = np.polynomial.legendre.leggauss(nodes)
    x = x * math.pi / 2
    w = w * math.pi / 2
    # contract one axis at a time to keep memory at nodes^n
    grids = np.meshgrid(*([x] * n), indexing="ij")
    theta = np.stack([gr.ravel() for gr in grids], axis=1)
    form = np.einsum("ij,jk,ik->i", theta, q, theta)
    weights = np.ones(1)
    for _ in range(n):
        weights = np.multiply.outer(weights, w).ravel()
    return float(np.sum(weights * np.exp(-0.5 * form)))


def _cube_mc(q: np.ndarray, samples: int, seed: int) -> tuple[float, float]:
    n = q.shape[0]
    rng = np.random.default_rng([seed, n])
    total = total_sq = 0.0
    done = 0
    while done < samples:
        size = min(200_000, samples - done)
        theta = rng.uniform(-math.pi / 2, math.pi / 2, size=(size, n))
        f = np.exp(-0.5 * np.einsum("ij,jk,ik->i", theta, q, theta))
        total += float(f.sum())
        total_sq += float((f * f).sum())
        done += size
    vol = math.pi**n
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return vol * mean, vol * math.sqrt(var / samples)


def check_gaussian_upper_bounds(g: Graph, nodes: int = 40, mc_samples: int = 10_000_000,
                                seed: int = 0) -> LemmaReport:
    """``int_{cube} exp(-theta^T Q theta / 2) <= 2^((n-1)/2) pi^((n+1)/2) n / sqrt(det Qhat)``.

    Tensor Gauss-Legendre for ``n <= 4`` (error estimated against a coarser grid),
    uniform Monte Carlo for ``n`` in 5..6 (error = 3 standard errors).
    """
    n = g.n
    if n < 2 or n > 6:
        raise HypothesisError("quadrature path supports 2 <= n <= 6")
    det = det_qhat_exact(g)
    if det == 0:
        raise HypothesisError("graph is disconnected")
    rep = LemmaReport("gaussian_upper_bound", params={"n": n})
    q = laplacian(g).astype(float)
    bound = 2 ** ((n - 1) / 2) * math.pi ** ((n + 1) / 2) * n / math.sqrt(det)
    if n <= 4:
        value = _cube_quadrature(q, nodes)
        err = abs(value - _cube_quadrature(q, max(nodes * 3 // 4, 2)))
        rep.params["method"] = f"gauss_legendre_{nodes}"
    else:
        value, se = _cube_mc(q, mc_samples, seed)
        err = 3 * se
        rep.params["method"] = f"monte_carlo_{mc_samples}"
    rep.instances += 1
    rep.observed.update({"integral": value, "bound": bound, "error_estimate": err})
    rep.observe_max("slack_ratio", value / bound)
    if err > 0.1 * abs(bound - value):
        raise HypothesisError(f"quadrature error {err:.3g} too large against gap {bound - value:.3g}")
    if value > bound:
        rep.violation(g, "cube integral exceeds bound", integral=value, bound=bound)
    return rep


# -- corpora and suites ----------------------------------------------------------------------


def named_families() -> list[tuple[str, Graph]]:
    return [
        ("K3", complete(3)), ("K5", complete(5)), ("K7", complete(7)), ("K9", complete(9)),
        ("K11", complete(11)), ("K2,2", complete_bipartite(2, 2)),
        ("K4,4", complete_bipartite(4, 4)), ("K6,6", complete_bipartite(6, 6)),
        ("C5", cycle(5)), ("C8", cycle(8)),
        ("circulant9_1_2", circulant(9, [1, 2])), ("circulant11_1_2_3", circulant(11, [1, 2, 3])),
    ]


def builtin_corpus(seed: int = 0, size: int = 100, gamma_min: float = 0.3,
                   sizes=(7, 8, 9, 10, 11, 12, 13, 14), attempts: int = 1000) -> list[tuple[str, Graph]]:
    """Random even graphs with measured ``lambda2 / n >= gamma_min``, reproducible from ``seed``."""
    out = []
    for i in range(size):
        rng = np.random.default_rng([seed, i])
        n = sizes[i % len(sizes)]
        for _ in range(attempts):
            toggles = int(rng.integers(0, 3 * n))
            g = random_even_graph(n, toggles, int(rng.integers(2**31)))
            if is_connected(g) and _gamma(g) >= gamma_min:
                out.append((f"random-{seed}-{i}", g))
                break
        else:
            raise HypothesisError(f"no graph with gamma >= {gamma_min} after {attempts} attempts")
    return out


def _removal_sets(g: Graph, seed: int) -> list[list[int]]:
    rng = np.random.default_rng([seed, g.n, g.m, 7])
    return [[int(v) for v in rng.choice(g.n, size=r, replace=False)]
            for r in (1, 2, 3) if r < g.n - 1]


def _map(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _suite_fiedler(corpus, seed, threads):
    reps = _map(lambda item: check_fiedler(item[1], _removal_sets(item[1], seed)), corpus, threads)
    return merge_reports("fiedler", reps, {"graphs": len(corpus)})


def _suite_condition(corpus, seed, threads):
    return check_condition_trend((20, 50, 100), 4.0, 200, seed)


def _suite_invnorm(corpus, seed, threads):
    def one(item):
        if not is_connected(item[1]):
            return LemmaReport("inverse_norm", skipped=1)
        return check_inverse_norm(item[1])
    return merge_reports("inverse_norm", _map(one, corpus, threads), {"factor": 10.0})


def _suite_detdrop(corpus, seed, threads):
    usable = []
    skipped = 0
    for name, g in corpus:
        if is_connected(g) and int(_gamma(g) * g.n / 2) >= 1:
            usable.append((name, g))
        else:
            skipped += 1
    consts = _map(lambda item: single_removal_constants(item[1]), usable, threads)
    c1s = [k[0] for k in consts if k[0] is not None]
    cs = [k[1] for k in consts if k[1] is not None]
    c1 = max(c1s) if c1s else None
    c = max(cs) if cs else None

    def one(item):
        g = item[1]
        r = min(3, int(_gamma(g) * g.n / 2))
        return check_det_drop(g, r, c1, c, sequences=10, seed=seed)

    rep = merge_reports("det_drop", _map(one, usable, threads), {"graphs": len(corpus)})
    rep.skipped += skipped
    if c1 is not None:
        rep.observed["c1"] = float(c1)
        rep.observed["c"] = float(c)
    return rep


def _suite_layering(corpus, seed, threads):
    def one(item):
        g = item[1]
        if not is_connected(g):
            return LemmaReport("layering", skipped=1)
        k = math.ceil(g.n / 3)
        rng = np.random.default_rng([seed, g.n, g.m, 11])
        A = [int(v) for v in rng.choice(g.n, size=k, replace=False)]
        return check_layering(g, A)
    return merge_reports("layering", _map(one, corpus, threads), {"A_fraction": "ceil(n/3)"})


def _suite_cosbound(corpus, seed, threads):
    return check_cos_bound(10_000)


def _suite_gaussbound(corpus, seed, threads):
    small = [("K2", complete(2)), ("K3", complete(3)), ("C4", cycle(4)), ("K4", complete(4))]
    seen = {g.to_edge_list() for _, g in small}
    small += [(name, g) for name, g in corpus
              if 2 <= g.n <= 4 and is_connected(g) and g.to_edge_list() not in seen]
    return merge_reports("gaussian_upper_bound",
                         _map(lambda item: check_gaussian_upper_bounds(item[1]), small, threads),
                         {"graphs": [name for name, _ in small]})


SUITES = {
    "fiedler": _suite_fiedler,
    "condition": _suite_condition,
    "invnorm": _suite_invnorm,
    "detdrop": _suite_detdrop,
    "layering": _suite_layering,
    "cosbound": _suite_cosbound,
    "gaussbound": _suite_gaussbound,
}


def run_suite(suite: str, corpus: list[tuple[str, Graph]], seed: int = 0,
              threads: int = 1) -> list[LemmaReport]:
    if suite == "all":
        return [fn(corpus, seed, threads) for fn in SUITES.values()]
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    return [SUITES[suite](corpus, seed, threads)]
