"""Coin-angle inference from observed walk data.

Two observation models share one interface.  Position data are
displacement samples on the analytic axis of ``pmf`` (the mirror of the
simulator's axis; see ``pmf.CONVENTION_SIGMA``), scored by the exact pmf.
Return counts are Bernoulli trials of an even-step walker being found
back at its start site, inverted through the level set of the closed-form
return probability.

Estimates carry a concavity diagnostic.  Writing ptilde = exp(l/n) for
the geometric-mean per-trial likelihood, the reported positivity value is
p'^2 - p''*p evaluated at the maximizer, which equals -ptilde^2 * l''/n
there; it must be positive at an interior maximum.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from .pmf import CONVENTION_SIGMA, pmf_full, pmf_point
from .walk import CoinParameter, WalkState, channel_position_pmf, evolve, position_pmf

__all__ = [
    "TrialDataset",
    "LikelihoodCurve",
    "EstimateResult",
    "log_likelihood",
    "displacement_likelihood",
    "bernoulli_return_log_likelihood",
    "likelihood_curve",
    "mle_estimate",
    "level_set_solve",
    "transition_probability",
    "dataset_to_json",
    "dataset_from_json",
]

_FD_STEP = 1e-4
_CANDIDATE_WINDOW = 1e-6   # grid maxima within this of the best are all refined
_FLAT_TOL = 1e-14          # grid range below this flags a flat likelihood
_TIE_TOL = 1e-9            # refined values within this are ties -> smaller theta


@dataclass(frozen=True)
class TrialDataset:
    """Observed data for one estimation run.

    kind "positions": ``positions`` holds displacement samples on the
    analytic axis, parity-valid for ``k`` and within [-k, k]; ``weights``
    (optional, parallel to positions) supports expected-likelihood runs.
    kind "returns": ``n`` even-step trials of which ``n0`` ended at the
    start site.  ``seed`` records sampling provenance only.
    """

    kind: str
    k: int
    positions: tuple = ()
    weights: tuple | None = None
    n: int | None = None
    n0: int | None = None
    seed: int | None = None
    _counts: dict | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("positions", "returns"):
            raise ValueError(f"kind must be 'positions' or 'returns', got {self.kind!r}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        object.__setattr__(self, "positions", tuple(int(d) for d in self.positions))
        if self.kind == "positions":
            for d in self.positions:
                if abs(d) > self.k or (self.k - d) % 2:
                    raise ValueError(
                        f"displacement {d} is outside the parity-valid support for k={self.k}")
            if self.weights is not None:
                w = tuple(float(x) for x in self.weights)
                if len(w) != len(self.positions):
                    raise ValueError("weights and positions length mismatch")
                if any(x < 0 for x in w) or (w and sum(w) <= 0):
                    raise ValueError("weights must be nonnegative with positive total")
                object.__setattr__(self, "weights", w)
        else:
            if self.k % 2:
                raise ValueError("return-count data requires an even step count")
            if self.n is None or self.n0 is None:
                raise ValueError("return-count data needs n and n0")
            if not 0 <= self.n0 <= self.n or self.n < 1:
                raise ValueError(f"need 0 <= n0 <= n with n >= 1, got n0={self.n0} n={self.n}")

    @classmethod
    def from_positions(cls, k, positions, weights=None, seed=None) -> "TrialDataset":
        return cls("positions", k, tuple(positions),
                   None if weights is None else tuple(weights), seed=seed)

    @classmethod
    def from_returns(cls, k, n0, n, seed=None) -> "TrialDataset":
        return cls("returns", k, n=int(n), n0=int(n0), seed=seed)

    @property
    def trials(self) -> float:
        """Effective number of trials (sum of weights for weighted data)."""
        if self.kind == "returns":
            return float(self.n)
        if self.weights is None:
            return float(len(self.positions))
        return float(sum(self.weights))

    def counts(self) -> dict[int, float]:
        """Aggregate weight per observed displacement (cached; the fields
        it derives from are immutable)."""
        if self.kind == "returns":
            raise ValueError("counts() applies to positions data")
        if self._counts is None:
            out: dict[int, float] = {}
            weights = self.weights or (1.0,) * len(self.positions)
            for d, w in zip(self.positions, weights):
                out[d] = out.get(d, 0.0) + w
            object.__setattr__(self, "_counts", dict(sorted(out.items())))
        return dict(self._counts)


def log_likelihood(data: TrialDataset, theta: float) -> float:
    """Total log-likelihood of the dataset at coin angle theta.

    Returns -inf when any observed displacement has zero probability
    under theta.  Parity-invalid data cannot occur here; TrialDataset
    rejects it at construction.
    """
    lam = math.cos(theta)
    if data.kind == "returns":
        return bernoulli_return_log_likelihood(data.n0, data.n, data.k, lam)
    pmf = pmf_full(data.k, lam, exact=False)
    total = 0.0
    for d, w in data.counts().items():
        p = pmf.probability(d)
        if p <= 0.0:
            return -math.inf
        total += w * math.log(p)
    return total


def displacement_likelihood(d_list, k: int, theta: float) -> float:
    """Log-likelihood of a plain displacement list (sum of log pmf_point).

    For n equal displacements this is n*log p^(k)(d|theta).  Raises on
    parity-invalid or out-of-range displacements, including internally
    mixed parities.
    """
    return log_likelihood(TrialDataset.from_positions(k, d_list), theta)


def bernoulli_return_log_likelihood(n0: int, n: int, k: int, lam: float) -> float:
    """Log-likelihood of n0 returns in n even-step trials at coin parameter lam.

    l = n0 log q + (n - n0) log(1 - q) with q the k-step return
    probability; -inf when the counts contradict a degenerate q.
    """
    if not 0 <= n0 <= n or n < 1:
        raise ValueError(f"need 0 <= n0 <= n with n >= 1, got n0={n0} n={n}")
    if k % 2:
        raise ValueError("return likelihood requires an even step count")
    q = pmf_point(k, 0, lam)
    total = 0.0
    if n0:
        if q <= 0.0:
            return -math.inf
        total += n0 * math.log(q)
    if n - n0:
        if q >= 1.0:
            return -math.inf
        total += (n - n0) * math.log(1.0 - q)
    return total


@dataclass(frozen=True)
class LikelihoodCurve:
    """Log-likelihood on an even theta grid, with its argmax and curvature there."""

    k: int
    thetas: np.ndarray
    loglik: np.ndarray
    argmax_theta: float
    curvature: float


def likelihood_curve(data: TrialDataset, theta_range=(0.0, math.pi / 2),
                     grid_size: int = 601) -> LikelihoodCurve:
    lo, hi = _check_range(theta_range, grid_size)
    thetas = np.linspace(lo, hi, grid_size)
    ll = np.array([log_likelihood(data, float(t)) for t in thetas])
    finite = np.isfinite(ll)
    if finite.any():
        masked = np.where(finite, ll, -np.inf)
        arg = float(thetas[int(np.argmax(masked))])
        curvature = _curvature(lambda t: log_likelihood(data, t), arg)
    else:
        arg, curvature = math.nan, math.nan
    return LikelihoodCurve(data.k, thetas, ll, arg, curvature)


@dataclass(frozen=True)
class EstimateResult:
    """Point estimate with diagnostics.

    ``candidates`` lists every refined near-optimal maximizer (or every
    level-set root for return counts) in theta coordinates; ``theta_hat``
    is the best of them with ties resolved toward smaller theta.
    ``flags`` may contain "flat_likelihood" and "boundary_maximum".
    """

    theta_hat: float
    lambda_hat: float
    loglik: float
    curvature: float
    positivity: float
    candidates: tuple[float, ...]
    flags: tuple[str, ...]
    kind: str
    k: int
    n: float
    seed: int | None = None
    convention_sigma: int = CONVENTION_SIGMA

    def to_json(self) -> dict:
        def safe(x):
            return x if x is None or isinstance(x, (int, str)) else (
                float(x) if math.isfinite(x) else None)

        return {
            "theta_hat": safe(self.theta_hat),
            "lambda_hat": safe(self.lambda_hat),
            "loglik": safe(self.loglik),
            "curvature": safe(self.curvature),
            "positivity": safe(self.positivity),
            "candidates": [safe(c) for c in self.candidates],
            "flags": list(self.flags),
            "kind": self.kind,
            "k": self.k,
            "n": self.n,
            "seed": self.seed,
            "convention_sigma": self.convention_sigma,
        }


def _check_range(theta_range, grid_size):
    lo, hi = float(theta_range[0]), float(theta_range[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError(f"invalid theta range {theta_range}")
    if grid_size < 3:
        raise ValueError(f"grid size must be >= 3, got {grid_size}")
    return lo, hi


def _curvature(fun: Callable[[float], float], x: float, h: float = _FD_STEP) -> float:
    """Second derivative by central differences, Richardson-extrapolated once."""

    def second(step):
        return (fun(x + step) - 2.0 * fun(x) + fun(x - step)) / step**2

    coarse = second(h)
    fine = second(h / 2)
    return (4.0 * fine - coarse) / 3.0


def _diagnostics(fun, theta_hat, ll_hat, n):
    curvature = _curvature(fun, theta_hat)
    if math.isfinite(ll_hat) and math.isfinite(curvature) and n > 0:
        ptilde = math.exp(ll_hat / n)
        positivity = -(ptilde**2) * curvature / n
    else:
        positivity = math.nan
    return curvature, positivity


def _refine_run(fun, thetas, ll, run, tolerance):
    """Golden-section refinement around one near-optimal grid run.

    Falls back to bounded Brent when the run touches the grid edge or is
    too flat to bracket.
    """
    grid_n = len(thetas)
    i = int(run[int(np.argmax(ll[run]))])
    a = float(thetas[max(int(run[0]) - 1, 0)])
    b = float(thetas[min(int(run[-1]) + 1, grid_n - 1)])
    neg = lambda t: -fun(t)
    if 0 < i < grid_n - 1 and ll[i] > ll[i - 1] and ll[i] > ll[i + 1]:
        bracket = (float(thetas[i - 1]), float(thetas[i]), float(thetas[i + 1]))
        try:
            res = minimize_scalar(neg, bracket=bracket, method="golden",
                                  options={"xtol": tolerance})
            return float(res.x), float(-res.fun)
        except ValueError:
            pass
    res = minimize_scalar(neg, bounds=(a, b), method="bounded",
                          options={"xatol": tolerance})
    return float(res.x), float(-res.fun)


def mle_estimate(data: TrialDataset, theta_range=(0.0, math.pi / 2),
                 grid_size: int = 601, refine_tolerance: float = 1e-9) -> EstimateResult:
    """Maximum-likelihood coin angle for a dataset.

    Position data: dense grid scan of the log-likelihood, then
    golden-section refinement of every grid run within 1e-6 of the best
    value.  Return counts: the empirical return frequency is pushed
    through the level set of the closed-form return probability on the
    lam branch [0, 1] (matching the default theta range).
    """
    if data.kind == "returns":
        return _estimate_from_returns(data)
    if not data.positions:
        raise ValueError("cannot estimate from an empty dataset")
    lo, hi = _check_range(theta_range, grid_size)
    fun = lambda t: log_likelihood(data, t)
    thetas = np.linspace(lo, hi, grid_size)
    ll = np.array([fun(float(t)) for t in thetas])
    spacing = (hi - lo) / (grid_size - 1)

    finite = np.isfinite(ll)
    if not finite.any():
        return EstimateResult(math.nan, math.nan, -math.inf, math.nan, math.nan,
                              (), ("flat_likelihood",), data.kind, data.k,
                              data.trials, data.seed)
    gmax = float(ll[finite].max())
    flags = []
    if gmax - float(ll[finite].min()) < _FLAT_TOL:
        flags.append("flat_likelihood")

    near = np.flatnonzero(ll >= gmax - _CANDIDATE_WINDOW)
    runs = np.split(near, np.flatnonzero(np.diff(near) > 1) + 1)
    candidates = sorted(_refine_run(fun, thetas, ll, run, refine_tolerance)
                        for run in runs)
    best_theta, best_ll = candidates[0]
    for theta, value in candidates[1:]:
        if value > best_ll + _TIE_TOL:
            best_theta, best_ll = theta, value

    if best_theta - lo < spacing or hi - best_theta < spacing:
        flags.append("boundary_maximum")
    curvature, positivity = _diagnostics(fun, best_theta, best_ll, data.trials)
    return EstimateResult(best_theta, math.cos(best_theta), best_ll, curvature,
                          positivity, tuple(t for t, _ in candidates), tuple(flags),
                          data.kind, data.k, data.trials, data.seed)


def _estimate_from_returns(data: TrialDataset) -> EstimateResult:
    q_hat = data.n0 / data.n
    roots = level_set_solve(q_hat, data.k, branch=(0.0, 1.0))
    fun = lambda t: log_likelihood(data, t)
    if not roots:
        # q(lam) is continuous with q(0)=1 and q(1)=0, so every frequency
        # in [0,1] is attained; an empty list is a resolution failure
        return EstimateResult(math.nan, math.nan, -math.inf, math.nan, math.nan,
                              (), ("flat_likelihood",), data.kind, data.k,
                              data.trials, data.seed)
    thetas = sorted(math.acos(max(min(r, 1.0), -1.0)) for r in roots)
    best_theta, best_ll = thetas[0], fun(thetas[0])
    for theta in thetas[1:]:
        value = fun(theta)
        if value > best_ll + _TIE_TOL:
            best_theta, best_ll = theta, value
    curvature, positivity = _diagnostics(fun, best_theta, best_ll, data.trials)
    return EstimateResult(best_theta, math.cos(best_theta), best_ll, curvature,
                          positivity, tuple(thetas), (), data.kind, data.k,
                          data.trials, data.seed)


def _solve_level(fun: Callable[[float], float], level: float, lo: float, hi: float,
                 resolution: int, residual_tol: float) -> list[float]:
    """All x in [lo, hi] with fun(x) = level, by dense scan.

    Sign changes are bisected on each monotone sub-segment; scanned local
    minima of |fun - level| are polished by bounded minimization to catch
    tangential and endpoint solutions.
    """
    xs = np.linspace(lo, hi, resolution)
    g = np.array([fun(float(x)) - level for x in xs])
    roots: list[float] = []

    for i in range(resolution - 1):
        if g[i] == 0.0:
            roots.append(float(xs[i]))
        elif g[i] * g[i + 1] < 0:
            roots.append(float(bisect(lambda x: fun(x) - level,
                                      float(xs[i]), float(xs[i + 1]), xtol=1e-14)))
    if g[-1] == 0.0:
        roots.append(float(xs[-1]))

    absg = np.abs(g)
    scan_tol = 1e-4 * (1.0 + abs(level))
    for i in range(resolution):
        left = absg[i - 1] if i else math.inf
        right = absg[i + 1] if i + 1 < resolution else math.inf
        if absg[i] <= left and absg[i] <= right and 0 < absg[i] < scan_tol:
            a = float(xs[max(i - 1, 0)])
            b = float(xs[min(i + 1, resolution - 1)])
            res = minimize_scalar(lambda x: abs(fun(x) - level), bounds=(a, b),
                                  method="bounded", options={"xatol": 1e-14})
            if res.fun <= residual_tol:
                roots.append(float(res.x))

    roots.sort()
    merged: list[float] = []
    for r in roots:
        if not merged or r - merged[-1] > 1e-9 * max(1.0, hi - lo):
            merged.append(r)
    return merged


def level_set_solve(f: float, k: int, branch: tuple[float, float] = (-1.0, 1.0),
                    resolution: int = 2048,
                    residual_tol: float = 1e-10) -> list[float]:
    """All lam on the branch where the k-step return probability equals f.

    Every returned candidate satisfies |p^(k)(0, lam) - f| <= residual_tol;
    the list is empty when the level is not attained (e.g. f above the
    maximum of the return probability on the branch).
    """
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"level must lie in [0, 1], got {f}")
    if k < 2 or k % 2:
        raise ValueError(f"return probability needs an even k >= 2, got {k}")
    lo, hi = float(branch[0]), float(branch[1])
    if not -1.0 <= lo < hi <= 1.0:
        raise ValueError(f"branch must be a sub-interval of [-1, 1], got {branch}")
    if resolution < 8:
        raise ValueError(f"resolution must be >= 8, got {resolution}")
    fun = lambda lam: pmf_point(k, 0, lam)
    return _solve_level(fun, f, lo, hi, resolution, residual_tol)


def transition_probability(a: int, b: int, k: int, theta: float,
                           via: str = "analytic") -> float:
    """Probability that a walker started at site a is found at site b after k steps.

    Sites are read on the analytic axis, so the value is
    pmf_point(k, b - a, lam) by translation invariance.  via="simulation"
    and via="channel" run the forward dynamics instead and read site
    2a - b, the mirror of b about the start site, because the forward
    routes live on the reflected axis; all three agree to rounding.
    """
    p = CoinParameter(theta)
    if via == "analytic":
        return float(pmf_point(k, b - a, p.lam))
    if via == "simulation":
        state = evolve(WalkState.localized(a), p, k)
        return position_pmf(state).probability(2 * a - b)
    if via == "channel":
        return channel_position_pmf(WalkState.localized(a), p, k).probability(2 * a - b)
    raise ValueError(f"via must be 'analytic', 'simulation' or 'channel', got {via!r}")


def dataset_to_json(data: TrialDataset) -> dict:
    """JSON-ready form of a dataset (inverse of ``dataset_from_json``)."""
    obj: dict = {"kind": data.kind, "k": data.k}
    if data.kind == "positions":
        obj["positions"] = list(data.positions)
        if data.weights is not None:
            obj["weights"] = list(data.weights)
    else:
        obj["n"] = data.n
        obj["n0"] = data.n0
    if data.seed is not None:
        obj["seed"] = data.seed
    return obj


def dataset_from_json(obj) -> TrialDataset:
    """Parse a dataset from a JSON object or string."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "kind" not in obj or "k" not in obj:
        raise ValueError("dataset object needs 'kind' and 'k' fields")
    kind = obj["kind"]
    if kind == "positions":
        return TrialDataset.from_positions(int(obj["k"]), obj.get("positions", ()),
                                           obj.get("weights"), seed=obj.get("seed"))
    if kind == "returns":
        return TrialDataset.from_returns(int(obj["k"]), obj["n0"], obj["n"],
                                         seed=obj.get("seed"))
    raise ValueError(f"unknown dataset kind {kind!r}")
