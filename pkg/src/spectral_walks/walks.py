"""Finite-state Markov chains and their simulated path ensembles.

The kernel may come from a weighted graph (p(x,y) = c(x,y)/c(x), whose
stationary measure is c(x)/sum c and which is reversible) or be supplied
directly.  Simulation is vectorized over paths and driven by the
counter-based generator in rng.py, so an ensemble is a pure function of
(kernel, mu0, n_steps, n_paths, seed): same inputs, same bytes, however
many worker threads run.

Checks compare Monte Carlo estimates against exact kernel arithmetic and
report deviations in units of the standard error; the package-wide
acceptance threshold is 5 SE.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graphs import WeightedGraph
from .rng import derive_key, path_keys, step_uniforms

__all__ = [
    "FiniteMarkov",
    "PathEnsemble",
    "CheckRow",
    "CheckReport",
    "stationary_measure",
    "is_irreducible",
    "is_aperiodic",
    "ergodic_limit",
    "simulate",
    "cylinder_mass",
    "covariance_exact",
    "covariance_mc",
    "markov_check",
    "harmonic_solve",
    "martingale_check",
    "doob_boundary_check",
]

SIGMA_THRESHOLD = 5.0


class FiniteMarkov:
    """States, a row-stochastic kernel, and an initial measure.

    kernel[i, j] = p(states[i] -> states[j]); every row must sum to 1
    within 1e-12 with nonnegative entries.  mu0 is normalized on input.
    """

    __slots__ = ("states", "kernel", "mu0", "index")

    def __init__(self, states, kernel, mu0):
        states = tuple(states)
        if not states:
            raise ValueError("a chain needs at least one state")
        if len(set(states)) != len(states):
            raise ValueError("duplicate state labels")
        kernel = np.array(kernel, dtype=np.float64)
        n = len(states)
        if kernel.shape != (n, n):
            raise ValueError("kernel shape does not match the state count")
        if np.any(kernel < 0):
            raise ValueError("kernel has a negative entry")
        rowdev = np.max(np.abs(kernel.sum(axis=1) - 1.0))
        if rowdev > 1e-12:
            raise ValueError(f"kernel rows are not stochastic (max deviation {rowdev:.3e})")
        mu0 = np.array(mu0, dtype=np.float64)
        if mu0.shape != (n,):
            raise ValueError("mu0 length does not match the state count")
        if np.any(mu0 < 0):
            raise ValueError("mu0 has a negative entry")
        total = float(mu0.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"mu0 does not sum to 1 (got {total!r})")
        self.states = states
        self.kernel = kernel
        self.mu0 = mu0 / total
        self.index = {s: i for i, s in enumerate(states)}

    @classmethod
    def from_graph(cls, g: WeightedGraph, mu0=None) -> "FiniteMarkov":
        """The conductance-driven walk on g; default start is c(x)/sum c."""
        n = len(g.vertices)
        kernel = np.zeros((n, n))
        for i, x in enumerate(g.vertices):
            cx = float(g.total[x])
            for y, c in g.adjacency[x]:
                kernel[i, g.index[y]] = float(c) / cx
        if mu0 is None:
            weights = np.array([float(g.total[x]) for x in g.vertices])
            mu0 = weights / weights.sum()
        else:
            mu0 = cls._as_vector_static(g.vertices, mu0)
        return cls(g.vertices, kernel, mu0)

    @staticmethod
    def _as_vector_static(states, f) -> np.ndarray:
        if isinstance(f, dict):
            if set(f) != set(states):
                raise ValueError("function does not match the state set")
            return np.array([float(f[s]) for s in states])
        arr = np.array(f, dtype=np.float64)
        if arr.shape != (len(states),):
            raise ValueError("function length does not match the state count")
        return arr

    def as_vector(self, f) -> np.ndarray:
        """A state function (dict keyed by states, or array in state order) as an array."""
        return self._as_vector_static(self.states, f)

    def with_start(self, x) -> "FiniteMarkov":
        """Same kernel, started deterministically at x."""
        mu0 = np.zeros(len(self.states))
        mu0[self.index[x]] = 1.0
        return FiniteMarkov(self.states, self.kernel, mu0)

    def transfer(self, f) -> np.ndarray:
        """(Tf)(x) = sum_y p(x,y) f(y) as an array in state order."""
        return self.kernel @ self.as_vector(f)

    def __len__(self):
        return len(self.states)


def _reachable(adj_rows, start: int) -> set:
    seen = {start}
    stack = [start]
    while stack:
        i = stack.pop()
        for j in adj_rows[i]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return seen


def is_irreducible(fm: FiniteMarkov) -> bool:
    """True when every state reaches every other along positive-probability arcs."""
    n = len(fm.states)
    fwd = [np.nonzero(fm.kernel[i] > 0)[0] for i in range(n)]
    bwd = [np.nonzero(fm.kernel[:, i] > 0)[0] for i in range(n)]
    return len(_reachable(fwd, 0)) == n and len(_reachable(bwd, 0)) == n


def is_aperiodic(fm: FiniteMarkov) -> bool:
    """True when the period of the component of state 0 is 1.

    Assigns breadth-first levels from state 0; the period is the gcd of
    level[i] + 1 - level[j] over all positive arcs i -> j inside the
    reached component.  Meaningful for irreducible kernels.
    """
    level = {0: 0}
    order = [0]
    head = 0
    while head < len(order):
        i = order[head]
        head += 1
        for j in np.nonzero(fm.kernel[i] > 0)[0]:
            j = int(j)
            if j not in level:
                level[j] = level[i] + 1
                order.append(j)
    g = 0
    for i in level:
        for j in np.nonzero(fm.kernel[i] > 0)[0]:
            j = int(j)
            if j in level:
                g = math.gcd(g, abs(level[i] + 1 - level[j]))
    return g == 1


def stationary_measure(fm: FiniteMarkov) -> np.ndarray:
    """The unique probability row vector with mu P = mu.

    Solved densely; the chain must be irreducible, otherwise the measure
    is not unique and this raises instead of guessing.  The residual
    ||mu P - mu||_inf is checked against 1e-12.
    """
    if not is_irreducible(fm):
        raise ValueError("kernel is reducible: stationary measure is not unique")
    n = len(fm.states)
    a = fm.kernel.T - np.eye(n)
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    mu = np.linalg.solve(a, b)
    mu = mu / mu.sum()
    residual = float(np.max(np.abs(mu @ fm.kernel - mu)))
    if residual > 1e-12:
        raise ArithmeticError(f"stationary solve residual {residual:.3e} exceeds 1e-12")
    return mu


def ergodic_limit(fm: FiniteMarkov, f, tol: float = 1e-10, max_steps: int = 100000) -> float:
    """Iterate T^n f until it flattens to the stationary mean, and return that mean.

    Verifies the averaging limit T^n f -> mu(f) * 1 by direct power
    iteration; raises for chains where the limit does not exist at the
    requested tolerance (periodic or reducible kernels).
    """
    mu = stationary_measure(fm)
    vec = fm.as_vector(f)
    target = float(mu @ vec)
    g = vec.astype(np.float64)
    for _ in range(max_steps):
        if float(np.max(np.abs(g - target))) <= tol:
            return target
        g = fm.kernel @ g
    raise ArithmeticError(f"T^n f did not flatten within {max_steps} steps")


@dataclass(frozen=True)
class PathEnsemble:
    """Simulated trajectories: row p, column k holds the state index of Z_k on path p."""

    states: tuple
    seed: int
    trajectories: np.ndarray

    @property
    def n_paths(self) -> int:
        return self.trajectories.shape[0]

    @property
    def n_steps(self) -> int:
        return self.trajectories.shape[1] - 1

    def as_vector(self, f) -> np.ndarray:
        return FiniteMarkov._as_vector_static(self.states, f)


def _worker_count() -> int:
    env = os.environ.get("SPECTRAL_WALKS_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return 1


def _simulate_block(kernel_cum, mu0_cum, n_steps, seed, first, count, out):
    keys = path_keys(seed, first, count)
    u = step_uniforms(keys, 0)
    state = np.searchsorted(mu0_cum, u, side="right").astype(np.int32)
    out[first : first + count, 0] = state
    for k in range(n_steps):
        u = step_uniforms(keys, k + 1)
        rows = kernel_cum[state]
        state = (rows <= u[:, None]).sum(axis=1, dtype=np.int32)
        out[first : first + count, k + 1] = state


def simulate(fm: FiniteMarkov, n_steps: int, n_paths: int, seed: int) -> PathEnsemble:
    """Draw n_paths independent trajectories Z_0 .. Z_{n_steps}.

    Z_0 ~ mu0 and each step draws from the kernel row of the current
    state.  Path p consumes only the stream keyed by (seed, p), so the
    ensemble is bit-identical no matter how the work is chunked.
    """
    if n_steps < 0 or n_paths < 1:
        raise ValueError("need n_steps >= 0 and n_paths >= 1")
    kernel_cum = np.cumsum(fm.kernel, axis=1)
    kernel_cum[:, -1] = 1.0
    mu0_cum = np.cumsum(fm.mu0)
    mu0_cum[-1] = 1.0
    out = np.empty((n_paths, n_steps + 1), dtype=np.int32)
    workers = _worker_count()
    chunk = max(1, -(-n_paths // workers))
    blocks = [(first, min(chunk, n_paths - first)) for first in range(0, n_paths, chunk)]
    if workers == 1 or len(blocks) == 1:
        for first, count in blocks:
            _simulate_block(kernel_cum, mu0_cum, n_steps, seed, first, count, out)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_simulate_block, kernel_cum, mu0_cum, n_steps, seed, first, count, out)
                for first, count in blocks
            ]
            for fut in futures:
                fut.result()
    return PathEnsemble(states=fm.states, seed=seed, trajectories=out)


def cylinder_mass(fm: FiniteMarkov, sets) -> float:
    """Probability that Z_i lands in E_i for every i, by exact backward recursion.

    sets is the sequence E_0 .. E_n of state subsets; the value is
    sum over x_0 in E_0, .., x_n in E_n of mu0(x_0) p(x_0,x_1)..p(x_{n-1},x_n).
    """
    sets = list(sets)
    if not sets:
        raise ValueError("need at least E_0")
    n = len(fm.states)
    masks = []
    for e in sets:
        mask = np.zeros(n)
        for x in e:
            mask[fm.index[x]] = 1.0
        masks.append(mask)
    w = masks[-1]
    for mask in reversed(masks[:-1]):
        w = mask * (fm.kernel @ w)
    return float(fm.mu0 @ w)


def covariance_exact(fm: FiniteMarkov, f1, f2, n: int) -> float:
    """E[f1(Z_n) f2(Z_{n+1})] by kernel arithmetic: mu0 . T^n(f1 . T f2)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    g = fm.as_vector(f1) * (fm.kernel @ fm.as_vector(f2))
    for _ in range(n):
        g = fm.kernel @ g
    return float(fm.mu0 @ g)


def covariance_mc(ens: PathEnsemble, f1, f2, n: int):
    """Ensemble estimate of E[f1(Z_n) f2(Z_{n+1})]; returns (estimate, SE)."""
    if n < 0 or n + 1 > ens.n_steps:
        raise ValueError("need 0 <= n <= n_steps - 1")
    v1 = ens.as_vector(f1)
    v2 = ens.as_vector(f2)
    samples = v1[ens.trajectories[:, n]] * v2[ens.trajectories[:, n + 1]]
    est = float(samples.mean())
    se = float(samples.std(ddof=1) / math.sqrt(len(samples)))
    return est, se


@dataclass(frozen=True)
class CheckRow:
    """One estimate-vs-exact comparison in standard-error units."""

    label: str
    estimate: float
    exact: float
    se: float

    @property
    def sigmas(self) -> float:
        dev = self.estimate - self.exact
        if dev == 0.0:
            return 0.0
        if self.se == 0.0:
            return math.inf
        return abs(dev) / self.se


@dataclass(frozen=True)
class CheckReport:
    """A batch of CheckRows plus anything skipped for lack of data."""

    rows: tuple
    skipped: tuple = ()
    threshold: float = SIGMA_THRESHOLD

    @property
    def max_sigmas(self) -> float:
        return max((r.sigmas for r in self.rows), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_sigmas <= self.threshold


def markov_check(ens: PathEnsemble, fm: FiniteMarkov, f, n: int, min_visits: int = 100) -> CheckReport:
    """Per-state test of E[f(Z_{n+1}) | Z_n = x] = (Tf)(x) at a fixed step n.

    States visited fewer than min_visits times at step n are reported in
    `skipped` rather than tested.
    """
    if n + 1 > ens.n_steps:
        raise ValueError("ensemble too short for the requested step")
    vec = fm.as_vector(f)
    exact = fm.kernel @ vec
    here = ens.trajectories[:, n]
    nxt = ens.trajectories[:, n + 1]
    rows = []
    skipped = []
    for i, x in enumerate(fm.states):
        mask = here == i
        count = int(mask.sum())
        if count < min_visits:
            skipped.append(x)
            continue
        samples = vec[nxt[mask]]
        se = float(samples.std(ddof=1) / math.sqrt(count))
        rows.append(CheckRow(label=str(x), estimate=float(samples.mean()), exact=float(exact[i]), se=se))
    return CheckReport(rows=tuple(rows), skipped=tuple(skipped))


def harmonic_solve(fm: FiniteMarkov, boundary: dict) -> dict:
    """Extend boundary values to a function with Th = h off the boundary.

    Solves the linear system (I - P_II) h_I = P_IB b densely and verifies
    the interior residual against 1e-12.  Raises when the interior block
    is singular (the boundary does not determine the extension).
    """
    if not boundary:
        raise ValueError("boundary is empty")
    for x in boundary:
        if x not in fm.index:
            raise ValueError(f"boundary state {x!r} is not a chain state")
    interior = [i for i, s in enumerate(fm.states) if s not in boundary]
    h = np.zeros(len(fm.states))
    for x, val in boundary.items():
        h[fm.index[x]] = float(val)
    if interior:
        a = np.eye(len(interior)) - fm.kernel[np.ix_(interior, interior)]
        # h is zero on the interior here, so this picks out P_IB @ boundary values
        b = fm.kernel[interior] @ h
        try:
            h_int = np.linalg.solve(a, b)
        except np.linalg.LinAlgError as exc:
            raise ValueError("interior system is singular") from exc
        h[interior] = h_int
        residual = float(np.max(np.abs((fm.kernel @ h - h)[interior])))
        if residual > 1e-12:
            raise ArithmeticError(f"harmonic residual {residual:.3e} exceeds 1e-12")
    return {s: float(h[i]) for i, s in enumerate(fm.states)}


def martingale_check(ens: PathEnsemble, h, min_visits: int = 100) -> CheckReport:
    """Test E[h(Z_{k+1}) | Z_k = x] = h(x), pooling transitions over all steps.

    Each visit to x yields an independent draw from the row p(x, .),
    whatever the step or path, so pooling is legitimate and sharpens the
    per-state standard errors.  For harmonic h every row should sit
    within threshold; a non-harmonic h is flagged by a large deviation.
    """
    vec = ens.as_vector(h)
    prev = ens.trajectories[:, :-1].ravel()
    nxt = ens.trajectories[:, 1:].ravel()
    rows = []
    skipped = []
    for i, x in enumerate(ens.states):
        mask = prev == i
        count = int(mask.sum())
        if count < min_visits:
            skipped.append(x)
            continue
        samples = vec[nxt[mask]]
        se = float(samples.std(ddof=1) / math.sqrt(count))
        rows.append(CheckRow(label=str(x), estimate=float(samples.mean()), exact=float(vec[i]), se=se))
    return CheckReport(rows=tuple(rows), skipped=tuple(skipped))


def doob_boundary_check(
    fm: FiniteMarkov, h, N: int, n_paths: int, seed: int, min_visits: int = 2
) -> CheckReport:
    """Conservation of a bounded harmonic function: E_x[h(Z_N)] = h(x) per start.

    Each start state runs its own ensemble on a stream derived from
    (seed, state index), so the whole report is reproducible from seed.
    """
    vec = fm.as_vector(h)
    rows = []
    for i, x in enumerate(fm.states):
        ens = simulate(fm.with_start(x), N, n_paths, derive_key(seed, i))
        samples = vec[ens.trajectories[:, N]]
        se = float(samples.std(ddof=1) / math.sqrt(n_paths))
        rows.append(CheckRow(label=str(x), estimate=float(samples.mean()), exact=float(vec[i]), se=se))
    return CheckReport(rows=tuple(rows))
