"""Simulation oracles for the analytic pipeline.

Randomness comes from numpy's Philox counter-based generator.  Every
``(seed, stream_id, block)`` triple owns an independent substream, and
samples are produced in fixed-size blocks, so results do not depend on
how many worker threads process the blocks.
"""

from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dist import DiscretePmf
from .errors import InvalidParameter
from .geoqueue import GeoQueueParams, geo_transition_matrix
from .markov import MarkovChain
from .omm import ObservableModel

RNG_NAME = "numpy.random.Philox (SeedSequence spawn_key=(stream_id, block))"
BLOCK = 1 << 15
SLOT_CHUNK = 1 << 20


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    samples: int = 1_000_000
    burn_in: int = 0
    stream_id: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise InvalidParameter("samples must be >= 1")
        if self.burn_in < 0:
            raise InvalidParameter("burn_in must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise InvalidParameter("seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise InvalidParameter("workers must be >= 1")

    def rng(self, block: int = 0) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, block))
        return np.random.Generator(np.random.Philox(ss))

    def metadata(self) -> dict:
        return {
            "rng": RNG_NAME,
            "seed": self.seed,
            "stream_id": self.stream_id,
            "samples": self.samples,
            "burn_in": self.burn_in,
        }


@dataclass(frozen=True, eq=False)
class Empirical:
    pmf: DiscretePmf
    samples: int
    metadata: dict = field(default_factory=dict)


def _blocks(total: int) -> list[tuple[int, int]]:
    return [(b, min(BLOCK, total - b * BLOCK)) for b in range(math.ceil(total / BLOCK))]


def _map_blocks(cfg: SimConfig, fn) -> list:
    blocks = _blocks(cfg.samples)
    if cfg.workers == 1:
        return [fn(b, n) for b, n in blocks]
    with ThreadPoolExecutor(cfg.workers) as pool:
        return list(pool.map(lambda bn: fn(*bn), blocks))


def _walk(cum: np.ndarray, start: np.ndarray, L: int, rng: np.random.Generator) -> np.ndarray:
    states = start
    last = cum.shape[0] - 1
    for _ in range(L):
        u = rng.random(states.size)
        states = np.minimum((u[:, None] >= cum[states]).sum(axis=1), last)
    return states


def _cumulative(P: np.ndarray) -> np.ndarray:
    cum = np.cumsum(P, axis=1)
    cum[:, -1] = 1.0
    return cum


def sample_chain_endpoints(chain: MarkovChain, x: int, L: int, cfg: SimConfig) -> np.ndarray:
    """States reached by ``cfg.samples`` independent ``L``-step walks from ``x``."""
    cum = _cumulative(chain.transition)

    def block(b, n):
        return _walk(cum, np.full(n, x, dtype=np.int64), L, cfg.rng(b))

    return np.concatenate(_map_blocks(cfg, block))


def sample_trajectory(chain: MarkovChain, x0: int, steps: int, cfg: SimConfig) -> np.ndarray:
    """A single path ``X_0 = x0, ..., X_steps`` after ``cfg.burn_in`` discarded steps."""
    cum = _cumulative(chain.transition)
    rng = cfg.rng(0)
    total = cfg.burn_in + steps
    u = rng.random(total)
    path = np.empty(total + 1, dtype=np.int64)
    path[0] = x0
    s = x0
    last = chain.states - 1
    for n in range(total):
        s = min(int(np.searchsorted(cum[s], u[n], side="right")), last)
        path[n + 1] = s
    return path[cfg.burn_in :]


def sample_forecast_empirical(model: ObservableModel, x: int, L: int, cfg: SimConfig) -> Empirical:
    """Walk ``L`` steps from ``x``, then draw from the landing state's posterior."""
    cum = _cumulative(model.chain.transition)
    lo, n_grid = model.grid
    post_cum = np.cumsum(model.posterior_matrix, axis=1)
    post_cum[:, -1] = 1.0

    def block(b, n):
        rng = cfg.rng(b)
        states = _walk(cum, np.full(n, x, dtype=np.int64), L, rng)
        u = rng.random(n)
        z = np.empty(n, dtype=np.int64)
        for s in np.unique(states):
            idx = states == s
            z[idx] = np.searchsorted(post_cum[s], u[idx], side="right")
        return np.bincount(np.minimum(z, n_grid - 1), minlength=n_grid)

    counts = np.sum(_map_blocks(cfg, block), axis=0)
    pmf = DiscretePmf.from_weights(lo, counts.astype(float))
    meta = cfg.metadata() | {"x": x, "L": L}
    return Empirical(pmf, cfg.samples, meta)


def empirical_blocking_forecast(p: GeoQueueParams, x: int, L: int, cfg: SimConfig) -> float:
    """Fraction of ``L``-step chain walks from ``x`` that end in state ``K``."""
    ends = sample_chain_endpoints(geo_transition_matrix(p), x, L, cfg)
    return float(np.mean(ends == p.K))


@dataclass(frozen=True, eq=False)
class QueueTrajectory:
    """Slot-level record of a Geo/Geo/1/K simulation.

    ``queue[n]`` is the queue length at the start of slot ``n``; the other
    per-slot arrays flag an arrival, a blocked arrival and a departure in
    that slot.  ``sojourn_found[i]`` is the queue length the ``i``-th
    admitted packet found on arrival and ``sojourn[i]`` its sojourn in slots,
    counting the arrival slot.
    """

    params: GeoQueueParams
    queue: np.ndarray
    arrivals: np.ndarray
    blocked: np.ndarray
    departures: np.ndarray
    sojourn_found: np.ndarray
    sojourn: np.ndarray
    metadata: dict

    @property
    def slots(self) -> int:
        return int(self.queue.size)

    def histogram(self) -> np.ndarray:
        h = np.bincount(self.queue, minlength=self.params.K + 1).astype(float)
        return h / h.sum()

    def transition_counts(self) -> np.ndarray:
        K = self.params.K
        c = np.zeros((K + 1, K + 1), dtype=np.int64)
        np.add.at(c, (self.queue[:-1], self.queue[1:]), 1)
        return c

    def blocking_rate(self) -> float:
        """Blocked arrivals per arriving packet."""
        a = int(self.arrivals.sum())
        return float(self.blocked.sum()) / a if a else 0.0

    def full_on_arrival_rate(self) -> float:
        """Fraction of arrivals that find the buffer full."""
        a = self.arrivals.astype(bool)
        return float(np.mean(self.queue[a] == self.params.K)) if a.any() else 0.0

    def conditional_sojourn(self, y: int) -> Empirical:
        s = self.sojourn[self.sojourn_found == y]
        if s.size == 0:
            raise InvalidParameter(f"no admitted packet found {y} in the system")
        counts = np.bincount(s - s.min())
        return Empirical(DiscretePmf.from_weights(int(s.min()), counts.astype(float)), int(s.size))

    def to_csv(self) -> str:
        lines = ["slot,queue,arrival,blocked,departure"]
        for n in range(self.slots):
            lines.append(
                f"{n},{self.queue[n]},{self.arrivals[n]},{self.blocked[n]},{self.departures[n]}"
            )
        return "\n".join(lines) + "\n"


def simulate_geo_queue(p: GeoQueueParams | tuple, horizon: int, cfg: SimConfig) -> QueueTrajectory:
    """Slot-by-slot Geo/Geo/1/K simulation starting from an empty queue.

    Within a slot the arrival is decided first and joins the buffer, then
    the server completes the head-of-line packet with probability ``mu``.
    A packet arriving to an empty queue can therefore leave in its own
    slot (sojourn 1), and an arrival finding ``K`` packets is admitted only
    if a departure happens in the same slot.  This ordering reproduces the
    one-slot transition probabilities ``alpha(1-mu)`` up and ``mu(1-alpha)``
    down.  ``p`` may also be an ``(alpha, mu, K)`` tuple, which allows
    ``alpha = 0``.
    """
    if horizon < 1:
        raise InvalidParameter("horizon must be >= 1")
    if isinstance(p, GeoQueueParams):
        alpha, mu, K = p.alpha, p.mu, p.K
    else:
        alpha, mu, K = float(p[0]), float(p[1]), int(p[2])
        if not (0.0 <= alpha <= 1.0 and 0.0 <= mu <= 1.0 and K >= 1):
            raise InvalidParameter("need 0 <= alpha, mu <= 1 and K >= 1")
    rng = cfg.rng(0)
    total = cfg.burn_in + horizon
    queue = np.empty(total, dtype=np.int64)
    arr = np.zeros(total, dtype=np.uint8)
    blk = np.zeros(total, dtype=np.uint8)
    dep = np.zeros(total, dtype=np.uint8)
    found: list[int] = []
    soj: list[int] = []
    fifo: deque = deque()
    q = 0
    for start in range(0, total, SLOT_CHUNK):
        n = min(SLOT_CHUNK, total - start)
        a_draw = (rng.random(n) < alpha).tolist()
        s_draw = (rng.random(n) < mu).tolist()
        for k in range(n):
            t = start + k
            queue[t] = q
            a = a_draw[k]
            s = s_draw[k]
            if a:
                arr[t] = 1
                if q < K or s:
                    fifo.append((t, q))
                    q += 1
                else:
                    blk[t] = 1
            if s and q:
                t0, y = fifo.popleft()
                q -= 1
                dep[t] = 1
                if t0 >= cfg.burn_in:
                    found.append(y)
                    soj.append(t - t0 + 1)
    b = cfg.burn_in
    meta = cfg.metadata() | {"alpha": alpha, "mu": mu, "capacity": K, "horizon": horizon}
    if not isinstance(p, GeoQueueParams):
        p = _LooseParams(alpha, mu, K)
    return QueueTrajectory(
        params=p,
        queue=queue[b:],
        arrivals=arr[b:],
        blocked=blk[b:],
        departures=dep[b:],
        sojourn_found=np.asarray(found, dtype=np.int64),
        sojourn=np.asarray(soj, dtype=np.int64),
        metadata=meta,
    )


@dataclass(frozen=True)
class _LooseParams:
    """Parameter holder for degenerate rates outside :class:`GeoQueueParams`."""

    alpha: float
    mu: float
    K: int
