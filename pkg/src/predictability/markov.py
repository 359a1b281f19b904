"""Finite discrete-time Markov chains.

Construction validates stochasticity, irreducibility and aperiodicity and
solves for the stationary law.  Reversible chains can be decomposed
spectrally (cyclic Jacobi on the symmetrized matrix), which feeds the
spectral mixing bounds.
"""

from __future__ import annotations

import io
import json
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .dist import DiscretePmf, tv_dense
from .errors import NotReversible, NotStochastic, Periodic, Reducible

ROW_TOL = 1e-9
REVERSIBLE_TOL = 1e-9
DIRECT_SOLVE_MAX = 512


@dataclass(frozen=True, eq=False)
class MarkovChain:
    """Row-stochastic transition matrix with its stationary distribution.

    Use :func:`build_chain` rather than the constructor; it validates the
    matrix and computes ``stationary``.
    """

    transition: np.ndarray
    stationary: np.ndarray
    _squares: list = field(default_factory=list, repr=False, compare=False)

    @property
    def states(self) -> int:
        return self.transition.shape[0]

    def _square(self, k: int) -> np.ndarray:
        # P^(2^k); cached, each entry is immutable once appended
        sq = self._squares
        if not sq:
            sq.append(self.transition)
        while len(sq) <= k:
            sq.append(sq[-1] @ sq[-1])
        return sq[k]

    def power(self, L: int) -> np.ndarray:
        """``P^L`` by repeated squaring."""
        if L < 0:
            raise ValueError("L must be non-negative")
        out = np.eye(self.states)
        k = 0
        while L:
            if L & 1:
                out = out @ self._square(k)
            L >>= 1
            k += 1
        return out

    def row_power(self, x: int, L: int) -> np.ndarray:
        """Row ``x`` of ``P^L`` as a dense vector."""
        if not 0 <= x < self.states:
            raise IndexError(f"state {x} outside [0, {self.states})")
        if L < 0:
            raise ValueError("L must be non-negative")
        row = np.zeros(self.states)
        row[x] = 1.0
        k = 0
        while L:
            if L & 1:
                row = row @ self._square(k)
            L >>= 1
            k += 1
        return np.clip(row, 0.0, None)

    def to_dict(self) -> dict:
        return {"transition": self.transition.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> MarkovChain:
        return build_chain(data["transition"])


def _reachable(adj: np.ndarray, start: int) -> np.ndarray:
    seen = np.zeros(adj.shape[0], dtype=bool)
    seen[start] = True
    todo = deque([start])
    while todo:
        u = todo.popleft()
        nxt = np.flatnonzero(adj[u] & ~seen)
        seen[nxt] = True
        todo.extend(nxt.tolist())
    return seen


def _period(adj: np.ndarray) -> int:
    # gcd of (level[u] + 1 - level[v]) over all edges of a BFS layering
    n = adj.shape[0]
    level = np.full(n, -1)
    level[0] = 0
    todo = deque([0])
    while todo:
        u = todo.popleft()
        for v in np.flatnonzero(adj[u]):
            if level[v] < 0:
                level[v] = level[u] + 1
                todo.append(v)
    g = 0
    us, vs = np.nonzero(adj)
    for d in np.unique(level[us] + 1 - level[vs]):
        g = math.gcd(g, int(abs(d)))
        if g == 1:
            break
    return g


def _stationary_direct(P: np.ndarray) -> np.ndarray:
    """Grassmann-Taksar-Heyman elimination.

    Subtraction-free, so every entry keeps full relative accuracy and stays
    strictly positive for an irreducible chain, even at masses near 1e-300.
    """
    A = np.array(P, dtype=float)
    n = A.shape[0]
    for k in range(n - 1, 0, -1):
        s = A[k, :k].sum()
        A[:k, k] /= s
        A[:k, :k] += np.outer(A[:k, k], A[k, :k])
    pi = np.empty(n)
    pi[0] = 1.0
    for k in range(1, n):
        pi[k] = pi[:k] @ A[:k, k]
    return pi / pi.sum()


def stationary_power(P: np.ndarray, tol: float = 1e-12, max_iter: int = 1_000_000) -> np.ndarray:
    """Stationary law by power iteration until the residual drops below ``tol``."""
    P = np.asarray(P, dtype=float)
    pi = np.full(P.shape[0], 1.0 / P.shape[0])
    for _ in range(max_iter):
        nxt = pi @ P
        if np.abs(nxt - pi).sum() < tol:
            return nxt / nxt.sum()
        pi = nxt
    raise RuntimeError("power iteration did not converge")


def build_chain(transition) -> MarkovChain:
    """Validate a transition matrix and compute its stationary distribution.

    Raises:
        NotStochastic: non-square, negative entries, or rows not summing to 1.
        Reducible: some state cannot reach another.
        Periodic: the chain has period > 1.
    """
    P = np.array(transition, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
        raise NotStochastic(f"transition must be a non-empty square matrix, got shape {P.shape}")
    if not np.all(np.isfinite(P)) or P.min() < 0:
        raise NotStochastic("transition has negative or non-finite entries")
    rows = P.sum(axis=1)
    if np.max(np.abs(rows - 1.0)) > ROW_TOL:
        raise NotStochastic(f"row sums deviate from 1 by {np.max(np.abs(rows - 1.0)):.3e}")
    adj = P > 0
    if not (_reachable(adj, 0).all() and _reachable(adj.T.copy(), 0).all()):
        raise Reducible("chain is not irreducible")
    d = _period(adj)
    if d != 1:
        raise Periodic(f"chain has period {d}")
    if P.shape[0] <= DIRECT_SOLVE_MAX:
        pi = _stationary_direct(P)
    else:
        pi = stationary_power(P)
    P.flags.writeable = False
    pi.flags.writeable = False
    return MarkovChain(P, pi)


def check_reversibility(chain: MarkovChain, tol: float = REVERSIBLE_TOL) -> bool:
    """Detailed balance ``pi(x) P(x,y) == pi(y) P(y,x)`` for all pairs."""
    flow = chain.stationary[:, None] * chain.transition
    return bool(np.max(np.abs(flow - flow.T)) <= tol)


def l_step(chain: MarkovChain, x: int, L: int) -> DiscretePmf:
    """Law of the state ``L`` steps after starting in ``x``."""
    return DiscretePmf(0, chain.row_power(x, L))


def chain_tv(chain: MarkovChain, x: int, L: int) -> float:
    """``TV(P^L(x, .), pi)``."""
    return tv_dense(chain.row_power(x, L), chain.stationary)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigen-structure of a reversible chain.

    ``eigenfunctions[j]`` is ``f_j`` as a vector over states, orthonormal
    under the ``pi``-weighted inner product and sorted by descending
    eigenvalue, so ``eigenfunctions[0]`` is the constant function 1.
    """

    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    stationary: np.ndarray
    sweeps: int = 0

    @property
    def lambda_star(self) -> float:
        if self.eigenvalues.size < 2:
            return 0.0
        return float(np.max(np.abs(self.eigenvalues[1:])))

    @property
    def spectral_gap(self) -> float:
        return 1.0 - self.lambda_star

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("index,eigenvalue\n")
        for j, lam in enumerate(self.eigenvalues, start=1):
            buf.write(f"{j},{lam:.12g}\n")
        return buf.getvalue()


def jacobi_eigh(S: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray, int]:
    """Cyclic Jacobi eigensolver for a real symmetric matrix.

    Returns ``(eigenvalues, eigenvectors, sweeps)`` with eigenvectors as
    columns, unsorted.  Iterates until the off-diagonal Frobenius norm is
    below ``tol``.
    """
    A = np.array(S, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    # rotations below this size cannot keep the off-norm above tol
    skip = tol / (2.0 * n)
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off < tol:
            sweeps -= 1
            break
        for p in range(n - 1):
            row = A[p]
            for q in np.flatnonzero(np.abs(row[p + 1 :]) > skip) + p + 1:
                apq = A[p, q]
                if abs(apq) <= skip:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                Ap = A[p].copy()
                A[p] = c * Ap - s * A[q]
                A[q] = s * Ap + c * A[q]
                Ap = A[:, p].copy()
                A[:, p] = c * Ap - s * A[:, q]
                A[:, q] = s * Ap + c * A[:, q]
                A[p, q] = A[q, p] = 0.0
                Vp = V[:, p].copy()
                V[:, p] = c * Vp - s * V[:, q]
                V[:, q] = s * Vp + c * V[:, q]
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    return np.diag(A).copy(), V, sweeps


def spectral_decompose(chain: MarkovChain) -> SpectralDecomposition:
    """Spectral decomposition of a reversible chain.

    The chain is symmetrized as ``D^{1/2} P D^{-1/2}`` with ``D = diag(pi)``
    and diagonalized by :func:`jacobi_eigh`; eigenfunctions are
    ``D^{-1/2} v_j``.
    """
    if not check_reversibility(chain):
        raise NotReversible("spectral decomposition needs a reversible chain")
    pi = chain.stationary
    P = chain.transition
    # detailed balance makes S symmetric; averaging removes rounding asymmetry
    S = np.sqrt(np.outer(pi, 1.0 / pi)) * P
    S = 0.5 * (S + S.T)
    lam, V, sweeps = jacobi_eigh(S)
    F = (V / np.sqrt(pi)[:, None]).T
    for j in range(F.shape[0]):
        nz = np.flatnonzero(np.abs(F[j]) > 1e-12)
        if nz.size and F[j, nz[0]] < 0:
            F[j] = -F[j]
    order = sorted(range(lam.size), key=lambda j: (-round(lam[j], 12), -F[j, 0]))
    lam = lam[order]
    F = F[order]
    lam.flags.writeable = False
    F.flags.writeable = False
    return SpectralDecomposition(lam, F, pi, sweeps)


def mixing_tv_bound_full(spec: SpectralDecomposition, x: int, L: int) -> float:
    """``0.5 * sqrt(sum_{j>=2} lambda_j^{2L} f_j(x)^2)``."""
    lam = spec.eigenvalues[1:]
    f = spec.eigenfunctions[1:, x]
    return 0.5 * math.sqrt(math.fsum(lam ** (2 * L) * f * f))


def mixing_tv_bound_gap(spec: SpectralDecomposition, x: int, L: int) -> float:
    """``0.5 * lambda_*^L * sqrt(1/pi(x) - 1)``."""
    pi_x = spec.stationary[x]
    return 0.5 * spec.lambda_star**L * math.sqrt(max(0.0, 1.0 / pi_x - 1.0))
