"""Adjacency, Laplacian, a dense Jacobi eigensolver and the Fiedler ordering."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .traffic import TrafficMatrix


class ConvergenceError(ArithmeticError):
    """The Jacobi iteration ran out of sweeps before the off-diagonal vanished."""

    def __init__(self, off_norm: float, sweeps: int):
        super().__init__(
            f"Jacobi eigensolver did not converge in {sweeps} sweeps "
            f"(off-diagonal Frobenius norm {off_norm:.3e})"
        )
        self.off_norm = off_norm
        self.sweeps = sweeps


@dataclass(frozen=True)
class SymmetricGraph:
    adj: np.ndarray

    def __post_init__(self):
        a = np.array(self.adj, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"adjacency must be square, got {a.shape}")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency is not symmetric")
        if np.any(np.diag(a) != 0):
            raise ValueError("adjacency has a nonzero diagonal")
        if np.any(a < 0):
            raise ValueError("adjacency has negative weights")
        a.setflags(write=False)
        object.__setattr__(self, "adj", a)

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    def subgraph(self, vertices) -> "SymmetricGraph":
        idx = np.asarray(vertices, dtype=int)
        return SymmetricGraph(self.adj[np.ix_(idx, idx)])


@dataclass(frozen=True)
class LaplacianMatrix:
    entries: np.ndarray
    degrees: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class FiedlerResult:
    """Second Laplacian eigenpair and the induced vertex ordering (0-based).

    ``degenerate`` is set when the second eigenvalue is repeated, in which
    case ``vector`` is just one member of the eigenspace.
    """

    lambda2: float
    vector: np.ndarray
    ordering: tuple[int, ...]
    degenerate: bool = False


@dataclass(frozen=True)
class Disconnected:
    """Returned by :func:`fiedler` instead of an ordering when the graph splits."""

    components: tuple[tuple[int, ...], ...]
    lambda2: float = 0.0


def symmetrize(directed: TrafficMatrix) -> SymmetricGraph:
    w = directed.weights
    return SymmetricGraph(w + w.T)


def laplacian(g: SymmetricGraph) -> LaplacianMatrix:
    degrees = g.adj.sum(axis=1)
    entries = np.diag(degrees) - g.adj
    entries.setflags(write=False)
    degrees.setflags(write=False)
    return LaplacianMatrix(entries, degrees)


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def eig_symmetric(m, rtol: float = 1e-12, max_sweeps: int = 100):
    """Full eigendecomposition of a dense symmetric matrix by cyclic Jacobi.

    Args:
        m: symmetric array, or a :class:`LaplacianMatrix`.
        rtol: stop once the off-diagonal Frobenius norm is below
            ``rtol * ||m||_F``.
        max_sweeps: sweep budget; exceeding it raises :class:`ConvergenceError`.

    Returns:
        ``(values, vectors)`` with eigenvalues ascending and the matching
        orthonormal eigenvectors in the columns of ``vectors``.
    """
    if isinstance(m, LaplacianMatrix):
        m = m.entries
    a = np.array(m, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got {a.shape}")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max(initial=0))):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    target = rtol * float(np.linalg.norm(a))
    # entries this small cannot move any eigenvalue by a representable amount
    tiny = np.finfo(float).tiny / np.finfo(float).eps

    sweeps = 0
    off = _off_norm(a)
    while off > target:
        if sweeps >= max_sweeps:
            raise ConvergenceError(off, sweeps)
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tiny:
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                # A <- J^T A J with J the (p, q) plane rotation
                ap = a[:, p].copy()
                aq = a[:, q]
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :]
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        off = _off_norm(a)

    values = np.diag(a).copy()
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]


def connected_components(adj: np.ndarray) -> tuple[tuple[int, ...], ...]:
    """Components of the graph with an edge wherever ``adj > 0``, each sorted,
    listed by smallest member."""
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        stack, comp = [s], []
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in np.flatnonzero(adj[u] > 0):
                if not seen[w]:
                    seen[w] = True
                    stack.append(int(w))
        comps.append(tuple(sorted(comp)))
    return tuple(comps)


def sign_normalize(u: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Flip ``u`` so its first component with magnitude above ``tol`` is positive."""
    for x in u:
        if abs(x) > tol:
            return -u if x < 0 else u
    return u


def sorted_ordering(u: np.ndarray) -> tuple[int, ...]:
    """Vertices by ascending component, ties by ascending index."""
    return tuple(int(i) for i in np.lexsort((np.arange(len(u)), u)))


def fiedler(m: LaplacianMatrix, adj: np.ndarray | None = None,
            connectivity_tol: float = 1e-9) -> FiedlerResult | Disconnected:
    """Fiedler value, sign-normalized Fiedler vector and sorted vertex order.

    A second eigenvalue at or below ``connectivity_tol * ||L||_F`` means the
    graph is disconnected; the components are returned instead. They are
    read from ``adj`` when given, otherwise from the Laplacian's
    off-diagonal pattern.
    """
    L = m.entries
    n = m.n
    if n < 2:
        raise ValueError("a Fiedler vector needs at least two vertices")
    values, vectors = eig_symmetric(L)
    scale = float(np.linalg.norm(L))
    lam2 = float(values[1])
    if lam2 <= connectivity_tol * scale:
        pattern = adj if adj is not None else -(L - np.diag(np.diag(L)))
        return Disconnected(connected_components(pattern), max(lam2, 0.0))
    degenerate = n > 2 and abs(values[2] - lam2) <= 1e-9 * lam2
    u = vectors[:, 1].copy()
    u /= np.linalg.norm(u)
    u = sign_normalize(u)
    u.setflags(write=False)
    return FiedlerResult(lam2, u, sorted_ordering(u), bool(degenerate))
