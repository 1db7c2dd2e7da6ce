"""Fiedler splitting cuts, recursive spectral bisection and an exhaustive oracle."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .spectral import (
    Disconnected,
    FiedlerResult,
    SymmetricGraph,
    fiedler,
    laplacian,
)

STRATEGIES = ("bisection", "sign", "ratio", "gap")

# flags recorded on a Partition
FLAG_DISCONNECTED = "disconnected"
FLAG_COMPONENT_SPLIT = "component-split"
FLAG_DEGENERATE = "degenerate-fiedler"

BRUTE_FORCE_MAX_N = 12


class InfeasibleError(ValueError):
    """The devices do not fit on the available switch ports."""


@dataclass(frozen=True)
class Partition:
    """Disjoint groups of 0-based device indices covering ``range(n)``.

    Groups are kept in serialization order; group ``k`` goes on switch ``k``.
    """

    n: int
    groups: tuple[tuple[int, ...], ...]
    capacity: int
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        groups = tuple(tuple(int(v) for v in g) for g in self.groups)
        object.__setattr__(self, "groups", groups)
        seen = [v for g in groups for v in g]
        if sorted(seen) != list(range(self.n)):
            raise ValueError(
                f"groups must cover devices 1..{self.n} exactly once, got "
                f"{[[v + 1 for v in g] for g in groups]}"
            )
        for k, g in enumerate(groups):
            if len(g) > self.capacity:
                raise ValueError(
                    f"group {k + 1} has {len(g)} devices, capacity is {self.capacity}"
                )

    @property
    def serialization(self) -> tuple[int, ...]:
        return tuple(v for g in self.groups for v in g)

    def group_of(self) -> np.ndarray:
        label = np.empty(self.n, dtype=int)
        for k, g in enumerate(self.groups):
            label[list(g)] = k
        return label

    @classmethod
    def consecutive(cls, n: int, capacity: int) -> "Partition":
        """Devices in index order, ``capacity`` per group."""
        groups = [tuple(range(s, min(s + capacity, n))) for s in range(0, n, capacity)]
        return cls(n, tuple(groups), capacity)


@dataclass(frozen=True)
class CutReport:
    cut_size: float
    pair_flows: dict = field(default_factory=dict)
    ratio: float | None = None


def _check_cover(g: SymmetricGraph, p: Partition) -> None:
    if p.n != g.n:
        raise ValueError(f"partition covers {p.n} devices but the graph has {g.n}")


def cut_size(g: SymmetricGraph, p: Partition) -> CutReport:
    """Crossing weight between every pair of groups, each edge counted once.

    ``ratio`` is only filled for two-group partitions.
    """
    _check_cover(g, p)
    flows = {}
    for a, b in combinations(range(len(p.groups)), 2):
        flows[(a, b)] = float(g.adj[np.ix_(p.groups[a], p.groups[b])].sum())
    total = float(sum(flows.values()))
    ratio = None
    if len(p.groups) == 2 and p.groups[0] and p.groups[1]:
        ratio = total / min(len(p.groups[0]), len(p.groups[1]))
    return CutReport(total, flows, ratio)


@dataclass(frozen=True)
class Split:
    v1: tuple[int, ...]
    v2: tuple[int, ...]
    threshold: float
    strategy: str
    fell_back: bool = False


def _crossing(adj: np.ndarray, a: Sequence[int], b: Sequence[int]) -> float:
    if not a or not b:
        return 0.0
    return float(adj[np.ix_(list(a), list(b))].sum())


def _by_threshold(u: np.ndarray, s: float) -> tuple[tuple[int, ...], tuple[int, ...]]:
    v1 = tuple(int(i) for i in np.flatnonzero(u > s))
    v2 = tuple(int(i) for i in np.flatnonzero(~(u > s)))
    return v1, v2


def _bisect_by_order(f: FiedlerResult) -> Split:
    order = f.ordering
    k = len(order) // 2
    lo, hi = order[:k], order[k:]
    s = 0.5 * (f.vector[order[k - 1]] + f.vector[order[k]]) if k else float("nan")
    return Split(tuple(sorted(hi)), tuple(sorted(lo)), float(s), "bisection")


def split(f: FiedlerResult, strategy: str, g: SymmetricGraph) -> Split:
    """Two-way Fiedler cut: ``v1 = {i : u_i > s}``, ``v2`` the rest.

    The splitting value ``s`` is the median (bisection), zero (sign), the
    prefix of the sorted order with the smallest weighted cut ratio (ratio),
    or the midpoint of the widest gap between consecutive sorted components
    (gap). A threshold that leaves one side empty falls back to bisection
    and sets ``fell_back``.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown split strategy {strategy!r}; expected one of {STRATEGIES}")
    u = np.asarray(f.vector, dtype=float)
    n = len(u)
    if n < 2:
        raise ValueError("cannot split fewer than two vertices")
    order = list(f.ordering)
    comps = u[order]

    if strategy == "ratio":
        best_k, best_phi = 1, math.inf
        for k in range(1, n):
            phi = _crossing(g.adj, order[:k], order[k:]) / min(k, n - k)
            if phi < best_phi:
                best_k, best_phi = k, phi
        s = 0.5 * (comps[best_k - 1] + comps[best_k])
        return Split(tuple(sorted(order[best_k:])), tuple(sorted(order[:best_k])),
                     float(s), strategy)

    if strategy == "bisection":
        s = float(np.median(u))
    elif strategy == "sign":
        s = 0.0
    else:
        gaps = np.diff(comps)
        k = int(np.argmax(gaps))
        s = float(0.5 * (comps[k] + comps[k + 1]))
    v1, v2 = _by_threshold(u, s)
    if v1 and v2:
        return Split(v1, v2, s, strategy)
    if strategy == "bisection":
        fb = _bisect_by_order(f)
        return Split(fb.v1, fb.v2, fb.threshold, strategy, fell_back=True)
    fb = split(f, "bisection", g)
    return Split(fb.v1, fb.v2, fb.threshold, strategy, fell_back=True)


def _first_fit_decreasing(comps, capacity):
    bins: list[list[int]] = []
    for comp in sorted(comps, key=lambda c: (-len(c), c[0])):
        for b in bins:
            if len(b) + len(comp) <= capacity:
                b.extend(comp)
                break
        else:
            bins.append(list(comp))
    return bins


class _RSB:
    def __init__(self, g: SymmetricGraph, n_ports: int):
        self.g = g
        self.n_ports = n_ports
        self.flags: set[str] = set()

    def run(self, vertices: list[int], d: int) -> list[list[int]]:
        n = self.n_ports
        if len(vertices) <= n:
            return [list(vertices)] if vertices else []
        # sign normalization refers to the lowest device index
        vertices = sorted(vertices)
        sub = self.g.adj[np.ix_(vertices, vertices)]
        if not sub.any():
            return [list(vertices[s:s + n]) for s in range(0, len(vertices), n)]
        result = fiedler(laplacian(SymmetricGraph(sub)), adj=sub)
        if isinstance(result, Disconnected):
            return self._components(vertices, result, d)
        if result.degenerate:
            self.flags.add(FLAG_DEGENERATE)
        ordered = [vertices[i] for i in result.ordering]
        half = d // 2
        cut = n * half
        return self.run(ordered[:cut], half) + self.run(ordered[cut:], d - half)

    def _components(self, vertices, result: Disconnected, d: int) -> list[list[int]]:
        self.flags.add(FLAG_DISCONNECTED)
        n = self.n_ports
        comps = [[vertices[i] for i in c] for c in result.components]
        comps.sort(key=lambda c: (-len(c), min(c)))
        large = [c for c in comps if len(c) > n]
        small = [c for c in comps if len(c) <= n]
        need = [math.ceil(len(c) / n) for c in large]
        bins = _first_fit_decreasing(small, n)
        if sum(need) + len(bins) <= d:
            groups = []
            for c, dc in zip(large, need):
                groups += self.run(c, dc)
            return groups + bins
        # whole components cannot be packed: serialize them back to back
        self.flags.add(FLAG_COMPONENT_SPLIT)
        serial = []
        for c in comps:
            if len(c) > 2:
                sub = self.g.adj[np.ix_(c, c)]
                r = fiedler(laplacian(SymmetricGraph(sub)), adj=sub)
                if isinstance(r, FiedlerResult):
                    c = [c[i] for i in r.ordering]
            serial += c
        return [serial[s:s + n] for s in range(0, len(serial), n)]


def rsb_optimized(g: SymmetricGraph, n_ports: int, d_switches: int) -> Partition:
    """Recursive spectral bisection into groups of at most ``n_ports`` devices.

    Each level sorts the current group by its own Fiedler vector, gives the
    first ``n_ports * (d // 2)`` vertices to a branch with ``d // 2``
    switches and the remainder to a branch with ``d - d // 2``. Recursion
    stops once a group fits on one switch.
    """
    if n_ports < 1 or d_switches < 1:
        raise ValueError("n_ports and d_switches must both be at least 1")
    if g.n > n_ports * d_switches:
        raise InfeasibleError(
            f"{g.n} devices exceed capacity {n_ports} ports x {d_switches} switches"
            f" = {n_ports * d_switches}"
        )
    rsb = _RSB(g, n_ports)
    groups = rsb.run(list(range(g.n)), d_switches)
    return Partition(g.n, tuple(tuple(x) for x in groups), n_ports, tuple(sorted(rsb.flags)))


def brute_force_min_cut(g: SymmetricGraph, n_ports: int, d_switches: int) -> Partition:
    """Exhaustive minimum-cut assignment into at most ``d_switches`` groups.

    Assignments are enumerated as restricted growth strings in lexicographic
    order, so among equal cuts the lexicographically smallest one wins.
    """
    n = g.n
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force is limited to {BRUTE_FORCE_MAX_N} vertices, got {n}")
    if n > n_ports * d_switches:
        raise InfeasibleError(f"{n} devices exceed capacity {n_ports * d_switches}")
    adj = g.adj
    label = [0] * n
    sizes = [0] * d_switches
    best = [math.inf, None]

    def rec(i, used, partial):
        if partial >= best[0]:
            return
        if i == n:
            best[0], best[1] = partial, label.copy()
            return
        for k in range(min(used + 1, d_switches)):
            if sizes[k] >= n_ports:
                continue
            added = sum(adj[i, j] for j in range(i) if label[j] != k)
            label[i] = k
            sizes[k] += 1
            rec(i + 1, max(used, k + 1), partial + added)
            sizes[k] -= 1

    rec(0, 0, 0.0)
    assignment = best[1] or []
    k_used = max(assignment, default=-1) + 1
    groups = tuple(tuple(v for v in range(n) if assignment[v] == k) for k in range(k_used))
    return Partition(n, groups, n_ports)
