"""Shift, coin, and evolution operators on the arc space, plus identities.

Matrix conventions (column = input basis arc, row = output basis arc):

* shift      S|i,j>   = |j, f(i,j)>        for the partition's map f
* coin       C|j,m>   = sum_m' H_j[m',m] |j,m'>   (block diagonal by origin)
* G-type     U = C S  so  <l,m|U|i,j> = delta(l,j) H_j[m, f(i,j)]
* A-type     U = S C  so  <l,m|U|i,j> = delta(m, f(i,l)) H_i[l, j]

Within the block of origin vertex j, local coordinates follow the ascending
neighbour order of j.  The residual functions below evaluate exact operator
identities; each returns a spectral-norm defect that is zero in exact
arithmetic, so tests can pin them near machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import (
    ArcSpace,
    Graph,
    Partition,
    flip_flop_partition,
    partition_permutation,
)

__all__ = [
    "CoinSet",
    "EvolutionOperator",
    "AdjacencySupportReport",
    "shift_operator",
    "coin_operator",
    "evolution",
    "operator_norm",
    "unitarity_defect",
    "random_unitary_coins",
    "shift_duality_residual",
    "inverse_walk_residual",
    "partition_change_residual",
    "g_type_reduction_residual",
    "a_type_reduction_residual",
    "line_digraph_adjacency",
    "adjacency_support_report",
]


def operator_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2))


def unitarity_defect(m: np.ndarray) -> float:
    return operator_norm(m.conj().T @ m - np.eye(m.shape[0]))


@dataclass(frozen=True, eq=False)
class CoinSet:
    """One unitary block per vertex, sized by that vertex's degree."""

    blocks: dict

    def __post_init__(self):
        clean = {int(v): np.array(h, dtype=complex) for v, h in self.blocks.items()}
        for h in clean.values():
            h.setflags(write=False)
        object.__setattr__(self, "blocks", clean)

    def validate(self, g: Graph, tol: float = 1e-12) -> None:
        if set(self.blocks) != set(g.vertices):
            raise ValueError("coin set must assign one block to every vertex")
        for v in g.vertices:
            h = self.blocks[v]
            d = g.degree(v)
            if h.shape != (d, d):
                raise ValueError(f"coin at vertex {v} has shape {h.shape}, expected {(d, d)}")
            defect = unitarity_defect(h)
            if defect > tol:
                raise ValueError(f"coin at vertex {v} is not unitary (defect {defect:.3e})")

    def block(self, v: int) -> np.ndarray:
        return self.blocks[v]

    def dagger(self) -> "CoinSet":
        return CoinSet({v: h.conj().T for v, h in self.blocks.items()})

    def inverse(self) -> "CoinSet":
        return CoinSet({v: np.linalg.inv(h) for v, h in self.blocks.items()})


@dataclass(frozen=True, eq=False)
class EvolutionOperator:
    """A single-step walk operator together with how it was assembled."""

    matrix: np.ndarray
    kind: str
    space: ArcSpace
    partition: Partition
    coins: CoinSet

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def shift_operator(space: ArcSpace, p: Partition) -> np.ndarray:
    """Permutation matrix sending arc (i, j) to (j, f(i, j))."""
    n = space.size
    s = np.zeros((n, n))
    for col, (i, j) in enumerate(space.arcs):
        s[space.index_of((j, p.successor(i, j))), col] = 1.0
    return s


def coin_operator(space: ArcSpace, coins: CoinSet) -> np.ndarray:
    """Block-diagonal coin; the block of vertex j occupies its origin slice."""
    coins.validate(space.graph)
    n = space.size
    c = np.zeros((n, n), dtype=complex)
    for v in space.graph.vertices:
        sl = space.origin_slice(v)
        c[sl, sl] = coins.block(v)
    return c


def evolution(space: ArcSpace, p: Partition, coins: CoinSet, kind: str = "G") -> EvolutionOperator:
    """One-step evolution: G-type applies the shift first, A-type the coin."""
    if kind not in ("G", "A"):
        raise ValueError(f"kind must be 'G' or 'A', got {kind!r}")
    s = shift_operator(space, p)
    c = coin_operator(space, coins)
    u = c @ s if kind == "G" else s @ c
    defect = unitarity_defect(u)
    if defect > 1e-12:
        raise ValueError(f"assembled evolution is not unitary (defect {defect:.3e})")
    return EvolutionOperator(u, kind, space, p, coins)


def random_unitary_coins(g: Graph, rng: np.random.Generator) -> CoinSet:
    """Independent Haar-distributed unitary coin at every vertex."""
    return CoinSet({v: _haar_unitary(g.degree(v), rng) for v in g.vertices})


def _haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d.conj() / np.abs(d))


# ---------------------------------------------------------------------------
# operator identities (each residual vanishes in exact arithmetic)
# ---------------------------------------------------------------------------


def shift_duality_residual(space: ArcSpace, p: Partition, coins: CoinSet, n: int) -> float:
    """|| (U_G)^n - S^dag (U_A)^n S ||: the two types are conjugate by the shift."""
    s = shift_operator(space, p)
    ug = evolution(space, p, coins, "G").matrix
    ua = evolution(space, p, coins, "A").matrix
    lhs = np.linalg.matrix_power(ug, n)
    rhs = s.T @ np.linalg.matrix_power(ua, n) @ s
    return operator_norm(lhs - rhs)


def inverse_walk_residual(space: ArcSpace, coins: CoinSet) -> float:
    """Flip-flop inversion: inverting a walk swaps its type and daggers coins.

    Checks inv(U_G[H]) = U_A[H^dag] and inv(U_A[H]) = U_G[H^dag]; returns the
    larger defect.  Holds only for the flip-flop partition, whose shift is an
    involution.
    """
    p = flip_flop_partition(space.graph)
    dag = coins.dagger()
    ug = evolution(space, p, coins, "G").matrix
    ua = evolution(space, p, coins, "A").matrix
    r1 = operator_norm(np.linalg.inv(ug) - evolution(space, p, dag, "A").matrix)
    r2 = operator_norm(np.linalg.inv(ua) - evolution(space, p, dag, "G").matrix)
    return max(r1, r2)


def _permuted_coins(g: Graph, base: Partition, target: Partition, coins: CoinSet) -> CoinSet:
    """Coins K_j = H_j P_j with P_j mapping base's local successor to target's."""
    blocks = {}
    for j in g.vertices:
        perm = partition_permutation(g, base, target, j).matrix(g.neighbors(j))
        blocks[j] = coins.block(j) @ perm
    return CoinSet(blocks)


def partition_change_residual(space: ArcSpace, p: Partition, p2: Partition, coins: CoinSet) -> float:
    """|| U_G,p2[H] - U_G,p[H P] ||: any G-type walk re-expressed on partition p."""
    target = evolution(space, p2, coins, "G").matrix
    rebuilt = evolution(space, p, _permuted_coins(space.graph, p, p2, coins), "G").matrix
    return operator_norm(target - rebuilt)


def g_type_reduction_residual(space: ArcSpace, p: Partition, coins: CoinSet) -> float:
    """G-type on any partition equals the dagger of a flip-flop A-type walk.

    U_G,p[H] = (U_A,ff[K^dag])^dag with K_j = H_j P_j, P_j the permutation
    from the flip-flop successor map to p's.
    """
    ff = flip_flop_partition(space.graph)
    k = _permuted_coins(space.graph, ff, p, coins)
    lhs = evolution(space, p, coins, "G").matrix
    rhs = evolution(space, ff, k.dagger(), "A").matrix.conj().T
    return operator_norm(lhs - rhs)


def a_type_reduction_residual(space: ArcSpace, p: Partition, coins: CoinSet) -> float:
    """A-type on any partition, conjugated by its shift, reduces the same way.

    U_A,p[H] = S_p (U_A,ff[K^dag])^dag S_p^dag with K as in the G-type case.
    """
    ff = flip_flop_partition(space.graph)
    k = _permuted_coins(space.graph, ff, p, coins)
    s = shift_operator(space, p)
    lhs = evolution(space, p, coins, "A").matrix
    rhs = s @ evolution(space, ff, k.dagger(), "A").matrix.conj().T @ s.T
    return operator_norm(lhs - rhs)


# ---------------------------------------------------------------------------
# line digraph support
# ---------------------------------------------------------------------------


def line_digraph_adjacency(space: ArcSpace) -> np.ndarray:
    """M[target, source] = 1 when source -> target compose head to tail."""
    n = space.size
    m = np.zeros((n, n))
    for col, (_i, j) in enumerate(space.arcs):
        m[space.origin_slice(j), col] = 1.0
    return m


@dataclass(frozen=True)
class AdjacencySupportReport:
    """Where each walk type lives relative to the line digraph adjacency.

    * a G-type walk is supported on the adjacency itself;
    * an A-type walk conjugated by its shift is (it then equals the G-type);
    * a flip-flop A-type walk is supported on the transpose.

    ``flip_flop_a_on_transpose`` is None when the partition checked is not
    the flip-flop one, since the transpose containment fails off it.
    """

    g_on_adjacency: bool
    conjugated_a_on_adjacency: bool
    flip_flop_a_on_transpose: bool | None
    max_leak: float
    ok: bool = field(default=False)

    def __post_init__(self):
        checks = [self.g_on_adjacency, self.conjugated_a_on_adjacency]
        if self.flip_flop_a_on_transpose is not None:
            checks.append(self.flip_flop_a_on_transpose)
        object.__setattr__(self, "ok", all(checks))


def _support_leak(op: np.ndarray, mask: np.ndarray) -> float:
    return float(np.abs(op[mask == 0.0]).max(initial=0.0))


def adjacency_support_report(space: ArcSpace, p: Partition, coins: CoinSet,
                             tol: float = 1e-12) -> AdjacencySupportReport:
    m = line_digraph_adjacency(space)
    s = shift_operator(space, p)
    ug = evolution(space, p, coins, "G").matrix
    ua = evolution(space, p, coins, "A").matrix
    leaks = [_support_leak(ug, m), _support_leak(s.T @ ua @ s, m)]
    ff_leak = None
    if p.is_flip_flop:
        ff_leak = _support_leak(ua, m.T)
        leaks.append(ff_leak)
    return AdjacencySupportReport(
        g_on_adjacency=leaks[0] <= tol,
        conjugated_a_on_adjacency=leaks[1] <= tol,
        flip_flop_a_on_transpose=None if ff_leak is None else ff_leak <= tol,
        max_leak=max(leaks),
    )
