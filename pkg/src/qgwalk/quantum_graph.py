"""Metric-graph eigenproblems driven by the arc walk at wavenumber k.

The walk U(k) is the G-type flip-flop evolution with the metric-graph coins.
A wavenumber k is an eigenvalue of the underlying differential problem
exactly when U(k) has eigenvalue 1; the smallest singular value of I - U(k)
is the root indicator scanned and refined here.

A stationary vector x of U(k) carries, on arc (i, j), the amplitude of the
wave outgoing from i after propagating the whole edge; dividing out that
propagation phase gives the outgoing amplitude at the near end,

    a(i,j) = x(i,j) exp(-i L (k - A(i,j))),

and the eigenfunction on the edge {i, j}, with x the distance from i, is

    Psi(x) = a(i,j) exp(+i (k - A(i,j)) x) + a(j,i) exp(+i (k - A(j,i)) (L - x)).

The incoming weight at i is b(i,j) = a(j,i) exp(i L (k + A(i,j))); vertex
values are a + b per incident edge, and the covariant outgoing flux at a
vertex is +i k sum_j (a - b).

``reduced_secular_determinant`` evaluates det(I - t U(k)) through a
vertex-sized determinant times explicit per-edge factors, without ever
assembling U; agreement with the direct determinant is an end-to-end check
of the whole construction.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .coins import (
    DIRICHLET,
    QuantumGraphParams,
    VertexWeights,
    boundary_phase,
    projector_coins,
    quantum_graph_coins,
)
from .graphs import ArcSpace, Graph, build_arc_space, flip_flop_partition
from .operators import EvolutionOperator, coin_operator, evolution, shift_operator

__all__ = [
    "PoleProximityError",
    "quantum_graph_walk",
    "stationarity_indicator",
    "Root",
    "SecularScan",
    "scan_roots",
    "StationaryVector",
    "stationary_vector",
    "outgoing_amplitudes",
    "b_coefficients",
    "EigenfunctionSample",
    "sample_eigenfunction",
    "BoundaryRow",
    "BoundaryReport",
    "boundary_condition_report",
    "reduced_secular_determinant",
    "characteristic_determinant",
    "stationarity_equivalences",
    "ScatteringFactorization",
    "scattering_factorization",
]


class PoleProximityError(ValueError):
    """A per-edge factor is too close to zero to divide by."""


def quantum_graph_walk(g: Graph, q: QuantumGraphParams, k: float) -> EvolutionOperator:
    """G-type flip-flop walk with the metric-graph coins at wavenumber k."""
    space = build_arc_space(g)
    return evolution(space, flip_flop_partition(g), quantum_graph_coins(g, q, k), "G")


def _walk_matrix(space: ArcSpace, q: QuantumGraphParams, shift: np.ndarray, k: float) -> np.ndarray:
    return coin_operator(space, quantum_graph_coins(space.graph, q, k)) @ shift


def stationarity_indicator(g: Graph, q: QuantumGraphParams, k: float) -> float:
    """Smallest singular value of I - U(k); zero exactly at eigenvalues."""
    u = quantum_graph_walk(g, q, k).matrix
    return float(np.linalg.svd(np.eye(u.shape[0]) - u, compute_uv=False)[-1])


# ---------------------------------------------------------------------------
# root scanning
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Root:
    k: float
    indicator: float
    multiplicity: int


@dataclass(frozen=True, eq=False)
class SecularScan:
    """Grid sweep of the root indicator plus the refined roots.

    ``reduced_determinants`` holds NaN wherever a per-edge factor sat inside
    the pole guard; the direct determinant has no such blow-ups.
    """

    ks: np.ndarray
    indicators: np.ndarray
    determinants: np.ndarray
    reduced_determinants: np.ndarray
    roots: tuple


def _golden_minimize(f, lo: float, hi: float, xtol: float) -> tuple[float, float]:
    """Golden-section minimum with best-evaluated tracking."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    evaluations: list[tuple[float, float]] = []

    def probe(x: float) -> float:
        y = f(x)
        evaluations.append((y, x))
        return y

    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = probe(c), probe(d)
    while b - a > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = probe(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = probe(d)
    best_y, best_x = min(evaluations)
    return best_x, best_y


def _worker_count() -> int:
    raw = os.environ.get("QGWALK_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"QGWALK_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def scan_roots(g: Graph, q: QuantumGraphParams, k_min: float, k_max: float,
               grid_points: int | None = None, refine_tol: float = 1e-10,
               root_tol: float = 1e-9, bracket_threshold: float = 0.1) -> SecularScan:
    """Locate wavenumbers where U(k) has a unit eigenvalue.

    Sweeps the indicator on a uniform grid (default 2000 points per unit of
    k), refines every local minimum under ``bracket_threshold`` by golden
    section to ``refine_tol``, and accepts a root when the refined indicator
    is at most ``root_tol``.  Multiplicity counts singular values of
    I - U(k) below 1e-8.  Set QGWALK_THREADS to evaluate grid points in a
    thread pool; results are ordered either way.
    """
    if not (0.0 < k_min < k_max):
        raise ValueError("need 0 < k_min < k_max")
    zero = [e for e, length in q.lengths.items() if length == 0.0]
    if zero:
        raise ValueError(f"cannot scan with zero-length edges: {zero}")
    space = build_arc_space(g)
    shift = shift_operator(space, flip_flop_partition(g))
    eye = np.eye(space.size)
    weights = VertexWeights.uniform(g)

    if grid_points is None:
        grid_points = max(50, int(math.ceil(2000.0 * (k_max - k_min))))
    if grid_points < 3:
        raise ValueError("need at least 3 grid points")
    ks = np.linspace(k_min, k_max, grid_points)

    def indicator(k: float) -> float:
        return float(np.linalg.svd(eye - _walk_matrix(space, q, shift, k),
                                   compute_uv=False)[-1])

    def grid_eval(k: float) -> tuple[float, complex, complex]:
        u = _walk_matrix(space, q, shift, k)
        ind = float(np.linalg.svd(eye - u, compute_uv=False)[-1])
        det = complex(np.linalg.det(eye - u))
        try:
            red = reduced_secular_determinant(g, q, float(k), 1.0, weights)
        except PoleProximityError:
            red = complex(float("nan"), float("nan"))
        return ind, det, red

    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(grid_eval, ks))
    else:
        rows = [grid_eval(k) for k in ks]
    indicators = np.array([r[0] for r in rows])
    dets = np.array([r[1] for r in rows])
    reduced = np.array([r[2] for r in rows])

    candidates = []
    for i in range(grid_points):
        if indicators[i] >= bracket_threshold:
            continue
        left_ok = i == 0 or indicators[i] <= indicators[i - 1]
        right_ok = i == grid_points - 1 or indicators[i] <= indicators[i + 1]
        if left_ok and right_ok:
            candidates.append((ks[max(i - 1, 0)], ks[min(i + 1, grid_points - 1)]))

    found = []
    for lo, hi in candidates:
        k_star, val = _golden_minimize(indicator, float(lo), float(hi), refine_tol)
        if val <= root_tol:
            svals = np.linalg.svd(eye - _walk_matrix(space, q, shift, k_star),
                                  compute_uv=False)
            found.append(Root(k_star, val, int(np.sum(svals <= 1e-8))))

    found.sort(key=lambda r: r.k)
    roots: list[Root] = []
    for r in found:
        if roots and abs(r.k - roots[-1].k) <= max(10.0 * refine_tol, 1e-9):
            if r.indicator < roots[-1].indicator:
                roots[-1] = r
            continue
        roots.append(r)
    return SecularScan(ks, indicators, dets, reduced, tuple(roots))


# ---------------------------------------------------------------------------
# stationary vectors and eigenfunctions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StationaryVector:
    """Unit arc vector with U(k) a = a, phase-fixed for reproducibility."""

    space: ArcSpace
    k: float
    amplitudes: np.ndarray
    defect: float


def stationary_vector(g: Graph, q: QuantumGraphParams, k: float,
                      root_tol: float = 1e-9) -> StationaryVector:
    """Nullspace direction of I - U(k); requires k to be a scanned-in root.

    The global phase is fixed by making the largest-magnitude component real
    and positive (first such index on ties).
    """
    op = quantum_graph_walk(g, q, k)
    u = op.matrix
    _, svals, vh = np.linalg.svd(np.eye(u.shape[0]) - u)
    defect = float(svals[-1])
    if defect > root_tol:
        raise ValueError(f"indicator {defect:.3e} at k={k!r}; not a root within {root_tol:g}")
    vec = vh[-1].conj()
    pivot = int(np.argmax(np.abs(vec)))
    vec = vec * (vec[pivot].conjugate() / abs(vec[pivot]))
    return StationaryVector(op.space, k, vec, defect)


def outgoing_amplitudes(space: ArcSpace, q: QuantumGraphParams, k: float,
                        x: np.ndarray) -> np.ndarray:
    """Per-arc outgoing amplitudes a from a stationary walk vector x.

    The walk vector holds each outgoing wave after it has crossed its edge;
    a(i,j) = x(i,j) exp(-i L (k - A(i,j))) undoes that propagation.
    """
    a = np.empty(space.size, dtype=complex)
    for idx, (i, j) in enumerate(space.arcs):
        a[idx] = x[idx] * np.exp(-1j * q.length(i, j) * (k - q.arc_potential(i, j)))
    return a


def b_coefficients(space: ArcSpace, q: QuantumGraphParams, k: float,
                   a: np.ndarray) -> np.ndarray:
    """Incoming weights: b(i,j) = a(j,i) exp(i L (k + A(i,j)))."""
    b = np.empty(space.size, dtype=complex)
    for idx, (i, j) in enumerate(space.arcs):
        phase = np.exp(1j * q.length(i, j) * (k + q.arc_potential(i, j)))
        b[idx] = a[space.index_of((j, i))] * phase
    return b


@dataclass(frozen=True, eq=False)
class EigenfunctionSample:
    """Edge-sampled eigenfunction with its reconstruction diagnostics.

    ``a_star``/``b_star`` are the per-arc outgoing/incoming amplitudes (the
    walk vector with propagation phases divided out).  ``edge_xs`` and
    ``edge_values`` are keyed by canonical edge and sampled along the arc
    (u, v) with u < v.  ``symmetry_residual`` compares the two directed
    parameterizations of each edge; ``pp_wq_max_diff`` compares the per-arc
    scalar formula against the vectorized diagonal-matrix route.
    """

    space: ArcSpace
    k: float
    stationarity_defect: float
    a_star: np.ndarray
    b_star: np.ndarray
    edge_xs: dict
    edge_values: dict
    vertex_values: dict
    symmetry_residual: float
    pp_wq_max_diff: float


def _pointwise_value(q: QuantumGraphParams, k: float, a_fwd: complex, a_rev: complex,
                     i: int, j: int, x: float) -> complex:
    length = q.length(i, j)
    fwd = a_fwd * np.exp(1j * (k - q.arc_potential(i, j)) * x)
    rev = a_rev * np.exp(1j * (k - q.arc_potential(j, i)) * (length - x))
    return fwd + rev


def sample_eigenfunction(sv: StationaryVector, q: QuantumGraphParams,
                         samples_per_edge: int = 33) -> EigenfunctionSample:
    """Evaluate the eigenfunction on every edge and run its self-checks."""
    if samples_per_edge < 2:
        raise ValueError("need at least 2 samples per edge")
    space = sv.space
    g = space.graph
    a = outgoing_amplitudes(space, q, sv.k, sv.amplitudes)
    b = b_coefficients(space, q, sv.k, a)

    edge_xs, edge_values = {}, {}
    symmetry = 0.0
    wq_diff = 0.0
    for (u, v) in g.edges:
        length = q.length(u, v)
        xs = np.linspace(0.0, length, samples_per_edge)
        a_fwd = complex(a[space.index_of((u, v))])
        a_rev = complex(a[space.index_of((v, u))])
        vals = np.array([_pointwise_value(q, sv.k, a_fwd, a_rev, u, v, float(x))
                         for x in xs])
        # vectorized route: Psi = D1(x) a + D2(x) (reversal a)
        d1 = np.exp(1j * (sv.k - q.arc_potential(u, v)) * xs)
        d2 = np.exp(1j * (sv.k - q.arc_potential(v, u)) * (length - xs))
        vec_vals = a_fwd * d1 + a_rev * d2
        wq_diff = max(wq_diff, float(np.abs(vals - vec_vals).max()))
        # the reverse arc parameterized from v must retrace the same values
        rev_vals = np.array([_pointwise_value(q, sv.k, a_rev, a_fwd, v, u, float(length - x))
                             for x in xs])
        symmetry = max(symmetry, float(np.abs(vals - rev_vals).max()))
        edge_xs[(u, v)] = xs
        edge_values[(u, v)] = vals

    vertex_values = {}
    for i in g.vertices:
        ab = [complex(a[space.index_of((i, j))] + b[space.index_of((i, j))])
              for j in g.neighbors(i)]
        vertex_values[i] = sum(ab) / len(ab)

    return EigenfunctionSample(space, sv.k, sv.defect, a, b, edge_xs, edge_values,
                               vertex_values, symmetry, wq_diff)


@dataclass(frozen=True)
class BoundaryRow:
    vertex: int
    condition: str
    residual: float
    ok: bool


@dataclass(frozen=True, eq=False)
class BoundaryReport:
    rows: tuple
    ok: bool


def boundary_condition_report(sample: EigenfunctionSample, q: QuantumGraphParams,
                              tol: float = 1e-8) -> BoundaryReport:
    """Check the three defining conditions of the edge-wise eigenfunction.

    I  (reported once, as vertex 0): the arc vector is stationary under U(k).
    II (per vertex): all incident edge traces agree at the vertex.
    III (per vertex): covariant outgoing flux +i k sum(a - b) equals the
        coupling term lambda * value; at DIRICHLET vertices the value itself
        must vanish.
    """
    space = sample.space
    g = space.graph
    rows = [BoundaryRow(0, "I", sample.stationarity_defect,
                        sample.stationarity_defect <= tol)]
    for i in g.vertices:
        traces = [complex(sample.a_star[space.index_of((i, j))]
                          + sample.b_star[space.index_of((i, j))])
                  for j in g.neighbors(i)]
        spread = max((abs(x - y) for x in traces for y in traces), default=0.0)
        rows.append(BoundaryRow(i, "II", float(spread), spread <= tol))

        flux = 1j * sample.k * sum(
            sample.a_star[space.index_of((i, j))] - sample.b_star[space.index_of((i, j))]
            for j in g.neighbors(i))
        if q.lam(i) == DIRICHLET:
            resid = abs(sample.vertex_values[i])
        else:
            resid = abs(flux - q.lam(i) * sample.vertex_values[i])
        rows.append(BoundaryRow(i, "III", float(resid), resid <= tol))
    return BoundaryReport(tuple(rows), all(r.ok for r in rows))


# ---------------------------------------------------------------------------
# determinant reduction and operator-level structure
# ---------------------------------------------------------------------------


def characteristic_determinant(g: Graph, q: QuantumGraphParams, k: float, t: complex,
                               weights: VertexWeights | None = None) -> complex:
    """det(I - t U(k)) from the assembled walk (projector-steered coins)."""
    if weights is None:
        weights = VertexWeights.uniform(g)
    space = build_arc_space(g)
    u = coin_operator(space, projector_coins(g, q, weights, k)) @ \
        shift_operator(space, flip_flop_partition(g))
    return complex(np.linalg.det(np.eye(space.size) - t * u))


def reduced_secular_determinant(g: Graph, q: QuantumGraphParams, k: float, t: complex,
                                weights: VertexWeights | None = None,
                                pole_guard: float = 1e-10) -> complex:
    """det(I - t U(k)) via a vertex-sized determinant and per-edge factors.

    det(I - t U) = prod_e (1 - t^2 e^{2 i k L_e})
                   * det(I_V - t T(t) + t^2 D(t))

    with, writing mu_i = 1 + e^{-i rho_i} and alpha_i the weight vector,

        T(t)[i, j] = mu_i conj(alpha_i[j]) alpha_j[i]
                     e^{i L (k + A(i,j))} / (1 - t^2 e^{2 i k L_ij})
        D(t)[i, i] = mu_i sum_l |alpha_i[l]|^2
                     e^{2 i k L_il} / (1 - t^2 e^{2 i k L_il})

    Raises PoleProximityError when any per-edge factor is within
    ``pole_guard`` of zero, since T and D divide by those factors.
    """
    if weights is None:
        weights = VertexWeights.uniform(g)
    if not (k > 0.0 and math.isfinite(k)):
        raise ValueError(f"wavenumber must be positive and finite, got {k}")
    n = g.vertex_count

    delta = {}
    for (u, v) in g.edges:
        d = 1.0 - t * t * np.exp(2j * k * q.length(u, v))
        if abs(d) < pole_guard:
            raise PoleProximityError(
                f"edge {(u, v)} factor |1 - t^2 e^(2ikL)| = {abs(d):.3e} under guard")
        delta[(u, v)] = d

    def mu(i: int) -> complex:
        if q.lam(i) == DIRICHLET:
            return 0.0 + 0.0j
        return 1.0 + np.exp(-1j * boundary_phase(q.lam(i), g.degree(i), k))

    big_t = np.zeros((n, n), dtype=complex)
    big_d = np.zeros((n, n), dtype=complex)
    for i in g.vertices:
        mi = mu(i)
        alpha_i = weights.vector(i)
        acc = 0.0 + 0.0j
        for pos, l in enumerate(g.neighbors(i)):
            dl = delta[(min(i, l), max(i, l))]
            acc += abs(alpha_i[pos]) ** 2 * np.exp(2j * k * q.length(i, l)) / dl
            alpha_l = weights.vector(l)
            phase = np.exp(1j * q.length(i, l) * (k + q.arc_potential(i, l)))
            big_t[i - 1, l - 1] = (mi * np.conj(alpha_i[pos])
                                   * alpha_l[_local(g, l, i)] * phase / dl)
        big_d[i - 1, i - 1] = mi * acc

    core = np.eye(n) - t * big_t + t * t * big_d
    prefactor = complex(np.prod([delta[e] for e in g.edges]))
    return prefactor * complex(np.linalg.det(core))


def _local(g: Graph, v: int, w: int) -> int:
    return g.neighbors(v).index(w)


def stationarity_equivalences(g: Graph, q: QuantumGraphParams, k: float,
                              a: np.ndarray) -> tuple[float, float, float, float]:
    """Four reformulations of || U a - a || that must agree exactly.

    For the flip-flop shift S (an involution) and coin C(k): with b = S a,
    the A-type walk with C, the G-type walk with C^dag, the A-type walk with
    C^dag on b, and the G-type walk with C on b all have the same defect.
    The defects agree for any arc vector; they additionally vanish when a is
    A-type stationary, i.e. the shift of a G-type stationary vector.
    """
    space = build_arc_space(g)
    p = flip_flop_partition(g)
    coins = quantum_graph_coins(g, q, k)
    s = shift_operator(space, p)
    b = s @ a
    ua = evolution(space, p, coins, "A").matrix
    ug = evolution(space, p, coins, "G").matrix
    ua_d = evolution(space, p, coins.dagger(), "A").matrix
    ug_d = evolution(space, p, coins.dagger(), "G").matrix
    return (
        float(np.linalg.norm(ua @ a - a)),
        float(np.linalg.norm(ug_d @ a - a)),
        float(np.linalg.norm(ua_d @ b - b)),
        float(np.linalg.norm(ug @ b - b)),
    )


@dataclass(frozen=True, eq=False)
class ScatteringFactorization:
    """U(k) split into a bare vertex-scattering step and edge phases."""

    vertex_step: EvolutionOperator
    edge_phases: np.ndarray
    residual: float


def scattering_factorization(g: Graph, q: QuantumGraphParams, k: float) -> ScatteringFactorization:
    """Write U(k) = diag(edge phases) (C[sigma] S) with phase-free sigma.

    sigma_j is the metric-graph coin with all propagation phases removed:
    (2 / (d_j + i lam_j / k)) J - I, or -I at a DIRICHLET vertex.  The
    returned residual is the spectral-norm defect of the factorization.
    """
    from .operators import CoinSet

    space = build_arc_space(g)
    p = flip_flop_partition(g)
    blocks = {}
    for j in g.vertices:
        d = g.degree(j)
        lam = q.lam(j)
        if lam == DIRICHLET:
            blocks[j] = -np.eye(d, dtype=complex)
        else:
            coeff = 2.0 / d if lam == 0.0 else 2.0 / (d + 1j * lam / k)
            blocks[j] = coeff * np.ones((d, d)) - np.eye(d)
    vertex_step = evolution(space, p, CoinSet(blocks), "G")
    phases = np.array([np.exp(1j * q.length(i, j) * (k - q.arc_potential(i, j)))
                       for (i, j) in space.arcs])
    u = quantum_graph_walk(g, q, k).matrix
    residual = float(np.linalg.norm(u - phases[:, None] * vertex_step.matrix, 2))
    return ScatteringFactorization(vertex_step, phases, residual)
