"""
Norm-attainment sets M_T = {x in S_X : ||Tx|| = ||T||} as finite samples.

A sample is symmetric by construction: it stores a half set H and its
negation, ``points = [H; -H]``, so the antipode of point i is
``(i + m/2) mod m``. Components come from a radius graph on the points
(scipy KD-tree for the neighbour queries, networkx for connectivity).
The D u (-D) verdict reads the quotient of that graph by x ~ -x.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Literal, Optional

import networkx as nx
import numpy as np
from scipy.spatial import cKDTree

from config import settings
from geometry import Space, Vector, ZeroVectorError, candidate_pool, make_rng, refine_on_sphere

from .base import Operator
from .registry import op_norm_estimate

logger = logging.getLogger(__name__)

AttainmentKind = Literal["connected", "antipodal-pair", "antipodal-split", "other"]


class EmptyAttainmentError(RuntimeError):
    """Raised when no sampled point reaches ||T|| - tol (tol too tight for the budget)."""

    pass


@dataclass(frozen=True)
class AttainmentSample:
    """
    Discrete approximation of M_T.

    ``tol`` is absolute; every point satisfies ||Tx|| >= norm_value - tol.
    ``resolution`` is the edge radius of the component graph, the scale
    below which the sample cannot tell connected from disconnected.
    """

    points: np.ndarray
    values: np.ndarray
    domain: Space
    tol: float
    norm_value: float
    components: List[List[int]]
    antipode: np.ndarray
    antipodal_ok: bool
    is_subspace_sphere: bool
    resolution: float
    quotient_component_count: int
    kind: AttainmentKind
    subspace_basis: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        m = self.points.shape[0]
        if m == 0:
            raise ValueError("attainment sample must be nonempty")
        norms = np.asarray(self.domain.norm(self.points))
        if np.any(np.abs(norms - 1.0) > 1e-10):
            raise ValueError("attainment points must be unit vectors")
        slack = 1e-12 * max(self.norm_value, 1.0)
        if np.any(self.values < self.norm_value - self.tol - slack):
            raise ValueError("attainment point below norm_value - tol")
        flat = sorted(i for comp in self.components for i in comp)
        if flat != list(range(m)):
            raise ValueError("components must partition the sample points")

    @property
    def component_count(self) -> int:
        return len(self.components)

    def as_vectors(self) -> List[Vector]:
        return [Vector(row, self.domain) for row in self.points]


def _canonical_half(X: np.ndarray) -> np.ndarray:
    """Orient each row so its first clearly nonzero coordinate is positive, then sort lexicographically."""
    if X.shape[0] == 0:
        return X
    scale = np.abs(X).max(axis=1, keepdims=True)
    lead = np.argmax(np.abs(X) > 1e-9 * scale, axis=1)
    sgn = np.sign(X[np.arange(X.shape[0]), lead])
    sgn[sgn == 0] = 1.0
    H = X * sgn[:, None]
    order = np.lexsort(H.T[::-1])
    return H[order]


def _thin(H: np.ndarray, cap: int) -> np.ndarray:
    if H.shape[0] <= cap:
        return H
    idx = np.unique(np.linspace(0, H.shape[0] - 1, cap).round().astype(int))
    return H[idx]


def _component_graph(points: np.ndarray):
    """Radius graph; radius = clamp(LINK_FACTOR * median NN distance, LINK_FLOOR, LINK_CAP)."""
    m = points.shape[0]
    tree = cKDTree(points)
    if m > 1:
        dist, _ = tree.query(points, k=2)
        median_nn = float(np.median(dist[:, 1]))
    else:
        median_nn = 0.0
    radius = float(np.clip(settings.LINK_FACTOR * median_nn, settings.LINK_FLOOR, settings.LINK_CAP))
    graph = nx.Graph()
    graph.add_nodes_from(range(m))
    graph.add_edges_from(tree.query_pairs(radius))
    components = sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])
    return graph, components, radius


def _quotient_components(components: List[List[int]], antipode: np.ndarray) -> Optional[int]:
    """Components of the graph whose nodes are components joined to their antipodal component; None if unstable."""
    comp_of = np.empty(antipode.size, dtype=int)
    for k, comp in enumerate(components):
        comp_of[comp] = k
    quotient = nx.Graph()
    quotient.add_nodes_from(range(len(components)))
    for k, comp in enumerate(components):
        images = set(comp_of[antipode[comp]].tolist())
        if len(images) != 1:
            return None
        partner = images.pop()
        if sorted(antipode[comp].tolist()) != components[partner]:
            return None
        quotient.add_edge(k, partner)
    return nx.number_connected_components(quotient)


def antipodal_structure(s: AttainmentSample) -> bool:
    """
    True iff the sample splits as D u (-D) with D connected in the sample
    graph: the component set is stable under negation and the quotient by
    x ~ -x is connected.
    """
    return _quotient_components(s.components, s.antipode) == 1


def _is_subspace_sphere(T: Operator, points: np.ndarray, norm_value: float, tol: float, rng: np.random.Generator) -> bool:
    """
    Points lie on the unit sphere of their principal span, probed by random
    normalized combinations from that span.
    """
    _, sv, vt = np.linalg.svd(points, full_matrices=False)
    rank = int(np.sum(sv > settings.SUBSPACE_RANK_RTOL * sv[0]))
    basis = vt[:rank]
    probes = rng.standard_normal((settings.SUBSPACE_PROBES, rank)) @ basis
    probes = T.domain.normalize(probes)
    floor = norm_value - max(tol, settings.SUBSPACE_VALUE_RTOL * norm_value)
    return bool(np.all(T.image_norms(probes) >= floor))


def _kind(components: List[List[int]], antipodal_ok: bool, points: np.ndarray, radius: float) -> AttainmentKind:
    if len(components) == 1:
        return "connected"
    if not antipodal_ok:
        return "other"
    if len(components) == 2 and all(np.ptp(points[c], axis=0).max() < radius for c in components):
        return "antipodal-pair"
    return "antipodal-split"


def _exact_hilbert_half(T: Operator, rel_tol: float, budget: int, rng: np.random.Generator):
    """Top singular subspace V; returns (half points, basis, norm)."""
    _, s, vt = np.linalg.svd(T.matrix)
    group = min(settings.SINGULAR_GROUP_RTOL, rel_tol)
    k = int(np.sum(s >= s[0] * (1.0 - group)))
    basis = vt[:k]
    if k == 1:
        half = basis.copy()
    else:
        coeffs = rng.standard_normal((budget, k))
        half = T.domain.normalize(coeffs @ basis)
    return half, basis, float(s[0])


def attainment_sample(
    T: Operator,
    tol: Optional[float] = None,
    budget: Optional[int] = None,
    seed: Optional[int] = None,
) -> AttainmentSample:
    """
    Sample M_T.

    Args:
        T: nonzero operator.
        tol: attainment tolerance relative to ||T|| (default ATTAINMENT_TOL).
        budget: sphere sample size (default ATTAINMENT_BUDGET).
        seed: sampling seed (default SAMPLING_SEED).

    Raises:
        ZeroVectorError: T = 0.
        EmptyAttainmentError: nothing sampled reaches ||T|| - tol.
    """
    if T.is_zero():
        raise ZeroVectorError("the zero operator attains its norm on the whole sphere")
    rel_tol = settings.ATTAINMENT_TOL if tol is None else tol
    budget = settings.ATTAINMENT_BUDGET if budget is None else budget
    rng = make_rng(settings.SAMPLING_SEED if seed is None else seed)
    domain = T.domain
    basis = None

    if domain.is_euclidean and T.codomain.is_euclidean:
        half, basis, norm_value = _exact_hilbert_half(T, rel_tol, budget, rng)
        abs_tol = rel_tol * norm_value
    else:
        est = op_norm_estimate(T)
        pool = np.vstack([candidate_pool(domain, budget, rng), est.maximizer[None, :]])
        vals = T.image_norms(pool)
        keep = np.argsort(-vals, kind="stable")[: settings.REFINE_KEEP]
        refined, rvals = refine_on_sphere(T.image_norms, pool[keep], domain, rng)
        norm_value = float(max(est.value, vals.max(), rvals.max()))
        abs_tol = rel_tol * norm_value
        cand = np.vstack([pool, refined])
        cand_vals = np.concatenate([vals, rvals])
        half = cand[cand_vals >= norm_value - abs_tol]
        if half.shape[0] == 0:
            raise EmptyAttainmentError(
                f"no sampled point within {abs_tol:.3g} of ||T|| = {norm_value:.12g}; raise tol or budget"
            )

    half = _thin(_canonical_half(half), settings.GRAPH_MAX_POINTS)
    points = np.vstack([half, -half])
    m = points.shape[0]
    antipode = (np.arange(m) + m // 2) % m
    values = T.image_norms(points)

    _, components, radius = _component_graph(points)
    qcount = _quotient_components(components, antipode)
    antipodal_ok = qcount == 1
    subspace = _is_subspace_sphere(T, points, norm_value, abs_tol, rng)
    kind = _kind(components, antipodal_ok, points, radius)

    logger.debug(
        f"attainment: {m} points, {len(components)} components, radius {radius:.3g}, "
        f"kind={kind}, subspace_sphere={subspace}"
    )
    return AttainmentSample(
        points=points,
        values=values,
        domain=domain,
        tol=abs_tol,
        norm_value=norm_value,
        components=components,
        antipode=antipode,
        antipodal_ok=antipodal_ok,
        is_subspace_sphere=subspace,
        resolution=radius,
        quotient_component_count=-1 if qcount is None else qcount,
        kind=kind,
        subspace_basis=basis,
    )
