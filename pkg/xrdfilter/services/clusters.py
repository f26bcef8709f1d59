"""Closed-shell cluster geometry and pair-distance histograms.

Three families are built on integer or barycentric lattices and then
rescaled so that the shortest interatomic distance is 1/sqrt(2):

* cuboctahedral: fcc points with max(|x|,|y|,|z|) <= n and |x|+|y|+|z| <= 2n
* icosahedral: Mackay shells, 10k^2 + 2 atoms on shell k
* decahedral: Ino shells, each an elongated pentagonal bipyramid with
  {111} triangles on the caps and five {100} squares around the waist

All three families put 10k^2 + 2 atoms on shell k.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterator, List, Tuple

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist, pdist

from ..errors import Unsupported
from ..models.sample import NN_DISTANCE, Cluster, DistanceHistogram, StructureType
from ..utils.logging import get_logger

logger = get_logger(__name__)

MAX_SHELLS = 20
MERGE_TOLERANCE = 1e-6
# Rows per block when enumerating pair distances
PAIR_BLOCK = 512

_PHI = (1.0 + math.sqrt(5.0)) / 2.0


def magic_number(t: StructureType, n: int) -> int:
    """Closed-form atom count for shell index n (the same for every family)."""
    return (10 * n**3 + 15 * n**2 + 11 * n + 3) // 3


def _cuboctahedron(n: int) -> np.ndarray:
    r = np.arange(-n, n + 1)
    x, y, z = (a.reshape(-1) for a in np.meshgrid(r, r, r, indexing="ij"))
    mask = (
        ((x + y + z) % 2 == 0)
        & (np.maximum(np.maximum(np.abs(x), np.abs(y)), np.abs(z)) <= n)
        & (np.abs(x) + np.abs(y) + np.abs(z) <= 2 * n)
    )
    return np.column_stack([x[mask], y[mask], z[mask]]).astype(float)


def _icosahedron_vertices() -> np.ndarray:
    vertices = []
    for a, b in itertools.product((-1.0, 1.0), repeat=2):
        vertices.extend([(0.0, a, b * _PHI), (a, b * _PHI, 0.0), (b * _PHI, 0.0, a)])
    return np.array(vertices)


def _icosahedron_faces(vertices: np.ndarray) -> List[Tuple[int, int, int]]:
    edge = np.min(pdist(vertices))
    near = cdist(vertices, vertices) < edge * (1.0 + 1e-9)
    np.fill_diagonal(near, False)
    return [
        (i, j, k)
        for i, j, k in itertools.combinations(range(len(vertices)), 3)
        if near[i, j] and near[j, k] and near[i, k]
    ]


def _dedupe(points: np.ndarray) -> np.ndarray:
    tree = cKDTree(points)
    drop = {j for _, j in tree.query_pairs(MERGE_TOLERANCE)}
    keep = [i for i in range(points.shape[0]) if i not in drop]
    return points[keep]


def _mackay(n: int) -> np.ndarray:
    vertices = _icosahedron_vertices()
    faces = _icosahedron_faces(vertices)
    points = [np.zeros(3)]
    for k in range(1, n + 1):
        for i, j, l in faces:
            for a in range(k + 1):
                for b in range(k + 1 - a):
                    points.append(vertices[i] * (k - a - b) + vertices[j] * a + vertices[l] * b)
    return _dedupe(np.array(points))


def _ino_vertices() -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Unit-edge shell: apexes, upper and lower pentagons."""
    radius = 1.0 / (2.0 * math.sin(math.pi / 5))
    cap = math.sqrt(1.0 - radius**2)
    angles = 2.0 * math.pi * np.arange(5) / 5
    ring = np.column_stack([radius * np.cos(angles), radius * np.sin(angles), np.zeros(5)])
    upper = ring + [0.0, 0.0, 0.5]
    lower = ring - [0.0, 0.0, 0.5]
    apexes = np.array([[0.0, 0.0, 0.5 + cap], [0.0, 0.0, -0.5 - cap]])
    return apexes[0], apexes[1], upper, lower


def _decahedron(n: int) -> np.ndarray:
    top, bottom, upper, lower = _ino_vertices()
    points = [np.zeros(3)]
    for k in range(1, n + 1):
        for m in range(5):
            nxt = (m + 1) % 5
            for apex, ring in ((top, upper), (bottom, lower)):
                for a in range(k + 1):
                    for b in range(k + 1 - a):
                        points.append(apex * (k - a - b) + ring[m] * a + ring[nxt] * b)
            # {100} side face spanned by the pentagon edge and the unit drop to the lower ring
            for a in range(k + 1):
                for b in range(k + 1):
                    points.append(upper[m] * k + (upper[nxt] - upper[m]) * a + (lower[m] - upper[m]) * b)
    return _dedupe(np.array(points))


def min_distance(positions: np.ndarray) -> float:
    distances, _ = cKDTree(positions).query(positions, k=2)
    return float(np.min(distances[:, 1]))


def build_cluster(t: StructureType, n: int) -> Cluster:
    """Closed-shell cluster of type ``t`` with ``n`` shells, NN distance 1/sqrt(2)."""
    t = StructureType(t)
    if not 1 <= n <= MAX_SHELLS:
        raise Unsupported(f"shell index {n} outside [1, {MAX_SHELLS}]")
    if t is StructureType.CUBOCTAHEDRAL:
        positions = _cuboctahedron(n)
    elif t is StructureType.ICOSAHEDRAL:
        positions = _mackay(n)
    else:
        positions = _decahedron(n)
    positions = positions * (NN_DISTANCE / min_distance(positions))
    return Cluster(type=t, shells=n, positions=positions)


def _pair_blocks(positions: np.ndarray) -> Iterator[np.ndarray]:
    """Distances of every unordered pair, one row block at a time."""
    n = positions.shape[0]
    for start in range(0, n, PAIR_BLOCK):
        stop = min(start + PAIR_BLOCK, n)
        block = positions[start:stop]
        if stop - start > 1:
            yield pdist(block)
        if stop < n:
            yield cdist(block, positions[stop:]).reshape(-1)


def _group(distances: np.ndarray, step: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    keys = distances if step == 0.0 else np.rint(distances / step).astype(np.int64)
    unique, inverse = np.unique(keys, return_inverse=True)
    counts = np.bincount(inverse, minlength=unique.shape[0])
    sums = np.bincount(inverse, weights=distances, minlength=unique.shape[0])
    return unique, counts, sums


def distance_histogram(cluster: Cluster, quantum: float = 1e-9) -> DistanceHistogram:
    """Pair distances grouped into bins of width ``quantum`` x NN distance.

    Each bin is represented by the mean of its members and counts ordered
    pairs, so multiplicities are even and sum to N(N - 1). ``quantum = 0``
    groups only exactly equal distances.
    """
    if quantum < 0:
        raise ValueError("quantum must be nonnegative")
    step = quantum * NN_DISTANCE
    keys, counts, sums = [], [], []
    for block in _pair_blocks(cluster.positions):
        k, c, s = _group(block, step)
        keys.append(k)
        counts.append(c)
        sums.append(s)
    if not keys:
        return DistanceHistogram(distances=[], multiplicities=[], n_atoms=cluster.n_atoms)
    unique, inverse = np.unique(np.concatenate(keys), return_inverse=True)
    total = np.bincount(inverse, weights=np.concatenate(counts), minlength=unique.shape[0])
    summed = np.bincount(inverse, weights=np.concatenate(sums), minlength=unique.shape[0])
    distances = summed / total
    order = np.argsort(distances)
    return DistanceHistogram(
        distances=distances[order],
        multiplicities=2 * np.rint(total[order]).astype(np.int64),
        n_atoms=cluster.n_atoms,
    )


@lru_cache(maxsize=None)
def cached_histogram(t: StructureType, n: int, quantum: float) -> DistanceHistogram:
    """Histogram per (type, shells, quantum); entries are immutable once built."""
    histogram = distance_histogram(build_cluster(t, n), quantum)
    logger.debug("Histogram %s n=%d: %d atoms, %d distances", t.value, n, histogram.n_atoms, histogram.distances.size)
    return histogram
