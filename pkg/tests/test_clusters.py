import math

import numpy as np
import pytest
from scipy.spatial.distance import pdist

from xrdfilter.errors import Unsupported
from xrdfilter.models import Cluster, StructureType
from xrdfilter.models.sample import NN_DISTANCE
from xrdfilter.services.clusters import build_cluster, distance_histogram, magic_number, min_distance


@pytest.mark.parametrize("t", list(StructureType))
def test_closed_shell_counts(t):
    assert [build_cluster(t, n).n_atoms for n in (1, 2, 3)] == [13, 55, 147]
    assert [magic_number(t, n) for n in (1, 2, 3)] == [13, 55, 147]


def test_ino_decahedron_shape():
    cluster = build_cluster(StructureType.DECAHEDRAL, 4)
    assert cluster.n_atoms == magic_number(StructureType.DECAHEDRAL, 4) == 309
    positions = cluster.positions / NN_DISTANCE
    # fivefold axis along z: apexes on the axis, mirror plane at z = 0
    on_axis = positions[np.hypot(positions[:, 0], positions[:, 1]) < 1e-9]
    assert on_axis.shape[0] == 2 * 4 + 1
    mirrored = np.sort(np.round(positions * [1, 1, -1], 9), axis=0)
    np.testing.assert_allclose(mirrored, np.sort(np.round(positions, 9), axis=0), atol=1e-8)
    # the outer waist crosses five {100} faces with 4 atoms each; the 5 widest sit on the shared edges
    radius = np.hypot(positions[:, 0], positions[:, 1])
    waist = np.abs(positions[:, 2]) < 1e-9
    assert np.count_nonzero(waist & (radius > 0.7 * radius[waist].max())) == 20
    assert np.count_nonzero(waist & (radius > 0.99 * radius[waist].max())) == 5


@pytest.mark.parametrize("t", list(StructureType))
@pytest.mark.parametrize("n", [1, 2, 4])
def test_nearest_neighbour_distance(t, n):
    cluster = build_cluster(t, n)
    assert abs(min_distance(cluster.positions) - NN_DISTANCE) <= 1e-14
    assert abs(np.min(pdist(cluster.positions)) - NN_DISTANCE) <= 1e-14


def test_shell_cap():
    with pytest.raises(Unsupported):
        build_cluster(StructureType.ICOSAHEDRAL, 21)
    with pytest.raises(Unsupported):
        build_cluster(StructureType.CUBOCTAHEDRAL, 0)


def test_two_atom_histogram():
    cluster = Cluster(type=StructureType.CUBOCTAHEDRAL, shells=1, positions=[[0, 0, 0], [0, 0, 1.5]])
    hist = distance_histogram(cluster)
    np.testing.assert_allclose(hist.distances, [1.5])
    np.testing.assert_array_equal(hist.multiplicities, [2])


def test_single_atom_histogram_is_empty():
    cluster = Cluster(type=StructureType.CUBOCTAHEDRAL, shells=1, positions=[[0.0, 0.0, 0.0]])
    hist = distance_histogram(cluster)
    assert hist.distances.size == 0
    assert hist.n_atoms == 1


def test_cuboctahedron_histogram():
    hist = distance_histogram(build_cluster(StructureType.CUBOCTAHEDRAL, 1))
    assert hist.multiplicities.sum() == 156
    assert np.all(hist.multiplicities % 2 == 0)
    assert np.all(np.diff(hist.distances) > 0)
    # centre to shell and shell nearest neighbours share the NN distance
    assert hist.distances[0] == pytest.approx(NN_DISTANCE)
    assert hist.multiplicities[0] == 2 * (12 + 24)


def test_exact_grouping_matches_quantized():
    cluster = build_cluster(StructureType.ICOSAHEDRAL, 2)
    coarse = distance_histogram(cluster, 1e-9)
    exact = distance_histogram(cluster, 0.0)
    assert exact.multiplicities.sum() == coarse.multiplicities.sum() == 55 * 54
    assert exact.distances.size >= coarse.distances.size


def test_blocked_enumeration_covers_every_pair(monkeypatch):
    from xrdfilter.services import clusters

    cluster = build_cluster(StructureType.DECAHEDRAL, 3)
    whole = distance_histogram(cluster)
    monkeypatch.setattr(clusters, "PAIR_BLOCK", 7)
    blocked = distance_histogram(cluster)
    np.testing.assert_array_equal(whole.multiplicities, blocked.multiplicities)
    np.testing.assert_allclose(whole.distances, blocked.distances, rtol=1e-14)
    weighted = float(np.dot(blocked.distances, blocked.multiplicities))
    assert math.isclose(weighted, 2 * float(pdist(cluster.positions).sum()), rel_tol=1e-12)
