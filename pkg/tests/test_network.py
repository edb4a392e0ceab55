import json
import math

import numpy as np
import pytest

from netinduct import (ParseError, ValidationError, build_incidence,
                       build_laplacian, load_network, network_from_dict,
                       network_from_json, network_to_dict, save_network)
from conftest import make_network


def doc(nodes, edges, r=0.7, l=0.001, omega=2 * math.pi * 50):
    return {
        "frequency_rad_s": omega,
        "line": {"r_per_len": r, "l_per_len": l, "length_unit": "pu"},
        "nodes": [{"id": i, "role": "source", "r_out": 0.0, "l_out": 0.0} for i in nodes],
        "edges": [{"a": a, "b": b, "length": t} for a, b, t in edges],
    }


def test_load_minimal_two_node():
    net = network_from_dict(doc([1, 2], [(1, 2, 2.0)]))
    assert net.n == 2 and net.m == 1
    assert net.edges[0].length == 2.0
    assert net.r_per_len == 0.7 and net.l_per_len == 0.001


def test_load_star_fixture(fixtures_dir):
    net = load_network(fixtures_dir / "star.json")
    assert net.n == 4 and net.m == 3
    assert sorted(e.length for e in net.edges) == [5.0, 7.0, 9.0]


def test_disconnected_node_named():
    with pytest.raises(ValidationError, match="node 3"):
        network_from_dict(doc([1, 2, 3], [(1, 2, 1.0)]))


def test_parse_errors():
    with pytest.raises(ParseError):
        network_from_json("{not json")
    with pytest.raises(ParseError, match="frequency_rad_s"):
        d = doc([1, 2], [(1, 2, 1.0)])
        del d["frequency_rad_s"]
        network_from_dict(d)
    with pytest.raises(ParseError):
        network_from_json("[1, 2]")


@pytest.mark.parametrize("mutate, field", [
    (lambda d: d["edges"][0].update(length=-1.0), "edges[0].length"),
    (lambda d: d["nodes"][0].update(r_out=-0.1), "nodes[0].r_out"),
    (lambda d: d["nodes"][1].update(l_out=-1e-6), "nodes[1].l_out"),
    (lambda d: d["line"].update(r_per_len=0.0), "line.r_per_len"),
    (lambda d: d["line"].update(l_per_len=-2.0), "line.l_per_len"),
    (lambda d: d.update(frequency_rad_s=0.0), "frequency_rad_s"),
])
def test_validation_names_offending_field(mutate, field):
    d = doc([1, 2], [(1, 2, 1.0)])
    mutate(d)
    with pytest.raises(ValidationError) as exc:
        network_from_dict(d)
    assert field in str(exc.value)


def test_self_loop_and_duplicate_edge_rejected():
    with pytest.raises(ValidationError, match="self-loop"):
        network_from_dict(doc([1, 2], [(1, 2, 1.0), (2, 2, 1.0)]))
    with pytest.raises(ValidationError, match="duplicate"):
        network_from_dict(doc([1, 2], [(1, 2, 1.0), (2, 1, 3.0)]))


def test_bad_role_rejected():
    d = doc([1, 2], [(1, 2, 1.0)])
    d["nodes"][0]["role"] = "generator"
    with pytest.raises(ValidationError, match="role"):
        network_from_dict(d)


# --- incidence -------------------------------------------------------------

def test_incidence_single_edge():
    inc = build_incidence(make_network([(1, 2, 1.0)]))
    assert inc.matrix.tolist() == [[1.0], [-1.0]]
    assert inc.orientations == ((1, 2),)


def test_incidence_path3():
    inc = build_incidence(make_network([(1, 2, 1.0), (2, 3, 1.0)]))
    assert inc.matrix.shape == (3, 2)
    for col in inc.matrix.T:
        assert sorted(col) == [-1.0, 0.0, 1.0]
        assert col.sum() == 0.0


def _row_reduce_rank(M):
    """Plain Gaussian elimination rank oracle."""
    A = M.astype(float).copy()
    rank = 0
    for col in range(A.shape[1]):
        piv = None
        for row in range(rank, A.shape[0]):
            if abs(A[row, col]) > 1e-12:
                piv = row
                break
        if piv is None:
            continue
        A[[rank, piv]] = A[[piv, rank]]
        A[rank] /= A[rank, col]
        for row in range(A.shape[0]):
            if row != rank:
                A[row] -= A[row, col] * A[rank]
        rank += 1
    return rank


def test_incidence_complete4_rank():
    edges = [(a, b, 1.0) for a in range(1, 5) for b in range(a + 1, 5)]
    inc = build_incidence(make_network(edges))
    assert inc.matrix.shape == (4, 6)
    assert _row_reduce_rank(inc.matrix) == 3


def test_incidence_deterministic_orientation():
    net = make_network([(3, 1, 1.0), (2, 3, 1.0)])
    inc = build_incidence(net)
    assert inc.orientations == ((1, 3), (2, 3))


# --- Laplacian -------------------------------------------------------------

def test_laplacian_two_node():
    lap = build_laplacian(make_network([(1, 2, 2.0)]))
    assert np.allclose(lap.matrix, [[0.5, -0.5], [-0.5, 0.5]], atol=0)


def test_laplacian_complete4_unit():
    edges = [(a, b, 1.0) for a in range(1, 5) for b in range(a + 1, 5)]
    L = build_laplacian(make_network(edges)).matrix
    assert np.allclose(np.diag(L), 3.0)
    off = L - np.diag(np.diag(L))
    assert np.allclose(off[off != 0], -1.0)


def test_laplacian_star_diagonals(fixtures_dir):
    lap = build_laplacian(load_network(fixtures_dir / "star.json"))
    expect = [1 / 5, 1 / 7, 1 / 9, 1 / 5 + 1 / 7 + 1 / 9]
    assert np.allclose(np.diag(lap.matrix), expect, rtol=0, atol=1e-15)


def _edgewise_laplacian(net):
    index = {nid: k for k, nid in enumerate(net.node_ids())}
    L = np.zeros((net.n, net.n))
    for e in net.edges:
        w = 1.0 / e.length
        a, b = index[e.a], index[e.b]
        L[a, a] += w
        L[b, b] += w
        L[a, b] -= w
        L[b, a] -= w
    return L


ALL_FIXTURES = ["twonode.json", "bare.json", "path4.json", "complete4.json",
                "star.json", "ieee13_50hz.json", "ieee13_60hz.json"]


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_laplacian_matches_edgewise_assembly(fixtures_dir, name):
    net = load_network(fixtures_dir / name)
    lap = build_laplacian(net)
    assert np.max(np.abs(lap.matrix - _edgewise_laplacian(net))) <= 1e-12
    assert np.max(np.abs(lap.matrix.sum(axis=1))) <= 1e-12


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_laplacian_psd_random_vectors(fixtures_dir, name):
    net = load_network(fixtures_dir / name)
    L = build_laplacian(net).matrix
    rng = np.random.default_rng(7)
    for _ in range(100):
        x = rng.normal(size=net.n)
        assert x @ L @ x >= -1e-12 * (x @ x)


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_serialization_round_trip(fixtures_dir, tmp_path, name):
    net = load_network(fixtures_dir / name)
    out = tmp_path / "net.json"
    save_network(net, out)
    assert load_network(out) == net
    # dict round trip too
    assert network_from_dict(json.loads(json.dumps(network_to_dict(net)))) == net
